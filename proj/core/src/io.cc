// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowground/io.h"

#include <bit>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace flowground {
namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view field, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  const auto [end, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || end != field.data() + field.size()) {
    throw ValidationError("line " + std::to_string(line) +
                          ": not a number: '" + std::string(field) + "'");
  }
  return v;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint32_t get_u32(std::string_view s, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + b]))
         << (8 * b);
  }
  return v;
}

json parse_json(std::string_view document) {
  try {
    return json::parse(document);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
}

std::vector<NodeId> id_array(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key) || !doc[key].is_array()) {
    throw ValidationError(std::string("JSON document needs a \"") + key +
                          "\" array");
  }
  std::vector<NodeId> out;
  for (const auto& v : doc[key]) {
    if (!v.is_number_integer()) {
      throw ValidationError(std::string("\"") + key +
                            "\" entries must be integers");
    }
    out.push_back(v.get<NodeId>());
  }
  return out;
}

json finite_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

}  // namespace

std::string matrix_to_csv(const Matrix& m) {
  std::string out = "# rows=" + std::to_string(m.rows()) +
                    " cols=" + std::to_string(m.cols()) + "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Matrix matrix_from_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  long declared_rows = -1;
  long declared_cols = -1;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      long r = 0;
      long c = 0;
      if (std::sscanf(std::string(line).c_str(), "# rows=%ld cols=%ld", &r,
                      &c) == 2) {
        declared_rows = r;
        declared_cols = c;
      }
      continue;
    }
    std::vector<double> values;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      values.push_back(parse_double(line.substr(start, comma - start), line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(rows.front().size()) +
                            " columns, got " + std::to_string(values.size()));
    }
    rows.push_back(std::move(values));
  }
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  if (declared_rows >= 0 &&
      (static_cast<std::size_t>(declared_rows) != rows.size() ||
       static_cast<std::size_t>(declared_cols) != cols)) {
    throw ValidationError("CSV header declares " +
                          std::to_string(declared_rows) + "x" +
                          std::to_string(declared_cols) + " but data is " +
                          std::to_string(rows.size()) + "x" +
                          std::to_string(cols));
  }
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

std::string matrix_to_binary(const Matrix& m) {
  std::string out(kMatrixMagic.begin(), kMatrixMagic.end());
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  out.reserve(kMatrixHeaderBytes + 8 * m.flat().size());
  for (double v : m.flat()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
    }
  }
  return out;
}

Matrix matrix_from_binary(std::string_view bytes) {
  if (bytes.size() < kMatrixHeaderBytes ||
      std::memcmp(bytes.data(), kMatrixMagic.data(), kMatrixMagic.size()) != 0) {
    throw ValidationError("not a binary matrix (bad magic)");
  }
  const std::size_t rows = get_u32(bytes, 8);
  const std::size_t cols = get_u32(bytes, 12);
  if (bytes.size() != kMatrixHeaderBytes + 8 * rows * cols) {
    throw ValidationError("binary matrix size does not match its header");
  }
  Matrix m(rows, cols);
  auto flat = m.flat();
  for (std::size_t k = 0; k < flat.size(); ++k) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(
                  bytes[kMatrixHeaderBytes + 8 * k + b]))
              << (8 * b);
    }
    flat[k] = std::bit_cast<double>(bits);
  }
  return m;
}

Matrix read_matrix(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  try {
    if (data.size() >= kMatrixMagic.size() &&
        std::memcmp(data.data(), kMatrixMagic.data(), kMatrixMagic.size()) ==
            0) {
      return matrix_from_binary(data);
    }
    return matrix_from_csv(data);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  write_file(path, path.extension() == ".bin" ? matrix_to_binary(m)
                                              : matrix_to_csv(m));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view data) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("failed writing " + path.string());
}

FlowGraph read_flow_graph(const std::filesystem::path& path) {
  const std::string doc = read_file(path);
  try {
    return parse_flow_graph(doc);
  } catch (const CycleError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string alignment_to_json(const Alignment& a, bool with_labels) {
  json doc;
  doc["cost"] = finite_or_null(a.cost);
  doc["tau_star"] = a.tau_star;
  json segments = json::object();
  for (const auto& [id, span] : a.segments) {
    segments[std::to_string(id)] = {span.first, span.second};
  }
  doc["segments"] = segments;
  doc["dropped"] = a.dropped;
  if (with_labels) doc["labels"] = a.labels;
  return doc.dump(2) + "\n";
}

std::vector<NodeId> labels_from_json(std::string_view document) {
  return id_array(parse_json(document), "labels");
}

std::string ground_truth_to_json(const std::vector<NodeId>& labels,
                                 const std::vector<NodeId>& sort) {
  json doc;
  doc["labels"] = labels;
  doc["sort"] = sort;
  return doc.dump(2) + "\n";
}

std::vector<NodeId> sort_from_json(std::string_view document) {
  return id_array(parse_json(document), "sort");
}

std::string bench_report_to_json(const BenchReport& r) {
  json doc;
  doc["n_sorts"] = r.n_sorts;
  doc["n_tsort_nodes"] = r.n_tsort_nodes;
  doc["repeats"] = r.repeats;
  doc["t_brute_ms"] = r.t_brute_ms;
  doc["t_graph_ms"] = r.t_graph_ms;
  doc["speedup"] = finite_or_null(r.speedup);
  doc["rho_predicted"] = r.rho_predicted;
  doc["brute_cost"] = finite_or_null(r.brute_cost);
  doc["graph_cost"] = finite_or_null(r.graph_cost);
  return doc.dump(2) + "\n";
}

}  // namespace flowground

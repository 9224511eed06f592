// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0
//
// File formats: dense matrices as CSV ("# rows=K cols=N" header) or raw
// binary, alignment and ground-truth JSON.

#ifndef FLOWGROUND_IO_H_
#define FLOWGROUND_IO_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "flowground/align.h"
#include "flowground/brute_force.h"
#include "flowground/flow_graph.h"
#include "flowground/matrix.h"

namespace flowground {

// Binary layout: 8-byte magic, uint32 rows, uint32 cols (little endian),
// then rows*cols little-endian float64 values in row-major order.
inline constexpr std::array<char, 8> kMatrixMagic = {'F', 'G', 'M', 'A',
                                                     'T', 'F', '6', '4'};
inline constexpr std::size_t kMatrixHeaderBytes = 16;

std::string matrix_to_csv(const Matrix& m);
Matrix matrix_from_csv(std::string_view text);
std::string matrix_to_binary(const Matrix& m);
Matrix matrix_from_binary(std::string_view bytes);

// Sniffs the binary magic, otherwise parses CSV.
Matrix read_matrix(const std::filesystem::path& path);
// Binary when the extension is ".bin", CSV otherwise.
void write_matrix(const std::filesystem::path& path, const Matrix& m);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

FlowGraph read_flow_graph(const std::filesystem::path& path);

// {cost, tau_star, segments:{id:[start,end]}, dropped:[...]} plus "labels"
// when requested.
std::string alignment_to_json(const Alignment& a, bool with_labels);

// Reads the "labels" array of an alignment or ground-truth document.
std::vector<NodeId> labels_from_json(std::string_view document);

// {"labels":[...], "sort":[...]}
std::string ground_truth_to_json(const std::vector<NodeId>& labels,
                                 const std::vector<NodeId>& sort);
std::vector<NodeId> sort_from_json(std::string_view document);

std::string bench_report_to_json(const BenchReport& r);

}  // namespace flowground

#endif  // FLOWGROUND_IO_H_

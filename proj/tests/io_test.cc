// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowground/io.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

namespace flowground {
namespace {

Matrix sample() {
  return Matrix(2, 3, {0.1, -2.5, 1e-300, 3.0, 1.0 / 3.0, -0.0});
}

TEST(MatrixIo, CsvRoundTrip) {
  const Matrix m = sample();
  const std::string csv = matrix_to_csv(m);
  EXPECT_EQ(csv.rfind("# rows=2 cols=3\n", 0), 0u);
  EXPECT_EQ(matrix_from_csv(csv), m);
}

TEST(MatrixIo, CsvWithoutHeader) {
  const Matrix m = matrix_from_csv("1, 2\n3,4\n\n");
  EXPECT_EQ(m, Matrix(2, 2, {1, 2, 3, 4}));
}

TEST(MatrixIo, CsvErrors) {
  EXPECT_THROW(matrix_from_csv("1,2\n3\n"), ValidationError);
  EXPECT_THROW(matrix_from_csv("1,x\n"), ValidationError);
  EXPECT_THROW(matrix_from_csv("# rows=3 cols=2\n1,2\n"), ValidationError);
}

TEST(MatrixIo, BinaryRoundTrip) {
  const Matrix m = sample();
  const std::string bytes = matrix_to_binary(m);
  EXPECT_EQ(bytes.size(), kMatrixHeaderBytes + 6 * 8);
  EXPECT_EQ(bytes.substr(0, 8), "FGMATF64");
  EXPECT_EQ(bytes[8], 2);
  EXPECT_EQ(bytes[12], 3);
  EXPECT_EQ(matrix_from_binary(bytes), m);
  EXPECT_THROW(matrix_from_binary(bytes.substr(0, 20)), ValidationError);
  EXPECT_THROW(matrix_from_binary("NOTMAGIC00000000"), ValidationError);
}

TEST(MatrixIo, FilesSniffFormat) {
  const auto dir = std::filesystem::temp_directory_path() / "flowground_io_test";
  std::filesystem::remove_all(dir);
  const Matrix m = sample();
  write_matrix(dir / "a.bin", m);
  write_matrix(dir / "b.csv", m);
  EXPECT_EQ(read_matrix(dir / "a.bin"), m);
  EXPECT_EQ(read_matrix(dir / "b.csv"), m);
  EXPECT_THROW(read_matrix(dir / "missing.csv"), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST(AlignmentIo, Json) {
  Alignment a;
  a.cost = 1.5;
  a.tau_star = {1, 0};
  a.segments[1] = {0, 1};
  a.segments[0] = {3, 3};
  a.dropped = {2};
  a.labels = {1, 1, -1, 0};
  const std::string doc = alignment_to_json(a, true);
  EXPECT_NE(doc.find("\"tau_star\""), std::string::npos);
  EXPECT_EQ(labels_from_json(doc), a.labels);
  EXPECT_EQ(alignment_to_json(a, false).find("\"labels\""), std::string::npos);
  EXPECT_THROW(labels_from_json(alignment_to_json(a, false)), ValidationError);
}

TEST(GroundTruthIo, Json) {
  const std::string doc = ground_truth_to_json({0, 0, -1, 1}, {0, 1});
  EXPECT_EQ(labels_from_json(doc), (std::vector<NodeId>{0, 0, -1, 1}));
  EXPECT_EQ(sort_from_json(doc), (std::vector<NodeId>{0, 1}));
  EXPECT_THROW(labels_from_json("not json"), ValidationError);
}

}  // namespace
}  // namespace flowground

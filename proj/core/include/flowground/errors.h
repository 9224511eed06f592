// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FLOWGROUND_ERRORS_H_
#define FLOWGROUND_ERRORS_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "flowground/types.h"

namespace flowground {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad documents, shape mismatches, unknown ids.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The flow graph contains a directed cycle. `cycle()` lists one offending
// cycle as a node sequence whose last element has an edge back to the first.
class CycleError : public ValidationError {
 public:
  CycleError(const std::string& what, std::vector<NodeId> cycle)
      : ValidationError(what), cycle_(std::move(cycle)) {}
  const std::vector<NodeId>& cycle() const { return cycle_; }

 private:
  std::vector<NodeId> cycle_;
};

// The problem admits no solution, e.g. more steps than clips.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A configured size limit (sort count, meta-graph size, node guard) was hit.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

}  // namespace flowground

#endif  // FLOWGROUND_ERRORS_H_

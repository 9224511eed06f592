// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FLOWGROUND_TOOLS_SCHEMA_H_
#define FLOWGROUND_TOOLS_SCHEMA_H_

#include <string>

namespace flowground::cli {

// JSON Schema documents for every JSON format the CLI reads or writes,
// keyed by format name.
std::string schema_document();

}  // namespace flowground::cli

#endif  // FLOWGROUND_TOOLS_SCHEMA_H_

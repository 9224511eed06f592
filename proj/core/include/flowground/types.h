// Copyright 2026 The flowground Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef FLOWGROUND_TYPES_H_
#define FLOWGROUND_TYPES_H_

namespace flowground {

// Dense 0-based flow-graph node id.
using NodeId = int;

}  // namespace flowground

#endif  // FLOWGROUND_TYPES_H_

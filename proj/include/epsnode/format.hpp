// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_FORMAT_HPP
#define EPSNODE_FORMAT_HPP

#include <string>
#include <string_view>

namespace epsnode {

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);
// Throws std::invalid_argument unless the whole string is a number.
double parse_double(std::string_view s);

} // namespace epsnode

#endif

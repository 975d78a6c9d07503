// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_HEATMAP_HPP
#define EPSNODE_HEATMAP_HPP

#include "epsnode/novelty.hpp"

#include <string>

namespace epsnode {

// Both renderings min-max scale the present cells of one map; the top row is j = ny - 1.

// Character ramp rendering with a legend giving the value range. Missing cells print as '?'.
std::string render_ascii(const ErrorMap &map, const std::string &title);

// Plain (P2) 8-bit PGM, one pixel per cell scaled by `pixels_per_cell`. Missing cells are 0.
std::string render_pgm(const ErrorMap &map, int pixels_per_cell = 1);

} // namespace epsnode

#endif

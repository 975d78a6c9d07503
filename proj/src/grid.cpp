// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include "epsnode/grid.hpp"
#include "epsnode/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace epsnode {

void GridMap::validate() const
{
    if (nx < 2 || ny < 2)
        throw DomainError("grid needs at least 2 x 2 cells");
    if (!(cell_size > 0.0))
        throw DomainError("grid cell size must be positive");
}

GridMap default_grid()
{
    return GridMap{{1.0, 1.25}, 8, 5, 0.5};
}

CellIndex cell_index(const GridMap &grid, Point2 p)
{
    const Rect ext = grid.extent();
    if (!ext.contains(p))
        throw DomainError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") outside the grid");
    const int i = static_cast<int>(std::floor((p.x - grid.origin.x) / grid.cell_size));
    const int j = static_cast<int>(std::floor((p.y - grid.origin.y) / grid.cell_size));
    return {std::clamp(i, 0, grid.nx - 1), std::clamp(j, 0, grid.ny - 1)};
}

} // namespace epsnode

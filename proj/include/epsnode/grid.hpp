// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_GRID_HPP
#define EPSNODE_GRID_HPP

#include "epsnode/geometry.hpp"

#include <cstddef>

namespace epsnode {

struct CellIndex
{
    int i = 0;
    int j = 0;

    friend bool operator==(const CellIndex &, const CellIndex &) = default;
    friend auto operator<=>(const CellIndex &, const CellIndex &) = default;
};

// Regular fingerprint grid. Cells are addressed (i, j) with i along x; linear index is j * nx + i.
struct GridMap
{
    Point2 origin;
    int nx = 8;
    int ny = 5;
    double cell_size = 0.5;

    void validate() const; // nx, ny >= 2 and cell_size > 0

    std::size_t cell_count() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    Rect extent() const { return {origin, {origin.x + nx * cell_size, origin.y + ny * cell_size}}; }
    bool valid(CellIndex c) const { return c.i >= 0 && c.i < nx && c.j >= 0 && c.j < ny; }
    std::size_t linear(CellIndex c) const { return static_cast<std::size_t>(c.j) * nx + c.i; }
    CellIndex cell(std::size_t linear_index) const
    {
        return {static_cast<int>(linear_index % nx), static_cast<int>(linear_index / nx)};
    }
    Point2 center(CellIndex c) const
    {
        return {origin.x + (c.i + 0.5) * cell_size, origin.y + (c.j + 0.5) * cell_size};
    }

    friend bool operator==(const GridMap &, const GridMap &) = default;
};

// 8 x 5 cells of 0.5 m centered in the default 6 m x 5 m room.
GridMap default_grid();

// Cell containing p. Points on the upper boundary clamp to the last cell.
// Throws DomainError outside the grid extent.
CellIndex cell_index(const GridMap &grid, Point2 p);

} // namespace epsnode

#endif

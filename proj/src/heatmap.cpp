// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include "epsnode/heatmap.hpp"
#include "epsnode/error.hpp"
#include "epsnode/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace epsnode {

namespace {

struct Range
{
    double lo = 0.0;
    double hi = 0.0;
    bool any = false;
};

Range value_range(const ErrorMap &map)
{
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), false};
    for (const auto &v : map.values)
    {
        if (!v)
            continue;
        r.lo = std::min(r.lo, *v);
        r.hi = std::max(r.hi, *v);
        r.any = true;
    }
    return r;
}

double unit(double v, const Range &r) { return r.hi > r.lo ? (v - r.lo) / (r.hi - r.lo) : 0.0; }

} // namespace

std::string render_ascii(const ErrorMap &map, const std::string &title)
{
    static constexpr char ramp[] = " .:-=+*#%@";
    constexpr int levels = sizeof(ramp) - 2;
    const Range r = value_range(map);

    std::ostringstream os;
    os << title << '\n';
    for (int j = map.grid.ny - 1; j >= 0; --j)
    {
        os << (j < 10 ? " " : "") << j << " |";
        for (int i = 0; i < map.grid.nx; ++i)
        {
            const auto v = map.at({i, j});
            const char ch = v ? ramp[static_cast<int>(std::lround(unit(*v, r) * levels))] : '?';
            os << ch << ch;
        }
        os << "|\n";
    }
    os << "    ";
    for (int i = 0; i < map.grid.nx; ++i)
        os << (i % 10) << ' ';
    os << '\n';
    if (r.any)
        os << "scale: ' ' = " << format_double(r.lo) << "  '@' = " << format_double(r.hi) << '\n';
    else
        os << "scale: no data\n";
    return os.str();
}

std::string render_pgm(const ErrorMap &map, int pixels_per_cell)
{
    if (pixels_per_cell < 1)
        throw UsageError("pixels_per_cell must be at least 1");
    const Range r = value_range(map);
    const int w = map.grid.nx * pixels_per_cell, h = map.grid.ny * pixels_per_cell;
    std::ostringstream os;
    os << "P2\n" << w << ' ' << h << "\n255\n";
    for (int y = 0; y < h; ++y)
    {
        const int j = map.grid.ny - 1 - y / pixels_per_cell;
        for (int x = 0; x < w; ++x)
        {
            const auto v = map.at({x / pixels_per_cell, j});
            const int level = v ? static_cast<int>(std::lround(unit(*v, r) * 255.0)) : 0;
            os << level << (x + 1 < w ? ' ' : '\n');
        }
    }
    return os.str();
}

} // namespace epsnode

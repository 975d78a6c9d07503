// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include "epsnode/geometry.hpp"

#include <algorithm>

namespace epsnode {

bool segment_enters_interior(Point2 a, Point2 b, const Rect &r)
{
    if (a == b)
        return r.strictly_contains(a);

    // Liang-Barsky clip against the closed rectangle.
    const double dx = b.x - a.x, dy = b.y - a.y;
    double t0 = 0.0, t1 = 1.0;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - r.min.x, r.max.x - a.x, a.y - r.min.y, r.max.y - a.y};
    for (int k = 0; k < 4; ++k)
    {
        if (p[k] == 0.0)
        {
            if (q[k] < 0.0)
                return false;
            continue;
        }
        const double t = q[k] / p[k];
        if (p[k] < 0.0)
            t0 = std::max(t0, t);
        else
            t1 = std::min(t1, t);
        if (t0 > t1)
            return false;
    }
    if (t1 - t0 <= 1e-12)
        return false; // single touching point

    // A chord of a convex set is interior at its midpoint unless it runs along a face.
    const double tm = 0.5 * (t0 + t1);
    return r.strictly_contains({a.x + tm * dx, a.y + tm * dy});
}

double distance_to_rect(Point2 p, const Rect &r)
{
    const double dx = std::max({r.min.x - p.x, 0.0, p.x - r.max.x});
    const double dy = std::max({r.min.y - p.y, 0.0, p.y - r.max.y});
    return std::hypot(dx, dy);
}

double signed_distance(Point2 p, const Segment &s)
{
    const Point2 d = s.b - s.a;
    return cross(d, p - s.a) / norm(d);
}

Point2 reflect_across(Point2 p, const Segment &s)
{
    const Point2 d = s.b - s.a;
    const double t = dot(p - s.a, d) / dot(d, d);
    const Point2 foot = s.a + t * d;
    return 2.0 * foot - p;
}

std::optional<Point2> intersect(Point2 p, Point2 q, const Segment &s)
{
    const Point2 r = q - p, e = s.b - s.a;
    const double den = cross(r, e);
    if (den == 0.0)
        return std::nullopt;
    const double t = cross(s.a - p, e) / den;
    const double u = cross(s.a - p, r) / den;
    constexpr double tol = 1e-12;
    if (t < -tol || t > 1.0 + tol || u < -tol || u > 1.0 + tol)
        return std::nullopt;
    return p + t * r;
}

} // namespace epsnode

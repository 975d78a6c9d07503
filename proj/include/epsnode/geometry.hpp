// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_GEOMETRY_HPP
#define EPSNODE_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <optional>

namespace epsnode {

struct Point2
{
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Point2 &, const Point2 &) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }

struct Segment
{
    Point2 a;
    Point2 b;
};

// Axis-aligned rectangle [min.x, max.x] x [min.y, max.y].
struct Rect
{
    Point2 min;
    Point2 max;

    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    double area() const { return width() * height(); }
    Point2 center() const { return {0.5 * (min.x + max.x), 0.5 * (min.y + max.y)}; }

    bool contains(Point2 p) const { return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y; }
    bool strictly_contains(Point2 p) const { return p.x > min.x && p.x < max.x && p.y > min.y && p.y < max.y; }

    // Bottom, right, top, left.
    std::array<Segment, 4> edges() const
    {
        const Point2 br{max.x, min.y}, tl{min.x, max.y};
        return {Segment{min, br}, Segment{br, max}, Segment{max, tl}, Segment{tl, min}};
    }

    friend bool operator==(const Rect &, const Rect &) = default;
};

// True iff the closed segment [a,b] passes through the open interior of r. Touching a corner,
// sliding along an edge or ending on the boundary does not count.
bool segment_enters_interior(Point2 a, Point2 b, const Rect &r);

// Euclidean distance from p to the closed rectangle (0 inside).
double distance_to_rect(Point2 p, const Rect &r);

// Mirror image of p across the infinite line through s.
Point2 reflect_across(Point2 p, const Segment &s);

// Signed distance of p from the line through s (positive on the left of a->b).
double signed_distance(Point2 p, const Segment &s);

// Intersection of segment [p,q] with segment s, if it exists and is not parallel.
std::optional<Point2> intersect(Point2 p, Point2 q, const Segment &s);

} // namespace epsnode

#endif

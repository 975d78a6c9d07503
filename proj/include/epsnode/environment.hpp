// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_ENVIRONMENT_HPP
#define EPSNODE_ENVIRONMENT_HPP

#include "epsnode/geometry.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace epsnode {

enum class Material
{
    metal,
    wood,
    wall
};

std::string_view to_string(Material m);
Material material_from_string(std::string_view s); // throws ParseError

struct MaterialProperties
{
    double reflectivity;
    double transmissivity;
};

MaterialProperties default_properties(Material m);

struct Anchor
{
    int id = 0;
    Point2 position;

    friend bool operator==(const Anchor &, const Anchor &) = default;
};

// Obstacles are full-height occluders in the planar model.
struct Obstacle
{
    Rect footprint;
    Material material = Material::metal;
    double reflectivity = 0.0;
    double transmissivity = 0.0;

    static Obstacle make(const Rect &footprint, Material material);

    friend bool operator==(const Obstacle &, const Obstacle &) = default;
};

struct Environment
{
    std::string name;
    Rect room;
    std::vector<Anchor> anchors;
    std::vector<Obstacle> obstacles;
    double wall_reflectivity = 0.5; // room walls

    // Throws DomainError when an invariant is broken: room extent, >= 3 anchors with
    // contiguous ids 0..n-1 inside the room, obstacle areas and material coefficients.
    void validate() const;

    std::size_t anchor_count() const { return anchors.size(); }
};

// Obstacles of `scenario` that are not part of `baseline`.
std::vector<Obstacle> novelty_obstacles(const Environment &scenario, const Environment &baseline);

// ---- Presets ------------------------------------------------------------------------------

// 6 m x 5 m room, anchors 0..3 at the bottom-left, bottom-right, top-right, top-left corners.
Environment nominal_environment();

// Metal plate just outside the top-right edge of the default grid.
Environment preset_a();
// Metal plate inside the top-right corner of the grid plus a wooden bridge next to it.
Environment preset_b();
// One metal and one wooden block occupying interior grid cells.
Environment preset_c();

std::vector<std::string> preset_names();
// Accepts "nominal", "A", "B", "C" (case-insensitive). Throws UsageError listing the presets.
Environment preset(std::string_view name);

} // namespace epsnode

#endif

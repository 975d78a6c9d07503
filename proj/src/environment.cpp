// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include "epsnode/environment.hpp"
#include "epsnode/error.hpp"

#include <algorithm>
#include <cctype>

namespace epsnode {

std::string_view to_string(Material m)
{
    switch (m)
    {
    case Material::metal:
        return "metal";
    case Material::wood:
        return "wood";
    case Material::wall:
        return "wall";
    }
    return "unknown";
}

Material material_from_string(std::string_view s)
{
    if (s == "metal")
        return Material::metal;
    if (s == "wood")
        return Material::wood;
    if (s == "wall")
        return Material::wall;
    throw ParseError("unknown material '" + std::string(s) + "' (expected metal, wood or wall)", 0);
}

MaterialProperties default_properties(Material m)
{
    switch (m)
    {
    case Material::metal:
        return {0.9, 0.05};
    case Material::wood:
        return {0.4, 0.5};
    case Material::wall:
        return {0.5, 0.0};
    }
    return {0.0, 0.0};
}

Obstacle Obstacle::make(const Rect &footprint, Material material)
{
    const auto props = default_properties(material);
    return {footprint, material, props.reflectivity, props.transmissivity};
}

void Environment::validate() const
{
    if (!(room.width() > 0.0) || !(room.height() > 0.0))
        throw DomainError("room width and height must be positive");
    if (anchors.size() < 3)
        throw DomainError("at least 3 anchors are required, got " + std::to_string(anchors.size()));
    for (std::size_t k = 0; k < anchors.size(); ++k)
    {
        if (anchors[k].id != static_cast<int>(k))
            throw DomainError("anchor ids must be unique, contiguous and ordered from 0");
        if (!room.contains(anchors[k].position))
            throw DomainError("anchor " + std::to_string(k) + " lies outside the room");
    }
    if (wall_reflectivity < 0.0 || wall_reflectivity > 1.0)
        throw DomainError("wall reflectivity must lie in [0, 1]");
    for (std::size_t k = 0; k < obstacles.size(); ++k)
    {
        const auto &o = obstacles[k];
        const std::string tag = "obstacle " + std::to_string(k);
        if (!(o.footprint.width() > 0.0) || !(o.footprint.height() > 0.0))
            throw DomainError(tag + " has an empty footprint");
        if (o.reflectivity < 0.0 || o.reflectivity > 1.0 || o.transmissivity < 0.0 || o.transmissivity > 1.0)
            throw DomainError(tag + ": reflectivity and transmissivity must lie in [0, 1]");
        if (o.reflectivity + o.transmissivity > 1.0 + 1e-12)
            throw DomainError(tag + ": reflectivity + transmissivity exceeds 1");
    }
}

std::vector<Obstacle> novelty_obstacles(const Environment &scenario, const Environment &baseline)
{
    std::vector<Obstacle> out;
    for (const auto &o : scenario.obstacles)
        if (std::find(baseline.obstacles.begin(), baseline.obstacles.end(), o) == baseline.obstacles.end())
            out.push_back(o);
    return out;
}

Environment nominal_environment()
{
    Environment env;
    env.name = "nominal";
    env.room = {{0.0, 0.0}, {6.0, 5.0}};
    env.anchors = {{0, {0.0, 0.0}}, {1, {6.0, 0.0}}, {2, {6.0, 5.0}}, {3, {0.0, 5.0}}};
    return env;
}

Environment preset_a()
{
    auto env = nominal_environment();
    env.name = "A";
    env.obstacles.push_back(Obstacle::make({{5.1, 3.25}, {5.2, 3.85}}, Material::metal));
    return env;
}

Environment preset_b()
{
    auto env = nominal_environment();
    env.name = "B";
    env.obstacles.push_back(Obstacle::make({{4.1, 3.3}, {4.7, 3.4}}, Material::metal));
    env.obstacles.push_back(Obstacle::make({{3.5, 2.25}, {4.0, 3.25}}, Material::wood));
    return env;
}

Environment preset_c()
{
    auto env = nominal_environment();
    env.name = "C";
    env.obstacles.push_back(Obstacle::make({{2.0, 2.25}, {2.5, 2.75}}, Material::metal));
    env.obstacles.push_back(Obstacle::make({{1.5, 1.75}, {2.0, 2.25}}, Material::wood));
    return env;
}

std::vector<std::string> preset_names() { return {"nominal", "A", "B", "C"}; }

Environment preset(std::string_view name)
{
    std::string key(name);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (key == "nominal")
        return nominal_environment();
    if (key == "a")
        return preset_a();
    if (key == "b")
        return preset_b();
    if (key == "c")
        return preset_c();
    throw UsageError("unknown scenario '" + std::string(name) + "' (available presets: nominal, A, B, C)");
}

} // namespace epsnode

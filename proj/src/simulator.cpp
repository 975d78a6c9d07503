// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include "epsnode/simulator.hpp"
#include "epsnode/error.hpp"
#include "epsnode/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace epsnode {

namespace {

constexpr double kMinPathLength = 0.1; // m, near-field amplitude clamp
constexpr double kOnLineTolerance = 1e-9;

void require_inside(const Environment &env, Point2 p, const char *what)
{
    if (!env.room.contains(p))
        throw DomainError(std::string(what) + " (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ") lies outside the room");
}

bool unobstructed(const Environment &env, Point2 a, Point2 b)
{
    return std::none_of(env.obstacles.begin(), env.obstacles.end(),
                        [&](const Obstacle &o) { return segment_enters_interior(a, b, o.footprint); });
}

// Specular bounce off `face`; valid only if both legs are clear of every obstacle interior.
std::optional<double> reflected_length(const Environment &env, Point2 tag, Point2 anchor, const Segment &face)
{
    if (std::abs(signed_distance(tag, face)) < kOnLineTolerance ||
        std::abs(signed_distance(anchor, face)) < kOnLineTolerance)
        return std::nullopt;
    const Point2 image = reflect_across(anchor, face);
    const auto hit = intersect(tag, image, face);
    if (!hit)
        return std::nullopt;
    if (!unobstructed(env, tag, *hit) || !unobstructed(env, *hit, anchor))
        return std::nullopt;
    return distance(tag, image);
}

} // namespace

void ChannelParams::validate() const
{
    if (!(c > 0.0) || !(sample_period > 0.0) || !(pulse_sigma > 0.0))
        throw DomainError("channel parameters c, sample_period and pulse_sigma must be positive");
    if (noise_sigma < 0.0 || range_jitter_sigma < 0.0 || nlos_excess_delay < 0.0)
        throw DomainError("noise, jitter and NLoS excess delay must be non-negative");
    if (!(detect_frac > 0.0) || !(detect_frac < 1.0))
        throw DomainError("detect_frac must lie in (0, 1)");
}

int blocking_count(const Environment &env, Point2 a, Point2 b)
{
    return static_cast<int>(std::count_if(env.obstacles.begin(), env.obstacles.end(),
                                          [&](const Obstacle &o) { return segment_enters_interior(a, b, o.footprint); }));
}

bool line_of_sight(const Environment &env, Point2 a, Point2 b)
{
    require_inside(env, a, "point");
    require_inside(env, b, "point");
    return unobstructed(env, a, b);
}

std::vector<PropagationPath> trace_paths(const Environment &env, Point2 tag, const Anchor &anchor,
                                         const ChannelParams &params)
{
    require_inside(env, tag, "tag");
    std::vector<PropagationPath> paths;

    PropagationPath direct;
    direct.length = distance(tag, anchor.position);
    direct.amplitude = 1.0 / std::max(direct.length, kMinPathLength);
    direct.delay = direct.length / params.c;
    for (const auto &o : env.obstacles)
    {
        if (segment_enters_interior(tag, anchor.position, o.footprint))
        {
            ++direct.blockers;
            direct.amplitude *= o.transmissivity;
            direct.delay += params.nlos_excess_delay;
        }
    }
    paths.push_back(direct);

    for (const auto &wall : env.room.edges())
    {
        if (const auto len = reflected_length(env, tag, anchor.position, wall))
            paths.push_back({PathKind::wall_reflection, *len, *len / params.c,
                             env.wall_reflectivity / std::max(*len, kMinPathLength), 0, -1});
    }
    for (std::size_t k = 0; k < env.obstacles.size(); ++k)
    {
        const auto &o = env.obstacles[k];
        for (const auto &face : o.footprint.edges())
        {
            if (const auto len = reflected_length(env, tag, anchor.position, face))
                paths.push_back({PathKind::obstacle_reflection, *len, *len / params.c,
                                 o.reflectivity / std::max(*len, kMinPathLength), 0, static_cast<int>(k)});
        }
    }
    return paths;
}

Cir synthesize_cir(const Environment &env, Point2 tag, const Anchor &anchor, const ChannelParams &params,
                   std::uint64_t rng_seed, CirDiagnostics *diagnostics)
{
    params.validate();
    const auto paths = trace_paths(env, tag, anchor, params);

    Cir cir;
    cir.sample_period = params.sample_period;
    std::size_t dropped = 0;
    const double inv_two_var = 1.0 / (2.0 * params.pulse_sigma * params.pulse_sigma);
    for (const auto &path : paths)
    {
        const double bin = std::round(path.delay / params.sample_period);
        if (bin >= static_cast<double>(kCirLength))
        {
            ++dropped;
            continue;
        }
        for (std::size_t k = 0; k < kCirLength; ++k)
        {
            const double off = static_cast<double>(k) - bin;
            cir.samples[k] += path.amplitude * std::exp(-off * off * inv_two_var);
        }
    }

    if (params.noise_sigma > 0.0)
    {
        Rng rng(rng_seed);
        std::normal_distribution<double> noise(0.0, params.noise_sigma);
        for (auto &s : cir.samples)
            s += noise(rng);
    }

    if (diagnostics)
    {
        diagnostics->paths = paths.size();
        diagnostics->dropped_paths = dropped;
    }
    return cir;
}

std::size_t first_path_index(const Cir &cir, double detect_frac)
{
    double peak = 0.0;
    for (double s : cir.samples)
    {
        if (!std::isfinite(s))
            throw DomainError("CIR contains non-finite samples");
        peak = std::max(peak, std::abs(s));
    }
    if (peak == 0.0)
        throw NumericalError("no detectable path");
    const double threshold = detect_frac * peak;
    for (std::size_t k = 0; k < kCirLength; ++k)
        if (std::abs(cir.samples[k]) >= threshold)
            return k;
    return kCirLength - 1; // unreachable: the peak itself passes
}

double estimate_range(const Cir &cir, const ChannelParams &params, std::uint64_t rng_seed)
{
    const std::size_t first = first_path_index(cir, params.detect_frac);
    double range = params.c * static_cast<double>(first) * cir.sample_period;
    if (params.range_jitter_sigma > 0.0)
    {
        Rng rng(rng_seed);
        std::normal_distribution<double> jitter(0.0, params.range_jitter_sigma);
        range += jitter(rng);
    }
    return range;
}

MeasurementSet generate_dataset(const Environment &scenario, const GridMap &grid, int passes, int samples_per_cell,
                                std::uint64_t seed, const ChannelParams &params)
{
    scenario.validate();
    grid.validate();
    params.validate();
    if (passes < 1 || samples_per_cell < 1)
        throw UsageError("passes and samples_per_cell must be at least 1");
    const Rect ext = grid.extent();
    if (!scenario.room.contains(ext.min) || !scenario.room.contains(ext.max))
        throw DomainError("grid extends outside the room");

    MeasurementSet set;
    set.scenario_name = scenario.name;
    set.grid = grid;
    set.seed = seed;
    set.measurements.reserve(grid.cell_count() * static_cast<std::size_t>(passes) * samples_per_cell);

    for (int pass = 0; pass < passes; ++pass)
    {
        for (std::size_t lin = 0; lin < grid.cell_count(); ++lin)
        {
            const CellIndex cell = grid.cell(lin);
            const Point2 tag = grid.center(cell);
            for (int s = 0; s < samples_per_cell; ++s)
            {
                Measurement m;
                m.cell = cell;
                m.pass_id = pass;
                m.per_anchor.reserve(scenario.anchors.size());
                for (const auto &anchor : scenario.anchors)
                {
                    const auto u = [&](std::uint64_t stream) {
                        return derive_seed(seed, {lin, static_cast<std::uint64_t>(pass), static_cast<std::uint64_t>(s),
                                                  static_cast<std::uint64_t>(anchor.id), stream});
                    };
                    AnchorReading r;
                    r.anchor_id = anchor.id;
                    r.cir = synthesize_cir(scenario, tag, anchor, params, u(0));
                    r.range = estimate_range(r.cir, params, u(1));
                    m.per_anchor.push_back(std::move(r));
                }
                set.measurements.push_back(std::move(m));
            }
        }
    }
    return set;
}

} // namespace epsnode

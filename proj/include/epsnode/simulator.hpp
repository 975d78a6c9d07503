// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_SIMULATOR_HPP
#define EPSNODE_SIMULATOR_HPP

#include "epsnode/dataset.hpp"
#include "epsnode/environment.hpp"

#include <cstdint>
#include <vector>

namespace epsnode {

struct ChannelParams
{
    double c = 0.2998;               // m/ns
    double sample_period = 1.0;      // ns
    double pulse_sigma = 1.0;        // samples
    double noise_sigma = 0.005;      // amplitude
    double detect_frac = 0.2;        // first-path threshold relative to the CIR peak
    double range_jitter_sigma = 0.03; // m
    double nlos_excess_delay = 0.5;  // ns per blocking obstacle

    // Pulse width and c must be positive; noise and jitter may be zero (noise-free runs).
    void validate() const;
};

// Open segment (a, b) crosses no obstacle interior. Grazing contact is line of sight.
// Throws DomainError if a or b lies outside the room.
bool line_of_sight(const Environment &env, Point2 a, Point2 b);

// Number of obstacles whose interior the segment crosses.
int blocking_count(const Environment &env, Point2 a, Point2 b);

enum class PathKind
{
    direct,
    wall_reflection,
    obstacle_reflection
};

struct PropagationPath
{
    PathKind kind = PathKind::direct;
    double length = 0.0;    // m
    double delay = 0.0;     // ns, including NLoS excess
    double amplitude = 0.0;
    int blockers = 0;       // obstacles crossed (direct path only)
    int obstacle = -1;      // reflecting obstacle index, -1 for walls / direct
};

// Direct path plus every valid first-order specular reflection (room walls and obstacle faces).
std::vector<PropagationPath> trace_paths(const Environment &env, Point2 tag, const Anchor &anchor,
                                         const ChannelParams &params);

struct CirDiagnostics
{
    std::size_t paths = 0;
    std::size_t dropped_paths = 0; // delay beyond the CIR window
};

Cir synthesize_cir(const Environment &env, Point2 tag, const Anchor &anchor, const ChannelParams &params,
                   std::uint64_t rng_seed, CirDiagnostics *diagnostics = nullptr);

// Index of the first sample reaching detect_frac of the peak magnitude; throws NumericalError
// ("no detectable path") on an all-zero CIR.
std::size_t first_path_index(const Cir &cir, double detect_frac);

// Range from first-path detection plus Gaussian jitter.
double estimate_range(const Cir &cir, const ChannelParams &params, std::uint64_t rng_seed);

// Samples every grid cell center `passes` times, `samples_per_cell` per pass.
MeasurementSet generate_dataset(const Environment &scenario, const GridMap &grid, int passes, int samples_per_cell,
                                std::uint64_t seed, const ChannelParams &params = {});

} // namespace epsnode

#endif

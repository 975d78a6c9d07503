// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_EVALUATION_HPP
#define EPSNODE_EVALUATION_HPP

#include "epsnode/environment.hpp"
#include "epsnode/novelty.hpp"

#include <span>
#include <string>
#include <vector>

namespace epsnode {

// Discrete probability over grid cells (linear cell order).
struct DensityMap
{
    GridMap grid;
    std::vector<double> p;
};

// Weighted isotropic Gaussian KDE over cell centers, evaluated at every cell center and
// normalized to sum 1. Weights must be non-negative; throws NumericalError("no density mass")
// when they are all zero.
DensityMap kde(const GridMap &grid, std::span<const double> weights, double bandwidth);

// Cell values are the weights; missing cells weigh 0.
DensityMap kde(const ErrorMap &map, double bandwidth);

DensityMap uniform_density(const GridMap &grid);

// Both densities are floored at eps and renormalized, then sum p ln(p / q) in nats.
// Throws DomainError when the grids differ.
double kl_divergence(const DensityMap &p, const DensityMap &q, double eps = 1e-9);

inline constexpr double kNoveltyRadius = 0.75; // m

// Indicator of cells whose center lies within `radius` of a novelty obstacle footprint.
std::vector<double> novelty_indicator(const std::vector<Obstacle> &novelties, const GridMap &grid,
                                      double radius = kNoveltyRadius);

// KDE-smoothed indicator of the obstacles that `scenario` adds to `baseline`.
// Throws UsageError("no novelty to locate") when there are none.
DensityMap ground_truth_density(const Environment &scenario, const Environment &baseline, const GridMap &grid,
                                double bandwidth, double radius = kNoveltyRadius);
// Baseline defaults to the nominal preset.
DensityMap ground_truth_density(const Environment &scenario, const GridMap &grid, double bandwidth);

struct KlEntry
{
    std::string pipeline;
    std::string scenario;
    double kl = 0.0;         // KL(predicted || ground truth)
    double kl_uniform = 0.0; // KL(uniform || ground truth)
    double bandwidth = 0.0;
    double eps = 0.0;
};

struct KlReport
{
    std::vector<KlEntry> entries;
};

std::string to_json(const KlReport &report);

} // namespace epsnode

#endif

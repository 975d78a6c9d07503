// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include "epsnode/evaluation.hpp"
#include "epsnode/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace epsnode {

DensityMap kde(const GridMap &grid, std::span<const double> weights, double bandwidth)
{
    if (weights.size() != grid.cell_count())
        throw DomainError("kde: one weight per cell required");
    if (!(bandwidth > 0.0))
        throw DomainError("kde: bandwidth must be positive");
    bool any = false;
    for (double w : weights)
    {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw DomainError("kde: weights must be finite and non-negative");
        any = any || w > 0.0;
    }
    if (!any)
        throw NumericalError("no density mass");

    const double inv_two_h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    DensityMap d{grid, std::vector<double>(grid.cell_count(), 0.0)};
    for (std::size_t at = 0; at < d.p.size(); ++at)
    {
        const Point2 x = grid.center(grid.cell(at));
        double s = 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k)
        {
            if (weights[k] == 0.0)
                continue;
            const Point2 diff = x - grid.center(grid.cell(k));
            s += weights[k] * std::exp(-dot(diff, diff) * inv_two_h2);
        }
        d.p[at] = s;
    }
    double total = 0.0;
    for (double v : d.p)
        total += v;
    for (double &v : d.p)
        v /= total;
    return d;
}

DensityMap kde(const ErrorMap &map, double bandwidth)
{
    std::vector<double> w(map.values.size(), 0.0);
    for (std::size_t k = 0; k < w.size(); ++k)
        if (map.values[k])
            w[k] = *map.values[k];
    return kde(map.grid, w, bandwidth);
}

DensityMap uniform_density(const GridMap &grid)
{
    return {grid, std::vector<double>(grid.cell_count(), 1.0 / static_cast<double>(grid.cell_count()))};
}

double kl_divergence(const DensityMap &p, const DensityMap &q, double eps)
{
    if (!(p.grid == q.grid) || p.p.size() != q.p.size())
        throw DomainError("kl_divergence: densities live on different grids");
    if (!(eps > 0.0))
        throw DomainError("kl_divergence: eps must be positive");

    const auto floored = [eps](const std::vector<double> &v) {
        std::vector<double> out(v.size());
        double total = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k)
        {
            out[k] = std::max(v[k], eps);
            total += out[k];
        }
        for (double &x : out)
            x /= total;
        return out;
    };
    const auto pf = floored(p.p), qf = floored(q.p);
    double d = 0.0;
    for (std::size_t k = 0; k < pf.size(); ++k)
        d += pf[k] * std::log(pf[k] / qf[k]);
    return d;
}

std::vector<double> novelty_indicator(const std::vector<Obstacle> &novelties, const GridMap &grid, double radius)
{
    std::vector<double> w(grid.cell_count(), 0.0);
    for (std::size_t k = 0; k < w.size(); ++k)
    {
        const Point2 c = grid.center(grid.cell(k));
        for (const auto &o : novelties)
            if (distance_to_rect(c, o.footprint) <= radius)
                w[k] = 1.0;
    }
    return w;
}

DensityMap ground_truth_density(const Environment &scenario, const Environment &baseline, const GridMap &grid,
                                double bandwidth, double radius)
{
    const auto novelties = novelty_obstacles(scenario, baseline);
    if (novelties.empty())
        throw UsageError("no novelty to locate: scenario '" + scenario.name + "' adds no obstacle to '" +
                         baseline.name + "'");
    const auto w = novelty_indicator(novelties, grid, radius);
    if (std::none_of(w.begin(), w.end(), [](double v) { return v > 0.0; }))
        throw UsageError("no novelty to locate: no grid cell lies within " + std::to_string(radius) +
                         " m of a novelty obstacle");
    return kde(grid, w, bandwidth);
}

DensityMap ground_truth_density(const Environment &scenario, const GridMap &grid, double bandwidth)
{
    return ground_truth_density(scenario, nominal_environment(), grid, bandwidth);
}

std::string to_json(const KlReport &report)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto &e : report.entries)
    {
        nlohmann::ordered_json j;
        j["pipeline"] = e.pipeline;
        j["scenario"] = e.scenario;
        j["kl"] = e.kl;
        j["kl_uniform"] = e.kl_uniform;
        j["bandwidth"] = e.bandwidth;
        j["eps"] = e.eps;
        arr.push_back(std::move(j));
    }
    nlohmann::ordered_json root;
    root["entries"] = std::move(arr);
    return root.dump(2);
}

} // namespace epsnode

// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include <doctest.h>

#include "epsnode/error.hpp"
#include "epsnode/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numeric>
#include <random>

using namespace epsnode;

namespace {

GridMap square_grid(int n)
{
    GridMap g;
    g.origin = {0, 0};
    g.nx = n;
    g.ny = n;
    g.cell_size = 0.5;
    return g;
}

double sum(const DensityMap &d) { return std::accumulate(d.p.begin(), d.p.end(), 0.0); }

DensityMap random_density(const GridMap &g, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DensityMap d{g, std::vector<double>(g.cell_count())};
    for (auto &v : d.p)
        v = u(rng) < 0.2 ? 0.0 : u(rng);
    const double s = sum(d);
    for (auto &v : d.p)
        v /= s;
    return d;
}

} // namespace

TEST_CASE("two-cell KL divergence")
{
    GridMap g;
    g.nx = 2;
    g.ny = 1;
    const DensityMap p{g, {0.5, 0.5}}, q{g, {0.25, 0.75}};
    const double pq = 0.5 * std::log(0.5 / 0.25) + 0.5 * std::log(0.5 / 0.75);
    const double qp = 0.25 * std::log(0.25 / 0.5) + 0.75 * std::log(0.75 / 0.5);
    CHECK(kl_divergence(p, q) == doctest::Approx(pq).epsilon(1e-8));
    CHECK(kl_divergence(q, p) == doctest::Approx(qp).epsilon(1e-8));
    CHECK(std::abs(kl_divergence(p, q) - 0.1438) < 1e-4);
    CHECK(std::abs(kl_divergence(q, p) - 0.1308) < 1e-4);
}

TEST_CASE("KL of a density with itself is zero and KL is non-negative")
{
    std::mt19937_64 rng(12);
    const auto g = default_grid();
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto p = random_density(g, rng);
        const auto q = random_density(g, rng);
        CHECK(std::abs(kl_divergence(p, p)) <= 1e-12);
        CHECK(kl_divergence(p, q) >= 0.0);
    }
}

TEST_CASE("KL rejects mismatched grids")
{
    const auto a = uniform_density(square_grid(3));
    const auto b = uniform_density(square_grid(4));
    CHECK_THROWS_AS(kl_divergence(a, b), DomainError);
    CHECK_THROWS_AS(kl_divergence(a, a, 0.0), DomainError);
}

TEST_CASE("KL floors zero cells instead of diverging")
{
    GridMap g;
    g.nx = 2;
    g.ny = 1;
    const DensityMap p{g, {1.0, 0.0}}, q{g, {0.0, 1.0}};
    const double d = kl_divergence(p, q, 1e-9);
    CHECK(std::isfinite(d));
    CHECK(d == doctest::Approx(std::log(1.0 / 1e-9)).epsilon(1e-6));
}

TEST_CASE("KDE of a single positive cell peaks there and decays radially")
{
    const auto g = square_grid(5);
    std::vector<double> w(g.cell_count(), 0.0);
    w[g.linear({2, 2})] = 3.0;
    const auto d = kde(g, w, 0.5);
    CHECK(sum(d) == doctest::Approx(1.0).epsilon(1e-12));
    const double center = d.p[g.linear({2, 2})];
    for (std::size_t k = 0; k < d.p.size(); ++k)
        CHECK(d.p[k] <= center);
    CHECK(d.p[g.linear({3, 2})] == doctest::Approx(d.p[g.linear({2, 1})]));
    CHECK(d.p[g.linear({3, 2})] > d.p[g.linear({4, 2})]);
    CHECK(d.p[g.linear({3, 3})] > d.p[g.linear({4, 4})]);
    CHECK(d.p[g.linear({3, 2})] > d.p[g.linear({3, 3})]);
}

TEST_CASE("KDE of a uniform 3x3 map matches direct summation")
{
    const auto g = square_grid(3);
    const double bw = 0.5;
    const auto d = kde(g, std::vector<double>(9, 2.0), bw);

    std::vector<double> raw(9, 0.0);
    for (int a = 0; a < 9; ++a)
        for (int b = 0; b < 9; ++b)
        {
            const double dx = 0.5 * (a % 3 - b % 3), dy = 0.5 * (a / 3 - b / 3);
            raw[a] += std::exp(-(dx * dx + dy * dy) / (2 * bw * bw));
        }
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    for (int a = 0; a < 9; ++a)
        CHECK(d.p[a] == doctest::Approx(raw[a] / total).epsilon(1e-12));
    // Deviation from uniform is only the boundary deficit of the kernel.
    const double tail = 1.0 - raw[0] / raw[4];
    for (double v : d.p)
        CHECK(std::abs(v - 1.0 / 9.0) <= tail / 9.0 + 1e-12);
}

TEST_CASE("KDE ignores the scale of the weights and treats missing cells as zero")
{
    const auto g = default_grid();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ErrorMap m = ErrorMap::empty(g);
    for (std::size_t k = 0; k < m.values.size(); ++k)
    {
        if (k % 7 == 3)
            continue;
        m.values[k] = u(rng);
        m.counts[k] = 1;
    }
    auto scaled = m;
    for (auto &v : scaled.values)
        if (v)
            *v *= 37.5;
    const auto a = kde(m, 0.5), b = kde(scaled, 0.5);
    CHECK(sum(a) == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t k = 0; k < a.p.size(); ++k)
        CHECK(std::abs(a.p[k] - b.p[k]) <= 1e-12);

    std::vector<double> w(g.cell_count(), 0.0);
    for (std::size_t k = 0; k < w.size(); ++k)
        w[k] = m.values[k].value_or(0.0);
    const auto c = kde(g, w, 0.5);
    CHECK(c.p == a.p);
}

TEST_CASE("KDE needs some mass")
{
    const auto g = default_grid();
    CHECK_THROWS_AS(kde(ErrorMap::empty(g), 0.5), NumericalError);
    CHECK_THROWS_AS(kde(g, std::vector<double>(g.cell_count(), 0.0), 0.5), NumericalError);
    CHECK_THROWS_AS(kde(g, std::vector<double>(3, 1.0), 0.5), DomainError);
    CHECK_THROWS_AS(kde(g, std::vector<double>(g.cell_count(), 1.0), 0.0), DomainError);
}

TEST_CASE("ground truth for preset C concentrates around the two obstacles")
{
    const auto g = default_grid();
    const auto env = preset_c();
    const auto gt = ground_truth_density(env, g, 0.5);
    CHECK(sum(gt) == doctest::Approx(1.0).epsilon(1e-9));

    double near = 0.0, far = 0.0;
    int n_near = 0, n_far = 0;
    for (std::size_t k = 0; k < gt.p.size(); ++k)
    {
        double d = 1e9;
        for (const auto &o : env.obstacles)
            d = std::min(d, distance_to_rect(g.center(g.cell(k)), o.footprint));
        if (d <= kNoveltyRadius)
        {
            near += gt.p[k];
            ++n_near;
        }
        else
        {
            far += gt.p[k];
            ++n_far;
        }
    }
    REQUIRE(n_near > 0);
    REQUIRE(n_far > 0);
    CHECK(near / n_near > 3.0 * far / n_far);
    for (const auto &o : env.obstacles)
    {
        const auto cell = cell_index(g, o.footprint.center());
        CHECK(gt.p[g.linear(cell)] > 1.0 / static_cast<double>(g.cell_count()));
    }
}

TEST_CASE("ground truth for preset A sits on the top-right boundary")
{
    const auto g = default_grid();
    const auto env = preset_a();
    const auto w = novelty_indicator(novelty_obstacles(env, nominal_environment()), g);
    CHECK(w[g.linear({g.nx - 1, g.ny - 1})] == 1.0);
    for (std::size_t k = 0; k < w.size(); ++k)
        if (w[k] > 0.0)
        {
            const auto c = g.cell(k);
            CHECK((c.i == g.nx - 1 || c.j == g.ny - 1));
        }
    const auto gt = ground_truth_density(env, g, 0.5);
    const auto best = std::max_element(gt.p.begin(), gt.p.end()) - gt.p.begin();
    const auto c = g.cell(static_cast<std::size_t>(best));
    CHECK(c.i >= g.nx - 2);
    CHECK(c.j >= g.ny - 2);
}

TEST_CASE("an obstacle covering every cell yields the all-ones indicator")
{
    const auto g = default_grid();
    auto env = nominal_environment();
    env.name = "covered";
    env.obstacles.push_back(Obstacle::make(g.extent(), Material::wood));
    const auto gt = ground_truth_density(env, g, 0.5);
    const auto flat = kde(g, std::vector<double>(g.cell_count(), 1.0), 0.5);
    CHECK(gt.p == flat.p);
}

TEST_CASE("ground truth needs a novelty")
{
    const auto g = default_grid();
    CHECK_THROWS_AS(ground_truth_density(nominal_environment(), g, 0.5), UsageError);
    auto far_away = nominal_environment();
    far_away.obstacles.push_back(Obstacle::make({{0.0, 0.0}, {0.1, 0.1}}, Material::metal));
    CHECK_THROWS_AS(ground_truth_density(far_away, g, 0.5), UsageError);
}

TEST_CASE("KL report JSON")
{
    KlReport r;
    r.entries.push_back({"RNG", "B", 0.25, 0.75, 0.5, 1e-9});
    const auto j = nlohmann::json::parse(to_json(r));
    CHECK(j.at("entries").size() == 1);
    CHECK(j.at("entries")[0].at("pipeline") == "RNG");
    CHECK(j.at("entries")[0].at("kl") == 0.25);
    CHECK(j.at("entries")[0].at("eps") == 1e-9);
}

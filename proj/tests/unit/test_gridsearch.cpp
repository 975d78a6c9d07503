// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include "epsnode/error.hpp"
#include "epsnode/gridsearch.hpp"
#include "epsnode/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace epsnode;

namespace {

Eigen::MatrixXd synthetic_rows(std::size_t rows, std::size_t cols, std::uint64_t seed)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
    {
        const double t = u(rng);
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(r, c) = std::clamp(0.5 + 0.4 * std::sin(t * 3.0 + static_cast<double>(c)) + 0.01 * u(rng), 0.0, 1.0);
    }
    return m;
}

SweepOptions with_jobs(std::size_t jobs)
{
    SweepOptions o;
    o.jobs = jobs;
    return o;
}

SearchSpace small_space()
{
    return {Pipeline::rng, {5, 6}, {7, 8}, {8, 16}, {0.001, 0.01}};
}

TrainConfig quick(std::uint64_t seed = 11)
{
    TrainConfig c;
    c.max_epochs = 6;
    c.patience = 3;
    c.seed = seed;
    return c;
}

std::vector<std::size_t> order(const SweepResult &s)
{
    std::vector<std::size_t> out;
    for (const auto &t : s.trials)
        out.push_back(t.candidate.index);
    return out;
}

} // namespace

TEST_CASE("table spaces and counts")
{
    const auto rng = enumerate(table_space(Pipeline::rng), 4);
    // 3*3*3*2 combinations; e1 = e2 = 20 breaks N_E1 < N_E2
    CHECK(rng.candidates.size() + rng.excluded.size() == 54);
    CHECK(rng.excluded.size() == 6);
    for (const auto &x : rng.excluded)
    {
        CHECK(x.arch.e1 == 20);
        CHECK(x.arch.e2 == 20);
        CHECK(x.reason == "N_E1 < N_E2 violated");
    }
    const auto ma = enumerate(table_space(Pipeline::ma), 28);
    CHECK(ma.candidates.size() + ma.excluded.size() == 150);
    const auto pca = enumerate(table_space(Pipeline::pca), 72);
    CHECK(pca.excluded.empty());
    CHECK(pca.candidates.size() == 150);
}

TEST_CASE("e1 equal to n is excluded")
{
    SearchSpace s{Pipeline::rng, {4, 5}, {20}, {16}, {0.001}};
    const auto en = enumerate(s, 4);
    REQUIRE(en.candidates.size() == 1);
    REQUIRE(en.excluded.size() == 1);
    CHECK(en.excluded[0].arch.e1 == 4);
    CHECK(en.excluded[0].reason == "N < N_E1 violated");
    CHECK(en.candidates[0].arch == Architecture{4, 5, 20, 5});
}

TEST_CASE("enumeration is deterministic with unique derived seeds")
{
    TrainConfig base;
    base.seed = 99;
    const auto a = enumerate(table_space(Pipeline::ma), 28, base);
    const auto b = enumerate(table_space(Pipeline::ma), 28, base);
    REQUIRE(a.candidates.size() == b.candidates.size());
    std::set<std::uint64_t> seeds;
    for (std::size_t k = 0; k < a.candidates.size(); ++k)
    {
        CHECK(a.candidates[k].index == k);
        CHECK(a.candidates[k].arch == b.candidates[k].arch);
        CHECK(a.candidates[k].config.seed == b.candidates[k].config.seed);
        seeds.insert(a.candidates[k].config.seed);
    }
    CHECK(seeds.size() == a.candidates.size());
    CHECK_THROWS_AS(enumerate({Pipeline::rng, {}, {20}, {16}, {0.01}}, 4), UsageError);
}

TEST_CASE("reference best models are enumerable and trainable")
{
    for (auto p : {Pipeline::rng, Pipeline::ma, Pipeline::pca})
    {
        const auto best = reference_best(p);
        const std::size_t n = p == Pipeline::rng ? 4 : p == Pipeline::ma ? 28 : 72;
        const auto en = enumerate(table_space(p), n);
        const bool found = std::any_of(en.candidates.begin(), en.candidates.end(), [&](const Candidate &c) {
            return c.arch.e1 == best.e1 && c.arch.e2 == best.e2 && c.config.batch_size == best.batch_size &&
                   c.config.learning_rate == best.learning_rate;
        });
        CHECK(found);
        CHECK_NOTHROW(Autoencoder::build(n, best.e1, best.e2, best.e1, 0.01, 1));
    }
    const auto tr = synthetic_rows(64, 4, 1), va = synthetic_rows(16, 4, 2);
    SearchSpace one{Pipeline::rng, {15}, {30}, {32}, {0.001}};
    const auto sweep = run(one, tr, va, quick());
    REQUIRE(sweep.trials.size() == 1);
    CHECK_FALSE(sweep.trials[0].failed);
    CHECK(sweep.trials[0].rank == 1);
}

TEST_CASE("sweep ranking is a schedule independent total order")
{
    const auto tr = synthetic_rows(96, 4, 3), va = synthetic_rows(24, 4, 4);
    const auto one = run(small_space(), tr, va, quick(), with_jobs(1));
    const auto eight = run(small_space(), tr, va, quick(), with_jobs(8));
    CHECK(order(one) == order(eight));
    CHECK(to_json(one) == to_json(eight));
    CHECK(to_csv(one) == to_csv(eight));
    REQUIRE(one.best.has_value());
    for (std::size_t k = 0; k < one.trials.size(); ++k)
    {
        CHECK(one.trials[k].rank == k + 1);
        CHECK(std::isfinite(one.trials[k].val_mse));
        if (k > 0)
            CHECK(ranks_before(one.trials[k - 1], one.trials[k]));
        CHECK_FALSE(ranks_before(one.trials[k], one.trials[k]));
    }
    const auto again = run(small_space(), tr, va, quick(), with_jobs(3));
    CHECK(to_json(one) == to_json(again));
}

TEST_CASE("tie break order")
{
    TrialResult a, b;
    a.val_mse = b.val_mse = 0.5;
    a.candidate.arch = {4, 5, 20, 5};
    b.candidate.arch = {4, 5, 30, 5};
    CHECK(ranks_before(a, b));
    b.candidate.arch = {4, 15, 20, 15};
    CHECK(ranks_before(a, b));
    b.candidate.arch = a.candidate.arch;
    a.candidate.config.batch_size = 64;
    b.candidate.config.batch_size = 16;
    CHECK(ranks_before(a, b));
    b.candidate.config.batch_size = 64;
    a.candidate.index = 3;
    b.candidate.index = 7;
    CHECK(ranks_before(a, b));
    CHECK_FALSE(ranks_before(b, a));
    b.val_mse = 0.4;
    CHECK(ranks_before(b, a));
}

TEST_CASE("diverging trials are recorded last and never ranked")
{
    const auto tr = synthetic_rows(64, 4, 5), va = synthetic_rows(16, 4, 6);
    SearchSpace s{Pipeline::rng, {5}, {7}, {16}, {0.001, 1e300}};
    const auto sweep = run(s, tr, va, quick());
    REQUIRE(sweep.trials.size() == 2);
    CHECK_FALSE(sweep.trials[0].failed);
    CHECK(sweep.trials[0].rank == 1);
    CHECK(sweep.trials[1].failed);
    CHECK(sweep.trials[1].rank == 0);
    CHECK_FALSE(sweep.trials[1].failure.empty());
    CHECK(sweep.best == std::optional<std::size_t>(0));
    CHECK(to_csv(sweep).find(",nan,") != std::string::npos);

    SearchSpace bad{Pipeline::rng, {5}, {7}, {16}, {1e300}};
    const auto all_failed = run(bad, tr, va, quick());
    CHECK_FALSE(all_failed.best.has_value());
}

TEST_CASE("novelty separation score")
{
    const auto tr = synthetic_rows(64, 4, 7), va = synthetic_rows(16, 4, 8);
    SweepOptions opt;
    opt.novelty_rows = Eigen::MatrixXd::Constant(8, 4, 1.5);
    opt.range_slots = {0, 1, 2, 3};
    SearchSpace s{Pipeline::rng, {5}, {7}, {16}, {0.01}};
    const auto sweep = run(s, tr, va, quick(), opt);
    REQUIRE(sweep.trials[0].novelty_separation.has_value());
    CHECK(*sweep.trials[0].novelty_separation > 1.0);
    CHECK_THROWS_AS(run(s, Eigen::MatrixXd(0, 4), va, quick()), UsageError);
}

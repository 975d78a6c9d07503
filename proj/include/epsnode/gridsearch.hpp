// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_GRIDSEARCH_HPP
#define EPSNODE_GRIDSEARCH_HPP

#include "epsnode/autoencoder.hpp"
#include "epsnode/features.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace epsnode {

struct Architecture
{
    std::size_t n = 0;
    std::size_t e1 = 0;
    std::size_t e2 = 0;
    std::size_t d1 = 0;

    friend bool operator==(const Architecture &, const Architecture &) = default;
};

struct SearchSpace
{
    Pipeline pipeline = Pipeline::rng;
    std::vector<std::size_t> e1_values;
    std::vector<std::size_t> e2_values;
    std::vector<std::size_t> batch_sizes;
    std::vector<double> learning_rates;
};

// Hyperparameter grid examined per pipeline (E1 = D1 share one list).
SearchSpace table_space(Pipeline pipeline);

struct ModelChoice
{
    std::size_t e1 = 0;
    std::size_t e2 = 0;
    std::size_t batch_size = 0;
    double learning_rate = 0.0;
};

// Reference best configuration per pipeline (E1 = D1).
ModelChoice reference_best(Pipeline pipeline);

struct Candidate
{
    std::size_t index = 0; // position among admissible candidates
    Architecture arch;
    TrainConfig config;
};

struct Exclusion
{
    Architecture arch;
    std::size_t batch_size = 0;
    double learning_rate = 0.0;
    std::string reason;
};

struct Enumeration
{
    std::vector<Candidate> candidates;
    std::vector<Exclusion> excluded;
};

// Cartesian product e1 x e2 x batch x lr (in that nesting order) with D1 = E1. Combinations
// that break the overcompleteness constraints are listed in `excluded`. Each candidate's seed
// derives from base.seed and its index. Throws UsageError on an empty value list.
Enumeration enumerate(const SearchSpace &space, std::size_t n, const TrainConfig &base = {});

struct TrialResult
{
    Candidate candidate;
    bool failed = false;
    std::string failure;
    double val_mse = 0.0;
    std::optional<double> novelty_separation; // mean total error novelty / nominal validation
    std::size_t stopped_epoch = 0;
    std::size_t best_epoch = 0;
    std::size_t rank = 0; // 1-based; 0 for failed trials
};

struct SweepOptions
{
    std::size_t jobs = 1;
    double leaky_alpha = 0.01;
    // Optional scaled rows from perturbed scenarios, only used for the post-hoc separation score.
    std::optional<Eigen::MatrixXd> novelty_rows;
    std::vector<std::size_t> range_slots; // feature indices of the per-anchor ranges
};

struct SweepResult
{
    std::vector<TrialResult> trials; // ranked trials first, failed trials last
    std::vector<Exclusion> excluded;
    std::optional<std::size_t> best; // index into trials
};

// True when a ranks strictly ahead of b: lower validation MSE, then smaller E2, smaller E1,
// larger batch, earlier enumeration.
bool ranks_before(const TrialResult &a, const TrialResult &b);

// Trains every candidate (optionally in parallel) on nominal rows and ranks by held-out
// validation MSE. Failed trials are recorded but never ranked. Results do not depend on `jobs`.
SweepResult run(const SearchSpace &space, const Eigen::MatrixXd &train_rows, const Eigen::MatrixXd &val_rows,
                const TrainConfig &base, const SweepOptions &options = {});

std::string to_json(const SweepResult &sweep);
std::string to_csv(const SweepResult &sweep);

} // namespace epsnode

#endif

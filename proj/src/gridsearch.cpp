// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include "epsnode/gridsearch.hpp"
#include "epsnode/error.hpp"
#include "epsnode/format.hpp"
#include "epsnode/novelty.hpp"
#include "epsnode/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace epsnode {

SearchSpace table_space(Pipeline pipeline)
{
    switch (pipeline)
    {
    case Pipeline::rng:
        return {pipeline, {5, 15, 20}, {20, 30, 40}, {16, 32, 64}, {0.001, 0.01}};
    case Pipeline::ma:
        return {pipeline, {50, 55, 60, 65, 70}, {70, 75, 80, 85, 90}, {16, 32, 64}, {0.001, 0.01}};
    case Pipeline::pca:
        return {pipeline, {120, 125, 130, 135, 140}, {145, 150, 155, 160, 165}, {16, 32, 64}, {0.001, 0.01}};
    }
    return {};
}

ModelChoice reference_best(Pipeline pipeline)
{
    switch (pipeline)
    {
    case Pipeline::rng:
        return {15, 30, 32, 0.001};
    case Pipeline::ma:
        return {70, 90, 64, 0.001};
    case Pipeline::pca:
        return {120, 165, 32, 0.001};
    }
    return {};
}

Enumeration enumerate(const SearchSpace &space, std::size_t n, const TrainConfig &base)
{
    if (space.e1_values.empty() || space.e2_values.empty() || space.batch_sizes.empty() ||
        space.learning_rates.empty())
        throw UsageError("search space lists must be nonempty");

    Enumeration out;
    for (std::size_t e1 : space.e1_values)
        for (std::size_t e2 : space.e2_values)
            for (std::size_t batch : space.batch_sizes)
                for (double lr : space.learning_rates)
                {
                    const Architecture arch{n, e1, e2, e1};
                    std::string reason;
                    if (!(n < e1))
                        reason = "N < N_E1 violated";
                    else if (!(e1 < e2))
                        reason = "N_E1 < N_E2 violated";
                    if (!reason.empty())
                    {
                        out.excluded.push_back({arch, batch, lr, reason});
                        continue;
                    }
                    Candidate c;
                    c.index = out.candidates.size();
                    c.arch = arch;
                    c.config = base;
                    c.config.batch_size = batch;
                    c.config.learning_rate = lr;
                    c.config.seed = derive_seed(base.seed, {0x67726964ULL, c.index});
                    out.candidates.push_back(c);
                }
    return out;
}

bool ranks_before(const TrialResult &a, const TrialResult &b)
{
    if (a.val_mse != b.val_mse)
        return a.val_mse < b.val_mse;
    const auto &x = a.candidate, &y = b.candidate;
    if (x.arch.e2 != y.arch.e2)
        return x.arch.e2 < y.arch.e2;
    if (x.arch.e1 != y.arch.e1)
        return x.arch.e1 < y.arch.e1;
    if (x.config.batch_size != y.config.batch_size)
        return x.config.batch_size > y.config.batch_size;
    return x.index < y.index;
}

namespace {

double mean_total_error(const Autoencoder &model, const Eigen::MatrixXd &rows, const std::vector<std::size_t> &slots)
{
    const Eigen::MatrixXd recon = model.forward_batch(rows.transpose());
    double sum = 0.0;
    std::vector<double> e(slots.size());
    for (Eigen::Index s = 0; s < rows.rows(); ++s)
    {
        for (std::size_t k = 0; k < slots.size(); ++k)
        {
            const auto idx = static_cast<Eigen::Index>(slots[k]);
            e[k] = anchor_error(recon(idx, s), rows(s, idx));
        }
        sum += total_error(e);
    }
    return sum / static_cast<double>(rows.rows());
}

TrialResult run_trial(const Candidate &c, const Eigen::MatrixXd &train_rows, const Eigen::MatrixXd &val_rows,
                      const SweepOptions &options)
{
    TrialResult r;
    r.candidate = c;
    try
    {
        auto model = Autoencoder::build(c.arch.n, c.arch.e1, c.arch.e2, c.arch.d1, options.leaky_alpha,
                                        derive_seed(c.config.seed, {0x696e6974ULL}));
        auto trained = train(std::move(model), train_rows, val_rows, c.config);
        r.val_mse = trained.report.final_val_mse;
        r.stopped_epoch = trained.report.stopped_epoch;
        r.best_epoch = trained.report.best_epoch;
        if (!std::isfinite(r.val_mse))
            throw TrainingDiverged(r.stopped_epoch, 0, c.config.learning_rate, r.val_mse);
        if (options.novelty_rows && !options.range_slots.empty())
        {
            const double nominal = mean_total_error(trained.model, val_rows, options.range_slots);
            const double novel = mean_total_error(trained.model, *options.novelty_rows, options.range_slots);
            if (nominal > 0.0)
                r.novelty_separation = novel / nominal;
        }
    }
    catch (const Error &e)
    {
        r.failed = true;
        r.failure = e.what();
    }
    return r;
}

} // namespace

SweepResult run(const SearchSpace &space, const Eigen::MatrixXd &train_rows, const Eigen::MatrixXd &val_rows,
                const TrainConfig &base, const SweepOptions &options)
{
    if (train_rows.rows() == 0 || val_rows.rows() == 0)
        throw UsageError("grid search needs nonempty training and validation data");
    const auto n = static_cast<std::size_t>(train_rows.cols());
    auto en = enumerate(space, n, base);

    std::vector<TrialResult> results(en.candidates.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t k = next++; k < en.candidates.size(); k = next++)
            results[k] = run_trial(en.candidates[k], train_rows, val_rows, options);
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, en.candidates.size()));
    if (jobs == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < jobs; ++t)
            pool.emplace_back(worker);
    }

    const auto split_at = std::stable_partition(results.begin(), results.end(), [](const TrialResult &t) { return !t.failed; });
    std::sort(results.begin(), split_at, ranks_before);
    std::sort(split_at, results.end(),
              [](const TrialResult &a, const TrialResult &b) { return a.candidate.index < b.candidate.index; });

    SweepResult sweep;
    for (auto it = results.begin(); it != split_at; ++it)
        it->rank = static_cast<std::size_t>(it - results.begin()) + 1;
    if (split_at != results.begin())
        sweep.best = 0;
    sweep.trials = std::move(results);
    sweep.excluded = std::move(en.excluded);
    return sweep;
}

std::string to_json(const SweepResult &sweep)
{
    using ojson = nlohmann::ordered_json;
    ojson trials = ojson::array();
    for (const auto &t : sweep.trials)
    {
        ojson j;
        j["rank"] = t.rank;
        j["index"] = t.candidate.index;
        j["n"] = t.candidate.arch.n;
        j["e1"] = t.candidate.arch.e1;
        j["e2"] = t.candidate.arch.e2;
        j["d1"] = t.candidate.arch.d1;
        j["batch_size"] = t.candidate.config.batch_size;
        j["learning_rate"] = t.candidate.config.learning_rate;
        j["seed"] = t.candidate.config.seed;
        j["failed"] = t.failed;
        if (t.failed)
            j["failure"] = t.failure;
        else
            j["val_mse"] = t.val_mse;
        j["stopped_epoch"] = t.stopped_epoch;
        j["best_epoch"] = t.best_epoch;
        if (t.novelty_separation)
            j["novelty_separation"] = *t.novelty_separation;
        trials.push_back(std::move(j));
    }
    ojson excluded = ojson::array();
    for (const auto &x : sweep.excluded)
    {
        ojson j;
        j["n"] = x.arch.n;
        j["e1"] = x.arch.e1;
        j["e2"] = x.arch.e2;
        j["batch_size"] = x.batch_size;
        j["learning_rate"] = x.learning_rate;
        j["reason"] = x.reason;
        excluded.push_back(std::move(j));
    }
    ojson root;
    root["trials"] = std::move(trials);
    root["excluded"] = std::move(excluded);
    return root.dump(2);
}

std::string to_csv(const SweepResult &sweep)
{
    std::ostringstream os;
    os << "rank,index,e1,e2,d1,batch_size,learning_rate,val_mse,stopped_epoch,novelty_separation,failed\n";
    for (const auto &t : sweep.trials)
    {
        const auto &c = t.candidate;
        os << t.rank << ',' << c.index << ',' << c.arch.e1 << ',' << c.arch.e2 << ',' << c.arch.d1 << ','
           << c.config.batch_size << ',' << format_double(c.config.learning_rate) << ','
           << (t.failed ? std::string("nan") : format_double(t.val_mse)) << ',' << t.stopped_epoch << ','
           << (t.novelty_separation ? format_double(*t.novelty_separation) : std::string()) << ','
           << (t.failed ? 1 : 0) << '\n';
    }
    return os.str();
}

} // namespace epsnode

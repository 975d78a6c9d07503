// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------
//
// epsnode command line tool: simulate | train | score | evaluate | gridsearch.

#include "epsnode/dataset.hpp"
#include "epsnode/environment.hpp"
#include "epsnode/error.hpp"
#include "epsnode/evaluation.hpp"
#include "epsnode/features.hpp"
#include "epsnode/format.hpp"
#include "epsnode/gridsearch.hpp"
#include "epsnode/heatmap.hpp"
#include "epsnode/model_io.hpp"
#include "epsnode/novelty.hpp"
#include "epsnode/rng.hpp"
#include "epsnode/simulator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace epsnode::cli {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// ---- config plumbing ----------------------------------------------------------------------

// Binds each option to a config-file key; the file only fills options not given on the command
// line or through the environment.
class Bindings
{
public:
    explicit Bindings(CLI::App *app) : app_(app) {}

    template <typename T>
    CLI::Option *add(const std::string &flag, T &value, const std::string &help)
    {
        auto *opt = app_->add_option(flag, value, help)->capture_default_str();
        bind(flag, opt, [&value](const json &j) { value = j.get<T>(); });
        return opt;
    }

    CLI::Option *add_flag(const std::string &flag, bool &value, const std::string &help)
    {
        auto *opt = app_->add_flag(flag, value, help);
        bind(flag, opt, [&value](const json &j) { value = j.get<bool>(); });
        return opt;
    }

    void apply(const json &config) const
    {
        if (!config.is_object())
            throw UsageError("config file must hold a JSON object");
        for (const auto &[key, value] : config.items())
        {
            const auto it = setters_.find(key);
            if (it == setters_.end())
                throw UsageError("unknown config key '" + key + "' for '" + app_->get_name() + "'");
            if (it->second.first->count() > 0)
                continue;
            try
            {
                it->second.second(value);
            }
            catch (const json::exception &e)
            {
                throw UsageError("config key '" + key + "': " + e.what());
            }
        }
    }

private:
    void bind(const std::string &flag, CLI::Option *opt, std::function<void(const json &)> set)
    {
        std::string key = flag.substr(flag.rfind('-') == std::string::npos ? 0 : flag.find_first_not_of('-'));
        std::replace(key.begin(), key.end(), '-', '_');
        setters_.emplace(key, std::make_pair(opt, std::move(set)));
    }

    CLI::App *app_;
    std::map<std::string, std::pair<CLI::Option *, std::function<void(const json &)>>> setters_;
};

json read_json_file(const std::string &path)
{
    std::ifstream is(path);
    if (!is)
        throw UsageError("cannot open config file '" + path + "'");
    try
    {
        return json::parse(is);
    }
    catch (const json::exception &e)
    {
        throw UsageError("config file '" + path + "': " + e.what());
    }
}

void write_text(const fs::path &path, const std::string &text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error("cannot open '" + path.string() + "' for writing");
    os << text;
    if (!os)
        throw Error("write to '" + path.string() + "' failed");
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Timestamps live only in the sidecar so every primary artifact stays byte-reproducible.
void write_metadata(const fs::path &path, const std::string &command, std::uint64_t seed, ojson extra = ojson::object())
{
    ojson j;
    j["tool"] = "epsnode-cli";
    j["version"] = "0.1.0";
    j["command"] = command;
    j["seed"] = seed;
    j["created"] = utc_timestamp();
    for (auto &[k, v] : extra.items())
        j[k] = v;
    write_text(path, j.dump(2) + "\n");
}

// ---- shared option groups -----------------------------------------------------------------

struct GridOptions
{
    std::vector<double> origin{1.0, 1.25};
    int nx = 8;
    int ny = 5;
    double cell_size = 0.5;

    void add(Bindings &b)
    {
        b.add("--origin", origin, "grid origin x y (m)")->expected(2);
        b.add("--nx", nx, "grid cells along x");
        b.add("--ny", ny, "grid cells along y");
        b.add("--cell-size", cell_size, "grid cell size (m)");
    }

    GridMap grid() const
    {
        if (origin.size() != 2)
            throw UsageError("--origin needs two values");
        GridMap g{{origin[0], origin[1]}, nx, ny, cell_size};
        try
        {
            g.validate();
        }
        catch (const DomainError &e)
        {
            throw UsageError(e.what());
        }
        return g;
    }
};

struct ScenarioOptions
{
    std::string scenario = "nominal";
    std::string environment;

    void add(Bindings &b, const std::string &default_scenario)
    {
        scenario = default_scenario;
        b.add("--scenario", scenario, "preset name: nominal, A, B, C");
        b.add("--environment", environment, "environment JSON file (overrides --scenario)");
    }

    Environment load() const { return environment.empty() ? preset(scenario) : load_environment(environment); }
};

struct TrainOptions
{
    std::string pipeline = "RNG";
    std::size_t e1 = 0, e2 = 0, d1 = 0;
    std::size_t batch_size = 0;
    double learning_rate = 0.0;
    std::size_t max_epochs = 200;
    std::size_t patience = 20;
    double min_delta = 1e-6;
    double leaky_alpha = 0.01;
    double val_fraction = 0.2;
    double pca_variance = 0.9;

    void add_common(Bindings &b)
    {
        b.add("--pipeline", pipeline, "feature pipeline: RNG, MA or PCA");
        b.add("--max-epochs", max_epochs, "maximum training epochs");
        b.add("--patience", patience, "early stopping patience (epochs)");
        b.add("--min-delta", min_delta, "minimum validation improvement");
        b.add("--leaky-alpha", leaky_alpha, "output LeakyReLU slope");
        b.add("--val-fraction", val_fraction, "held-out fraction per cell");
        b.add("--pca-variance", pca_variance, "explained variance kept by PCA");
    }

    void add_model(Bindings &b)
    {
        b.add("--e1", e1, "first encoder width (0: reference best)");
        b.add("--e2", e2, "latent width (0: reference best)");
        b.add("--d1", d1, "decoder width (0: same as e1)");
        b.add("--batch-size", batch_size, "mini-batch size (0: reference best)");
        b.add("--learning-rate", learning_rate, "Adam learning rate (0: reference best)");
    }
};

// Nominal rows for one pipeline, scaled with a scaler fitted on the training part.
struct PreparedData
{
    Pipeline pipeline;
    std::optional<PcaModel> pca;
    Scaler scaler;
    Eigen::MatrixXd train_rows;
    Eigen::MatrixXd val_rows;
};

PreparedData prepare(const MeasurementSet &data, const TrainOptions &opt, std::uint64_t seed)
{
    PreparedData p;
    p.pipeline = pipeline_from_string(opt.pipeline);
    const auto [train_set, val_set] = split(data, opt.val_fraction, derive_seed(seed, {1}));
    if (p.pipeline == Pipeline::pca)
        p.pca = fit_pca(cir_matrix(train_set), opt.pca_variance);
    const PcaModel *pca = p.pca ? &*p.pca : nullptr;
    const auto xtr = feature_matrix(train_set, p.pipeline, pca);
    const auto xva = feature_matrix(val_set, p.pipeline, pca);
    p.scaler = fit_scaler(xtr);
    p.train_rows = p.scaler.scale_rows(xtr);
    p.val_rows = p.scaler.scale_rows(xva);
    return p;
}

void warn_if_perturbed(const MeasurementSet &data)
{
    if (data.scenario_name != "nominal")
        std::cerr << "warning: training data comes from scenario '" << data.scenario_name
                  << "'; models are meant to see nominal data only\n";
}

Aggregation aggregation_from(const std::string &s)
{
    if (s == "mean")
        return Aggregation::mean;
    if (s == "median")
        return Aggregation::median;
    if (s == "max")
        return Aggregation::max;
    throw UsageError("unknown aggregation '" + s + "' (mean, median, max)");
}

// ---- commands -----------------------------------------------------------------------------

struct Common
{
    std::string config;
    std::uint64_t seed = 42;
};

void add_common(CLI::App *sub, Bindings &b, Common &c)
{
    sub->add_option("--config", c.config, "JSON config file; command line flags take precedence");
    b.add("--seed", c.seed, "base seed")->envname("EPSNODE_SEED");
}

void finish_config(const Bindings &b, const Common &c)
{
    if (!c.config.empty())
        b.apply(read_json_file(c.config));
}

struct Simulate
{
    Common common;
    GridOptions grid;
    ScenarioOptions scenario;
    int passes = 5;
    int samples = 10;
    std::string out;

    void add(CLI::App *sub, Bindings &b)
    {
        add_common(sub, b, common);
        grid.add(b);
        scenario.add(b, "nominal");
        b.add("--passes", passes, "passes over the grid");
        b.add("--samples", samples, "samples per cell and pass");
        b.add("--out", out, "dataset file (JSON Lines)");
    }

    int run() const
    {
        if (out.empty())
            throw UsageError("--out is required");
        const auto env = scenario.load();
        const auto g = grid.grid();
        const auto set = generate_dataset(env, g, passes, samples, common.seed);
        fs::path path(out);
        if (path.has_parent_path())
            fs::create_directories(path.parent_path());
        save(set, path);
        write_metadata(path.string() + ".meta.json", "simulate", common.seed,
                       {{"scenario", env.name}, {"passes", passes}, {"samples", samples}});
        std::cout << "wrote " << set.measurements.size() << " measurements (" << g.cell_count() << " cells x " << passes
                  << " passes x " << samples << " samples) for scenario " << env.name << " to " << out << '\n';
        return 0;
    }
};

struct Train
{
    Common common;
    TrainOptions train;
    std::string data;
    std::string out_dir = "model";

    void add(CLI::App *sub, Bindings &b)
    {
        add_common(sub, b, common);
        train.add_common(b);
        train.add_model(b);
        b.add("--data", data, "nominal dataset file");
        b.add("--out-dir", out_dir, "output directory");
    }

    int run() const
    {
        if (data.empty())
            throw UsageError("--data is required");
        const auto set = load(data);
        warn_if_perturbed(set);
        const auto prep = prepare(set, train, common.seed);
        const auto best = reference_best(prep.pipeline);
        const std::size_t e1 = train.e1 ? train.e1 : best.e1;
        const std::size_t e2 = train.e2 ? train.e2 : best.e2;
        const std::size_t d1 = train.d1 ? train.d1 : e1;

        TrainConfig cfg;
        cfg.batch_size = train.batch_size ? train.batch_size : best.batch_size;
        cfg.learning_rate = train.learning_rate > 0.0 ? train.learning_rate : best.learning_rate;
        cfg.max_epochs = train.max_epochs;
        cfg.patience = train.patience;
        cfg.min_delta = train.min_delta;
        cfg.seed = derive_seed(common.seed, {2});
        auto model = Autoencoder::build(static_cast<std::size_t>(prep.train_rows.cols()), e1, e2, d1, train.leaky_alpha,
                                        derive_seed(common.seed, {3}));
        auto result = epsnode::train(std::move(model), prep.train_rows, prep.val_rows, cfg);

        ModelBundle bundle{prep.pipeline, std::move(result.model), prep.scaler, prep.pca};
        const fs::path dir(out_dir);
        fs::create_directories(dir);
        save_bundle(bundle, dir / "model.json");
        write_text(dir / "train_report.json", train_report_to_json(result.report) + "\n");
        write_metadata(dir / "metadata.json", "train", common.seed,
                       {{"data", data},
                        {"pipeline", std::string(to_string(prep.pipeline))},
                        {"architecture", {prep.train_rows.cols(), e1, e2, d1}},
                        {"batch_size", cfg.batch_size},
                        {"learning_rate", cfg.learning_rate}});
        std::cout << "trained " << to_string(prep.pipeline) << " (" << prep.train_rows.cols() << ", " << e1 << ", " << e2
                  << ", " << d1 << ") for " << result.report.stopped_epoch << " epochs; best epoch "
                  << result.report.best_epoch << ", validation MSE " << format_double(result.report.final_val_mse)
                  << '\n';
        return 0;
    }
};

struct Score
{
    Common common;
    std::string model;
    std::string data;
    std::string pipeline;
    std::string aggregation = "mean";
    bool unscaled = false;
    int pixels = 16;
    std::string out_dir = "scores";

    void add(CLI::App *sub, Bindings &b)
    {
        add_common(sub, b, common);
        b.add("--model", model, "model bundle (model.json)");
        b.add("--data", data, "dataset file to score");
        b.add("--pipeline", pipeline, "expected pipeline; must match the model");
        b.add("--aggregation", aggregation, "per-cell aggregation: mean, median, max");
        b.add_flag("--unscaled", unscaled, "report range errors in meters");
        b.add("--pixels", pixels, "PGM pixels per cell");
        b.add("--out-dir", out_dir, "output directory");
    }

    int run() const
    {
        if (model.empty() || data.empty())
            throw UsageError("--model and --data are required");
        const auto bundle = load_bundle(model);
        if (!pipeline.empty() && pipeline_from_string(pipeline) != bundle.pipeline)
            throw UsageError("model was trained for pipeline " + std::string(to_string(bundle.pipeline)) + ", not " +
                             pipeline);
        const auto set = load(data);
        ScoreOptions opt;
        opt.aggregation = aggregation_from(aggregation);
        opt.unscaled = unscaled;
        const auto result =
            score(bundle.autoencoder, bundle.scaler, bundle.pipeline, bundle.pca ? &*bundle.pca : nullptr, set, opt);

        const fs::path dir(out_dir);
        fs::create_directories(dir);
        const auto csv = [](const ErrorMap &m) {
            std::ostringstream os;
            write_csv(os, m);
            return os.str();
        };
        write_text(dir / "error_map.csv", csv(result.total));
        write_text(dir / "error_map.pgm", render_pgm(result.total, pixels));
        std::string ascii = render_ascii(result.total, "total error, " + set.scenario_name + ", " +
                                                           std::string(to_string(bundle.pipeline)));
        for (const auto &a : result.anchors)
        {
            const auto name = "anchor_" + std::to_string(a.anchor_id);
            write_text(dir / (name + ".csv"), csv(a.map));
            write_text(dir / (name + ".pgm"), render_pgm(a.map, pixels));
            ascii += "\n" + render_ascii(a.map, "anchor " + std::to_string(a.anchor_id) + " error");
        }
        write_text(dir / "heatmap.txt", ascii);
        write_metadata(dir / "metadata.json", "score", common.seed,
                       {{"model", model}, {"data", data}, {"aggregation", aggregation}, {"unscaled", unscaled}});

        std::size_t best = 0;
        for (std::size_t k = 0; k < result.total.values.size(); ++k)
            if (result.total.values[k] && (!result.total.values[best] || *result.total.values[k] > *result.total.values[best]))
                best = k;
        const auto peak = result.total.grid.cell(best);
        std::cout << ascii.substr(0, ascii.find("\n\n") + 1);
        std::cout << "scored " << result.samples.size() << " samples; mean total error "
                  << format_double(result.total.mean_where([](CellIndex) { return true; }).value_or(0.0))
                  << "; peak cell (" << peak.i << ", " << peak.j << ")\n";
        return 0;
    }
};

struct Evaluate
{
    Common common;
    GridOptions grid;
    ScenarioOptions scenario;
    std::string baseline = "nominal";
    std::string error_map;
    std::string pipeline = "unknown";
    double bandwidth = 0.5;
    double eps = 1e-9;
    std::string out = "kl_report.json";

    void add(CLI::App *sub, Bindings &b)
    {
        add_common(sub, b, common);
        grid.add(b);
        scenario.add(b, "B");
        b.add("--baseline", baseline, "preset the novelties are measured against");
        b.add("--error-map", error_map, "ErrorMap CSV produced by score");
        b.add("--pipeline", pipeline, "pipeline label for the report");
        b.add("--bandwidth", bandwidth, "KDE bandwidth (m)");
        b.add("--eps", eps, "probability floor before renormalization");
        b.add("--out", out, "KL report JSON");
    }

    int run() const
    {
        if (error_map.empty())
            throw UsageError("--error-map is required");
        const auto g = grid.grid();
        std::ifstream is(error_map);
        if (!is)
            throw UsageError("cannot open error map '" + error_map + "'");
        const auto map = read_csv(is, g);
        const auto env = scenario.load();
        const auto truth = ground_truth_density(env, preset(baseline), g, bandwidth);
        KlReport report;
        report.entries.push_back({pipeline, env.name, kl_divergence(kde(map, bandwidth), truth, eps),
                                  kl_divergence(uniform_density(g), truth, eps), bandwidth, eps});
        write_text(out, to_json(report) + "\n");
        write_metadata(out + ".meta.json", "evaluate", common.seed, {{"error_map", error_map}});
        const auto &e = report.entries.front();
        std::cout << "KL(predicted || truth) = " << format_double(e.kl) << " nats; uniform baseline "
                  << format_double(e.kl_uniform) << " nats\n";
        return 0;
    }
};

struct GridSearch
{
    Common common;
    TrainOptions train;
    std::string data;
    std::string novelty_data;
    std::size_t jobs = 1;
    std::string out_dir = "sweep";

    void add(CLI::App *sub, Bindings &b)
    {
        add_common(sub, b, common);
        train.add_common(b);
        b.add("--data", data, "nominal dataset file");
        b.add("--novelty-data", novelty_data, "optional perturbed dataset for the post-hoc separation score");
        b.add("--jobs", jobs, "parallel trials");
        b.add("--out-dir", out_dir, "output directory");
    }

    int run() const
    {
        if (data.empty())
            throw UsageError("--data is required");
        if (jobs < 1)
            throw UsageError("--jobs must be at least 1");
        const auto set = load(data);
        warn_if_perturbed(set);
        const auto prep = prepare(set, train, common.seed);

        TrainConfig base;
        base.max_epochs = train.max_epochs;
        base.patience = train.patience;
        base.min_delta = train.min_delta;
        base.seed = derive_seed(common.seed, {4});
        SweepOptions opt;
        opt.jobs = jobs;
        opt.leaky_alpha = train.leaky_alpha;
        if (!novelty_data.empty())
        {
            const auto novel = load(novelty_data);
            const PcaModel *pca = prep.pca ? &*prep.pca : nullptr;
            opt.novelty_rows = prep.scaler.scale_rows(feature_matrix(novel, prep.pipeline, pca));
            for (const auto &slot : extract(novel.measurements.front(), prep.pipeline, pca).anchor_slots)
                opt.range_slots.push_back(slot.range_index);
        }
        const auto sweep = epsnode::run(table_space(prep.pipeline), prep.train_rows, prep.val_rows, base, opt);

        const fs::path dir(out_dir);
        fs::create_directories(dir);
        write_text(dir / "sweep.json", to_json(sweep) + "\n");
        write_text(dir / "sweep.csv", to_csv(sweep));
        write_metadata(dir / "metadata.json", "gridsearch", common.seed,
                       {{"data", data}, {"pipeline", std::string(to_string(prep.pipeline))}, {"jobs", jobs}});

        std::size_t failed = 0;
        for (const auto &t : sweep.trials)
            failed += t.failed ? 1 : 0;
        std::cout << sweep.trials.size() << " trials (" << sweep.excluded.size() << " excluded, " << failed
                  << " failed)";
        if (sweep.best)
        {
            const auto &b = sweep.trials[*sweep.best];
            std::cout << "; best (" << b.candidate.arch.e1 << ", " << b.candidate.arch.e2 << ", "
                      << b.candidate.config.batch_size << ", " << format_double(b.candidate.config.learning_rate)
                      << ") validation MSE " << format_double(b.val_mse);
        }
        std::cout << '\n';
        return sweep.best ? 0 : kExitRuntime;
    }
};

int main(int argc, char **argv)
{
    CLI::App app{"epsnode: UWB novelty detection with overcomplete autoencoders"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "epsnode-cli 0.1.0");

    Simulate simulate;
    Train train;
    Score score_cmd;
    Evaluate evaluate;
    GridSearch gridsearch;

    auto *sim_app = app.add_subcommand("simulate", "simulate a fingerprint dataset");
    auto *train_app = app.add_subcommand("train", "train an autoencoder on nominal data");
    auto *score_app = app.add_subcommand("score", "score a dataset and write error maps");
    auto *eval_app = app.add_subcommand("evaluate", "KL divergence of an error map against ground truth");
    auto *grid_app = app.add_subcommand("gridsearch", "sweep the hyperparameter table");

    Bindings sim_b(sim_app), train_b(train_app), score_b(score_app), eval_b(eval_app), grid_b(grid_app);
    simulate.add(sim_app, sim_b);
    train.add(train_app, train_b);
    score_cmd.add(score_app, score_b);
    evaluate.add(eval_app, eval_b);
    gridsearch.add(grid_app, grid_b);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try
    {
        if (*sim_app)
        {
            finish_config(sim_b, simulate.common);
            return simulate.run();
        }
        if (*train_app)
        {
            finish_config(train_b, train.common);
            return train.run();
        }
        if (*score_app)
        {
            finish_config(score_b, score_cmd.common);
            return score_cmd.run();
        }
        if (*eval_app)
        {
            finish_config(eval_b, evaluate.common);
            return evaluate.run();
        }
        finish_config(grid_b, gridsearch.common);
        return gridsearch.run();
    }
    catch (const UsageError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const ConstraintError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const ParseError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const DomainError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const TrainingDiverged &e)
    {
        std::cerr << "error: training diverged: " << e.what() << '\n';
        return kExitRuntime;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace epsnode::cli

int main(int argc, char **argv) { return epsnode::cli::main(argc, argv); }

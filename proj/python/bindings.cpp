// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include "epsnode/autoencoder.hpp"
#include "epsnode/dataset.hpp"
#include "epsnode/environment.hpp"
#include "epsnode/error.hpp"
#include "epsnode/evaluation.hpp"
#include "epsnode/features.hpp"
#include "epsnode/gridsearch.hpp"
#include "epsnode/heatmap.hpp"
#include "epsnode/model_io.hpp"
#include "epsnode/novelty.hpp"
#include "epsnode/rng.hpp"
#include "epsnode/simulator.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <limits>

namespace py = pybind11;
using namespace epsnode;

namespace {

// (ny, nx) array, row j holds cells (i, j); missing cells are NaN.
py::array_t<double> map_array(const GridMap &grid, const std::function<double(std::size_t)> &value)
{
    py::array_t<double> out({grid.ny, grid.nx});
    auto a = out.mutable_unchecked<2>();
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            a(j, i) = value(grid.linear({i, j}));
    return out;
}

py::array_t<double> error_map_array(const ErrorMap &m)
{
    return map_array(m.grid, [&](std::size_t k) { return m.values[k].value_or(std::numeric_limits<double>::quiet_NaN()); });
}

py::array_t<double> density_array(const DensityMap &d)
{
    return map_array(d.grid, [&](std::size_t k) { return d.p[k]; });
}

DensityMap density_from(const py::array_t<double> &a)
{
    if (a.ndim() != 2)
        throw UsageError("density must be a 2D (ny, nx) array");
    const auto r = a.unchecked<2>();
    DensityMap d;
    d.grid = default_grid();
    d.grid.nx = static_cast<int>(r.shape(1));
    d.grid.ny = static_cast<int>(r.shape(0));
    d.p.resize(d.grid.cell_count());
    for (int j = 0; j < d.grid.ny; ++j)
        for (int i = 0; i < d.grid.nx; ++i)
            d.p[d.grid.linear({i, j})] = r(j, i);
    return d;
}

Environment environment_arg(const py::object &scenario)
{
    if (py::isinstance<Environment>(scenario))
        return scenario.cast<Environment>();
    return preset(scenario.cast<std::string>());
}

TrainConfig config_from(const py::dict &kw)
{
    TrainConfig c;
    for (const auto &[key, value] : kw)
    {
        const auto k = key.cast<std::string>();
        if (k == "batch_size")
            c.batch_size = value.cast<std::size_t>();
        else if (k == "learning_rate")
            c.learning_rate = value.cast<double>();
        else if (k == "max_epochs")
            c.max_epochs = value.cast<std::size_t>();
        else if (k == "patience")
            c.patience = value.cast<std::size_t>();
        else if (k == "min_delta")
            c.min_delta = value.cast<double>();
        else if (k == "seed")
            c.seed = value.cast<std::uint64_t>();
        else
            throw UsageError("unknown training option '" + k + "'");
    }
    return c;
}

py::dict report_dict(const TrainReport &r)
{
    py::dict d;
    d["train_mse"] = r.train_mse;
    d["val_mse"] = r.val_mse;
    d["best_val_mse"] = r.best_val_mse;
    d["stopped_epoch"] = r.stopped_epoch;
    d["best_epoch"] = r.best_epoch;
    d["final_val_mse"] = r.final_val_mse;
    return d;
}

py::dict score_dict(const ScoreResult &s)
{
    py::dict d;
    d["total"] = error_map_array(s.total);
    py::dict anchors;
    for (const auto &a : s.anchors)
        anchors[py::int_(a.anchor_id)] = error_map_array(a.map);
    d["anchors"] = anchors;
    std::vector<double> totals;
    for (const auto &e : s.samples)
        totals.push_back(e.total);
    d["sample_totals"] = totals;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "UWB fingerprint simulation, autoencoder novelty detection and KDE/KL evaluation.";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<UsageError>(m, "UsageError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ConstraintError>(m, "ConstraintError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<TrainingDiverged>(m, "TrainingDiverged", base.ptr());
    auto parse = py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<SchemaError>(m, "SchemaError", parse.ptr());

    // ---- environment and simulation ------------------------------------------------------

    py::class_<Environment>(m, "Environment")
        .def_readonly("name", &Environment::name)
        .def_property_readonly("anchors",
                               [](const Environment &e) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const auto &a : e.anchors)
                                       out.emplace_back(a.position.x, a.position.y);
                                   return out;
                               })
        .def_property_readonly("obstacles",
                               [](const Environment &e) {
                                   py::list out;
                                   for (const auto &o : e.obstacles)
                                   {
                                       py::dict d;
                                       d["min"] = py::make_tuple(o.footprint.min.x, o.footprint.min.y);
                                       d["max"] = py::make_tuple(o.footprint.max.x, o.footprint.max.y);
                                       d["material"] = std::string(to_string(o.material));
                                       out.append(d);
                                   }
                                   return out;
                               })
        .def("to_json", [](const Environment &e) { return environment_to_json(e); })
        .def_static("from_json", &environment_from_json)
        .def("__repr__", [](const Environment &e) {
            return "<Environment '" + e.name + "' with " + std::to_string(e.obstacles.size()) + " obstacles>";
        });

    m.def("preset", [](const std::string &name) { return preset(name); }, py::arg("name"));
    m.def("preset_names", &preset_names);

    m.def(
        "synthesize_cir",
        [](const py::object &scenario, double x, double y, int anchor, std::uint64_t seed) {
            const auto env = environment_arg(scenario);
            if (anchor < 0 || static_cast<std::size_t>(anchor) >= env.anchors.size())
                throw UsageError("anchor id out of range");
            const auto cir = synthesize_cir(env, {x, y}, env.anchors[static_cast<std::size_t>(anchor)], ChannelParams{}, seed);
            return std::vector<double>(cir.samples.begin(), cir.samples.end());
        },
        py::arg("scenario"), py::arg("x"), py::arg("y"), py::arg("anchor"), py::arg("seed") = 0);

    m.def(
        "estimate_range",
        [](const std::vector<double> &samples, std::uint64_t seed) {
            if (samples.size() != kCirLength)
                throw UsageError("CIR must have " + std::to_string(kCirLength) + " samples");
            Cir cir;
            std::copy(samples.begin(), samples.end(), cir.samples.begin());
            return estimate_range(cir, ChannelParams{}, seed);
        },
        py::arg("cir"), py::arg("seed") = 0);

    // ---- datasets -----------------------------------------------------------------------

    py::class_<MeasurementSet>(m, "MeasurementSet")
        .def_readonly("scenario", &MeasurementSet::scenario_name)
        .def_readonly("seed", &MeasurementSet::seed)
        .def("__len__", [](const MeasurementSet &s) { return s.measurements.size(); })
        .def_property_readonly("cells",
                               [](const MeasurementSet &s) {
                                   std::vector<std::pair<int, int>> out;
                                   for (const auto &x : s.measurements)
                                       out.emplace_back(x.cell.i, x.cell.j);
                                   return out;
                               })
        .def_property_readonly("ranges",
                               [](const MeasurementSet &s) {
                                   Eigen::MatrixXd r(static_cast<Eigen::Index>(s.measurements.size()),
                                                     static_cast<Eigen::Index>(s.anchor_count()));
                                   for (Eigen::Index k = 0; k < r.rows(); ++k)
                                       for (Eigen::Index a = 0; a < r.cols(); ++a)
                                           r(k, a) = s.measurements[static_cast<std::size_t>(k)]
                                                         .per_anchor[static_cast<std::size_t>(a)]
                                                         .range;
                                   return r;
                               })
        .def("save", [](const MeasurementSet &s, const std::filesystem::path &p) { save(s, p); })
        .def("split", &split, py::arg("val_fraction") = 0.2, py::arg("seed") = 0)
        .def("__eq__", [](const MeasurementSet &a, const MeasurementSet &b) { return a == b; });

    m.def(
        "generate_dataset",
        [](const py::object &scenario, int passes, int samples, std::uint64_t seed) {
            return generate_dataset(environment_arg(scenario), default_grid(), passes, samples, seed);
        },
        py::arg("scenario"), py::arg("passes") = 5, py::arg("samples") = 10, py::arg("seed") = 42);
    m.def("load_dataset", [](const std::filesystem::path &p) { return load(p); }, py::arg("path"));

    // ---- features -----------------------------------------------------------------------

    m.def("moving_average", [](const std::vector<double> &x) { return moving_average(x); });
    m.def("find_peaks", [](const std::vector<double> &x, std::size_t k) { return find_peaks(x, k); }, py::arg("signal"),
          py::arg("k") = kPeaksPerAnchor);
    m.def(
        "fit_pca",
        [](const Eigen::MatrixXd &rows, double target) {
            const auto p = fit_pca(rows, target);
            return py::make_tuple(p.mean, p.components, p.explained_ratio);
        },
        py::arg("rows"), py::arg("variance_target") = 0.90);
    m.def(
        "feature_matrix",
        [](const MeasurementSet &s, const std::string &pipeline) {
            const auto p = pipeline_from_string(pipeline);
            if (p == Pipeline::pca)
                throw UsageError("use train_bundle for the PCA pipeline; it fits the projection on training data");
            return feature_matrix(s, p);
        },
        py::arg("data"), py::arg("pipeline"));
    m.def(
        "fit_scaler",
        [](const Eigen::MatrixXd &rows) {
            const auto s = fit_scaler(rows);
            return py::make_tuple(s.mins, s.maxs);
        },
        py::arg("rows"));

    // ---- autoencoder --------------------------------------------------------------------

    py::class_<Autoencoder>(m, "Autoencoder")
        .def_static("build", &Autoencoder::build, py::arg("n"), py::arg("e1"), py::arg("e2"), py::arg("d1"),
                    py::arg("leaky_alpha") = 0.01, py::arg("seed") = 0)
        .def_property_readonly("dims", &Autoencoder::dims)
        .def_property_readonly("parameter_count", &Autoencoder::parameter_count)
        .def("forward", &Autoencoder::forward, py::arg("x"))
        .def(
            "forward_rows", [](const Autoencoder &a, const Eigen::MatrixXd &rows) -> Eigen::MatrixXd {
                return a.forward_batch(rows.transpose()).transpose();
            },
            py::arg("rows"))
        .def(
            "gradient_check",
            [](const Autoencoder &a, const Eigen::VectorXd &x, double tol) {
                const auto g = gradient_check(a, x, tol);
                return py::make_tuple(g.passed, g.max_relative_error);
            },
            py::arg("x"), py::arg("tolerance") = 1e-4)
        .def("to_json", [](const Autoencoder &a) { return autoencoder_to_json(a); })
        .def_static("from_json", &autoencoder_from_json);

    m.def(
        "train",
        [](Autoencoder model, const Eigen::MatrixXd &train_rows, const Eigen::MatrixXd &val_rows, const py::kwargs &kw) {
            auto r = train(std::move(model), train_rows, val_rows, config_from(kw));
            return py::make_tuple(std::move(r.model), report_dict(r.report));
        },
        py::arg("model"), py::arg("train_rows"), py::arg("val_rows"));

    // ---- bundles and scoring ------------------------------------------------------------

    py::class_<ModelBundle>(m, "ModelBundle")
        .def_property_readonly("pipeline", [](const ModelBundle &b) { return std::string(to_string(b.pipeline)); })
        .def_readonly("autoencoder", &ModelBundle::autoencoder)
        .def("save", [](const ModelBundle &b, const std::filesystem::path &p) { save_bundle(b, p); })
        .def("to_json", [](const ModelBundle &b) { return bundle_to_json(b); })
        .def_static("from_json", &bundle_from_json);
    m.def("load_bundle", [](const std::filesystem::path &p) { return load_bundle(p); }, py::arg("path"));

    m.def(
        "train_bundle",
        [](const MeasurementSet &nominal, const std::string &pipeline, std::uint64_t seed, const py::kwargs &kw) {
            const auto p = pipeline_from_string(pipeline);
            const auto [tr, va] = split(nominal, 0.2, derive_seed(seed, {1}));
            std::optional<PcaModel> pca;
            if (p == Pipeline::pca)
                pca = fit_pca(cir_matrix(tr), 0.90);
            const PcaModel *pp = pca ? &*pca : nullptr;
            const auto xtr = feature_matrix(tr, p, pp), xva = feature_matrix(va, p, pp);
            const auto scaler = fit_scaler(xtr);
            const auto best = reference_best(p);
            auto cfg = config_from(kw);
            if (!kw.contains("batch_size"))
                cfg.batch_size = best.batch_size;
            if (!kw.contains("learning_rate"))
                cfg.learning_rate = best.learning_rate;
            if (!kw.contains("seed"))
                cfg.seed = derive_seed(seed, {2});
            auto model = Autoencoder::build(static_cast<std::size_t>(xtr.cols()), best.e1, best.e2, best.e1, 0.01,
                                            derive_seed(seed, {3}));
            auto r = train(std::move(model), scaler.scale_rows(xtr), scaler.scale_rows(xva), cfg);
            return py::make_tuple(ModelBundle{p, std::move(r.model), scaler, pca}, report_dict(r.report));
        },
        py::arg("nominal"), py::arg("pipeline"), py::arg("seed") = 42,
        "Train the reference architecture for a pipeline; extra keyword arguments override training options.");

    m.def(
        "score",
        [](const ModelBundle &b, const MeasurementSet &s, const std::string &aggregation, bool unscaled) {
            ScoreOptions opt;
            opt.unscaled = unscaled;
            if (aggregation == "median")
                opt.aggregation = Aggregation::median;
            else if (aggregation == "max")
                opt.aggregation = Aggregation::max;
            else if (aggregation != "mean")
                throw UsageError("unknown aggregation '" + aggregation + "'");
            return score_dict(score(b.autoencoder, b.scaler, b.pipeline, b.pca ? &*b.pca : nullptr, s, opt));
        },
        py::arg("model"), py::arg("data"), py::arg("aggregation") = "mean", py::arg("unscaled") = false);

    m.def("anchor_error", &anchor_error, py::arg("y_hat"), py::arg("y"));
    m.def("total_error", [](const std::vector<double> &e) { return total_error(e); }, py::arg("errors"));

    m.def(
        "render_ascii",
        [](const py::array_t<double> &values, const std::string &title) {
            if (values.ndim() != 2)
                throw UsageError("expected a 2D (ny, nx) array");
            const auto r = values.unchecked<2>();
            ErrorMap map = ErrorMap::empty(default_grid());
            map.grid.nx = static_cast<int>(r.shape(1));
            map.grid.ny = static_cast<int>(r.shape(0));
            map.values.assign(map.grid.cell_count(), std::nullopt);
            map.counts.assign(map.grid.cell_count(), 0);
            for (int j = 0; j < map.grid.ny; ++j)
                for (int i = 0; i < map.grid.nx; ++i)
                    if (std::isfinite(r(j, i)))
                    {
                        map.values[map.grid.linear({i, j})] = r(j, i);
                        map.counts[map.grid.linear({i, j})] = 1;
                    }
            return render_ascii(map, title);
        },
        py::arg("values"), py::arg("title") = "");

    // ---- evaluation ---------------------------------------------------------------------

    m.def(
        "kde",
        [](const py::array_t<double> &weights, double bandwidth) {
            auto d = density_from(weights);
            return density_array(kde(d.grid, d.p, bandwidth));
        },
        py::arg("weights"), py::arg("bandwidth") = 0.5, "Weighted KDE of a (ny, nx) map on the default grid geometry.");
    m.def(
        "kl_divergence",
        [](const py::array_t<double> &p, const py::array_t<double> &q, double eps) {
            return kl_divergence(density_from(p), density_from(q), eps);
        },
        py::arg("p"), py::arg("q"), py::arg("eps") = 1e-9);
    m.def("uniform_density", [] { return density_array(uniform_density(default_grid())); });
    m.def(
        "ground_truth_density",
        [](const py::object &scenario, double bandwidth) {
            return density_array(ground_truth_density(environment_arg(scenario), default_grid(), bandwidth));
        },
        py::arg("scenario"), py::arg("bandwidth") = 0.5);

    // ---- grid search --------------------------------------------------------------------

    m.def(
        "enumerate_space",
        [](const std::string &pipeline, std::size_t n) {
            const auto en = enumerate(table_space(pipeline_from_string(pipeline)), n);
            py::list candidates, excluded;
            for (const auto &c : en.candidates)
                candidates.append(py::make_tuple(c.arch.e1, c.arch.e2, c.config.batch_size, c.config.learning_rate));
            for (const auto &x : en.excluded)
                excluded.append(py::make_tuple(x.arch.e1, x.arch.e2, x.batch_size, x.learning_rate, x.reason));
            return py::make_tuple(candidates, excluded);
        },
        py::arg("pipeline"), py::arg("n"));
}

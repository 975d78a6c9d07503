// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include "epsnode/model_io.hpp"
#include "epsnode/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace epsnode {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

ojson vec_json(const Eigen::VectorXd &v) { return ojson(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vec_from(const json &j)
{
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Row-major nested arrays.
ojson mat_json(const Eigen::MatrixXd &m)
{
    ojson rows = ojson::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        rows.push_back(vec_json(m.row(r).transpose()));
    return rows;
}

Eigen::MatrixXd mat_from(const json &j)
{
    const auto rows = j.get<std::vector<std::vector<double>>>();
    const auto cols = rows.empty() ? 0 : rows.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r)
    {
        if (rows[r].size() != cols)
            throw SchemaError("ragged matrix", 0);
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return m;
}

ojson ae_json(const Autoencoder &model)
{
    ojson j;
    const auto d = model.dims();
    j["dims"] = std::vector<std::size_t>(d.begin(), d.end());
    j["leaky_alpha"] = model.leaky_alpha();
    j["weights"] = ojson::array();
    j["biases"] = ojson::array();
    for (const auto &layer : model.layers())
    {
        j["weights"].push_back(mat_json(layer.weights));
        j["biases"].push_back(vec_json(layer.bias));
    }
    return j;
}

Autoencoder ae_from(const json &j)
{
    const auto &w = j.at("weights");
    const auto &b = j.at("biases");
    if (w.size() != Autoencoder::kLayers || b.size() != Autoencoder::kLayers)
        throw SchemaError("autoencoder needs " + std::to_string(Autoencoder::kLayers) + " layers", 0);
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l < Autoencoder::kLayers; ++l)
    {
        DenseLayer layer;
        layer.weights = mat_from(w[l]);
        layer.bias = vec_from(b[l]);
        layer.activation = l + 1 == Autoencoder::kLayers ? Activation::leaky_relu : Activation::relu;
        layers.push_back(std::move(layer));
    }
    try
    {
        auto model = Autoencoder::from_layers(std::move(layers), j.at("leaky_alpha").get<double>());
        const auto dims = j.at("dims").get<std::vector<std::size_t>>();
        const auto actual = model.dims();
        if (!std::equal(dims.begin(), dims.end(), actual.begin(), actual.end()))
            throw SchemaError("declared dims do not match the weight shapes", 0);
        return model;
    }
    catch (const ConstraintError &e)
    {
        throw SchemaError(e.what(), 0);
    }
}

ojson scaler_json(const Scaler &s)
{
    ojson j;
    j["mins"] = vec_json(s.mins);
    j["maxs"] = vec_json(s.maxs);
    return j;
}

Scaler scaler_from(const json &j)
{
    Scaler s{vec_from(j.at("mins")), vec_from(j.at("maxs"))};
    if (s.mins.size() != s.maxs.size())
        throw SchemaError("scaler mins and maxs differ in length", 0);
    for (Eigen::Index k = 0; k < s.mins.size(); ++k)
        if (s.maxs(k) < s.mins(k))
            throw SchemaError("scaler max below min", 0);
    return s;
}

ojson pca_json(const PcaModel &p)
{
    ojson j;
    j["mean"] = vec_json(p.mean);
    j["components"] = mat_json(p.components); // d x k, row-major
    j["explained_ratio"] = p.explained_ratio;
    return j;
}

PcaModel pca_from(const json &j)
{
    PcaModel p;
    p.mean = vec_from(j.at("mean"));
    p.components = mat_from(j.at("components"));
    p.explained_ratio = j.at("explained_ratio").get<std::vector<double>>();
    if (p.components.rows() != p.mean.size() || static_cast<std::size_t>(p.components.cols()) != p.explained_ratio.size())
        throw SchemaError("PCA component shape mismatch", 0);
    return p;
}

template <typename F>
auto guarded(const std::string &text, F &&f)
{
    try
    {
        return f(json::parse(text));
    }
    catch (const json::exception &e)
    {
        throw ParseError(e.what(), 0);
    }
}

std::string read_file(const std::filesystem::path &path)
{
    std::ifstream is(path);
    if (!is)
        throw Error("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

std::string autoencoder_to_json(const Autoencoder &model) { return ae_json(model).dump(); }
Autoencoder autoencoder_from_json(const std::string &text) { return guarded(text, ae_from); }
std::string scaler_to_json(const Scaler &scaler) { return scaler_json(scaler).dump(); }
Scaler scaler_from_json(const std::string &text) { return guarded(text, scaler_from); }
std::string pca_to_json(const PcaModel &pca) { return pca_json(pca).dump(); }
PcaModel pca_from_json(const std::string &text) { return guarded(text, pca_from); }

std::string bundle_to_json(const ModelBundle &bundle)
{
    ojson j;
    j["pipeline"] = std::string(to_string(bundle.pipeline));
    j["autoencoder"] = ae_json(bundle.autoencoder);
    j["scaler"] = scaler_json(bundle.scaler);
    j["pca"] = bundle.pca ? pca_json(*bundle.pca) : ojson(nullptr);
    return j.dump();
}

ModelBundle bundle_from_json(const std::string &text)
{
    return guarded(text, [](const json &j) {
        ModelBundle b;
        try
        {
            b.pipeline = pipeline_from_string(j.at("pipeline").get<std::string>());
        }
        catch (const UsageError &e)
        {
            throw SchemaError(e.what(), 0);
        }
        b.autoencoder = ae_from(j.at("autoencoder"));
        b.scaler = scaler_from(j.at("scaler"));
        if (j.contains("pca") && !j.at("pca").is_null())
            b.pca = pca_from(j.at("pca"));
        if (b.pipeline == Pipeline::pca && !b.pca)
            throw SchemaError("PCA pipeline model without a PCA block", 0);
        if (b.scaler.dim() != b.autoencoder.input_dim())
            throw SchemaError("scaler width differs from the autoencoder input", 0);
        return b;
    });
}

void save_bundle(const ModelBundle &bundle, const std::filesystem::path &path)
{
    std::ofstream os(path);
    if (!os)
        throw Error("cannot open '" + path.string() + "' for writing");
    os << bundle_to_json(bundle) << '\n';
}

ModelBundle load_bundle(const std::filesystem::path &path) { return bundle_from_json(read_file(path)); }

std::string train_report_to_json(const TrainReport &report)
{
    ojson j;
    j["stopped_epoch"] = report.stopped_epoch;
    j["best_epoch"] = report.best_epoch;
    j["final_val_mse"] = report.final_val_mse;
    j["train_mse"] = report.train_mse;
    j["val_mse"] = report.val_mse;
    j["best_val_mse"] = report.best_val_mse;
    return j.dump(2);
}

} // namespace epsnode

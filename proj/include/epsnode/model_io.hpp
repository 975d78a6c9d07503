// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_MODEL_IO_HPP
#define EPSNODE_MODEL_IO_HPP

#include "epsnode/autoencoder.hpp"
#include "epsnode/features.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace epsnode {

// Everything needed to score a dataset: the network plus the feature transforms fitted on
// nominal training data.
struct ModelBundle
{
    Pipeline pipeline = Pipeline::rng;
    Autoencoder autoencoder;
    Scaler scaler;
    std::optional<PcaModel> pca;
};

std::string autoencoder_to_json(const Autoencoder &model);
Autoencoder autoencoder_from_json(const std::string &text);

std::string scaler_to_json(const Scaler &scaler);
Scaler scaler_from_json(const std::string &text);

std::string pca_to_json(const PcaModel &pca);
PcaModel pca_from_json(const std::string &text);

std::string bundle_to_json(const ModelBundle &bundle);
ModelBundle bundle_from_json(const std::string &text); // throws ParseError / SchemaError

void save_bundle(const ModelBundle &bundle, const std::filesystem::path &path);
ModelBundle load_bundle(const std::filesystem::path &path);

std::string train_report_to_json(const TrainReport &report);

} // namespace epsnode

#endif

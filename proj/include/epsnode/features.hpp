// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_FEATURES_HPP
#define EPSNODE_FEATURES_HPP

#include "epsnode/dataset.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace epsnode {

// Autoencoder input recipes: ranges only, ranges + moving-average CIR peaks, ranges + PCA of the CIRs.
enum class Pipeline
{
    rng,
    ma,
    pca
};

std::string_view to_string(Pipeline p);  // "RNG", "MA", "PCA"
Pipeline pipeline_from_string(std::string_view s); // case-insensitive, throws UsageError

inline constexpr std::size_t kPeaksPerAnchor = 6;

// Where one anchor's features sit inside a FeatureVector.
struct AnchorSlot
{
    int anchor_id = 0;
    std::size_t range_index = 0;
    std::size_t extra_begin = 0; // CIR-derived features owned by this anchor (MA only)
    std::size_t extra_end = 0;
};

struct FeatureVector
{
    Pipeline pipeline = Pipeline::rng;
    std::vector<double> values;
    std::vector<AnchorSlot> anchor_slots;
};

// y[0] = x[0], y[i] = (x[i] + x[i-1]) / 2.
std::vector<double> moving_average(std::span<const double> x);

// Amplitudes of the first k interior peaks (x[i] > x[i-1] && x[i] >= x[i+1]), zero padded.
std::vector<double> find_peaks(std::span<const double> signal, std::size_t k = kPeaksPerAnchor);

// ---- PCA ----------------------------------------------------------------------------------

struct SymmetricEigen
{
    Eigen::VectorXd values;  // descending
    Eigen::MatrixXd vectors; // columns, orthonormal
    int sweeps = 0;
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
// tolerance * ||A||_F (or max_sweeps is reached).
SymmetricEigen jacobi_eigen(Eigen::MatrixXd a, double tolerance = 1e-10, int max_sweeps = 100);

struct PcaModel
{
    Eigen::VectorXd mean;
    Eigen::MatrixXd components; // d x k, orthonormal columns
    std::vector<double> explained_ratio;

    std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
    std::size_t k() const { return static_cast<std::size_t>(components.cols()); }
};

// Rows are samples. Keeps the smallest k whose cumulative explained variance reaches the target.
// Throws NumericalError("degenerate data") when the total variance is zero.
PcaModel fit_pca(const Eigen::MatrixXd &rows, double variance_target = 0.90);

Eigen::VectorXd apply_pca(const PcaModel &model, const Eigen::VectorXd &x);
Eigen::VectorXd reconstruct_pca(const PcaModel &model, const Eigen::VectorXd &z);

// Anchor CIRs concatenated in anchor order (length 152 * n_anchors).
Eigen::VectorXd concatenated_cir(const Measurement &m);
Eigen::MatrixXd cir_matrix(const MeasurementSet &set);

// ---- Extraction ---------------------------------------------------------------------------

std::size_t feature_length(Pipeline p, std::size_t n_anchors, std::size_t pca_k = 0);

// Throws UsageError when the PCA pipeline is requested without a model.
FeatureVector extract(const Measurement &m, Pipeline pipeline, const PcaModel *pca = nullptr);

// One row per measurement.
Eigen::MatrixXd feature_matrix(const MeasurementSet &set, Pipeline pipeline, const PcaModel *pca = nullptr);

// ---- Min-max scaling ----------------------------------------------------------------------

struct Scaler
{
    Eigen::VectorXd mins;
    Eigen::VectorXd maxs;

    std::size_t dim() const { return static_cast<std::size_t>(mins.size()); }

    // Values outside the fitted range are not clamped; constant features map to 0.
    Eigen::VectorXd scale(const Eigen::VectorXd &v) const;
    Eigen::MatrixXd scale_rows(const Eigen::MatrixXd &rows) const;
    // Inverse of scale on non-constant features.
    Eigen::VectorXd unscale(const Eigen::VectorXd &v) const;
};

Scaler fit_scaler(const Eigen::MatrixXd &train);

} // namespace epsnode

#endif

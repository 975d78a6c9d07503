// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_AUTOENCODER_HPP
#define EPSNODE_AUTOENCODER_HPP

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace epsnode {

enum class Activation
{
    relu,
    leaky_relu
};

struct DenseLayer
{
    Eigen::MatrixXd weights; // out x in
    Eigen::VectorXd bias;
    Activation activation = Activation::relu;

    Eigen::Index in() const { return weights.cols(); }
    Eigen::Index out() const { return weights.rows(); }
};

struct Gradients
{
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> bias;
};

// Overcomplete dense autoencoder with layer widths [N, E1, E2, D1, N] on an N-dimensional input.
// The first four layers use ReLU, the output layer Leaky ReLU.
class Autoencoder
{
public:
    static constexpr std::size_t kLayers = 5;

    Autoencoder() = default;

    // Throws ConstraintError unless n < e1 < e2 and d1 > n. Weights are drawn uniformly from
    // +-sqrt(6 / fan_in), biases start at zero.
    static Autoencoder build(std::size_t n, std::size_t e1, std::size_t e2, std::size_t d1, double leaky_alpha,
                             std::uint64_t seed);

    // Assembles a model from explicit layers (deserialization, tests). Checks shapes and the
    // overcompleteness constraints.
    static Autoencoder from_layers(std::vector<DenseLayer> layers, double leaky_alpha);

    std::array<std::size_t, kLayers> dims() const;
    std::size_t input_dim() const { return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().in()); }
    double leaky_alpha() const { return leaky_alpha_; }
    const std::vector<DenseLayer> &layers() const { return layers_; }
    std::vector<DenseLayer> &layers() { return layers_; }
    std::size_t parameter_count() const;

    Eigen::VectorXd forward(const Eigen::VectorXd &x) const;
    // Columns are samples.
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd &x) const;

    // Mean over batch and features of (reconstruction - x)^2; fills grads when given.
    double loss(const Eigen::MatrixXd &x, Gradients *grads = nullptr) const;

    // Smallest |pre-activation| over all hidden and output units for input x.
    double min_preactivation_magnitude(const Eigen::VectorXd &x) const;

    friend bool operator==(const Autoencoder &a, const Autoencoder &b);

private:
    std::vector<DenseLayer> layers_;
    double leaky_alpha_ = 0.01;
};

// ---- Training -----------------------------------------------------------------------------

struct AdamConfig
{
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct TrainConfig
{
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    std::size_t max_epochs = 200;
    std::size_t patience = 20;
    double min_delta = 1e-6;
    std::uint64_t seed = 0;
    AdamConfig adam;

    void validate() const; // throws UsageError
};

struct TrainReport
{
    std::vector<double> train_mse;     // per epoch
    std::vector<double> val_mse;       // per epoch
    std::vector<double> best_val_mse;  // running minimum of val_mse
    std::size_t stopped_epoch = 0;     // epochs actually run
    std::size_t best_epoch = 0;        // 1-based epoch of the returned snapshot
    double final_val_mse = 0.0;        // validation MSE of the returned snapshot
};

struct TrainResult
{
    Autoencoder model;
    TrainReport report;
};

// Mini-batch Adam on the reconstruction MSE. Rows are samples (already scaled). Stops after
// `patience` epochs without a validation improvement larger than min_delta and returns the
// best-validation snapshot. Throws TrainingDiverged on a non-finite loss.
TrainResult train(Autoencoder model, const Eigen::MatrixXd &train_rows, const Eigen::MatrixXd &val_rows,
                  const TrainConfig &config);

// Mean reconstruction MSE over rows (samples).
double reconstruction_mse(const Autoencoder &model, const Eigen::MatrixXd &rows);

// ---- Gradient check -----------------------------------------------------------------------

struct GradientCheck
{
    double max_relative_error = 0.0;
    std::size_t worst_layer = 0;
    bool worst_is_bias = false;
    std::size_t parameters = 0;
    bool passed = false;
};

// Analytic MSE gradient for a single sample against central differences (step 1e-5) on every
// weight and bias. Relative error is |a - f| / max(|a|, |f|, 1e-6). `tamper` may modify the
// analytic gradients before comparison.
GradientCheck gradient_check(const Autoencoder &model, const Eigen::VectorXd &x, double tolerance,
                             const std::function<void(Gradients &)> &tamper = {});

} // namespace epsnode

#endif

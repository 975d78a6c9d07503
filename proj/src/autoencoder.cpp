// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include "epsnode/autoencoder.hpp"
#include "epsnode/error.hpp"
#include "epsnode/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace epsnode {

namespace {

void activate(Eigen::MatrixXd &z, Activation act, double alpha)
{
    if (act == Activation::relu)
        z = z.cwiseMax(0.0);
    else
        z = z.unaryExpr([alpha](double v) { return v > 0.0 ? v : alpha * v; });
}

Eigen::MatrixXd derivative(const Eigen::MatrixXd &z, Activation act, double alpha)
{
    const double neg = act == Activation::relu ? 0.0 : alpha;
    return z.unaryExpr([neg](double v) { return v > 0.0 ? 1.0 : neg; });
}

void check_constraints(std::size_t n, std::size_t e1, std::size_t e2, std::size_t d1)
{
    if (!(n < e1))
        throw ConstraintError("N < N_E1 violated (N = " + std::to_string(n) + ", N_E1 = " + std::to_string(e1) + ")");
    if (!(e1 < e2))
        throw ConstraintError("N_E1 < N_E2 violated (N_E1 = " + std::to_string(e1) + ", N_E2 = " + std::to_string(e2) +
                              ")");
    if (!(d1 > n))
        throw ConstraintError("N_D1 > N violated (N_D1 = " + std::to_string(d1) + ", N = " + std::to_string(n) + ")");
}

} // namespace

Autoencoder Autoencoder::build(std::size_t n, std::size_t e1, std::size_t e2, std::size_t d1, double leaky_alpha,
                               std::uint64_t seed)
{
    if (n == 0)
        throw ConstraintError("input dimension must be positive");
    check_constraints(n, e1, e2, d1);
    if (!(leaky_alpha > 0.0))
        throw ConstraintError("leaky ReLU slope must be positive");

    const std::array<std::size_t, kLayers + 1> widths{n, n, e1, e2, d1, n};
    Autoencoder ae;
    ae.leaky_alpha_ = leaky_alpha;
    Rng rng(seed);
    for (std::size_t l = 0; l < kLayers; ++l)
    {
        const auto in = static_cast<Eigen::Index>(widths[l]);
        const auto out = static_cast<Eigen::Index>(widths[l + 1]);
        const double limit = std::sqrt(6.0 / static_cast<double>(in));
        std::uniform_real_distribution<double> dist(-limit, limit);
        DenseLayer layer;
        layer.weights.resize(out, in);
        for (Eigen::Index r = 0; r < out; ++r)
            for (Eigen::Index c = 0; c < in; ++c)
                layer.weights(r, c) = dist(rng);
        layer.bias = Eigen::VectorXd::Zero(out);
        layer.activation = l + 1 == kLayers ? Activation::leaky_relu : Activation::relu;
        ae.layers_.push_back(std::move(layer));
    }
    return ae;
}

Autoencoder Autoencoder::from_layers(std::vector<DenseLayer> layers, double leaky_alpha)
{
    if (layers.size() != kLayers)
        throw ConstraintError("autoencoder needs exactly " + std::to_string(kLayers) + " layers");
    for (std::size_t l = 0; l < kLayers; ++l)
    {
        if (layers[l].bias.size() != layers[l].out())
            throw ConstraintError("layer " + std::to_string(l) + ": bias length mismatch");
        if (l > 0 && layers[l].in() != layers[l - 1].out())
            throw ConstraintError("layer " + std::to_string(l) + ": input width mismatch");
    }
    const auto n = static_cast<std::size_t>(layers[0].in());
    if (static_cast<std::size_t>(layers[0].out()) != n || static_cast<std::size_t>(layers[4].out()) != n)
        throw ConstraintError("first and last layer widths must equal the input dimension");
    check_constraints(n, static_cast<std::size_t>(layers[1].out()), static_cast<std::size_t>(layers[2].out()),
                      static_cast<std::size_t>(layers[3].out()));
    if (!(leaky_alpha > 0.0))
        throw ConstraintError("leaky ReLU slope must be positive");
    Autoencoder ae;
    ae.layers_ = std::move(layers);
    ae.leaky_alpha_ = leaky_alpha;
    return ae;
}

std::array<std::size_t, Autoencoder::kLayers> Autoencoder::dims() const
{
    std::array<std::size_t, kLayers> d{};
    for (std::size_t l = 0; l < layers_.size() && l < kLayers; ++l)
        d[l] = static_cast<std::size_t>(layers_[l].out());
    return d;
}

std::size_t Autoencoder::parameter_count() const
{
    std::size_t count = 0;
    for (const auto &layer : layers_)
        count += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
    return count;
}

Eigen::MatrixXd Autoencoder::forward_batch(const Eigen::MatrixXd &x) const
{
    if (static_cast<std::size_t>(x.rows()) != input_dim())
        throw DomainError("input has " + std::to_string(x.rows()) + " features, model expects " +
                          std::to_string(input_dim()));
    Eigen::MatrixXd a = x;
    for (const auto &layer : layers_)
    {
        Eigen::MatrixXd z = (layer.weights * a).colwise() + layer.bias;
        activate(z, layer.activation, leaky_alpha_);
        a = std::move(z);
    }
    return a;
}

Eigen::VectorXd Autoencoder::forward(const Eigen::VectorXd &x) const
{
    return forward_batch(x);
}

double Autoencoder::loss(const Eigen::MatrixXd &x, Gradients *grads) const
{
    if (static_cast<std::size_t>(x.rows()) != input_dim())
        throw DomainError("input has " + std::to_string(x.rows()) + " features, model expects " +
                          std::to_string(input_dim()));
    const std::size_t L = layers_.size();
    std::vector<Eigen::MatrixXd> pre(L), act(L + 1);
    act[0] = x;
    for (std::size_t l = 0; l < L; ++l)
    {
        pre[l] = (layers_[l].weights * act[l]).colwise() + layers_[l].bias;
        act[l + 1] = pre[l];
        activate(act[l + 1], layers_[l].activation, leaky_alpha_);
    }
    const Eigen::MatrixXd diff = act[L] - x;
    const double count = static_cast<double>(x.size());
    const double mse = diff.squaredNorm() / count;
    if (!grads)
        return mse;

    grads->weights.resize(L);
    grads->bias.resize(L);
    Eigen::MatrixXd delta = (2.0 / count) * diff; // dLoss / d activation
    for (std::size_t l = L; l-- > 0;)
    {
        delta = delta.cwiseProduct(derivative(pre[l], layers_[l].activation, leaky_alpha_));
        grads->weights[l] = delta * act[l].transpose();
        grads->bias[l] = delta.rowwise().sum();
        if (l > 0)
            delta = layers_[l].weights.transpose() * delta;
    }
    return mse;
}

double Autoencoder::min_preactivation_magnitude(const Eigen::VectorXd &x) const
{
    double m = std::numeric_limits<double>::infinity();
    Eigen::VectorXd a = x;
    for (const auto &layer : layers_)
    {
        Eigen::MatrixXd z = layer.weights * a + layer.bias;
        m = std::min(m, z.cwiseAbs().minCoeff());
        activate(z, layer.activation, leaky_alpha_);
        a = z;
    }
    return m;
}

bool operator==(const Autoencoder &a, const Autoencoder &b)
{
    if (a.leaky_alpha_ != b.leaky_alpha_ || a.layers_.size() != b.layers_.size())
        return false;
    for (std::size_t l = 0; l < a.layers_.size(); ++l)
    {
        const auto &x = a.layers_[l], &y = b.layers_[l];
        if (x.activation != y.activation || x.weights.rows() != y.weights.rows() ||
            x.weights.cols() != y.weights.cols() || x.weights != y.weights || x.bias != y.bias)
            return false;
    }
    return true;
}

// ---- Training -----------------------------------------------------------------------------

void TrainConfig::validate() const
{
    if (batch_size < 1)
        throw UsageError("batch size must be at least 1");
    if (!(learning_rate > 0.0))
        throw UsageError("learning rate must be positive");
    if (max_epochs < 1)
        throw UsageError("max_epochs must be at least 1");
    if (patience > max_epochs)
        throw UsageError("patience cannot exceed max_epochs");
    if (min_delta < 0.0)
        throw UsageError("min_delta must be non-negative");
}

double reconstruction_mse(const Autoencoder &model, const Eigen::MatrixXd &rows)
{
    return model.loss(rows.transpose());
}

TrainResult train(Autoencoder model, const Eigen::MatrixXd &train_rows, const Eigen::MatrixXd &val_rows,
                  const TrainConfig &config)
{
    config.validate();
    if (train_rows.rows() == 0 || val_rows.rows() == 0)
        throw UsageError("training and validation sets must be nonempty");
    const auto n = static_cast<Eigen::Index>(model.input_dim());
    if (train_rows.cols() != n || val_rows.cols() != n)
        throw DomainError("feature width does not match the model input dimension");

    const Eigen::MatrixXd train_cols = train_rows.transpose();
    const Eigen::MatrixXd val_cols = val_rows.transpose();
    const auto samples = static_cast<std::size_t>(train_cols.cols());

    auto &layers = model.layers();
    std::vector<Eigen::MatrixXd> m_w, v_w;
    std::vector<Eigen::VectorXd> m_b, v_b;
    for (const auto &layer : layers)
    {
        m_w.push_back(Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()));
        v_w.push_back(Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()));
        m_b.push_back(Eigen::VectorXd::Zero(layer.bias.size()));
        v_b.push_back(Eigen::VectorXd::Zero(layer.bias.size()));
    }

    const auto &adam = config.adam;
    Rng rng(derive_seed(config.seed, {0x7472616eULL}));
    std::vector<std::size_t> order(samples);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result{model, {}};
    auto &report = result.report;
    double best = std::numeric_limits<double>::infinity();
    double plateau_ref = best;
    std::size_t stale = 0;
    std::size_t step = 0;
    Gradients grads;
    Eigen::MatrixXd batch;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch)
    {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t batch_no = 0;
        for (std::size_t start = 0; start < samples; start += config.batch_size, ++batch_no)
        {
            const std::size_t len = std::min(config.batch_size, samples - start);
            batch.resize(n, static_cast<Eigen::Index>(len));
            for (std::size_t k = 0; k < len; ++k)
                batch.col(static_cast<Eigen::Index>(k)) = train_cols.col(static_cast<Eigen::Index>(order[start + k]));

            const double loss = model.loss(batch, &grads);
            if (!std::isfinite(loss))
                throw TrainingDiverged(epoch, batch_no, config.learning_rate, loss);
            epoch_loss += loss * static_cast<double>(len);

            ++step;
            const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(step));
            const double lr = config.learning_rate;
            const auto update = [&](auto &param, auto &m, auto &v, const auto &g) {
                m = adam.beta1 * m + (1.0 - adam.beta1) * g;
                v = adam.beta2 * v + (1.0 - adam.beta2) * g.cwiseProduct(g);
                param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + adam.epsilon);
            };
            for (std::size_t l = 0; l < layers.size(); ++l)
            {
                update(layers[l].weights, m_w[l], v_w[l], grads.weights[l]);
                update(layers[l].bias, m_b[l], v_b[l], grads.bias[l]);
            }
        }

        const double train_mse = epoch_loss / static_cast<double>(samples);
        const double val_mse = model.loss(val_cols);
        if (!std::isfinite(val_mse) || !std::isfinite(train_mse))
            throw TrainingDiverged(epoch, batch_no, config.learning_rate, std::isfinite(val_mse) ? train_mse : val_mse);
        report.train_mse.push_back(train_mse);
        report.val_mse.push_back(val_mse);
        report.stopped_epoch = epoch;

        if (val_mse < best)
        {
            best = val_mse;
            result.model = model;
            report.best_epoch = epoch;
        }
        report.best_val_mse.push_back(best);

        if (val_mse < plateau_ref - config.min_delta)
        {
            plateau_ref = val_mse;
            stale = 0;
        }
        else if (++stale >= config.patience)
        {
            break;
        }
    }
    report.final_val_mse = best;
    return result;
}

// ---- Gradient check -----------------------------------------------------------------------

GradientCheck gradient_check(const Autoencoder &model, const Eigen::VectorXd &x, double tolerance,
                             const std::function<void(Gradients &)> &tamper)
{
    constexpr double h = 1e-5;
    constexpr double floor = 1e-6;

    Gradients analytic;
    model.loss(x, &analytic);
    if (tamper)
        tamper(analytic);

    // Perturbing a parameter of layer l only changes one pre-activation of that layer, so the
    // forward prefix is cached and the loss is re-evaluated from layer l onward.
    const auto &layers = model.layers();
    const std::size_t L = layers.size();
    const double alpha = model.leaky_alpha();
    std::vector<Eigen::VectorXd> pre(L), act(L + 1);
    act[0] = x;
    for (std::size_t l = 0; l < L; ++l)
    {
        pre[l] = layers[l].weights * act[l] + layers[l].bias;
        Eigen::MatrixXd a = pre[l];
        activate(a, layers[l].activation, alpha);
        act[l + 1] = a;
    }
    const auto loss_from = [&](std::size_t l, const Eigen::VectorXd &z) {
        Eigen::MatrixXd a = z;
        activate(a, layers[l].activation, alpha);
        for (std::size_t k = l + 1; k < L; ++k)
        {
            Eigen::MatrixXd next = layers[k].weights * a + layers[k].bias;
            activate(next, layers[k].activation, alpha);
            a = std::move(next);
        }
        return (a - x).squaredNorm() / static_cast<double>(x.size());
    };

    GradientCheck out;
    const auto consider = [&](double a, double f, std::size_t layer, bool is_bias) {
        const double rel = std::abs(a - f) / std::max({std::abs(a), std::abs(f), floor});
        ++out.parameters;
        if (rel > out.max_relative_error)
        {
            out.max_relative_error = rel;
            out.worst_layer = layer;
            out.worst_is_bias = is_bias;
        }
    };

    for (std::size_t l = 0; l < L; ++l)
    {
        const auto &layer = layers[l];
        Eigen::VectorXd z = pre[l];
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
        {
            const double saved = z(r);
            // Unit r of layer l is w(r, :) . a + b(r); step each parameter by +-h.
            const auto central = [&](double coeff) {
                z(r) = saved + h * coeff;
                const double up = loss_from(l, z);
                z(r) = saved - h * coeff;
                const double down = loss_from(l, z);
                z(r) = saved;
                return (up - down) / (2.0 * h);
            };
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
                consider(analytic.weights[l](r, c), central(act[l](c)), l, false);
            consider(analytic.bias[l](r), central(1.0), l, true);
        }
    }
    out.passed = out.max_relative_error <= tolerance;
    return out;
}

} // namespace epsnode

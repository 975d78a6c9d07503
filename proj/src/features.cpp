// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include "epsnode/features.hpp"
#include "epsnode/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

namespace epsnode {

std::string_view to_string(Pipeline p)
{
    switch (p)
    {
    case Pipeline::rng:
        return "RNG";
    case Pipeline::ma:
        return "MA";
    case Pipeline::pca:
        return "PCA";
    }
    return "?";
}

Pipeline pipeline_from_string(std::string_view s)
{
    std::string key(s);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) { return std::toupper(ch); });
    if (key == "RNG")
        return Pipeline::rng;
    if (key == "MA")
        return Pipeline::ma;
    if (key == "PCA")
        return Pipeline::pca;
    throw UsageError("unknown pipeline '" + std::string(s) + "' (expected RNG, MA or PCA)");
}

std::vector<double> moving_average(std::span<const double> x)
{
    std::vector<double> y(x.size());
    if (x.empty())
        return y;
    y[0] = x[0];
    for (std::size_t i = 1; i < x.size(); ++i)
        y[i] = 0.5 * (x[i] + x[i - 1]);
    return y;
}

std::vector<double> find_peaks(std::span<const double> signal, std::size_t k)
{
    if (k == 0)
        throw UsageError("find_peaks needs k >= 1");
    std::vector<double> peaks;
    peaks.reserve(k);
    for (std::size_t i = 1; i + 1 < signal.size() && peaks.size() < k; ++i)
        if (signal[i] > signal[i - 1] && signal[i] >= signal[i + 1])
            peaks.push_back(signal[i]);
    peaks.resize(k, 0.0);
    return peaks;
}

// ---- Jacobi -------------------------------------------------------------------------------

SymmetricEigen jacobi_eigen(Eigen::MatrixXd a, double tolerance, int max_sweeps)
{
    const Eigen::Index n = a.rows();
    if (a.cols() != n)
        throw DomainError("jacobi_eigen needs a square matrix");

    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
    const auto off_norm = [&] {
        double s = 0.0;
        for (Eigen::Index q = 0; q < n; ++q)
            for (Eigen::Index p = 0; p < q; ++p)
                s += a(p, q) * a(p, q);
        return std::sqrt(2.0 * s);
    };

    int sweep = 0;
    while (sweep < max_sweeps && off_norm() >= tolerance * scale)
    {
        ++sweep;
        for (Eigen::Index p = 0; p + 1 < n; ++p)
        {
            for (Eigen::Index q = p + 1; q < n; ++q)
            {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300)
                    continue;
                const double app = a(p, p), aqq = a(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (Eigen::Index k = 0; k < n; ++k)
                {
                    if (k == p || k == q)
                        continue;
                    const double akp = a(k, p), akq = a(k, q);
                    const double np = c * akp - s * akq;
                    const double nq = s * akp + c * akq;
                    a(k, p) = a(p, k) = np;
                    a(k, q) = a(q, k) = nq;
                }
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;

                auto vp = v.col(p), vq = v.col(q);
                for (Eigen::Index k = 0; k < n; ++k)
                {
                    const double vkp = vp(k), vkq = vq(k);
                    vp(k) = c * vkp - s * vkq;
                    vq(k) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    out.sweeps = sweep;
    for (Eigen::Index k = 0; k < n; ++k)
    {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.values(k) = a(src, src);
        Eigen::VectorXd col = v.col(src);
        // Deterministic sign: largest-magnitude entry positive.
        Eigen::Index arg = 0;
        col.cwiseAbs().maxCoeff(&arg);
        if (col(arg) < 0.0)
            col = -col;
        out.vectors.col(k) = col;
    }
    return out;
}

// ---- PCA ----------------------------------------------------------------------------------

PcaModel fit_pca(const Eigen::MatrixXd &rows, double variance_target)
{
    if (rows.rows() < 2)
        throw DomainError("PCA needs at least 2 rows");
    if (!(variance_target > 0.0) || variance_target > 1.0)
        throw UsageError("variance target must lie in (0, 1]");

    PcaModel model;
    model.mean = rows.colwise().mean().transpose();
    const Eigen::MatrixXd centered = rows.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(rows.rows() - 1);
    const double total = cov.trace();
    if (!(total > 0.0))
        throw NumericalError("degenerate data");

    const auto eig = jacobi_eigen(cov);
    double cumulative = 0.0;
    Eigen::Index k = 0;
    while (k < eig.values.size())
    {
        const double ratio = std::max(eig.values(k), 0.0) / total;
        model.explained_ratio.push_back(ratio);
        cumulative += ratio;
        ++k;
        if (cumulative >= variance_target - 1e-12)
            break;
    }
    model.components = eig.vectors.leftCols(k);
    return model;
}

Eigen::VectorXd apply_pca(const PcaModel &model, const Eigen::VectorXd &x)
{
    if (x.size() != model.mean.size())
        throw DomainError("PCA input has length " + std::to_string(x.size()) + ", model expects " +
                          std::to_string(model.mean.size()));
    return model.components.transpose() * (x - model.mean);
}

Eigen::VectorXd reconstruct_pca(const PcaModel &model, const Eigen::VectorXd &z)
{
    if (z.size() != model.components.cols())
        throw DomainError("PCA code length mismatch");
    return model.mean + model.components * z;
}

Eigen::VectorXd concatenated_cir(const Measurement &m)
{
    Eigen::VectorXd x(static_cast<Eigen::Index>(kCirLength * m.per_anchor.size()));
    Eigen::Index at = 0;
    for (const auto &r : m.per_anchor)
        for (double s : r.cir.samples)
            x(at++) = s;
    return x;
}

Eigen::MatrixXd cir_matrix(const MeasurementSet &set)
{
    const auto n = static_cast<Eigen::Index>(kCirLength * set.anchor_count());
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(set.measurements.size()), n);
    for (std::size_t k = 0; k < set.measurements.size(); ++k)
        rows.row(static_cast<Eigen::Index>(k)) = concatenated_cir(set.measurements[k]).transpose();
    return rows;
}

// ---- Extraction ---------------------------------------------------------------------------

std::size_t feature_length(Pipeline p, std::size_t n_anchors, std::size_t pca_k)
{
    switch (p)
    {
    case Pipeline::rng:
        return n_anchors;
    case Pipeline::ma:
        return n_anchors * (1 + kPeaksPerAnchor);
    case Pipeline::pca:
        return n_anchors + pca_k;
    }
    return 0;
}

FeatureVector extract(const Measurement &m, Pipeline pipeline, const PcaModel *pca)
{
    if (pipeline == Pipeline::pca && pca == nullptr)
        throw UsageError("the PCA pipeline needs a fitted PCA model");

    const std::size_t n = m.per_anchor.size();
    FeatureVector fv;
    fv.pipeline = pipeline;
    fv.values.reserve(feature_length(pipeline, n, pca ? pca->k() : 0));
    for (std::size_t a = 0; a < n; ++a)
    {
        fv.values.push_back(m.per_anchor[a].range);
        fv.anchor_slots.push_back({m.per_anchor[a].anchor_id, a, 0, 0});
    }

    switch (pipeline)
    {
    case Pipeline::rng:
        break;
    case Pipeline::ma:
        for (std::size_t a = 0; a < n; ++a)
        {
            const auto &s = m.per_anchor[a].cir.samples;
            const auto peaks = find_peaks(moving_average(s), kPeaksPerAnchor);
            fv.anchor_slots[a].extra_begin = fv.values.size();
            fv.values.insert(fv.values.end(), peaks.begin(), peaks.end());
            fv.anchor_slots[a].extra_end = fv.values.size();
        }
        break;
    case Pipeline::pca: {
        const Eigen::VectorXd z = apply_pca(*pca, concatenated_cir(m));
        fv.values.insert(fv.values.end(), z.data(), z.data() + z.size());
        break;
    }
    }
    return fv;
}

Eigen::MatrixXd feature_matrix(const MeasurementSet &set, Pipeline pipeline, const PcaModel *pca)
{
    const std::size_t dim = feature_length(pipeline, set.anchor_count(), pca ? pca->k() : 0);
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(set.measurements.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < set.measurements.size(); ++k)
    {
        const auto fv = extract(set.measurements[k], pipeline, pca);
        rows.row(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::RowVectorXd>(fv.values.data(),
                                                                                     static_cast<Eigen::Index>(dim));
    }
    return rows;
}

// ---- Scaler -------------------------------------------------------------------------------

Scaler fit_scaler(const Eigen::MatrixXd &train)
{
    if (train.rows() == 0 || train.cols() == 0)
        throw DomainError("cannot fit a scaler on an empty matrix");
    return {train.colwise().minCoeff().transpose(), train.colwise().maxCoeff().transpose()};
}

Eigen::VectorXd Scaler::scale(const Eigen::VectorXd &v) const
{
    if (v.size() != mins.size())
        throw DomainError("scaler expects " + std::to_string(mins.size()) + " features, got " +
                          std::to_string(v.size()));
    Eigen::VectorXd out(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k)
    {
        const double span = maxs(k) - mins(k);
        out(k) = span > 0.0 ? (v(k) - mins(k)) / span : 0.0;
    }
    return out;
}

Eigen::MatrixXd Scaler::scale_rows(const Eigen::MatrixXd &rows) const
{
    Eigen::MatrixXd out(rows.rows(), rows.cols());
    for (Eigen::Index r = 0; r < rows.rows(); ++r)
        out.row(r) = scale(rows.row(r).transpose()).transpose();
    return out;
}

Eigen::VectorXd Scaler::unscale(const Eigen::VectorXd &v) const
{
    if (v.size() != mins.size())
        throw DomainError("scaler dimension mismatch");
    Eigen::VectorXd out(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k)
        out(k) = mins(k) + v(k) * (maxs(k) - mins(k));
    return out;
}

} // namespace epsnode

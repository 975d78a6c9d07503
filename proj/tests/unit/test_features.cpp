// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include <doctest.h>

#include "epsnode/error.hpp"
#include "epsnode/features.hpp"
#include "epsnode/simulator.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>

using namespace epsnode;

namespace {

using Vec = std::vector<double>;

Eigen::MatrixXd rows_of(std::initializer_list<std::initializer_list<double>> rows)
{
    Eigen::MatrixXd m(rows.size(), rows.begin()->size());
    Eigen::Index r = 0;
    for (const auto &row : rows)
    {
        Eigen::Index c = 0;
        for (double v : row)
            m(r, c++) = v;
        ++r;
    }
    return m;
}

// Correlated Gaussian rows with a decaying spectrum.
Eigen::MatrixXd synthetic_rows(int n, int d, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd mix(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            mix(i, j) = g(rng) * std::pow(0.6, j);
    Eigen::MatrixXd z(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j)
            z(i, j) = g(rng);
    Eigen::MatrixXd x = z * mix.transpose();
    x.rowwise() += Eigen::RowVectorXd::LinSpaced(d, -1.0, 2.0);
    return x;
}

// sin of the largest principal angle between two orthonormal column bases.
double max_principal_sine(const Eigen::MatrixXd &u, const Eigen::MatrixXd &v)
{
    const Eigen::MatrixXd residual = u - v * (v.transpose() * u);
    return Eigen::JacobiSVD<Eigen::MatrixXd>(residual).singularValues()(0);
}

} // namespace

TEST_CASE("moving average examples")
{
    CHECK(moving_average(Vec{2, 4, 6, 8}) == Vec{2, 3, 5, 7});
    CHECK(moving_average(Vec{0, 1}) == Vec{0, 0.5});
    CHECK(moving_average(Vec{3.25, 3.25, 3.25}) == Vec{3.25, 3.25, 3.25});
    CHECK(moving_average(Vec{}).empty());
}

TEST_CASE("moving average preserves length on a full CIR")
{
    Cir cir;
    for (std::size_t k = 0; k < kCirLength; ++k)
        cir.samples[k] = 0.1 * static_cast<double>(k % 7);
    CHECK(moving_average(cir.samples).size() == kCirLength);
}

TEST_CASE("find_peaks examples")
{
    CHECK(find_peaks(Vec{0, 1, 0, 2, 0, 3, 0}, 3) == Vec{1, 2, 3});
    CHECK(find_peaks(Vec{1, 2, 3, 4, 5, 6, 7, 8}, 6) == Vec(6, 0.0));
    CHECK(find_peaks(Vec{0, 2, 2, 0}, 2) == Vec{2, 0});
    CHECK(find_peaks(Vec{0, 1, 0, 2, 0, 3, 0}, 2) == Vec{1, 2});
    CHECK(find_peaks(Vec{5, 1, 0}, 1) == Vec{0}); // endpoint excluded
    CHECK_THROWS_AS(find_peaks(Vec{0, 1, 0}, 0), UsageError);
}

TEST_CASE("find_peaks output has length k and only input amplitudes")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        Vec x(40);
        for (auto &v : x)
            v = u(rng);
        const auto peaks = find_peaks(x, 6);
        CHECK(peaks.size() == 6);
        for (double p : peaks)
            if (p != 0.0)
                CHECK(std::find(x.begin(), x.end(), p) != x.end());
    }
}

TEST_CASE("PCA on collinear points keeps one component explaining everything")
{
    const auto m = fit_pca(rows_of({{1, 1}, {2, 2}, {3, 3}}));
    REQUIRE(m.k() == 1);
    CHECK(m.explained_ratio[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(m.components(0, 0)) == doctest::Approx(std::sqrt(0.5)));

    // Project and reconstruct recovers the samples.
    for (double t : {1.0, 2.0, 3.0, 7.5})
    {
        Eigen::VectorXd x(2);
        x << t, t;
        const Eigen::VectorXd back = reconstruct_pca(m, apply_pca(m, x));
        CHECK((back - x).norm() < 1e-9);
    }
}

TEST_CASE("PCA on a symmetric cross needs both axes for 90 percent")
{
    const auto m = fit_pca(rows_of({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}), 0.90);
    CHECK(m.k() == 2);
    CHECK(m.explained_ratio[0] == doctest::Approx(0.5));
    CHECK(m.explained_ratio[1] == doctest::Approx(0.5));
}

TEST_CASE("PCA projection basics")
{
    const Eigen::MatrixXd x = synthetic_rows(200, 6, 1);
    const auto m = fit_pca(x);
    CHECK(apply_pca(m, m.mean).norm() == 0.0);
    for (std::size_t c = 0; c < m.k(); ++c)
    {
        const Eigen::VectorXd z = apply_pca(m, m.mean + m.components.col(static_cast<Eigen::Index>(c)));
        for (std::size_t r = 0; r < m.k(); ++r)
            CHECK(z(static_cast<Eigen::Index>(r)) == doctest::Approx(r == c ? 1.0 : 0.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(apply_pca(m, Eigen::VectorXd::Zero(5)), DomainError);
}

TEST_CASE("PCA degenerate and undersized inputs")
{
    CHECK_THROWS_AS(fit_pca(rows_of({{1, 2}, {1, 2}, {1, 2}})), NumericalError);
    CHECK_THROWS_AS(fit_pca(rows_of({{1, 2}})), DomainError);
}

TEST_CASE("PCA invariants on random instances match a reference eigensolver")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const int d = 2 + static_cast<int>(seed % 9);
        const Eigen::MatrixXd x = synthetic_rows(50 + 10 * static_cast<int>(seed), d, seed);
        const auto m = fit_pca(x);

        double cum = 0.0;
        for (std::size_t c = 0; c < m.k(); ++c)
        {
            cum += m.explained_ratio[c];
            if (c > 0)
                CHECK(m.explained_ratio[c] <= m.explained_ratio[c - 1]);
        }
        CHECK(cum >= 0.90);
        const Eigen::MatrixXd gram = m.components.transpose() * m.components;
        CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-8);

        const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
        const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(cov);
        const Eigen::MatrixXd ref_top = ref.eigenvectors().rightCols(static_cast<Eigen::Index>(m.k()));
        // Components are eigenvectors: cov v = lambda v.
        for (std::size_t c = 0; c < m.k(); ++c)
        {
            const Eigen::VectorXd v = m.components.col(static_cast<Eigen::Index>(c));
            const double lambda = v.dot(cov * v);
            CHECK((cov * v - lambda * v).norm() < 1e-8 * cov.norm());
        }
        if (m.k() < static_cast<std::size_t>(d))
        {
            const double gap = ref.eigenvalues()(d - static_cast<int>(m.k())) - ref.eigenvalues()(d - static_cast<int>(m.k()) - 1);
            if (gap > 1e-6 * ref.eigenvalues().maxCoeff())
                CHECK(max_principal_sine(m.components, ref_top) < 1e-6);
        }

        // Reconstruction error of the training rows stays within the discarded variance.
        double total = 0.0, residual = 0.0;
        for (Eigen::Index r = 0; r < x.rows(); ++r)
        {
            const Eigen::VectorXd row = x.row(r).transpose();
            total += (row - m.mean).squaredNorm();
            residual += (reconstruct_pca(m, apply_pca(m, row)) - row).squaredNorm();
        }
        CHECK(residual <= 0.10 * total + 1e-9);
    }
}

TEST_CASE("Jacobi eigensolver on a known 3x3 matrix")
{
    Eigen::MatrixXd a(3, 3);
    a << 2, 1, 0, 1, 2, 0, 0, 0, 5;
    const auto e = jacobi_eigen(a);
    CHECK(e.values(0) == doctest::Approx(5.0));
    CHECK(e.values(1) == doctest::Approx(3.0));
    CHECK(e.values(2) == doctest::Approx(1.0));
    CHECK((a * e.vectors - e.vectors * e.values.asDiagonal()).norm() < 1e-10);
    CHECK_THROWS_AS(jacobi_eigen(Eigen::MatrixXd::Zero(2, 3)), DomainError);
}

TEST_CASE("feature lengths per pipeline")
{
    const auto env = preset_b();
    const auto set = generate_dataset(env, default_grid(), 1, 1, 3);
    const auto &m = set.measurements.front();

    const auto rng = extract(m, Pipeline::rng);
    CHECK(rng.values.size() == 4);
    const auto ma = extract(m, Pipeline::ma);
    CHECK(ma.values.size() == 28);

    PcaModel pca;
    pca.mean = Eigen::VectorXd::Zero(608);
    pca.components = Eigen::MatrixXd::Identity(608, 68);
    pca.explained_ratio.assign(68, 1.0 / 68.0);
    const auto p = extract(m, Pipeline::pca, &pca);
    CHECK(p.values.size() == 72);
    CHECK(feature_length(Pipeline::pca, 4, 68) == 72);
    CHECK(feature_length(Pipeline::ma, 4) == 28);
    CHECK_THROWS_AS(extract(m, Pipeline::pca), UsageError);

    for (const auto *fv : {&rng, &ma, &p})
    {
        REQUIRE(fv->anchor_slots.size() == 4);
        for (std::size_t a = 0; a < 4; ++a)
        {
            CHECK(fv->anchor_slots[a].anchor_id == static_cast<int>(a));
            CHECK(fv->values[fv->anchor_slots[a].range_index] == m.per_anchor[a].range);
        }
    }
    // MA peaks follow the ranges, six per anchor, in anchor order.
    for (std::size_t a = 0; a < 4; ++a)
    {
        const auto peaks = find_peaks(moving_average(m.per_anchor[a].cir.samples), 6);
        CHECK(ma.anchor_slots[a].extra_end - ma.anchor_slots[a].extra_begin == 6);
        for (std::size_t k = 0; k < 6; ++k)
            CHECK(ma.values[ma.anchor_slots[a].extra_begin + k] == peaks[k]);
    }
    // PCA with identity components reproduces the first 68 CIR samples of anchor 0.
    for (std::size_t k = 0; k < 68; ++k)
        CHECK(p.values[4 + k] == m.per_anchor[0].cir.samples[k]);
}

TEST_CASE("feature matrix has one row per measurement")
{
    const auto set = generate_dataset(nominal_environment(), default_grid(), 1, 2, 3);
    const auto x = feature_matrix(set, Pipeline::ma);
    CHECK(x.rows() == 80);
    CHECK(x.cols() == 28);
    CHECK(cir_matrix(set).cols() == 608);
    CHECK(pipeline_from_string("Ma") == Pipeline::ma);
    CHECK(to_string(Pipeline::pca) == "PCA");
    CHECK_THROWS_AS(pipeline_from_string("cnn"), UsageError);
}

TEST_CASE("min-max scaler examples")
{
    const auto s = fit_scaler(rows_of({{0, 3}, {10, 3}}));
    Eigen::VectorXd v(2);
    v << 5, 3;
    CHECK(s.scale(v)(0) == doctest::Approx(0.5));
    CHECK(s.scale(v)(1) == 0.0);
    v << 20, 100;
    CHECK(s.scale(v)(0) == doctest::Approx(2.0));
    CHECK(s.scale(v)(1) == 0.0);
    v << -10, 3;
    CHECK(s.scale(v)(0) == doctest::Approx(-1.0));
    CHECK(s.unscale(s.scale(v))(0) == doctest::Approx(-10.0));
    CHECK_THROWS_AS(s.scale(Eigen::VectorXd::Zero(3)), DomainError);
    const Eigen::MatrixXd scaled = s.scale_rows(rows_of({{0, 3}, {10, 3}}));
    CHECK(scaled(0, 0) == 0.0);
    CHECK(scaled(1, 0) == 1.0);
}

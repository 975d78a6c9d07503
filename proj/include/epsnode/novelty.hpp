// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_NOVELTY_HPP
#define EPSNODE_NOVELTY_HPP

#include "epsnode/autoencoder.hpp"
#include "epsnode/dataset.hpp"
#include "epsnode/features.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace epsnode {

// Per-anchor reconstruction error |y_hat - y|.
inline double anchor_error(double y_hat, double y) { return y_hat > y ? y_hat - y : y - y_hat; }

// Euclidean norm of the per-anchor errors. Throws DomainError on a negative component.
double total_error(std::span<const double> errors);

struct SampleError
{
    CellIndex cell;
    std::vector<double> per_anchor;
    double total = 0.0;
};

// Per-cell error grid. Cells without samples hold no value (missing), never zero.
struct ErrorMap
{
    GridMap grid;
    std::vector<std::optional<double>> values; // linear cell order
    std::vector<std::size_t> counts;

    static ErrorMap empty(const GridMap &grid);

    std::optional<double> at(CellIndex c) const { return values[grid.linear(c)]; }
    // Mean over non-missing cells satisfying pred (cell center -> bool); nullopt if none.
    std::optional<double> mean_where(const std::function<bool(CellIndex)> &pred) const;
};

struct AnchorErrorMap
{
    int anchor_id = 0;
    ErrorMap map;
};

enum class Aggregation
{
    mean,
    median,
    max
};

struct ScoreOptions
{
    Aggregation aggregation = Aggregation::mean;
    bool unscaled = false; // report range errors in meters instead of scaled feature units
};

struct ScoreResult
{
    ErrorMap total;
    std::vector<AnchorErrorMap> anchors;
    std::vector<SampleError> samples;
};

// Maps a scaled feature vector to its reconstruction.
using Reconstructor = std::function<Eigen::VectorXd(const Eigen::VectorXd &)>;

// extract -> scale -> reconstruct -> per-anchor error on each range slot -> total, then
// per-cell aggregation. Throws UsageError when model, scaler and pipeline disagree on width.
ScoreResult score(const Reconstructor &model, std::size_t model_dim, const Scaler &scaler, Pipeline pipeline,
                  const PcaModel *pca, const MeasurementSet &set, const ScoreOptions &options = {});

ScoreResult score(const Autoencoder &model, const Scaler &scaler, Pipeline pipeline, const PcaModel *pca,
                  const MeasurementSet &set, const ScoreOptions &options = {});

// Aggregates arbitrary per-sample values into a cell map.
ErrorMap aggregate(const GridMap &grid, std::span<const CellIndex> cells, std::span<const double> values,
                   Aggregation aggregation = Aggregation::mean);

// CSV with header "i,j,value,count"; missing cells are written as "nan" with count 0.
void write_csv(std::ostream &os, const ErrorMap &map);
// The grid geometry is not part of the CSV; rows must match `grid` (DomainError otherwise).
ErrorMap read_csv(std::istream &is, const GridMap &grid);

} // namespace epsnode

#endif

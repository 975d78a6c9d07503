// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include "epsnode/novelty.hpp"
#include "epsnode/error.hpp"
#include "epsnode/format.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace epsnode {

double total_error(std::span<const double> errors)
{
    double sum = 0.0;
    for (double e : errors)
    {
        if (e < 0.0)
            throw DomainError("per-anchor errors must be non-negative");
        sum += e * e;
    }
    return std::sqrt(sum);
}

ErrorMap ErrorMap::empty(const GridMap &grid)
{
    return {grid, std::vector<std::optional<double>>(grid.cell_count()), std::vector<std::size_t>(grid.cell_count(), 0)};
}

std::optional<double> ErrorMap::mean_where(const std::function<bool(CellIndex)> &pred) const
{
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < values.size(); ++k)
    {
        if (!values[k] || !pred(grid.cell(k)))
            continue;
        sum += *values[k];
        ++n;
    }
    if (n == 0)
        return std::nullopt;
    return sum / static_cast<double>(n);
}

ErrorMap aggregate(const GridMap &grid, std::span<const CellIndex> cells, std::span<const double> values,
                   Aggregation aggregation)
{
    if (cells.size() != values.size())
        throw DomainError("aggregate: cell and value counts differ");
    std::vector<std::vector<double>> buckets(grid.cell_count());
    for (std::size_t k = 0; k < cells.size(); ++k)
    {
        if (!grid.valid(cells[k]))
            throw DomainError("aggregate: cell outside the grid");
        buckets[grid.linear(cells[k])].push_back(values[k]);
    }
    ErrorMap map = ErrorMap::empty(grid);
    for (std::size_t c = 0; c < buckets.size(); ++c)
    {
        auto &b = buckets[c];
        map.counts[c] = b.size();
        if (b.empty())
            continue;
        switch (aggregation)
        {
        case Aggregation::mean: {
            double sum = 0.0;
            for (double v : b)
                sum += v;
            map.values[c] = sum / static_cast<double>(b.size());
            break;
        }
        case Aggregation::median: {
            std::sort(b.begin(), b.end());
            const std::size_t mid = b.size() / 2;
            map.values[c] = b.size() % 2 ? b[mid] : 0.5 * (b[mid - 1] + b[mid]);
            break;
        }
        case Aggregation::max:
            map.values[c] = *std::max_element(b.begin(), b.end());
            break;
        }
    }
    return map;
}

ScoreResult score(const Reconstructor &model, std::size_t model_dim, const Scaler &scaler, Pipeline pipeline,
                  const PcaModel *pca, const MeasurementSet &set, const ScoreOptions &options)
{
    set.validate();
    const std::size_t n_anchors = set.anchor_count();
    if (pipeline == Pipeline::pca && pca == nullptr)
        throw UsageError("the PCA pipeline needs a fitted PCA model");
    const std::size_t expected = feature_length(pipeline, n_anchors, pca ? pca->k() : 0);
    if (model_dim != expected || scaler.dim() != expected)
        throw UsageError("pipeline " + std::string(to_string(pipeline)) + " yields " + std::to_string(expected) +
                         " features but the model expects " + std::to_string(model_dim) + " and the scaler " +
                         std::to_string(scaler.dim()));

    ScoreResult result;
    result.samples.reserve(set.measurements.size());
    std::vector<CellIndex> cells;
    std::vector<double> totals;
    std::vector<std::vector<double>> per_anchor(n_anchors);

    for (const auto &m : set.measurements)
    {
        const auto fv = extract(m, pipeline, pca);
        const Eigen::VectorXd raw = Eigen::Map<const Eigen::VectorXd>(fv.values.data(),
                                                                     static_cast<Eigen::Index>(fv.values.size()));
        const Eigen::VectorXd x = scaler.scale(raw);
        const Eigen::VectorXd y = model(x);
        if (y.size() != x.size())
            throw UsageError("reconstruction width differs from input width");

        SampleError se;
        se.cell = m.cell;
        for (const auto &slot : fv.anchor_slots)
        {
            const auto k = static_cast<Eigen::Index>(slot.range_index);
            double e = anchor_error(y(k), x(k));
            if (options.unscaled)
                e *= scaler.maxs(k) - scaler.mins(k);
            se.per_anchor.push_back(e);
        }
        se.total = total_error(se.per_anchor);
        cells.push_back(se.cell);
        totals.push_back(se.total);
        for (std::size_t a = 0; a < n_anchors; ++a)
            per_anchor[a].push_back(se.per_anchor[a]);
        result.samples.push_back(std::move(se));
    }

    result.total = aggregate(set.grid, cells, totals, options.aggregation);
    for (std::size_t a = 0; a < n_anchors; ++a)
        result.anchors.push_back(
            {set.measurements.front().per_anchor[a].anchor_id, aggregate(set.grid, cells, per_anchor[a], options.aggregation)});
    return result;
}

ScoreResult score(const Autoencoder &model, const Scaler &scaler, Pipeline pipeline, const PcaModel *pca,
                  const MeasurementSet &set, const ScoreOptions &options)
{
    return score([&model](const Eigen::VectorXd &x) { return model.forward(x); }, model.input_dim(), scaler,
                 pipeline, pca, set, options);
}

// ---- CSV ----------------------------------------------------------------------------------

void write_csv(std::ostream &os, const ErrorMap &map)
{
    os << "i,j,value,count\n";
    for (std::size_t k = 0; k < map.values.size(); ++k)
    {
        const CellIndex c = map.grid.cell(k);
        os << c.i << ',' << c.j << ',' << (map.values[k] ? format_double(*map.values[k]) : std::string("nan")) << ','
           << map.counts[k] << '\n';
    }
}

ErrorMap read_csv(std::istream &is, const GridMap &grid)
{
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(is, line) || line != "i,j,value,count")
        throw ParseError("expected header 'i,j,value,count'", 1);
    ErrorMap map = ErrorMap::empty(grid);
    std::vector<char> seen(grid.cell_count(), 0);
    while (std::getline(is, line))
    {
        ++line_no;
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string fi, fj, fv, fc;
        if (!std::getline(ss, fi, ',') || !std::getline(ss, fj, ',') || !std::getline(ss, fv, ',') ||
            !std::getline(ss, fc))
            throw ParseError("expected 4 comma separated fields", line_no);
        CellIndex c;
        std::size_t count = 0;
        std::optional<double> value;
        try
        {
            c = {std::stoi(fi), std::stoi(fj)};
            count = static_cast<std::size_t>(std::stoull(fc));
            if (fv != "nan")
                value = parse_double(fv);
        }
        catch (const std::exception &)
        {
            throw ParseError("malformed number", line_no);
        }
        if (!grid.valid(c))
            throw DomainError("error map cell (" + fi + ", " + fj + ") lies outside the " + std::to_string(grid.nx) +
                              " x " + std::to_string(grid.ny) + " grid");
        const std::size_t lin = grid.linear(c);
        if (seen[lin])
            throw ParseError("duplicate cell", line_no);
        seen[lin] = 1;
        map.values[lin] = count ? value : std::nullopt;
        map.counts[lin] = count;
    }
    if (std::count(seen.begin(), seen.end(), 0) != 0)
        throw DomainError("error map does not cover the " + std::to_string(grid.nx) + " x " + std::to_string(grid.ny) +
                          " grid");
    return map;
}

} // namespace epsnode

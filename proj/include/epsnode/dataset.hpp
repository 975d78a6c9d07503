// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#ifndef EPSNODE_DATASET_HPP
#define EPSNODE_DATASET_HPP

#include "epsnode/environment.hpp"
#include "epsnode/grid.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace epsnode {

inline constexpr std::size_t kCirLength = 152;

struct Cir
{
    std::array<double, kCirLength> samples{};
    double sample_period = 1.0; // ns

    friend bool operator==(const Cir &, const Cir &) = default;
};

struct AnchorReading
{
    int anchor_id = 0;
    double range = 0.0; // m
    Cir cir;

    friend bool operator==(const AnchorReading &, const AnchorReading &) = default;
};

// One fingerprint sample: every anchor observed from a single tag position.
struct Measurement
{
    CellIndex cell;
    int pass_id = 0;
    std::vector<AnchorReading> per_anchor; // ordered by anchor_id

    friend bool operator==(const Measurement &, const Measurement &) = default;
};

struct MeasurementSet
{
    std::string scenario_name;
    GridMap grid;
    std::vector<Measurement> measurements;
    std::uint64_t seed = 0;

    // Throws DomainError on invalid cells, unordered anchors or an empty set.
    void validate() const;

    std::size_t anchor_count() const { return measurements.empty() ? 0 : measurements.front().per_anchor.size(); }

    friend bool operator==(const MeasurementSet &, const MeasurementSet &) = default;
};

// JSON Lines: one header line then one measurement per line.
void write_dataset(std::ostream &os, const MeasurementSet &set);
MeasurementSet read_dataset(std::istream &is);
void save(const MeasurementSet &set, const std::filesystem::path &path);
MeasurementSet load(const std::filesystem::path &path);

// Stratified per cell: each cell gives ceil(val_fraction * count) samples to validation.
// Throws UsageError for val_fraction outside (0, 1) and DomainError for cells with < 2 samples.
std::pair<MeasurementSet, MeasurementSet> split(const MeasurementSet &set, double val_fraction, std::uint64_t seed);

// Environment file (room, anchors, obstacles).
void save_environment(const Environment &env, const std::filesystem::path &path);
Environment load_environment(const std::filesystem::path &path);
std::string environment_to_json(const Environment &env);
Environment environment_from_json(const std::string &text);

} // namespace epsnode

#endif

// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The epsnode Authors
// ------------------------------------------------------------------------

#include "epsnode/dataset.hpp"
#include "epsnode/error.hpp"
#include "epsnode/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace epsnode {

using ojson = nlohmann::ordered_json;

void MeasurementSet::validate() const
{
    if (measurements.empty())
        throw DomainError("measurement set is empty");
    grid.validate();
    const std::size_t n = measurements.front().per_anchor.size();
    for (const auto &m : measurements)
    {
        if (!grid.valid(m.cell))
            throw DomainError("measurement cell (" + std::to_string(m.cell.i) + ", " + std::to_string(m.cell.j) +
                              ") outside the grid");
        if (m.per_anchor.size() != n || n == 0)
            throw DomainError("every measurement needs one reading per anchor");
        for (std::size_t k = 0; k < n; ++k)
            if (m.per_anchor[k].anchor_id != static_cast<int>(k))
                throw DomainError("anchor readings must be ordered by anchor id");
    }
}

// ---- JSON Lines ---------------------------------------------------------------------------

namespace {

ojson point_json(Point2 p) { return ojson::array({p.x, p.y}); }

Point2 point_from(const nlohmann::json &j)
{
    if (!j.is_array() || j.size() != 2)
        throw nlohmann::json::type_error::create(302, "expected [x, y]", nullptr);
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

ojson header_json(const MeasurementSet &set)
{
    ojson grid;
    grid["origin"] = point_json(set.grid.origin);
    grid["nx"] = set.grid.nx;
    grid["ny"] = set.grid.ny;
    grid["cell_size"] = set.grid.cell_size;
    ojson h;
    h["scenario"] = set.scenario_name;
    h["grid"] = std::move(grid);
    h["seed"] = set.seed;
    return h;
}

ojson measurement_json(const Measurement &m)
{
    ojson anchors = ojson::array();
    for (const auto &r : m.per_anchor)
    {
        ojson a;
        a["id"] = r.anchor_id;
        a["range"] = r.range;
        a["cir"] = r.cir.samples;
        anchors.push_back(std::move(a));
    }
    ojson j;
    j["cell"] = ojson::array({m.cell.i, m.cell.j});
    j["pass"] = m.pass_id;
    j["anchors"] = std::move(anchors);
    return j;
}

Measurement measurement_from(const nlohmann::json &j, std::size_t line)
{
    Measurement m;
    const auto &cell = j.at("cell");
    if (!cell.is_array() || cell.size() != 2)
        throw ParseError("\"cell\" must be [i, j]", line);
    m.cell = {cell.at(0).get<int>(), cell.at(1).get<int>()};
    m.pass_id = j.at("pass").get<int>();
    for (const auto &a : j.at("anchors"))
    {
        AnchorReading r;
        r.anchor_id = a.at("id").get<int>();
        r.range = a.at("range").get<double>();
        const auto &cir = a.at("cir");
        if (!cir.is_array())
            throw ParseError("\"cir\" must be an array", line);
        if (cir.size() != kCirLength)
            throw SchemaError("CIR has " + std::to_string(cir.size()) + " samples, expected " +
                                  std::to_string(kCirLength),
                              line);
        for (std::size_t k = 0; k < kCirLength; ++k)
            r.cir.samples[k] = cir[k].get<double>();
        m.per_anchor.push_back(r);
    }
    return m;
}

} // namespace

void write_dataset(std::ostream &os, const MeasurementSet &set)
{
    os << header_json(set).dump() << '\n';
    for (const auto &m : set.measurements)
        os << measurement_json(m).dump() << '\n';
}

MeasurementSet read_dataset(std::istream &is)
{
    MeasurementSet set;
    std::string text;
    std::size_t line = 0;
    bool header_seen = false;
    while (std::getline(is, text))
    {
        ++line;
        const bool complete = !is.eof(); // every record is newline terminated
        if (text.empty() && complete)
            continue;
        if (!complete)
            throw ParseError("truncated record (missing newline)", line);
        try
        {
            const auto j = nlohmann::json::parse(text);
            if (!header_seen)
            {
                set.scenario_name = j.at("scenario").get<std::string>();
                const auto &g = j.at("grid");
                set.grid.origin = point_from(g.at("origin"));
                set.grid.nx = g.at("nx").get<int>();
                set.grid.ny = g.at("ny").get<int>();
                set.grid.cell_size = g.at("cell_size").get<double>();
                set.seed = j.at("seed").get<std::uint64_t>();
                header_seen = true;
            }
            else
            {
                set.measurements.push_back(measurement_from(j, line));
            }
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ParseError(e.what(), line);
        }
    }
    if (!header_seen)
        throw ParseError("empty dataset file", 0);
    try
    {
        set.validate();
    }
    catch (const DomainError &e)
    {
        throw SchemaError(e.what(), 0);
    }
    return set;
}

void save(const MeasurementSet &set, const std::filesystem::path &path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error("cannot open '" + path.string() + "' for writing");
    write_dataset(os, set);
    if (!os)
        throw Error("write to '" + path.string() + "' failed");
}

MeasurementSet load(const std::filesystem::path &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error("cannot open '" + path.string() + "'");
    return read_dataset(is);
}

// ---- split --------------------------------------------------------------------------------

std::pair<MeasurementSet, MeasurementSet> split(const MeasurementSet &set, double val_fraction, std::uint64_t seed)
{
    if (!(val_fraction > 0.0) || !(val_fraction < 1.0))
        throw UsageError("val_fraction must lie in (0, 1)");

    std::map<std::size_t, std::vector<std::size_t>> by_cell;
    for (std::size_t k = 0; k < set.measurements.size(); ++k)
        by_cell[set.grid.linear(set.measurements[k].cell)].push_back(k);

    std::vector<char> to_val(set.measurements.size(), 0);
    for (auto &[cell, idx] : by_cell)
    {
        if (idx.size() < 2)
            throw DomainError("cell " + std::to_string(cell) + " has fewer than 2 samples; cannot stratify");
        const auto want = static_cast<std::size_t>(std::ceil(val_fraction * static_cast<double>(idx.size()) - 1e-9));
        const std::size_t n_val = std::clamp<std::size_t>(want, 1, idx.size() - 1);
        Rng rng(derive_seed(seed, {cell}));
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t k = 0; k < n_val; ++k)
            to_val[idx[k]] = 1;
    }

    MeasurementSet train, val;
    for (auto *s : {&train, &val})
    {
        s->scenario_name = set.scenario_name;
        s->grid = set.grid;
        s->seed = set.seed;
    }
    for (std::size_t k = 0; k < set.measurements.size(); ++k)
        (to_val[k] ? val : train).measurements.push_back(set.measurements[k]);
    return {std::move(train), std::move(val)};
}

// ---- Environment files --------------------------------------------------------------------

std::string environment_to_json(const Environment &env)
{
    const auto rect = [](const Rect &r) {
        ojson j;
        j["min"] = point_json(r.min);
        j["max"] = point_json(r.max);
        return j;
    };
    ojson j;
    j["name"] = env.name;
    j["room"] = rect(env.room);
    j["wall_reflectivity"] = env.wall_reflectivity;
    j["anchors"] = ojson::array();
    for (const auto &a : env.anchors)
    {
        ojson aj;
        aj["id"] = a.id;
        aj["position"] = point_json(a.position);
        j["anchors"].push_back(std::move(aj));
    }
    j["obstacles"] = ojson::array();
    for (const auto &o : env.obstacles)
    {
        ojson oj;
        oj["footprint"] = rect(o.footprint);
        oj["material"] = std::string(to_string(o.material));
        oj["reflectivity"] = o.reflectivity;
        oj["transmissivity"] = o.transmissivity;
        j["obstacles"].push_back(std::move(oj));
    }
    return j.dump(2);
}

Environment environment_from_json(const std::string &text)
{
    Environment env;
    try
    {
        const auto j = nlohmann::json::parse(text);
        const auto rect = [](const nlohmann::json &r) { return Rect{point_from(r.at("min")), point_from(r.at("max"))}; };
        env.name = j.value("name", std::string("custom"));
        env.room = rect(j.at("room"));
        env.wall_reflectivity = j.value("wall_reflectivity", default_properties(Material::wall).reflectivity);
        for (const auto &a : j.at("anchors"))
            env.anchors.push_back({a.at("id").get<int>(), point_from(a.at("position"))});
        std::sort(env.anchors.begin(), env.anchors.end(), [](const Anchor &a, const Anchor &b) { return a.id < b.id; });
        for (const auto &o : j.value("obstacles", nlohmann::json::array()))
        {
            const Material mat = material_from_string(o.at("material").get<std::string>());
            Obstacle ob = Obstacle::make(rect(o.at("footprint")), mat);
            ob.reflectivity = o.value("reflectivity", ob.reflectivity);
            ob.transmissivity = o.value("transmissivity", ob.transmissivity);
            env.obstacles.push_back(ob);
        }
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ParseError(std::string("environment file: ") + e.what(), 0);
    }
    try
    {
        env.validate();
    }
    catch (const DomainError &e)
    {
        throw SchemaError(std::string("environment file: ") + e.what(), 0);
    }
    return env;
}

void save_environment(const Environment &env, const std::filesystem::path &path)
{
    std::ofstream os(path);
    if (!os)
        throw Error("cannot open '" + path.string() + "' for writing");
    os << environment_to_json(env) << '\n';
}

Environment load_environment(const std::filesystem::path &path)
{
    std::ifstream is(path);
    if (!is)
        throw Error("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return environment_from_json(ss.str());
}

} // namespace epsnode

#include "shuttle/config.hpp"

#include "shuttle/analysis.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace shuttle {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        fail(where, std::string("missing field '") + key + "'");
    }
    return obj.at(key);
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) {
        fail(where, "expected a number");
    }
    return j.get<double>();
}

std::size_t count(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        fail(where, "expected a nonnegative integer");
    }
    return j.get<std::size_t>();
}

int small_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) {
        fail(where, "expected an integer");
    }
    return j.get<int>();
}

Dimension axis_dimension(const std::string& variable, const std::string& where) {
    if (variable == "omega" || variable == "omega0") {
        return Dimension::Frequency;
    }
    if (variable == "duration") {
        return Dimension::Time;
    }
    if (variable == "distance") {
        return Dimension::Length;
    }
    if (variable == "amplitude") {
        return Dimension::None;
    }
    fail(where, "unknown scan variable '" + variable + "'");
}

ScanAxis parse_axis(const json& j, const std::string& where) {
    ScanAxis a;
    const json& var = require(j, "variable", where);
    if (!var.is_string()) {
        fail(where + ".variable", "expected a string");
    }
    a.variable = var.get<std::string>();
    const Dimension dim = axis_dimension(a.variable, where + ".variable");
    a.min = parse_quantity(require(j, "min", where), dim, where + ".min");
    a.max = parse_quantity(require(j, "max", where), dim, where + ".max");
    a.points = count(require(j, "points", where), where + ".points");
    if (a.points < 1) {
        fail(where + ".points", "must be >= 1");
    }
    if (j.contains("spacing")) {
        const std::string s = j.at("spacing").get<std::string>();
        if (s != "linear" && s != "log") {
            fail(where + ".spacing", "expected 'linear' or 'log'");
        }
        a.log = (s == "log");
    }
    if (a.log && (a.min <= 0.0 || a.max <= 0.0)) {
        fail(where, "log spacing needs positive bounds");
    }
    return a;
}

Perturbation parse_perturbation(const json& j) {
    const std::string where = "perturbation";
    const std::string type = require(j, "type", where).get<std::string>();
    const double amp = number(require(j, "amplitude", where), where + ".amplitude");
    if (type == "frequency_sine" || type == "position_sine") {
        const double w =
            parse_quantity(require(j, "omega", where), Dimension::Frequency, where + ".omega");
        return type == "frequency_sine" ? Perturbation::frequency_sine(amp, w)
                                        : Perturbation::position_sine(amp, w);
    }
    if (type == "frequency_sum") {
        const json& comps = require(j, "components", where);
        if (!comps.is_array() || comps.empty()) {
            fail(where + ".components", "expected a non-empty array");
        }
        std::vector<SineComponent> list;
        for (std::size_t k = 0; k < comps.size(); ++k) {
            const std::string w = where + ".components[" + std::to_string(k) + "]";
            SineComponent c;
            c.omega = parse_quantity(require(comps[k], "omega", w), Dimension::Frequency, w + ".omega");
            if (comps[k].contains("phase")) {
                c.phase = number(comps[k].at("phase"), w + ".phase");
            }
            if (comps[k].contains("weight")) {
                c.weight = number(comps[k].at("weight"), w + ".weight");
            }
            list.push_back(c);
        }
        return Perturbation::frequency_sum(amp, std::move(list));
    }
    fail(where + ".type", "unknown perturbation type '" + type + "'");
}

ProtocolConfig parse_protocol(const json& j) {
    const std::string where = "protocol";
    ProtocolConfig p;
    p.type = require(j, "type", where).get<std::string>();
    if (p.type != "polynomial5" && p.type != "fourier" && p.type != "aux" && p.type != "oct") {
        fail(where + ".type", "unknown protocol type '" + p.type + "'");
    }
    if (j.contains("targets")) {
        const json& t = j.at("targets");
        if (!t.is_array()) {
            fail(where + ".targets", "expected an array");
        }
        for (std::size_t k = 0; k < t.size(); ++k) {
            p.targets.push_back(parse_quantity(t[k], Dimension::Frequency,
                                               where + ".targets[" + std::to_string(k) + "]"));
        }
    }
    if (j.contains("omega_derivatives")) {
        p.omega_derivatives = small_int(j.at("omega_derivatives"), where + ".omega_derivatives");
    }
    if (j.contains("omega0_derivatives")) {
        p.omega0_derivatives = small_int(j.at("omega0_derivatives"), where + ".omega0_derivatives");
    }
    if (j.contains("terms")) {
        p.terms = count(j.at("terms"), where + ".terms");
    }
    return p;
}

GaConfig parse_ga(const json& j, GaConfig g) {
    const std::string where = "ga";
    if (j.contains("population")) g.population = count(j.at("population"), where + ".population");
    if (j.contains("generations")) g.generations = count(j.at("generations"), where + ".generations");
    if (j.contains("tournament")) g.tournament = count(j.at("tournament"), where + ".tournament");
    if (j.contains("crossover_rate")) g.crossover_rate = number(j.at("crossover_rate"), where);
    if (j.contains("blend_alpha")) g.blend_alpha = number(j.at("blend_alpha"), where);
    if (j.contains("mutation_rate")) g.mutation_rate = number(j.at("mutation_rate"), where);
    if (j.contains("mutation_scale")) g.mutation_scale = number(j.at("mutation_scale"), where);
    if (j.contains("stagnation_limit")) {
        g.stagnation_limit = count(j.at("stagnation_limit"), where + ".stagnation_limit");
    }
    if (j.contains("seed")) g.seed = j.at("seed").get<std::uint64_t>();
    if (g.population < 10) {
        fail(where + ".population", "must be >= 10");
    }
    return g;
}

}  // namespace

double parse_quantity(const json& j, Dimension dim, const std::string& where) {
    if (dim == Dimension::None) {
        if (j.is_number()) {
            return j.get<double>();
        }
        if (j.is_object() && j.contains("value")) {
            return number(j.at("value"), where + ".value");
        }
        fail(where, "expected a number");
    }
    if (!j.is_object()) {
        fail(where, "dimensioned quantities must be objects {\"value\": x, \"unit\": \"...\"}");
    }
    const double v = number(require(j, "value", where), where + ".value");
    const json& uj = require(j, "unit", where);
    if (!uj.is_string()) {
        fail(where + ".unit", "expected a string");
    }
    const std::string unit = uj.get<std::string>();
    switch (dim) {
        case Dimension::Frequency:
            if (unit == "two_pi_mhz") return 2.0 * std::numbers::pi * (v * 1e6);
            if (unit == "rad_per_s") return v;
            break;
        case Dimension::Mass:
            if (unit == "kg") return v;
            break;
        case Dimension::Length:
            if (unit == "m") return v;
            if (unit == "um") return v * 1e-6;
            break;
        case Dimension::Time:
            if (unit == "s") return v;
            if (unit == "us") return v * 1e-6;
            break;
        case Dimension::None:
            break;
    }
    fail(where + ".unit", "unit '" + unit + "' is not valid here");
}

std::vector<double> ScanAxis::values() const {
    return log ? logspace(min, max, points) : linspace(min, max, points);
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("config: expected a JSON object");
    }
    RunConfig cfg;
    const json& p = require(doc, "params", "config");
    cfg.params.mass = parse_quantity(require(p, "mass", "params"), Dimension::Mass, "params.mass");
    cfg.params.omega0 =
        parse_quantity(require(p, "omega0", "params"), Dimension::Frequency, "params.omega0");
    cfg.params.distance =
        parse_quantity(require(p, "distance", "params"), Dimension::Length, "params.distance");
    cfg.params.duration =
        parse_quantity(require(p, "duration", "params"), Dimension::Time, "params.duration");
    const ValidationReport base = validate(cfg.params);
    if (!base.ok()) {
        throw ConfigError("params: " + base.summary());
    }
    if (doc.contains("level")) {
        cfg.level = small_int(doc.at("level"), "level");
        if (cfg.level < 0) {
            throw ConfigError("level: must be >= 0");
        }
    }
    if (doc.contains("perturbation")) {
        cfg.perturbation = parse_perturbation(doc.at("perturbation"));
        const ValidationReport r = validate(cfg.params, cfg.perturbation);
        if (!r.ok()) {
            throw ConfigError("perturbation: " + r.summary());
        }
    } else {
        cfg.perturbation = Perturbation::frequency_sine(0.0, 0.0);
    }
    if (doc.contains("protocol")) {
        cfg.protocol = parse_protocol(doc.at("protocol"));
    }
    if (doc.contains("scan")) {
        cfg.scan = parse_axis(doc.at("scan"), "scan");
    }
    if (doc.contains("steps")) {
        cfg.steps = count(doc.at("steps"), "steps");
        if (cfg.steps != 0 && cfg.steps < 100) {
            throw ConfigError("steps: must be >= 100");
        }
    }
    if (doc.contains("samples")) {
        cfg.samples = count(doc.at("samples"), "samples");
        if (cfg.samples < 1000) {
            throw ConfigError("samples: must be >= 1000");
        }
    }
    if (doc.contains("absolute")) {
        cfg.absolute = doc.at("absolute").get<bool>();
    }
    if (doc.contains("ga")) {
        cfg.ga = parse_ga(doc.at("ga"), cfg.ga);
    }
    if (doc.contains("seed")) {
        cfg.ga.seed = doc.at("seed").get<std::uint64_t>();
    }
    cfg.canonical = doc.dump();
    cfg.hash = fnv1a64(cfg.canonical);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return parse_config(doc);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config has a field of the wrong type: ") + e.what());
    }
}

double primary_omega(const Perturbation& p) {
    if (p.components.empty()) {
        throw ConfigError("perturbation has no frequency component");
    }
    return p.components.front().omega;
}

ScanPoint apply_axis(const RunConfig& cfg, const std::string& variable, double value) {
    ScanPoint pt{cfg.params, cfg.perturbation};
    if (variable == "omega") {
        if (pt.perturbation.components.size() != 1) {
            throw ConfigError("scan over omega needs a single-frequency perturbation");
        }
        pt.perturbation.components.front().omega = value;
    } else if (variable == "duration") {
        pt.params.duration = value;
    } else if (variable == "omega0") {
        pt.params.omega0 = value;
    } else if (variable == "distance") {
        pt.params.distance = value;
    } else if (variable == "amplitude") {
        pt.perturbation = pt.perturbation.with_amplitude(value);
    } else {
        throw ConfigError("unknown scan variable '" + variable + "'");
    }
    return pt;
}

}  // namespace shuttle

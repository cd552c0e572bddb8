#pragma once

// Run configuration: YAML file with strict keys.  Schema in README.md.

#include <lrwell/errors.hpp>
#include <lrwell/spectrum.hpp>
#include <lrwell/time_profile.hpp>

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace lrwell {

struct NamedProfile {
    std::string name;
    std::shared_ptr<const TimeProfile> profile;
};

struct GridSettings {
    double x_min = -20.0;
    double x_max = 20.0;
    double dx = 0.01;
};

struct Tolerances {
    double normalization = 1e-8;
    double closed_form = 1e-8;
    double pseudo_hermiticity = 1e-12;
    double invariant_eigen = 1e-3;
    double von_neumann = 1e-4;
    double tdse = 1e-4;
    double propagation = 1e-3;
    double density = 1e-6;
};

enum class OutputFormat { csv, json };

inline const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names{"normalization", "closed_form", "pseudo_hermiticity", "invariant_eigen",
                                                "von_neumann",   "tdse",        "propagation",        "density"};
    return names;
}

struct RunConfig {
    std::vector<NamedProfile> profiles;
    std::vector<int> levels;
    std::vector<double> times;
    GridSettings grid;
    double dt = 1e-4;
    std::filesystem::path output_directory = "out";
    OutputFormat format = OutputFormat::csv;
    Tolerances tolerances;
    std::vector<std::string> checks = known_checks();
    int samples = 10;
    std::uint64_t seed = 20240601;
};

/// Three built-in profiles on [0, 1]: (m = 1, f = 1), (m = 1, f = 0), (m = e^t, f = cos t).
inline std::vector<NamedProfile> default_profiles() {
    auto make = [](std::string name, MassLaw m, CouplingLaw f) {
        return NamedProfile{std::move(name), std::make_shared<const TimeProfile>(std::move(m), std::move(f), 1.0)};
    };
    return {make("constant", ConstantMass{1.0}, ConstantCoupling{1.0}), make("free", ConstantMass{1.0}, ZeroCoupling{}),
            make("exp_cos", ExponentialMass{1.0, 1.0}, SinusoidalCoupling{1.0, 1.0})};
}

inline RunConfig default_config() {
    RunConfig cfg;
    cfg.profiles = default_profiles();
    cfg.levels = {0, 1, 2, 3, 4, 5};
    cfg.times = {0.1, 0.3, 0.5};
    return cfg;
}

namespace detail {

inline int line_of(const YAML::Node& node) { return node.Mark().is_null() ? -1 : node.Mark().line + 1; }

inline void require_map(const YAML::Node& node, const std::string& field) {
    if (!node.IsMap()) throw config_error(field, "expected a mapping", line_of(node));
}

inline void check_keys(const YAML::Node& node, const std::string& field, const std::set<std::string>& allowed) {
    require_map(node, field);
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key))
            throw config_error(field.empty() ? key : field + "." + key, "unknown key", line_of(kv.first));
    }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& field) {
    if (!node.IsScalar()) throw config_error(field, "expected a scalar", line_of(node));
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw config_error(field, "cannot parse '" + node.Scalar() + "'", line_of(node));
    }
}

inline double number(const YAML::Node& parent, const std::string& key, const std::string& field) {
    const YAML::Node node = parent[key];
    if (!node) throw config_error(field + "." + key, "missing", line_of(parent));
    return scalar<double>(node, field + "." + key);
}

inline double number_or(const YAML::Node& parent, const std::string& key, const std::string& field, double fallback) {
    return parent[key] ? number(parent, key, field) : fallback;
}

inline SampledTable load_table(const YAML::Node& node, const std::string& field, const std::filesystem::path& base) {
    const YAML::Node path_node = node["path"];
    if (!path_node) throw config_error(field + ".path", "missing", line_of(node));
    std::filesystem::path path = scalar<std::string>(path_node, field + ".path");
    if (path.is_relative()) path = base / path;
    if (!std::filesystem::exists(path))
        throw config_error(field + ".path", "table file '" + path.string() + "' does not exist", line_of(path_node));
    try {
        return SampledTable::from_csv(path);
    } catch (const domain_error& e) {
        throw config_error(field + ".path", e.what(), line_of(path_node));
    }
}

inline std::string family_of(const YAML::Node& node, const std::string& field) {
    require_map(node, field);
    const YAML::Node fam = node["family"];
    if (!fam) throw config_error(field + ".family", "missing", line_of(node));
    return scalar<std::string>(fam, field + ".family");
}

inline MassLaw parse_mass(const YAML::Node& node, const std::string& field, const std::filesystem::path& base) {
    const std::string family = family_of(node, field);
    if (family == "constant") {
        check_keys(node, field, {"family", "m0"});
        return ConstantMass{number(node, "m0", field)};
    }
    if (family == "exponential") {
        check_keys(node, field, {"family", "m0", "gamma"});
        return ExponentialMass{number(node, "m0", field), number(node, "gamma", field)};
    }
    if (family == "power") {
        check_keys(node, field, {"family", "m0", "gamma", "alpha"});
        return PowerMass{number(node, "m0", field), number(node, "gamma", field), number(node, "alpha", field)};
    }
    if (family == "table") {
        check_keys(node, field, {"family", "path"});
        return load_table(node, field, base);
    }
    throw config_error(field + ".family", "unknown mass family '" + family + "'", line_of(node["family"]));
}

inline CouplingLaw parse_coupling(const YAML::Node& node, const std::string& field, const std::filesystem::path& base) {
    const std::string family = family_of(node, field);
    if (family == "zero") {
        check_keys(node, field, {"family"});
        return ZeroCoupling{};
    }
    if (family == "constant") {
        check_keys(node, field, {"family", "f0"});
        return ConstantCoupling{number(node, "f0", field)};
    }
    if (family == "linear") {
        check_keys(node, field, {"family", "f0"});
        return LinearCoupling{number(node, "f0", field)};
    }
    if (family == "sinusoidal") {
        check_keys(node, field, {"family", "f0", "omega"});
        return SinusoidalCoupling{number(node, "f0", field), number(node, "omega", field)};
    }
    if (family == "table") {
        check_keys(node, field, {"family", "path"});
        return load_table(node, field, base);
    }
    throw config_error(field + ".family", "unknown coupling family '" + family + "'", line_of(node["family"]));
}

inline NamedProfile parse_profile(const YAML::Node& node, const std::string& field, const std::filesystem::path& base) {
    check_keys(node, field, {"name", "window", "mass", "coupling"});
    for (const char* key : {"name", "window", "mass", "coupling"})
        if (!node[key]) throw config_error(field + "." + key, "missing", line_of(node));
    const auto name = scalar<std::string>(node["name"], field + ".name");
    const double window = number(node, "window", field);
    MassLaw mass = parse_mass(node["mass"], field + ".mass", base);
    CouplingLaw coupling = parse_coupling(node["coupling"], field + ".coupling", base);
    try {
        return {name, std::make_shared<const TimeProfile>(std::move(mass), std::move(coupling), window)};
    } catch (const domain_error& e) {
        throw config_error(field, e.what(), line_of(node));
    }
}

template <class T>
std::vector<T> sequence(const YAML::Node& node, const std::string& field) {
    if (!node.IsSequence()) throw config_error(field, "expected a list", line_of(node));
    std::vector<T> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(scalar<T>(node[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace detail

/// Checks that do not depend on how the values were obtained.
inline void validate(const RunConfig& cfg) {
    if (cfg.profiles.empty()) throw config_error("profiles", "empty profile list");
    std::set<std::string> names;
    for (const auto& p : cfg.profiles)
        if (!names.insert(p.name).second) throw config_error("profiles", "duplicate profile name '" + p.name + "'");
    if (cfg.levels.empty()) throw config_error("levels", "empty level list");
    for (std::size_t i = 0; i < cfg.levels.size(); ++i)
        if (cfg.levels[i] < 0 || cfg.levels[i] > max_level)
            throw config_error("levels[" + std::to_string(i) + "]",
                               "level " + std::to_string(cfg.levels[i]) + " outside [0, " + std::to_string(max_level) + "]");
    if (cfg.times.empty()) throw config_error("times", "empty time list");
    for (std::size_t i = 0; i < cfg.times.size(); ++i)
        for (const auto& p : cfg.profiles)
            if (!(cfg.times[i] >= 0.0 && cfg.times[i] <= p.profile->window_end()))
                throw config_error("times[" + std::to_string(i) + "]",
                                   "time outside the window of profile '" + p.name + "'");
    if (!(cfg.grid.dx > 0.0) || !(cfg.grid.x_min < 0.0) || !(cfg.grid.x_max > 0.0))
        throw config_error("grid", "need x_min < 0 < x_max and dx > 0");
    const double offset = -cfg.grid.x_min / cfg.grid.dx, span = (cfg.grid.x_max - cfg.grid.x_min) / cfg.grid.dx;
    if (std::abs(offset - std::round(offset)) > 1e-9 * offset || std::abs(span - std::round(span)) > 1e-9 * span)
        throw config_error("grid", "x = 0 and both ends must be grid nodes");
    if (!(cfg.dt > 0.0) || cfg.dt > 1e-3) throw config_error("propagation.dt", "dt must be in (0, 1e-3]");
    if (cfg.samples < 1) throw config_error("samples", "must be at least 1");
    for (const auto& c : cfg.checks)
        if (std::find(known_checks().begin(), known_checks().end(), c) == known_checks().end())
            throw config_error("checks", "unknown check '" + c + "'");
}

inline RunConfig parse_config(const YAML::Node& root, const std::filesystem::path& base) {
    using namespace detail;
    RunConfig cfg = default_config();
    if (root.IsNull()) return cfg;
    check_keys(root, "", {"profiles", "levels", "times", "grid", "propagation", "output", "tolerances", "checks", "samples",
                          "seed"});

    if (const auto node = root["profiles"]) {
        if (!node.IsSequence()) throw config_error("profiles", "expected a list", line_of(node));
        cfg.profiles.clear();
        for (std::size_t i = 0; i < node.size(); ++i)
            cfg.profiles.push_back(parse_profile(node[i], "profiles[" + std::to_string(i) + "]", base));
    }
    if (const auto node = root["levels"]) cfg.levels = sequence<int>(node, "levels");
    if (const auto node = root["times"]) cfg.times = sequence<double>(node, "times");
    if (const auto node = root["grid"]) {
        check_keys(node, "grid", {"x_min", "x_max", "dx"});
        cfg.grid = {number_or(node, "x_min", "grid", cfg.grid.x_min), number_or(node, "x_max", "grid", cfg.grid.x_max),
                    number_or(node, "dx", "grid", cfg.grid.dx)};
    }
    if (const auto node = root["propagation"]) {
        check_keys(node, "propagation", {"dt"});
        cfg.dt = number_or(node, "dt", "propagation", cfg.dt);
    }
    if (const auto node = root["output"]) {
        check_keys(node, "output", {"directory", "format"});
        if (node["directory"]) {
            std::filesystem::path dir = scalar<std::string>(node["directory"], "output.directory");
            cfg.output_directory = dir.is_relative() ? base / dir : dir;
        }
        if (node["format"]) {
            const auto f = scalar<std::string>(node["format"], "output.format");
            if (f != "csv" && f != "json") throw config_error("output.format", "expected csv or json", line_of(node["format"]));
            cfg.format = f == "csv" ? OutputFormat::csv : OutputFormat::json;
        }
    }
    if (const auto node = root["tolerances"]) {
        check_keys(node, "tolerances", {"normalization", "closed_form", "pseudo_hermiticity", "invariant_eigen",
                                        "von_neumann", "tdse", "propagation", "density"});
        auto& t = cfg.tolerances;
        t.normalization = number_or(node, "normalization", "tolerances", t.normalization);
        t.closed_form = number_or(node, "closed_form", "tolerances", t.closed_form);
        t.pseudo_hermiticity = number_or(node, "pseudo_hermiticity", "tolerances", t.pseudo_hermiticity);
        t.invariant_eigen = number_or(node, "invariant_eigen", "tolerances", t.invariant_eigen);
        t.von_neumann = number_or(node, "von_neumann", "tolerances", t.von_neumann);
        t.tdse = number_or(node, "tdse", "tolerances", t.tdse);
        t.propagation = number_or(node, "propagation", "tolerances", t.propagation);
        t.density = number_or(node, "density", "tolerances", t.density);
    }
    if (const auto node = root["checks"]) {
        cfg.checks = sequence<std::string>(node, "checks");
        for (std::size_t i = 0; i < cfg.checks.size(); ++i)
            if (std::find(known_checks().begin(), known_checks().end(), cfg.checks[i]) == known_checks().end())
                throw config_error("checks[" + std::to_string(i) + "]", "unknown check '" + cfg.checks[i] + "'",
                                   line_of(node[i]));
    }
    if (const auto node = root["samples"]) cfg.samples = scalar<int>(node, "samples");
    if (const auto node = root["seed"]) cfg.seed = scalar<std::uint64_t>(node, "seed");

    // Re-anchor validation failures to the offending node where one exists.
    try {
        validate(cfg);
    } catch (const config_error& e) {
        const std::string& f = e.field();
        const auto bracket = f.find('[');
        YAML::Node node = root[f.substr(0, std::min(bracket, f.find('.')))];
        if (node && bracket != std::string::npos && node.IsSequence()) {
            const auto index = static_cast<std::size_t>(std::stoul(f.substr(bracket + 1)));
            if (index < node.size()) node = node[index];
        }
        throw config_error(f, e.message(), node ? line_of(node) : -1);
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw config_error("--config", "file '" + path.string() + "' does not exist");
    YAML::Node root;
    try {
        root = YAML::LoadFile(path.string());
    } catch (const YAML::Exception& e) {
        throw config_error("<file>", e.msg, e.mark.is_null() ? -1 : e.mark.line + 1);
    }
    return parse_config(root, path.parent_path());
}

/// Comma-separated list from the command line.
template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& field) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::istringstream in(item);
        T value{};
        if (!(in >> value) || !(in >> std::ws).eof()) throw config_error(field, "cannot parse '" + item + "'");
        out.push_back(value);
    }
    return out;
}

}  // namespace lrwell

#pragma once

// run_* operations behind the lrwell command line, and their writers.

#include <lrwell/airy.hpp>
#include <lrwell/config.hpp>
#include <lrwell/exact_solution.hpp>
#include <lrwell/spectrum.hpp>
#include <lrwell/verifier.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace lrwell {

using json = nlohmann::ordered_json;

/// 12 significant digits, scientific, locale-independent.
inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 11);
    return {buf, res.ptr};
}

/// v rounded to 12 significant digits, for JSON output.
inline double round12(double v) {
    if (!std::isfinite(v)) return v;
    const std::string s = format_number(v);
    double out = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

inline json json_number(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
    return round12(v);
}

/// Short label for file names: 0.3 -> "0.3".
inline std::string short_label(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

struct Table {
    using Cell = std::variant<long long, double, std::string>;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline std::string render(const Table& table, OutputFormat format) {
    if (format == OutputFormat::csv) {
        std::string out;
        for (std::size_t c = 0; c < table.columns.size(); ++c) out += (c ? "," : "") + table.columns[c];
        out += '\n';
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out += ',';
                std::visit(overloaded{[&](long long v) { out += std::to_string(v); },
                                      [&](double v) { out += format_number(v); }, [&](const std::string& v) { out += v; }},
                           row[c]);
            }
            out += '\n';
        }
        return out;
    }
    json arr = json::array();
    for (const auto& row : table.rows) {
        json obj = json::object();
        for (std::size_t c = 0; c < row.size(); ++c)
            std::visit(overloaded{[&](long long v) { obj[table.columns[c]] = v; },
                                  [&](double v) { obj[table.columns[c]] = json_number(v); },
                                  [&](const std::string& v) { obj[table.columns[c]] = v; }},
                       row[c]);
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

inline std::filesystem::path write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw domain_error("cannot write output file " + path.string());
    out << text;
    if (!out) throw domain_error("write failed for " + path.string());
    return path;
}

inline std::filesystem::path write_table(const std::filesystem::path& stem, const Table& table, OutputFormat format) {
    std::filesystem::path path = stem;
    path += format == OutputFormat::csv ? ".csv" : ".json";
    return write_text(path, render(table, format));
}

// ---------------------------------------------------------------- zeros, spectrum

inline Table run_zeros(int count) {
    if (count < 1 || count > airy::max_zero_index) throw config_error("--count", "expected 1..50");
    Table t{{"k", "ai_zero", "ai_prime_zero"}, {}};
    for (int k = 1; k <= count; ++k)
        t.rows.push_back({static_cast<long long>(k), airy::airy_function_zero(k).location,
                          airy::airy_derivative_zero(k).location});
    return t;
}

inline Table run_spectrum(const RunConfig& cfg) {
    Table t{{"n", "parity", "lambda", "norm_const"}, {}};
    for (int n : cfg.levels) {
        const auto& lv = level(n);
        t.rows.push_back({static_cast<long long>(n), std::string(to_string(lv.parity)), lv.lambda, lv.norm_const});
    }
    return t;
}

// ---------------------------------------------------------------- density

inline constexpr double density_half_width = 10.0;
inline constexpr double density_step = 0.01;

inline Table density_table(int n) {
    Table t{{"x", "density"}, {}};
    const auto half = static_cast<long long>(std::llround(density_half_width / density_step));
    for (long long i = -half; i <= half; ++i) {
        const double x = static_cast<double>(i) * density_step;
        t.rows.push_back({x, density(n, x)});
    }
    return t;
}

inline std::vector<std::filesystem::path> run_density(const RunConfig& cfg) {
    std::vector<std::filesystem::path> out;
    for (int n : cfg.levels)
        out.push_back(write_table(cfg.output_directory / ("density_n" + std::to_string(n)), density_table(n), cfg.format));
    return out;
}

// ---------------------------------------------------------------- solve

inline Table solve_table(const ExactSolution& sol, int n, double t, const Grid1D& grid) {
    Table table{{"x", "re_psi", "im_psi", "density_reconstructed"}, {}};
    const auto sample = sol.assemble_wavefunction(n, t, grid.nodes());
    for (std::size_t i = 0; i < sample.x.size(); ++i)
        table.rows.push_back({sample.x[i], sample.values[i].real(), sample.values[i].imag(),
                              sol.reconstructed_density(n, sample.x[i], t)});
    return table;
}

inline std::vector<std::filesystem::path> run_solve(const RunConfig& cfg) {
    const Grid1D grid = Grid1D::make(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.dx);
    std::vector<std::filesystem::path> out;
    for (const auto& p : cfg.profiles) {
        const ExactSolution sol(*p.profile);
        for (int n : cfg.levels)
            for (double t : cfg.times) {
                const std::string stem = "solve_" + p.name + "_n" + std::to_string(n) + "_t" + short_label(t);
                out.push_back(write_table(cfg.output_directory / stem, solve_table(sol, n, t, grid), cfg.format));
            }
    }
    return out;
}

// ---------------------------------------------------------------- verify

struct CheckResult {
    std::string check;
    json params;
    double value;
    double threshold;
    bool pass;
};

inline CheckResult make_check(std::string check, json params, double value, double threshold) {
    return {std::move(check), std::move(params), value, threshold, std::isfinite(value) && value <= threshold};
}

struct VerifyOptions {
    bool inject_wrong_k = false;
};

inline constexpr double von_neumann_half_width = 10.0;
inline constexpr double von_neumann_dx = 0.005;

namespace detail {

// Deterministic uniform draws in [lo, hi).
inline std::vector<double> sample_times(std::uint64_t seed, int count, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53);
    return out;
}

inline bool wants(const RunConfig& cfg, const std::string& check) {
    return std::find(cfg.checks.begin(), cfg.checks.end(), check) != cfg.checks.end();
}

inline json region_label(Region r) { return region_index(r); }

inline std::vector<CheckResult> verify_profile(const RunConfig& cfg, const NamedProfile& np, std::size_t index,
                                               VerifyOptions options) {
    const TimeProfile& profile = *np.profile;
    const double window = profile.window_end();
    const Grid1D grid = Grid1D::make(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.dx);
    const SolutionOptions sol_options{options.inject_wrong_k};
    const ExactSolution sol(profile, sol_options);
    const auto& tol = cfg.tolerances;
    const auto times = sample_times(cfg.seed + index, cfg.samples, 0.0, window);
    std::vector<CheckResult> out;
    constexpr std::array<Region, 2> regions{Region::positive, Region::negative};

    if (wants(cfg, "closed_form") && profile.has_closed_form()) {
        double worst = 0.0;
        for (int i = 1; i <= 100; ++i) {
            const double t = window * i / 100.0;
            const auto cf = *profile.closed_form_primitives(t);
            const auto tab = profile.tabulated_primitives(t);
            const std::array<std::pair<double, double>, 4> pairs{{{cf.g, tab.g}, {cf.k, tab.k}, {cf.s, tab.s}, {cf.w, tab.w}}};
            for (const auto& [a, b] : pairs) worst = std::max(worst, std::abs(a - b) / (a == 0.0 ? 1.0 : std::abs(a)));
        }
        out.push_back(make_check("closed_form", {{"profile", np.name}}, worst, tol.closed_form));
    }

    if (wants(cfg, "pseudo_hermiticity"))
        for (Region r : regions) {
            Perturbation pert;
            pert.flip_k_sign = options.inject_wrong_k;
            double worst = pseudo_hermiticity_check(0.0, r, profile, pert);
            for (double t : times) worst = std::max(worst, pseudo_hermiticity_check(t, r, profile, pert));
            out.push_back(make_check("pseudo_hermiticity", {{"profile", np.name}, {"region", region_label(r)}}, worst,
                                     tol.pseudo_hermiticity));
        }

    if (wants(cfg, "invariant_eigen"))
        for (int n : cfg.levels)
            for (Region r : regions) {
                double worst = 0.0;
                for (double t : times)
                    worst = std::max(worst, invariant_eigen_residual(n, r, t, grid.half(r), profile, sol_options));
                out.push_back(make_check("invariant_eigen", {{"profile", np.name}, {"n", n}, {"region", region_label(r)}},
                                         worst, tol.invariant_eigen));
            }

    if (wants(cfg, "von_neumann")) {
        const double d = von_neumann_time_step;
        const auto interior = sample_times(cfg.seed + 1000 + index, cfg.samples, d, window - d);
        for (Region r : regions) {
            const Grid1D half = r == Region::positive ? Grid1D::make(0.0, von_neumann_half_width, von_neumann_dx)
                                                      : Grid1D::make(-von_neumann_half_width, 0.0, von_neumann_dx);
            double worst = 0.0;
            for (double t : interior) worst = std::max(worst, von_neumann_residual(r, t, half, profile));
            out.push_back(make_check("von_neumann", {{"profile", np.name}, {"region", region_label(r)}}, worst,
                                     tol.von_neumann));
        }
    }

    if (wants(cfg, "tdse"))
        for (int n : cfg.levels)
            for (double t : cfg.times) {
                if (t - tdse_time_step < 0.0 || t + tdse_time_step > window) continue;
                out.push_back(make_check("tdse", {{"profile", np.name}, {"n", n}, {"t", round12(t)}},
                                         tdse_residual(n, t, grid, profile, sol_options), tol.tdse));
            }

    if (wants(cfg, "density")) {
        const Grid1D dgrid = Grid1D::make(-density_half_width, density_half_width, density_step);
        for (int n : cfg.levels)
            for (double t : cfg.times) {
                double worst = 0.0;
                for (double x : dgrid.nodes())
                    worst = std::max(worst, std::abs(sol.reconstructed_density(n, x, t) - density(n, x)));
                out.push_back(
                    make_check("density", {{"profile", np.name}, {"n", n}, {"t", round12(t)}}, worst, tol.density));
            }
    }
    return out;
}

inline std::vector<CheckResult> verify_propagation(const RunConfig& cfg, const NamedProfile& np, int n,
                                                   VerifyOptions options) {
    const TimeProfile& profile = *np.profile;
    const Grid1D grid = Grid1D::make(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.dx);
    const ExactSolution sol(profile, SolutionOptions{options.inject_wrong_k});
    const auto x = grid.nodes();
    std::vector<double> times = cfg.times;
    std::sort(times.begin(), times.end());
    std::vector<CheckResult> out;
    WavefunctionSample state = sol.assemble_wavefunction(n, 0.0, x);
    double now = 0.0;
    for (double t : times) {
        const auto result = crank_nicolson_propagate(profile, state, now, t, cfg.dt);
        state = result.final_state;
        now = t;
        const double dev = max_deviation(state.values, sol.assemble_wavefunction(n, t, x).values);
        out.push_back(make_check("propagation",
                                 {{"profile", np.name},
                                  {"n", n},
                                  {"t", round12(t)},
                                  {"dt", round12(cfg.dt)},
                                  {"dx", round12(cfg.grid.dx)},
                                  {"max_local_error", json_number(result.max_local_error)},
                                  {"boundary_probe", json_number(result.boundary_probe)}},
                                 dev, cfg.tolerances.propagation));
    }
    return out;
}

}  // namespace detail

/// Full residual suite.  Independent jobs run concurrently; results keep a fixed order.
inline std::vector<CheckResult> run_verify(const RunConfig& cfg, VerifyOptions options = {}) {
    validate(cfg);
    std::vector<std::future<std::vector<CheckResult>>> jobs;

    if (detail::wants(cfg, "normalization"))
        jobs.push_back(std::async(std::launch::async, [&cfg] {
            std::vector<CheckResult> out;
            for (int n : cfg.levels) {
                const double h1 = half_line_probability(n, Region::positive);
                const double h2 = half_line_probability(n, Region::negative);
                const double value = std::max({std::abs(h1 + h2 - 1.0), std::abs(h1 - 0.5), std::abs(h2 - 0.5)});
                out.push_back(make_check("normalization", {{"n", n}}, value, cfg.tolerances.normalization));
            }
            return out;
        }));

    for (std::size_t i = 0; i < cfg.profiles.size(); ++i) {
        jobs.push_back(std::async(std::launch::async,
                                  [&cfg, i, options] { return detail::verify_profile(cfg, cfg.profiles[i], i, options); }));
        if (detail::wants(cfg, "propagation"))
            for (int n : cfg.levels)
                jobs.push_back(std::async(std::launch::async, [&cfg, i, n, options] {
                    return detail::verify_propagation(cfg, cfg.profiles[i], n, options);
                }));
    }

    std::vector<CheckResult> out;
    for (auto& job : jobs) {
        auto part = job.get();
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
}

inline json report_json(const std::vector<CheckResult>& results) {
    json arr = json::array();
    for (const auto& r : results)
        arr.push_back({{"check", r.check},
                       {"params", r.params},
                       {"value", json_number(r.value)},
                       {"threshold", json_number(r.threshold)},
                       {"pass", r.pass}});
    return arr;
}

inline Table report_table(const std::vector<CheckResult>& results) {
    Table t{{"check", "params", "value", "threshold", "pass"}, {}};
    for (const auto& r : results) {
        std::string params;
        for (auto it = r.params.begin(); it != r.params.end(); ++it) {
            if (!params.empty()) params += ';';
            params += it.key() + "=" + (it->is_string() ? it->get<std::string>() : it->dump());
        }
        t.rows.push_back({r.check, params, r.value, r.threshold, std::string(r.pass ? "true" : "false")});
    }
    return t;
}

inline std::filesystem::path write_report(const std::vector<CheckResult>& results, const RunConfig& cfg) {
    const auto stem = cfg.output_directory / "verify_report";
    if (cfg.format == OutputFormat::json) {
        std::filesystem::path path = stem;
        path += ".json";
        return write_text(path, report_json(results).dump(2) + "\n");
    }
    return write_table(stem, report_table(results), OutputFormat::csv);
}

}  // namespace lrwell

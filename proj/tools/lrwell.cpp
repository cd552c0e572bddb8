// lrwell: spectrum, densities, closed-form solutions and verification reports
// for the time-dependent-mass particle in the well i f(t)|x|.

#include <lrwell/config.hpp>
#include <lrwell/reporter.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verification_failed = 1;
constexpr int exit_usage = 2;

struct Flags {
    std::string config;
    std::string out;
    std::string format;
    std::string levels;
    std::string times;
    int count = 10;
    bool inject_wrong_k = false;
};

lrwell::RunConfig resolve(const Flags& flags) {
    lrwell::RunConfig cfg = flags.config.empty() ? lrwell::default_config() : lrwell::load_config(flags.config);
    if (!flags.out.empty()) cfg.output_directory = flags.out;
    if (!flags.format.empty()) cfg.format = flags.format == "json" ? lrwell::OutputFormat::json : lrwell::OutputFormat::csv;
    if (!flags.levels.empty()) cfg.levels = lrwell::parse_list<int>(flags.levels, "--n");
    if (!flags.times.empty()) cfg.times = lrwell::parse_list<double>(flags.times, "--t");
    lrwell::validate(cfg);
    return cfg;
}

void print_paths(const std::vector<std::filesystem::path>& paths) {
    for (const auto& p : paths) std::cout << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact solutions and numerical verification for the time-dependent |x| well"};
    app.require_subcommand(1);
    Flags flags;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "YAML run configuration");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--format", flags.format, "output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--n", flags.levels, "comma-separated level list");
        sub->add_option("--t", flags.times, "comma-separated time list");
    };

    auto* zeros = app.add_subcommand("zeros", "negative zeros of Ai and Ai'");
    add_common(zeros);
    zeros->add_option("--count", flags.count, "number of zeros (1..50)");
    auto* spectrum = app.add_subcommand("spectrum", "levels: n, parity, lambda, norm_const");
    add_common(spectrum);
    auto* density = app.add_subcommand("density", "density files |phi_n|^2 on [-10, 10]");
    add_common(density);
    auto* solve = app.add_subcommand("solve", "closed-form Psi_n(x, t) per profile, level and time");
    add_common(solve);
    auto* verify = app.add_subcommand("verify", "residual suite and JSON/CSV report");
    add_common(verify);
    verify->add_flag("--inject-wrong-k", flags.inject_wrong_k, "debug: negate k(t) in the solution (negative control)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        const lrwell::RunConfig cfg = resolve(flags);
        if (*zeros) {
            const auto table = lrwell::run_zeros(flags.count);
            std::cout << lrwell::render(table, cfg.format);
            lrwell::write_table(cfg.output_directory / "zeros", table, cfg.format);
        } else if (*spectrum) {
            const auto table = lrwell::run_spectrum(cfg);
            std::cout << lrwell::render(table, cfg.format);
            lrwell::write_table(cfg.output_directory / "spectrum", table, cfg.format);
        } else if (*density) {
            print_paths(lrwell::run_density(cfg));
        } else if (*solve) {
            print_paths(lrwell::run_solve(cfg));
        } else if (*verify) {
            const auto results = lrwell::run_verify(cfg, {flags.inject_wrong_k});
            const auto path = lrwell::write_report(results, cfg);
            std::size_t failed = 0;
            for (const auto& r : results) {
                if (!r.pass) ++failed;
                std::cout << (r.pass ? "PASS " : "FAIL ") << r.check << ' ' << r.params.dump() << " value "
                          << lrwell::format_number(r.value) << " threshold " << lrwell::format_number(r.threshold)
                          << '\n';
            }
            std::cout << results.size() - failed << '/' << results.size() << " checks passed; report " << path.string()
                      << '\n';
            return failed == 0 ? exit_ok : exit_verification_failed;
        }
    } catch (const lrwell::config_error& e) {
        std::cerr << "lrwell: " << e.what() << '\n';
        return exit_usage;
    } catch (const lrwell::domain_error& e) {
        std::cerr << "lrwell: " << e.what() << '\n';
        return exit_usage;
    } catch (const lrwell::range_error& e) {
        std::cerr << "lrwell: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "lrwell: " << e.what() << '\n';
        return exit_verification_failed;
    }
    return exit_ok;
}

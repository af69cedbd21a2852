#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "soulcurv/report.hpp"
#include "soulcurv/suites.hpp"

using namespace soulcurv;

namespace {

int run_command(const std::string& command, const std::string& config_path, const std::string& seed_opt,
                const std::string& backend_opt, const std::string& out_dir_opt, const std::string& format_opt,
                bool print_cfg, bool timing) {
    SuiteConfig cfg;
    try {
        if (!config_path.empty()) cfg = parse_config_file(config_path);
        if (!seed_opt.empty()) cfg.seed = std::stoull(seed_opt);
        if (!backend_opt.empty()) cfg.backend = backend_from_name(backend_opt);
        if (!out_dir_opt.empty()) cfg.out_dir = out_dir_opt;
        if (!format_opt.empty()) {
            if (format_opt != "json" && format_opt != "csv" && format_opt != "both")
                throw ConfigError("--format expects json, csv or both");
            cfg.out_format = format_opt;
        }
        if (timing) cfg.timing = true;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    if (print_cfg) {
        std::fputs(print_config(cfg).c_str(), stdout);
        return 0;
    }

    SuiteOutput out;
    try {
        out = run_suite(command, cfg);
    } catch (const Error& e) {
        std::fprintf(stderr, "run failed: %s\n", e.what());
        return 1;
    }

    for (const auto& c : out.report.checks) {
        std::printf("%-6s %-32s observed %.6g (expected %.6g, tol %.3g)\n",
                    c.indeterminate ? "INDET" : (c.pass ? "pass" : "FAIL"), c.id.c_str(), c.observed, c.expected,
                    c.tol);
    }
    std::printf("summary: %d pass, %d fail, %d indeterminate\n", out.report.pass_count(), out.report.fail_count(),
                out.report.indeterminate_count());

    try {
        std::filesystem::create_directories(cfg.out_dir);
        if (cfg.out_format == "json" || cfg.out_format == "both")
            write_file(cfg.out_dir + "/report.json", report_to_json(out.report));
        if (cfg.out_format == "csv" || cfg.out_format == "both")
            for (const auto& t : out.tables) write_file(cfg.out_dir + "/" + t.name + ".csv", csv_to_string(t));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "output error: %s\n", e.what());
        return 3;
    }

    if (out.report.fail_count() > 0) {
        std::fputs("failing checks:", stderr);
        for (const auto& c : out.report.checks)
            if (!c.pass && !c.indeterminate) std::fprintf(stderr, " %s", c.id.c_str());
        std::fputs("\n", stderr);
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical curvature engine for nonnegatively curved metrics on S^2 x R^3"};
    app.require_subcommand(0, 1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string config_path, seed_opt, backend_opt, out_dir, format_opt;
    bool print_cfg = false, timing = false;
    app.add_option("--config", config_path, "configuration file (key = value lines)");
    app.add_option("--seed", seed_opt, "override the sampling seed");
    app.add_option("--backend", backend_opt, "jet | fd | both");
    app.add_option("--out", out_dir, "output directory for reports");
    app.add_option("--format", format_opt, "json | csv | both");
    app.add_flag("--print-config", print_cfg, "print the effective configuration and exit");
    app.add_flag("--timing", timing, "measure wall time in reports (breaks byte-identical output)");

    const std::array<std::pair<const char*, const char*>, 5> commands = {
        std::pair{"verify-example", "run every quantitative check of the example metric"},
        std::pair{"rigidity-scan", "soul inequality scan and nullity quantities"},
        std::pair{"connection-sweep", "lambda sweep of the bundle connection family"},
        std::pair{"holonomy", "normal curvature and holonomy loop suite"},
        std::pair{"curvature-min", "sectional curvature minimization certificate"}};
    for (const auto& [name, desc] : commands) app.add_subcommand(name, desc);

    CLI11_PARSE(app, argc, argv);

    std::string command = "verify-example";
    for (const auto& [name, desc] : commands)
        if (app.got_subcommand(name)) command = name;

    return run_command(command, config_path, seed_opt, backend_opt, out_dir, format_opt, print_cfg, timing);
}

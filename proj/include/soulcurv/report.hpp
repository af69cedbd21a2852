#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "soulcurv/errors.hpp"
#include "soulcurv/metric.hpp"

namespace soulcurv {

inline constexpr const char* kVersion = "0.1.0";

enum class Backend { Jet, FiniteDifference, Both };

const char* backend_name(Backend b);
Backend backend_from_name(const std::string& s);

// Configuration for the verification suites: nested key = value text file,
// unknown keys rejected, every default visible through print_config().
struct SuiteConfig {
    std::string family = "cheeger_so3";
    double cheeger_scale = 1.0;
    std::vector<double> warp_coefficients;
    Backend backend = Backend::Both;
    std::uint64_t seed = 12345;

    struct Samples {
        int soul_points = 50;
        int theta_grid = 50;
        int normal_directions = 20;
        int frame_seeds = 40;
        int nonneg_points = 100;
        int geodesics = 10;
        int backend_points = 20;
        int holonomy_loops = 24;
        int audit_points = 3;
        int brute_frames = 10000;
        int lambda_grid = 41;
        int restarts = 8;
    } samples;

    struct Tolerances {
        double soul_gauss = 1e-6;
        double soul_gauss_std = 1e-7;
        double frame_metric = 1e-10;
        double tbasis = 1e-12;
        double fiber = 1e-10;
        double horizontal = 1e-10;
        double normal_norm = 1e-6;
        double normal_kernel = 1e-8;
        double loop_oracle_rel = 1e-3;
        double loop_order = 1.9; // minimum observed convergence order
        double holonomy_equator = 1e-4;
        double vertical = 1e-6;
        double connection_norm = 1e-8;
        double connection_flat = 1e-8;
        double parallel_section = 1e-6;
        double dxw = 1e-8;
        double gap = 1e-5;
        double gap_value = 1e-4;
        double scalars = 1e-5;
        double hessian = 1e-5;
        double nullity_plane = 1e-4;
        double nonneg = 1e-6;
        double brute_audit = 1e-4;
        double backend_rel = 1e-5;
    } tol;

    std::string out_dir = ".";
    std::string out_format = "json"; // json | csv | both
    bool timing = false;

    MetricModel model() const;
};

SuiteConfig parse_config_text(const std::string& text);
SuiteConfig parse_config_file(const std::string& path);
std::string print_config(const SuiteConfig& cfg);

struct CheckRecord {
    std::string id;
    std::string anchor; // the claim being verified, self-describing
    double expected = 0.0;
    double observed = 0.0;
    double tol = 0.0;
    bool pass = false;
    bool indeterminate = false;
    std::string note;
};

struct Report {
    std::string version = kVersion;
    std::string command;
    SuiteConfig config;
    std::vector<CheckRecord> checks;
    double seconds = 0.0;

    int pass_count() const;
    int fail_count() const;
    int indeterminate_count() const;
    bool all_pass() const { return fail_count() == 0; }

    CheckRecord& add(const std::string& id, const std::string& anchor, double expected, double observed, double tol);
    // predicate-style check: pass iff observed <= bound
    CheckRecord& add_bound(const std::string& id, const std::string& anchor, double observed, double bound);
    // greater-or-equal bound (e.g. convergence orders, curvature floors)
    CheckRecord& add_floor(const std::string& id, const std::string& anchor, double observed, double floor);
};

std::string report_to_json(const Report& r);
Report report_from_json(const std::string& text);

struct CsvTable {
    std::string name; // file stem
    std::string header;
    std::vector<std::string> rows;
};

std::string csv_to_string(const CsvTable& t);

void write_file(const std::string& path, const std::string& content);

} // namespace soulcurv

#include "soulcurv/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace soulcurv {

using ordered_json = nlohmann::ordered_json;

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::Jet: return "jet";
        case Backend::FiniteDifference: return "fd";
        case Backend::Both: return "both";
    }
    return "?";
}

Backend backend_from_name(const std::string& s) {
    if (s == "jet") return Backend::Jet;
    if (s == "fd" || s == "finite-difference") return Backend::FiniteDifference;
    if (s == "both") return Backend::Both;
    throw ConfigError("unknown backend '" + s + "'");
}

MetricModel SuiteConfig::model() const {
    MetricModel m;
    m.family = family_from_name(family);
    m.scale = cheeger_scale;
    m.warp.coeffs = warp_coefficients;
    return m;
}

namespace {

struct KeyHandler {
    enum Kind { Str, Num, Int, Bool, List } kind;
    void* target;
    const char* comment;
};

std::vector<std::pair<std::string, KeyHandler>> key_table(SuiteConfig& c) {
    return {
        {"family", {KeyHandler::Str, &c.family, "product | cheeger_so3 | closed_form_reference"}},
        {"cheeger.scale", {KeyHandler::Num, &c.cheeger_scale, "group Gram scale; quoted constants assume 1"}},
        {"warp.coefficients", {KeyHandler::List, &c.warp_coefficients, "fiber warp A(t) = 1 + sum c_k t^k; empty = flat"}},
        {"backend", {KeyHandler::Str, nullptr, "jet | fd | both"}},
        {"seed", {KeyHandler::Int, nullptr, "base seed for every sampled direction (mandatory for scans)"}},
        {"samples.soul_points", {KeyHandler::Int, &c.samples.soul_points, "soul sample count"}},
        {"samples.theta_grid", {KeyHandler::Int, &c.samples.theta_grid, "theta grid size for frame checks"}},
        {"samples.normal_directions", {KeyHandler::Int, &c.samples.normal_directions, "normal directions per soul point"}},
        {"samples.frame_seeds", {KeyHandler::Int, &c.samples.frame_seeds, "frame-completion seeds per direction"}},
        {"samples.nonneg_points", {KeyHandler::Int, &c.samples.nonneg_points, "points for curvature minimization"}},
        {"samples.geodesics", {KeyHandler::Int, &c.samples.geodesics, "geodesics for the nullity-plane check"}},
        {"samples.backend_points", {KeyHandler::Int, &c.samples.backend_points, "points for the jet/fd cross-check"}},
        {"samples.holonomy_loops", {KeyHandler::Int, &c.samples.holonomy_loops, "triangle loops for the algebra"}},
        {"samples.audit_points", {KeyHandler::Int, &c.samples.audit_points, "brute-force audit points"}},
        {"samples.brute_frames", {KeyHandler::Int, &c.samples.brute_frames, "frames per brute-force audit"}},
        {"samples.lambda_grid", {KeyHandler::Int, &c.samples.lambda_grid, "lambda grid size on [-3, 1]"}},
        {"samples.restarts", {KeyHandler::Int, &c.samples.restarts, "optimizer restarts (>= 8)"}},
        {"tol.soul_gauss", {KeyHandler::Num, &c.tol.soul_gauss, "soul Gauss curvature"}},
        {"tol.soul_gauss_std", {KeyHandler::Num, &c.tol.soul_gauss_std, "soul Gauss curvature spread"}},
        {"tol.frame_metric", {KeyHandler::Num, &c.tol.frame_metric, "frame expression vs chart metric"}},
        {"tol.tbasis", {KeyHandler::Num, &c.tol.tbasis, "Killing-basis block entries"}},
        {"tol.fiber", {KeyHandler::Num, &c.tol.fiber, "fiber metric components"}},
        {"tol.horizontal", {KeyHandler::Num, &c.tol.horizontal, "horizontal-space orthogonality"}},
        {"tol.normal_norm", {KeyHandler::Num, &c.tol.normal_norm, "normal curvature norm"}},
        {"tol.normal_kernel", {KeyHandler::Num, &c.tol.normal_kernel, "normal curvature kernel axis"}},
        {"tol.loop_oracle_rel", {KeyHandler::Num, &c.tol.loop_oracle_rel, "loop-commutator relative error"}},
        {"tol.loop_order", {KeyHandler::Num, &c.tol.loop_order, "minimum loop-commutator convergence order"}},
        {"tol.holonomy_equator", {KeyHandler::Num, &c.tol.holonomy_equator, "equator holonomy angle"}},
        {"tol.vertical", {KeyHandler::Num, &c.tol.vertical, "vertical-plane curvature profile"}},
        {"tol.connection_norm", {KeyHandler::Num, &c.tol.connection_norm, "connection curvature norm"}},
        {"tol.connection_flat", {KeyHandler::Num, &c.tol.connection_flat, "flat-point norm threshold"}},
        {"tol.parallel_section", {KeyHandler::Num, &c.tol.parallel_section, "parallel-section transport deviation"}},
        {"tol.dxw", {KeyHandler::Num, &c.tol.dxw, "covariant derivative of the base section"}},
        {"tol.gap", {KeyHandler::Num, &c.tol.gap, "inequality gap floor / quasi-strictness threshold"}},
        {"tol.gap_value", {KeyHandler::Num, &c.tol.gap_value, "fixed-frame gap values"}},
        {"tol.scalars", {KeyHandler::Num, &c.tol.scalars, "soul scalars F, a, g0, g1"}},
        {"tol.hessian", {KeyHandler::Num, &c.tol.hessian, "soul hessians"}},
        {"tol.nullity_plane", {KeyHandler::Num, &c.tol.nullity_plane, "nullity plane residual"}},
        {"tol.nonneg", {KeyHandler::Num, &c.tol.nonneg, "sectional curvature floor"}},
        {"tol.brute_audit", {KeyHandler::Num, &c.tol.brute_audit, "optimizer vs brute-force audit"}},
        {"tol.backend_rel", {KeyHandler::Num, &c.tol.backend_rel, "jet vs fd relative error"}},
        {"out.dir", {KeyHandler::Str, &c.out_dir, "output directory"}},
        {"out.format", {KeyHandler::Str, &c.out_format, "json | csv | both"}},
        {"timing", {KeyHandler::Bool, &c.timing, "emit measured wall time (breaks byte-identical reports)"}},
    };
}

} // namespace

SuiteConfig parse_config_text(const std::string& text) {
    SuiteConfig cfg;
    auto table = key_table(cfg);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(lineno, line, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "backend") {
            cfg.backend = backend_from_name(val);
            continue;
        }
        if (key == "seed") {
            try {
                cfg.seed = std::stoull(val);
            } catch (...) {
                throw ConfigError(lineno, key, "expected an unsigned integer");
            }
            continue;
        }
        bool found = false;
        for (auto& [k, h] : table) {
            if (k != key) continue;
            found = true;
            try {
                switch (h.kind) {
                    case KeyHandler::Str:
                        *static_cast<std::string*>(h.target) = val;
                        break;
                    case KeyHandler::Num: {
                        const double d = std::stod(val);
                        if (k.rfind("tol.", 0) == 0 && d < 0.0)
                            throw ConfigError(lineno, key, "tolerances cannot be negative");
                        *static_cast<double*>(h.target) = d;
                        break;
                    }
                    case KeyHandler::Int:
                        *static_cast<int*>(h.target) = std::stoi(val);
                        break;
                    case KeyHandler::Bool:
                        if (val == "true") *static_cast<bool*>(h.target) = true;
                        else if (val == "false") *static_cast<bool*>(h.target) = false;
                        else throw ConfigError(lineno, key, "expected true or false");
                        break;
                    case KeyHandler::List: {
                        std::vector<double> xs;
                        std::string item;
                        std::istringstream ss(val);
                        while (std::getline(ss, item, ',')) {
                            const auto t = item.find_first_not_of(" \t");
                            if (t == std::string::npos) continue;
                            xs.push_back(std::stod(item));
                        }
                        *static_cast<std::vector<double>*>(h.target) = xs;
                        break;
                    }
                }
            } catch (const ConfigError&) {
                throw;
            } catch (...) {
                throw ConfigError(lineno, key, "malformed value '" + val + "'");
            }
            break;
        }
        if (!found) throw ConfigError(lineno, key, "unknown key");
    }
    if (cfg.family != "product" && cfg.family != "cheeger_so3" && cfg.family != "closed_form_reference")
        throw ConfigError(0, "family", "unknown metric family '" + cfg.family + "'");
    if (cfg.out_format != "json" && cfg.out_format != "csv" && cfg.out_format != "both")
        throw ConfigError(0, "out.format", "expected json, csv or both");
    if (cfg.cheeger_scale <= 0.0) throw ConfigError(0, "cheeger.scale", "scale must be positive");
    if (cfg.samples.restarts < 8) throw ConfigError(0, "samples.restarts", "needs at least 8 restarts");
    return cfg;
}

SuiteConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

std::string format_value(double v) {
    ordered_json j = v;
    return j.dump();
}

} // namespace

std::string print_config(const SuiteConfig& cfg) {
    SuiteConfig tmp = cfg;
    auto table = key_table(tmp);
    std::ostringstream out;
    out << "# verification suite configuration (all keys with their current values)\n";
    for (auto& [k, h] : table) {
        out << k << " = ";
        if (k == "backend") out << backend_name(cfg.backend);
        else if (k == "seed") out << cfg.seed;
        else {
            switch (h.kind) {
                case KeyHandler::Str: out << *static_cast<std::string*>(h.target); break;
                case KeyHandler::Num: out << format_value(*static_cast<double*>(h.target)); break;
                case KeyHandler::Int: out << *static_cast<int*>(h.target); break;
                case KeyHandler::Bool: out << (*static_cast<bool*>(h.target) ? "true" : "false"); break;
                case KeyHandler::List: {
                    const auto& xs = *static_cast<std::vector<double>*>(h.target);
                    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << format_value(xs[i]);
                    break;
                }
            }
        }
        out << "  # " << h.comment << "\n";
    }
    return out.str();
}

int Report::pass_count() const {
    int n = 0;
    for (const auto& c : checks) n += (c.pass && !c.indeterminate) ? 1 : 0;
    return n;
}

int Report::fail_count() const {
    int n = 0;
    for (const auto& c : checks) n += (!c.pass && !c.indeterminate) ? 1 : 0;
    return n;
}

int Report::indeterminate_count() const {
    int n = 0;
    for (const auto& c : checks) n += c.indeterminate ? 1 : 0;
    return n;
}

CheckRecord& Report::add(const std::string& id, const std::string& anchor, double expected, double observed,
                         double tol) {
    CheckRecord c;
    c.id = id;
    c.anchor = anchor;
    c.expected = expected;
    c.observed = observed;
    c.tol = tol;
    c.pass = std::abs(observed - expected) <= tol;
    checks.push_back(c);
    return checks.back();
}

CheckRecord& Report::add_bound(const std::string& id, const std::string& anchor, double observed, double bound) {
    CheckRecord c;
    c.id = id;
    c.anchor = anchor;
    c.expected = 0.0;
    c.observed = observed;
    c.tol = bound;
    c.pass = observed <= bound;
    checks.push_back(c);
    return checks.back();
}

CheckRecord& Report::add_floor(const std::string& id, const std::string& anchor, double observed, double floor) {
    CheckRecord c;
    c.id = id;
    c.anchor = anchor;
    c.expected = floor;
    c.observed = observed;
    c.tol = 0.0;
    c.pass = observed >= floor;
    checks.push_back(c);
    return checks.back();
}

namespace {

ordered_json config_to_json(const SuiteConfig& cfg) {
    SuiteConfig tmp = cfg;
    auto table = key_table(tmp);
    ordered_json j;
    for (auto& [k, h] : table) {
        if (k == "backend") { j[k] = backend_name(cfg.backend); continue; }
        if (k == "seed") { j[k] = cfg.seed; continue; }
        switch (h.kind) {
            case KeyHandler::Str: j[k] = *static_cast<std::string*>(h.target); break;
            case KeyHandler::Num: j[k] = *static_cast<double*>(h.target); break;
            case KeyHandler::Int: j[k] = *static_cast<int*>(h.target); break;
            case KeyHandler::Bool: j[k] = *static_cast<bool*>(h.target); break;
            case KeyHandler::List: j[k] = *static_cast<std::vector<double>*>(h.target); break;
        }
    }
    return j;
}

void config_from_json(const ordered_json& j, SuiteConfig& cfg) {
    auto table = key_table(cfg);
    for (auto& [k, h] : table) {
        if (!j.contains(k)) continue;
        if (k == "backend") { cfg.backend = backend_from_name(j[k].get<std::string>()); continue; }
        if (k == "seed") { cfg.seed = j[k].get<std::uint64_t>(); continue; }
        switch (h.kind) {
            case KeyHandler::Str: *static_cast<std::string*>(h.target) = j[k].get<std::string>(); break;
            case KeyHandler::Num: *static_cast<double*>(h.target) = j[k].get<double>(); break;
            case KeyHandler::Int: *static_cast<int*>(h.target) = j[k].get<int>(); break;
            case KeyHandler::Bool: *static_cast<bool*>(h.target) = j[k].get<bool>(); break;
            case KeyHandler::List: *static_cast<std::vector<double>*>(h.target) = j[k].get<std::vector<double>>(); break;
        }
    }
}

} // namespace

std::string report_to_json(const Report& r) {
    ordered_json j;
    j["version"] = r.version;
    j["command"] = r.command;
    j["config"] = config_to_json(r.config);
    ordered_json checks = ordered_json::array();
    for (const auto& c : r.checks) {
        ordered_json jc;
        jc["id"] = c.id;
        jc["anchor"] = c.anchor;
        jc["expected"] = c.expected;
        jc["observed"] = c.observed;
        jc["tol"] = c.tol;
        jc["pass"] = c.pass;
        if (c.indeterminate) jc["indeterminate"] = true;
        if (!c.note.empty()) jc["note"] = c.note;
        checks.push_back(jc);
    }
    j["checks"] = checks;
    j["summary"] = {{"pass", r.pass_count()}, {"fail", r.fail_count()}, {"indeterminate", r.indeterminate_count()}};
    j["seconds"] = r.seconds;
    return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    Report r;
    r.version = j.at("version").get<std::string>();
    r.command = j.at("command").get<std::string>();
    config_from_json(j.at("config"), r.config);
    for (const auto& jc : j.at("checks")) {
        CheckRecord c;
        c.id = jc.at("id").get<std::string>();
        c.anchor = jc.at("anchor").get<std::string>();
        c.expected = jc.at("expected").get<double>();
        c.observed = jc.at("observed").get<double>();
        c.tol = jc.at("tol").get<double>();
        c.pass = jc.at("pass").get<bool>();
        if (jc.contains("indeterminate")) c.indeterminate = jc["indeterminate"].get<bool>();
        if (jc.contains("note")) c.note = jc["note"].get<std::string>();
        r.checks.push_back(c);
    }
    r.seconds = j.at("seconds").get<double>();
    return r;
}

std::string csv_to_string(const CsvTable& t) {
    std::ostringstream out;
    out << t.header << "\n";
    for (const auto& row : t.rows) out << row << "\n";
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace soulcurv

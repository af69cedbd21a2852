#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "soulcurv/report.hpp"
#include "soulcurv/suites.hpp"

using namespace soulcurv;

TEST_CASE("config defaults and parsing") {
    const SuiteConfig def;
    CHECK(def.family == "cheeger_so3");
    CHECK(def.seed == 12345);
    CHECK(def.tol.soul_gauss == 1e-6);

    const SuiteConfig cfg = parse_config_text(R"(
# comment line
family = product
cheeger.scale = 2.5
warp.coefficients = 0.1, 0.02
backend = fd
seed = 777
samples.soul_points = 9
tol.gap = 1e-4
out.format = both
timing = true
)");
    CHECK(cfg.family == "product");
    CHECK(cfg.cheeger_scale == 2.5);
    CHECK(cfg.warp_coefficients.size() == 2);
    CHECK(cfg.warp_coefficients[1] == 0.02);
    CHECK(cfg.backend == Backend::FiniteDifference);
    CHECK(cfg.seed == 777);
    CHECK(cfg.samples.soul_points == 9);
    CHECK(cfg.tol.gap == 1e-4);
    CHECK(cfg.out_format == "both");
    CHECK(cfg.timing);
}

TEST_CASE("config errors carry line and key diagnostics") {
    try {
        (void)parse_config_text("family = cheeger_so3\nnot.a.key = 3\n");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
        CHECK(e.offending_key == "not.a.key");
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS((void)parse_config_text("tol.gap = -1\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config_text("seed = banana\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config_text("family = torus\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config_text("just a line\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_config_text("out.format = yaml\n"), ConfigError);
    // zero tolerances parse fine: they act as a forcing function downstream
    const SuiteConfig zero = parse_config_text("tol.soul_gauss = 0\n");
    CHECK(zero.tol.soul_gauss == 0.0);
}

TEST_CASE("print-config output reparses to the same configuration") {
    SuiteConfig cfg;
    cfg.family = "product";
    cfg.seed = 31337;
    cfg.tol.gap = 2e-5;
    cfg.samples.theta_grid = 17;
    const SuiteConfig back = parse_config_text(print_config(cfg));
    CHECK(back.family == cfg.family);
    CHECK(back.seed == cfg.seed);
    CHECK(back.tol.gap == cfg.tol.gap);
    CHECK(back.samples.theta_grid == cfg.samples.theta_grid);
    CHECK(back.backend == cfg.backend);
}

TEST_CASE("report JSON round trip is exact") {
    Report r;
    r.command = "holonomy";
    r.config.seed = 99;
    r.add("x.alpha", "a first check", 1.5, 1.5 + 1e-9, 1e-6);
    auto& c = r.add_bound("x.beta", "a bounded check", 0.25, 0.1);
    c.note = "expected failure carried for the round trip";
    auto& ind = r.add("x.gamma", "an indeterminate sample", 0.0, 0.0, 1.0);
    ind.indeterminate = true;
    r.seconds = 0.0;

    const std::string text = report_to_json(r);
    const Report back = report_from_json(text);
    CHECK(back.command == r.command);
    CHECK(back.config.seed == r.config.seed);
    REQUIRE(back.checks.size() == r.checks.size());
    for (std::size_t i = 0; i < r.checks.size(); ++i) {
        CHECK(back.checks[i].id == r.checks[i].id);
        CHECK(back.checks[i].expected == r.checks[i].expected);
        CHECK(back.checks[i].observed == r.checks[i].observed);
        CHECK(back.checks[i].tol == r.checks[i].tol);
        CHECK(back.checks[i].pass == r.checks[i].pass);
        CHECK(back.checks[i].indeterminate == r.checks[i].indeterminate);
        CHECK(back.checks[i].note == r.checks[i].note);
    }
    CHECK(report_to_json(back) == text);

    CHECK(r.pass_count() == 1);
    CHECK(r.fail_count() == 1);
    CHECK(r.indeterminate_count() == 1);
}

TEST_CASE("empty report serializes with zero summary") {
    Report r;
    r.command = "verify-example";
    const std::string text = report_to_json(r);
    const Report back = report_from_json(text);
    CHECK(back.checks.empty());
    CHECK(text.find("\"pass\": 0") != std::string::npos);
    CHECK(text.find("\"fail\": 0") != std::string::npos);
}

TEST_CASE("csv tables") {
    CsvTable t;
    t.name = "lambda_sweep";
    t.header = "lambda,curvature_norm,holonomy_dim";
    t.rows = {"0.0,0.0,0", "-1.0,1.0,1"};
    const std::string s = csv_to_string(t);
    CHECK(s == "lambda,curvature_norm,holonomy_dim\n0.0,0.0,0\n-1.0,1.0,1\n");
}

TEST_CASE("zero tolerances force every floating check to fail") {
    SuiteConfig cfg;
    cfg.samples.lambda_grid = 11;
    cfg.tol.connection_norm = 0.0;
    cfg.tol.dxw = 0.0;
    cfg.tol.parallel_section = 0.0;
    cfg.tol.loop_oracle_rel = 0.0;
    const SuiteOutput out = run_connection_sweep(cfg);
    int fails = 0;
    for (const auto& c : out.report.checks)
        if (!c.pass && c.tol == 0.0 && c.id != "connection.flat_points" && c.id != "connection.holonomy_dim") ++fails;
    CHECK(fails >= 4);
    CHECK(out.report.fail_count() >= 4);
}

TEST_CASE("suite reports are deterministic for a fixed seed") {
    SuiteConfig cfg;
    cfg.samples.lambda_grid = 9;
    const SuiteOutput a = run_connection_sweep(cfg);
    const SuiteOutput b = run_connection_sweep(cfg);
    CHECK(report_to_json(a.report) == report_to_json(b.report));
    REQUIRE(a.tables.size() == b.tables.size());
    for (std::size_t i = 0; i < a.tables.size(); ++i)
        CHECK(csv_to_string(a.tables[i]) == csv_to_string(b.tables[i]));
}

TEST_CASE("unknown suite command is rejected") {
    SuiteConfig cfg;
    CHECK_THROWS_AS(run_suite("frobnicate", cfg), DomainError);
}

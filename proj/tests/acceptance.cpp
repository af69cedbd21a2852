// Acceptance suite: runs the full default verification run and reports one
// line per criterion. Exit status is nonzero when any criterion fails.
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "soulcurv/report.hpp"
#include "soulcurv/suites.hpp"

using namespace soulcurv;

namespace {

struct Criterion {
    const char* name;
    const char* description;
    std::vector<std::string> check_ids;
};

} // namespace

int main() {
    SuiteConfig cfg; // pinned defaults: the documented tolerances and counts
    cfg.timing = true;

    const SuiteOutput out = run_verify_example(cfg);

    const std::vector<Criterion> criteria = {
        {"criterion-01", "soul Gauss curvature equals 2 with vanishing spread",
         {"soul.gauss", "soul.gauss_std", "soul.totally_geodesic"}},
        {"criterion-02", "frame expression matches the quotient metric; Killing block diag(2/3,1/2,1/2)",
         {"cheeger.chart_agreement", "cheeger.frame_agreement", "cheeger.tbasis"}},
        {"criterion-03", "fiber metric components 2/3 and 2/(4-cos^2 theta)",
         {"fiber.YY", "fiber.BB", "fiber.YB"}},
        {"criterion-04", "displayed horizontal vectors are orthogonal to the vertical frame",
         {"horizontal.orthogonality"}},
        {"criterion-05", "normal curvature norm 3/2, kernel axis, loop oracle at second order",
         {"normal.norm", "normal.kernel", "normal.loop_oracle", "normal.loop_order"}},
        {"criterion-06", "normal holonomy: dimension 3, equator half-turn, trivial product control",
         {"holonomy.dimension", "holonomy.product_dim", "holonomy.equator_angle", "holonomy.equator_axis"}},
        {"criterion-07", "vertical curvature profile with extremes 3/2 and 3 (convention flagged)",
         {"vertical.profile", "vertical.min", "vertical.max"}},
        {"criterion-08", "connection family: norm law, two flat points, parallel section at -1",
         {"connection.norm", "connection.flat_points", "connection.dxw", "connection.parallel_section",
          "connection.holonomy_dim", "connection.fixes_section", "connection.loop_oracle"}},
        {"criterion-09", "rigidity suite: gaps, scalars, residuals, nullity plane",
         {"rigidity.gap_floor", "rigidity.gap_floor_ambient", "rigidity.not_quasi_strict", "rigidity.F",
          "rigidity.a", "rigidity.g0", "rigidity.g1", "rigidity.g0_constant", "rigidity.G_WV", "rigidity.G_UV",
          "rigidity.form_agreement", "rigidity.residual1", "rigidity.residual2", "rigidity.residual3",
          "rigidity.hess_g0", "rigidity.nullity_plane"}},
        {"criterion-10", "nonnegativity certification with brute-force audit",
         {"nonneg.min", "nonneg.product_min", "nonneg.brute_audit"}},
        {"criterion-11", "cross-backend agreement and byte-level determinism",
         {"backend.curvature", "determinism.bytes"}},
    };

    std::map<std::string, const CheckRecord*> by_id;
    for (const auto& c : out.report.checks) by_id[c.id] = &c;

    int failures = 0;
    for (const auto& cr : criteria) {
        bool ok = true;
        std::string detail;
        for (const auto& id : cr.check_ids) {
            const auto it = by_id.find(id);
            if (it == by_id.end()) {
                ok = false;
                detail += " missing:" + id;
                continue;
            }
            if (!it->second->pass) {
                ok = false;
                char buf[128];
                std::snprintf(buf, sizeof buf, " %s=%.3g", id.c_str(), it->second->observed);
                detail += buf;
            }
        }
        std::printf("%s %s: %s%s\n", ok ? "PASS" : "FAIL", cr.name, cr.description, detail.c_str());
        failures += ok ? 0 : 1;
    }

    // the vertical-profile record must carry the convention flag
    {
        const auto it = by_id.find("vertical.profile");
        const bool flagged = it != by_id.end() && !it->second->note.empty();
        std::printf("%s criterion-07-flag: the report notes the angle-convention discrepancy\n",
                    flagged ? "PASS" : "FAIL");
        failures += flagged ? 0 : 1;
    }

    std::printf("acceptance: %d of %zu criteria failed (suite wall time %.1f s)\n", failures, criteria.size() + 1,
                out.report.seconds);
    return failures == 0 ? 0 : 1;
}

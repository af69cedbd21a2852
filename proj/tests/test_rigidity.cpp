#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "soulcurv/rigidity.hpp"
#include "soulcurv/rng.hpp"

using namespace soulcurv;

namespace {

MetricModel cheeger_model() {
    MetricModel m;
    m.family = Family::CheegerSO3;
    return m;
}

MetricModel product_model() {
    MetricModel m;
    m.family = Family::Product;
    return m;
}

Vec5 unit_tangent(const MetricModel& m, const ChartPoint& pt, double a0, double a1) {
    const Mat5 g = metric_value(m, pt);
    return gram_schmidt<5>(g, {Vec5{a0, a1, 0.0, 0.0, 0.0}})[0];
}

} // namespace

TEST_CASE("nullity section of the quotient points along the base direction") {
    const MetricModel m = cheeger_model();
    const auto pts = soul_samples(12, 4242);
    const NullityField nf = nullity_section(m, pts);
    CHECK_FALSE(nf.trivial);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK_FALSE(nf.indeterminate[i]);
        CHECK(std::abs(nf.F[i] - 1.5) < 1e-6);
        const auto pamb = embed_sphere<double>(pts[i].chart, pts[i].u);
        double diff = 0.0;
        for (int k = 0; k < 3; ++k)
            diff = std::max(diff, std::abs(nf.W[i][static_cast<std::size_t>(2 + k)] - pamb[static_cast<std::size_t>(k)]));
        CHECK(diff < 1e-6);
    }
}

TEST_CASE("nullity section of the product metric is flagged trivial") {
    const MetricModel m = product_model();
    const auto pts = soul_samples(8, 7);
    const NullityField nf = nullity_section(m, pts);
    CHECK(nf.trivial);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(nf.indeterminate[i]);
}

TEST_CASE("soul scalars take the quoted constant values") {
    const MetricModel m = cheeger_model();
    Rng rng(101);
    for (int t = 0; t < 4; ++t) {
        const double a = 2.0 * M_PI * rng.uniform(), r = 1.1 * rng.uniform();
        const ChartPoint pt = make_point(Chart::North, r * std::cos(a), r * std::sin(a));
        const SoulScalars sc = soul_scalars(m, pt, unit_tangent(m, pt, rng.normal(), rng.normal()));
        CHECK(sc.F == doctest::Approx(1.5).epsilon(1e-5));
        CHECK(sc.a == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-5));
        CHECK(sc.g0 == doctest::Approx(1.5).epsilon(1e-5));
        CHECK(sc.g1 == doctest::Approx(3.0).epsilon(1e-5));
    }
    // indeterminate on the product metric
    CHECK_THROWS_AS(soul_scalars(product_model(), make_point(Chart::North, 0.3, 0.0),
                                 unit_tangent(product_model(), make_point(Chart::North, 0.3, 0.0), 1.0, 0.0)),
                    DomainError);
}

TEST_CASE("soul hessians: constants, the nullity curvatures, and a closed form") {
    const MetricModel m = cheeger_model();
    const ChartPoint pt = make_point(Chart::North, 0.31, -0.12);
    const Vec5 X = unit_tangent(m, pt, 0.8, -0.5);

    CHECK(std::abs(hessian_on_soul(m, [](const ChartPoint&) { return 4.2; }, pt, X)) < 1e-10);
    CHECK(std::abs(hessian_on_soul(m, [&](const ChartPoint& q) { return field_g0(m, q); }, pt, X)) < 1e-5);

    // closed-form oracle on the product soul: the height function z on the
    // unit round sphere has covariant hessian -z * g
    const MetricModel pr = product_model();
    const ChartPoint peq = point_from_ambient({std::sqrt(0.75), 0.0, 0.5}, {0.0, 0.0, 0.0});
    const SoulField height = [](const ChartPoint& q) { return embed_sphere<double>(q.chart, q.u)[2]; };
    const Vec5 east = unit_tangent(pr, peq, 0.0, 1.0); // along the latitude circle
    const double hess = hessian_on_soul(pr, height, peq, east);
    CHECK(hess == doctest::Approx(-0.5).epsilon(1e-5));
}

TEST_CASE("rigidity gap values on distinguished frames") {
    const MetricModel m = cheeger_model();
    const ChartPoint pt = make_point(Chart::North, -0.4, 0.22);
    const SoulScalars sc = soul_scalars(m, pt, unit_tangent(m, pt, 1.0, 0.3));

    const RigidityGap gwv = rigidity_gap(m, pt, sc.X, sc.Y, sc.W, sc.V);
    CHECK(std::abs(gwv.gap_normal) < 1e-5);
    CHECK(std::abs(gwv.gap_ambient) < 1e-5);

    const RigidityGap guv = rigidity_gap(m, pt, sc.X, sc.Y, sc.U, sc.V);
    CHECK(guv.gap_normal == doctest::Approx(2.5).epsilon(1e-4));
    CHECK(std::abs(guv.form_difference) < 1e-4);

    // product control: every operand vanishes except the tangent curvature
    const MetricModel pr = product_model();
    const SoulFrame fp = soul_frame(pr, pt);
    const RigidityGap gp = rigidity_gap(pr, pt, fp.X, fp.Y, fp.W, fp.V);
    CHECK(std::abs(gp.gap_normal) < 1e-10);
    CHECK(std::abs(gp.gap_ambient) < 1e-10);

    CHECK_THROWS_AS(rigidity_gap(m, pt, sc.X, sc.X, sc.W, sc.V), FrameError);
}

TEST_CASE("gap functional is invariant under normal-pair rotation and tangent swap") {
    const MetricModel m = cheeger_model();
    const ChartPoint pt = make_point(Chart::North, 0.15, 0.42);
    const SoulScalars sc = soul_scalars(m, pt, unit_tangent(m, pt, -0.3, 1.0));
    const CurvaturePacket pk = curvature_at(m, pt, 4);

    const RigidityGap base = rigidity_gap(pk, sc.X, sc.Y, sc.U, sc.V);
    for (double phi : {0.3, 1.2, 2.5}) {
        Vec5 e1{}, e2{};
        for (int i = 0; i < 5; ++i) {
            e1[static_cast<std::size_t>(i)] = std::cos(phi) * sc.U[static_cast<std::size_t>(i)] +
                                              std::sin(phi) * sc.V[static_cast<std::size_t>(i)];
            e2[static_cast<std::size_t>(i)] = -std::sin(phi) * sc.U[static_cast<std::size_t>(i)] +
                                              std::cos(phi) * sc.V[static_cast<std::size_t>(i)];
        }
        const RigidityGap rot = rigidity_gap(pk, sc.X, sc.Y, e1, e2);
        CHECK(rot.gap_normal == doctest::Approx(base.gap_normal).epsilon(1e-10));
        CHECK(rot.gap_ambient == doctest::Approx(base.gap_ambient).epsilon(1e-10));
    }
    // swapped oriented tangent pair on this metric
    const RigidityGap swapped = rigidity_gap(pk, sc.Y, sc.X, sc.U, sc.V);
    CHECK(swapped.gap_normal == doctest::Approx(base.gap_normal).epsilon(1e-8));
}

TEST_CASE("nullity inequality residual triple") {
    const MetricModel m = cheeger_model();
    const ChartPoint pt = make_point(Chart::South, 0.2, 0.33);
    const NullityResiduals nr = nullity_residuals(m, pt, unit_tangent(m, pt, 1.0, -0.2));
    CHECK(nr.r1 == doctest::Approx(2.5).epsilon(1e-4));
    CHECK(nr.r2 == doctest::Approx(0.875).epsilon(1e-4));
    CHECK(std::abs(nr.r3) < 1e-4);
    CHECK(std::abs(nr.hess_g0) < 1e-5);
    CHECK(std::abs(nr.xf) < 1e-6);
    CHECK(nr.gauss == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("second covariant derivative identities at random points") {
    const MetricModel m = cheeger_model();
    Rng rng(103);
    for (int t = 0; t < 3; ++t) {
        const double a = 2.0 * M_PI * rng.uniform(), r = 1.0 * rng.uniform();
        const ChartPoint pt = make_point(Chart::North, r * std::cos(a), r * std::sin(a));
        const Vec5 X = unit_tangent(m, pt, rng.normal(), rng.normal());
        const SoulScalars sc = soul_scalars(m, pt, X);
        const NullityResiduals nr = nullity_residuals(m, pt, X);
        const CurvaturePacket pk = curvature_at(m, pt, 4);

        const double a2 = sc.a * sc.a, dg = sc.g1 - sc.g0;
        CHECK(pk.d2R6(sc.X, sc.X, sc.U, sc.V, sc.V, sc.U) ==
              doctest::Approx(nr.hess_g1 - 2.0 * a2 * dg).epsilon(1e-4));
        CHECK(pk.d2R6(sc.X, sc.X, sc.W, sc.U, sc.U, sc.W) ==
              doctest::Approx(nr.hess_g0 + 2.0 * a2 * dg).epsilon(1e-4));
        CHECK(std::abs(pk.d2R6(sc.X, sc.X, sc.V, sc.W, sc.W, sc.V) - nr.hess_g0) < 1e-4);

        // first-derivative identities, ambient and transport forms
        CHECK(std::abs(pk.dR5(sc.X, sc.X, sc.Y, sc.W, sc.V)) < 1e-4);
        CHECK(pk.dR5(sc.X, sc.X, sc.Y, sc.W, sc.U) == doctest::Approx(-sc.a * sc.F).epsilon(1e-4));
        CHECK(normal_curvature_derivative_transport(m, pt, sc.X, sc.W, sc.U) ==
              doctest::Approx(-sc.a * sc.F).epsilon(1e-4));
        CHECK(std::abs(normal_curvature_derivative_transport(m, pt, sc.X, sc.W, sc.V)) < 1e-4);
    }
}

TEST_CASE("nullity axis stays in a parallel plane along geodesics") {
    const MetricModel m = cheeger_model();
    Rng rng(107);
    for (int t = 0; t < 3; ++t) {
        const double a = 2.0 * M_PI * rng.uniform(), r = 0.9 * rng.uniform();
        const ChartPoint pt = make_point(Chart::North, r * std::cos(a), r * std::sin(a));
        const NullityPlaneResidual np =
            nullity_plane_residual(m, pt, unit_tangent(m, pt, rng.normal(), rng.normal()), M_PI / 2.0);
        CHECK_FALSE(np.parallel_branch);
        CHECK(np.max_residual <= 1e-4);
        CHECK(std::abs(np.cross_check) <= 1e-4);
    }
    // product metric: flagged parallel branch with tiny residual
    const NullityPlaneResidual npp = nullity_plane_residual(product_model(), make_point(Chart::North, 0.2, 0.1),
                                                            unit_tangent(product_model(),
                                                                         make_point(Chart::North, 0.2, 0.1), 1.0, 0.0),
                                                            1.0);
    CHECK(npp.parallel_branch);
    CHECK(npp.max_residual <= 1e-8);
}

TEST_CASE("sectional minimization") {
    Rng rng(109);
    const ChartPoint pt = make_point(Chart::North, 0.31, -0.12, 0.4, -0.2, 0.5);

    // product metric: mixed planes are flat
    const auto mp = min_sectional(product_model(), pt, 8, rng);
    CHECK(std::abs(mp.value) <= 1e-8);

    // restricted to the sphere block the product recovers curvature one
    const auto mr = min_sectional(product_model(), make_point(Chart::North, 0.31, -0.12), 8, rng, true);
    CHECK(mr.value == doctest::Approx(1.0).epsilon(1e-10));

    // the quotient stays nonnegative at sampled points
    const MetricModel m = cheeger_model();
    for (int t = 0; t < 6; ++t) {
        const ChartPoint q = make_point(Chart::North, rng.uniform(-1, 1), rng.uniform(-1, 1),
                                        rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8));
        CHECK(min_sectional(m, q, 8, rng).value >= -1e-6);
    }

    // optimizer soundness: never above a random-plane sample
    const auto ms = min_sectional(m, pt, 8, rng);
    const double brute = min_sectional_brute(m, pt, 1000, rng);
    CHECK(ms.value <= brute + 1e-12);

    CHECK_THROWS_AS(min_sectional(m, pt, 4, rng), DomainError);
}

TEST_CASE("quasi-strictness scan concludes not quasi-strict") {
    const MetricModel m = cheeger_model();
    ScanPlan plan;
    plan.soul_points = 6;
    plan.normal_directions = 6;
    plan.frame_seeds = 40;
    plan.seed = 99;
    const RigidityReport rep = quasi_strict_scan(m, plan);
    CHECK_FALSE(rep.quasi_strict);
    CHECK(rep.worst_direction_gap <= 1e-5);
    CHECK(rep.min_gap >= -1e-5);
    CHECK(rep.min_gap_ambient >= -1e-5);
    CHECK(rep.records.size() == 36);

    // stored operands reproduce the recorded gap
    for (const auto& rec : rep.records) {
        CHECK(rec.min_gap == doctest::Approx(rec.rhs - rec.lhs).epsilon(1e-12));
        // minimizing planes contain the nullity axis
        CHECK(rec.axis_containment >= 1.0 - 1e-3);
    }

    // brute-force frame grids agree with the refined minima at audit pairs
    const auto pts = soul_samples(plan.soul_points, plan.seed);
    Rng rng(plan.seed);
    int audited = 0;
    for (const auto& rec : rep.records) {
        if (audited >= 3 || rec.direction_index != 0) continue;
        ++audited;
        const ChartPoint& pt = pts[static_cast<std::size_t>(rec.point_index)];
        const CurvaturePacket pk = curvature_at(m, pt, 4);
        const SoulFrame fr = soul_frame(m, pt);
        Rng drng = rng.fork(static_cast<std::uint64_t>(rec.point_index * 1000 + rec.direction_index));
        const auto dir3 = drng.unit_vector3();
        Vec5 wt{};
        const std::array<Vec5, 3> nb = {fr.W, fr.U, fr.V};
        for (int s = 0; s < 3; ++s)
            for (int i = 0; i < 5; ++i)
                wt[static_cast<std::size_t>(i)] += dir3[static_cast<std::size_t>(s)] *
                                                   nb[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
        const auto tri = gram_schmidt<5>(pk.g, {wt, fr.U, fr.V});
        double grid_min = 1e300;
        for (int ia = 0; ia < 100; ++ia)
            for (int ib = 0; ib < 100; ++ib) {
                const double al = M_PI * ia / 100.0, be = M_PI * ib / 100.0;
                Vec5 X{}, Y{}, V{};
                for (int i = 0; i < 5; ++i) {
                    X[static_cast<std::size_t>(i)] = std::cos(al) * fr.X[static_cast<std::size_t>(i)] +
                                                     std::sin(al) * fr.Y[static_cast<std::size_t>(i)];
                    Y[static_cast<std::size_t>(i)] = -std::sin(al) * fr.X[static_cast<std::size_t>(i)] +
                                                     std::cos(al) * fr.Y[static_cast<std::size_t>(i)];
                    V[static_cast<std::size_t>(i)] = std::cos(be) * tri[1][static_cast<std::size_t>(i)] +
                                                     std::sin(be) * tri[2][static_cast<std::size_t>(i)];
                }
                grid_min = std::min(grid_min, rigidity_gap(pk, X, Y, tri[0], V).gap_normal);
            }
        CHECK(rec.min_gap <= grid_min + 1e-4);
    }
    CHECK(audited == 3);
}

TEST_CASE("product metric scan keeps every gap at zero") {
    ScanPlan plan;
    plan.soul_points = 3;
    plan.normal_directions = 3;
    plan.frame_seeds = 16;
    plan.seed = 5;
    const RigidityReport rep = quasi_strict_scan(product_model(), plan);
    CHECK_FALSE(rep.quasi_strict);
    for (const auto& rec : rep.records) CHECK(std::abs(rec.min_gap) < 1e-10);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "soulcurv/curvature.hpp"
#include "soulcurv/rng.hpp"
#include "soulcurv/transport.hpp"

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

TEST_CASE("soul great circles close after one period") {
    const ChartPoint pt = make_point(Chart::North, 0.31, -0.12);
    // product: unit-round soul, length 2 pi
    {
        const MetricModel m = product_model();
        const Curve c = geodesic(m, pt, unit_tangent(m, pt, 1.0, 0.4), 2.0 * M_PI);
        CHECK(ambient_distance(c.start(), c.end()) < 1e-7);
    }
    // quotient: curvature-2 soul, length 2 pi / sqrt(2)
    {
        const MetricModel m = cheeger_model();
        const Curve c = geodesic(m, pt, unit_tangent(m, pt, 1.0, 0.4), 2.0 * M_PI / std::sqrt(2.0));
        CHECK(ambient_distance(c.start(), c.end()) < 1e-5);
        CHECK(c.chart_switches > 0); // the great circle passes the chart boundary
    }
}

TEST_CASE("zero-time geodesic returns the start exactly") {
    const MetricModel m = cheeger_model();
    const ChartPoint pt = make_point(Chart::North, 0.4, 0.2, 0.1, -0.3, 0.2);
    const Curve c = geodesic(m, pt, {0.3, 0.1, 0.0, 0.2, -0.1}, 0.0);
    CHECK(c.end().u[0] == pt.u[0]);
    CHECK(c.end().u[1] == pt.u[1]);
    CHECK(c.end().v[2] == pt.v[2]);
    CHECK_THROWS_AS(geodesic(m, pt, {0, 0, 0, 0, 0}, 1.0), DomainError);
}

TEST_CASE("geodesics keep constant speed and satisfy the equation") {
    Rng rng(61);
    const MetricModel m = cheeger_model();
    const ChartPoint pt = make_point(Chart::North, -0.2, 0.5, 0.3, 0.1, -0.4);
    Vec5 v = {0.4, -0.2, 0.5, 0.1, 0.3};
    const Curve c = geodesic(m, pt, v, 2.0);

    // speed profile
    double sp0 = -1.0;
    for (const auto& s : c.samples) {
        const Mat5 g = metric_value(m, s.x);
        const double sp = std::sqrt(inner<double, 5>(g, s.v, s.v));
        if (sp0 < 0.0) sp0 = sp;
        CHECK(std::abs(sp - sp0) / sp0 < 1e-8);
    }

    // residual of the equation at interior samples: acceleration by central
    // differences of two short re-integrations
    for (std::size_t k = 4; k < c.samples.size(); k += 7) {
        const auto& s = c.samples[k];
        const double delta = 1e-4;
        const Curve fwd = geodesic(m, s.x, s.v, delta);
        const Curve bwd = geodesic(m, s.x, s.v, -delta);
        REQUIRE(fwd.end().chart == bwd.end().chart);
        Vec5 vdot;
        const Vec5& vf = fwd.samples.back().v;
        const Vec5& vb = bwd.samples.back().v;
        for (int i = 0; i < 5; ++i)
            vdot[static_cast<std::size_t>(i)] = (vf[static_cast<std::size_t>(i)] - vb[static_cast<std::size_t>(i)]) /
                                                (2.0 * delta);
        const CurvaturePacket pk = curvature_at(m, s.x, 1);
        for (int kk = 0; kk < 5; ++kk) {
            double acc = 0.0;
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) acc += pk.Gamma(kk, i, j) * s.v[static_cast<std::size_t>(i)] *
                                                    s.v[static_cast<std::size_t>(j)];
            CHECK(std::abs(vdot[static_cast<std::size_t>(kk)] + acc) < 1e-8 * (1.0 + std::abs(acc)));
        }
    }
    (void)rng;
}

TEST_CASE("transport along a soul arc follows the half-angle rotation law") {
    const MetricModel m = cheeger_model();
    const ChartPoint start = point_from_ambient({1.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
    const double psi = 1.3;
    const Curve arc = soul_arc(start, {0.0, 1.0, 0.0}, psi);
    const Vec5 v0 = {0.0, 0.0, 0.25, -0.55, 0.7};
    const auto tr = parallel_transport(m, arc, {v0}, TransportMode::Normal);
    // rotation by psi/2 about gamma x gamma' = e3, right-handed
    const Mat3 rot = rotation_exp(scale<3>({0.0, 0.0, 1.0}, psi / 2.0));
    const Vec3 expect = matvec(rot, Vec3{0.25, -0.55, 0.7});
    for (int i = 0; i < 3; ++i)
        CHECK(tr.vectors[0][static_cast<std::size_t>(2 + i)] ==
              doctest::Approx(expect[static_cast<std::size_t>(i)]).epsilon(1e-5));
}

TEST_CASE("product-metric normal transport is the identity on fiber components") {
    const MetricModel m = product_model();
    const ChartPoint start = point_from_ambient({0.0, 1.0, 0.0}, {0.0, 0.0, 0.0});
    const Curve arc = soul_arc(start, {0.0, 0.0, 1.0}, 2.1);
    const Vec5 v0 = {0.0, 0.0, 0.3, 0.4, -0.5};
    const auto tr = parallel_transport(m, arc, {v0}, TransportMode::Normal);
    for (int i = 2; i < 5; ++i)
        CHECK(tr.vectors[0][static_cast<std::size_t>(i)] ==
              doctest::Approx(v0[static_cast<std::size_t>(i)]).epsilon(1e-9));
}

TEST_CASE("transport preserves inner products without re-projection") {
    const MetricModel m = cheeger_model();
    const ChartPoint start = point_from_ambient({0.2, -0.9, std::sqrt(1.0 - 0.04 - 0.81)}, {0.0, 0.0, 0.0});
    // loop of three arcs, total length about 6 base radians
    const Curve tri = soul_triangle(start, point_from_ambient({-0.8, 0.1, std::sqrt(1.0 - 0.65)}, {0, 0, 0}),
                                    point_from_ambient({0.1, 0.8, -std::sqrt(1.0 - 0.65)}, {0, 0, 0}));
    const SoulFrame fr = soul_frame(m, start);
    IntegrationOptions opts;
    opts.reproject = false;
    const auto tr = parallel_transport(m, tri, {fr.W, fr.U, fr.V}, TransportMode::Normal, opts);
    CHECK(tr.gram_drift <= 1e-8);
}

TEST_CASE("holonomy of degenerate and flat loops") {
    const MetricModel m = cheeger_model();
    const ChartPoint pt = make_point(Chart::North, 0.31, -0.12);
    // zero-size rectangle: identity
    const Curve point_loop = coordinate_rectangle(pt, 0.0, 0.0);
    const HolonomyElement he = holonomy_loop(m, point_loop);
    CHECK(norm<3>(he.log) < 1e-12);

    // product metric triangle: flat normal bundle
    const MetricModel pr = product_model();
    const Curve tri = soul_triangle(point_from_ambient({1, 0, 0}, {0, 0, 0}),
                                    point_from_ambient({0, 1, 0}, {0, 0, 0}),
                                    point_from_ambient({0, 0, 1}, {0, 0, 0}));
    const HolonomyElement hp = holonomy_loop(pr, tri);
    CHECK(norm<3>(hp.log) <= 1e-8);

    // open path rejected
    const Curve open_arc = soul_arc(point_from_ambient({1, 0, 0}, {0, 0, 0}), {0.0, 1.0, 0.0}, 1.0);
    CHECK_THROWS_AS(holonomy_loop(m, open_arc), LoopClosureError);
}

TEST_CASE("equator holonomy is a half turn about the polar axis") {
    const MetricModel m = cheeger_model();
    const ChartPoint start = point_from_ambient({1.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
    const Curve eq = soul_arc(start, {0.0, 1.0, 0.0}, 2.0 * M_PI);
    const HolonomyElement he = holonomy_loop(m, eq);
    CHECK(norm<3>(he.log) == doctest::Approx(M_PI).epsilon(1e-4));
    CHECK(he.ortho_residual <= 1e-9);
}

TEST_CASE("reversed loops give transposed holonomy") {
    const MetricModel m = cheeger_model();
    const Curve tri = soul_triangle(point_from_ambient({0.9, 0.1, std::sqrt(1.0 - 0.82)}, {0, 0, 0}),
                                    point_from_ambient({-0.2, 0.8, std::sqrt(1.0 - 0.68)}, {0, 0, 0}),
                                    point_from_ambient({0.0, -0.5, std::sqrt(0.75)}, {0, 0, 0}));
    const HolonomyElement fwd = holonomy_loop(m, tri);
    const HolonomyElement bwd = holonomy_loop(m, reversed(tri));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(bwd.rotation(i, j) == doctest::Approx(fwd.rotation(j, i)).epsilon(1e-8));
}

TEST_CASE("loop commutator converges to the curvature at second order") {
    const MetricModel m = cheeger_model();
    const ChartPoint pt = make_point(Chart::North, 0.31, -0.12);
    const SoulFrame fr = soul_frame(m, pt);
    const CurvaturePacket pk = curvature_at(m, pt, 2);
    Mat3 rcoord;
    const std::array<Vec5, 3> nb = {fr.W, fr.U, fr.V};
    const Vec5 d0 = {1, 0, 0, 0, 0}, d1 = {0, 1, 0, 0, 0};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            rcoord(b, a) = pk.R4(d0, d1, nb[static_cast<std::size_t>(a)], nb[static_cast<std::size_t>(b)]);
    std::array<double, 3> errs{};
    const std::array<double, 3> hs = {0.1, 0.05, 0.025};
    for (int k = 0; k < 3; ++k) {
        const HolonomyElement he = holonomy_loop(m, centered_rectangle_loop(pt, hs[static_cast<std::size_t>(k)],
                                                                            hs[static_cast<std::size_t>(k)]));
        const Mat3 lg = skew_from_axis(he.log);
        double e = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                e = std::max(e, std::abs(lg(i, j) / (hs[static_cast<std::size_t>(k)] * hs[static_cast<std::size_t>(k)]) -
                                         rcoord(i, j)));
        errs[static_cast<std::size_t>(k)] = e;
    }
    CHECK(std::log2(errs[0] / errs[1]) >= 1.9);
    CHECK(std::log2(errs[1] / errs[2]) >= 1.9);
}

TEST_CASE("holonomy algebra dimensions") {
    const auto loops = triangle_basket(10, 0.45);
    const HolonomyAlgebra hc = holonomy_algebra(cheeger_model(), loops);
    CHECK(hc.dimension == 3);
    const HolonomyAlgebra hp = holonomy_algebra(product_model(), loops);
    CHECK(hp.dimension == 0);
    CHECK_THROWS_AS(holonomy_algebra(cheeger_model(), std::vector<Curve>(loops.begin(), loops.begin() + 4)),
                    DomainError);
}

TEST_CASE("normal transport requires a curve on the soul") {
    const MetricModel m = cheeger_model();
    const ChartPoint off = make_point(Chart::North, 0.2, 0.1, 0.3, 0.0, 0.0);
    const Curve c = geodesic(m, off, {0.1, 0.2, 0.0, 0.0, 0.1}, 0.5);
    CHECK_THROWS_AS(parallel_transport(m, c, {Vec5{0, 0, 1, 0, 0}}, TransportMode::Normal), DomainError);
}

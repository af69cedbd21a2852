#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "soulcurv/curvature.hpp"
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

// --------------------------------------------------------------------------
// independent oracle: sectional curvature of the fiber at V = 0 from the
// quadratic truncation h(z, z') = <z, z'> - (V x z)^T M (V x z') with
// M = diag(1/2, 1/2, 1) in a basis whose third axis is the base point. The
// curvature at the center of a quadratic metric needs only exact second
// differences of the components.
// --------------------------------------------------------------------------
double fiber_oracle_sectional(const Vec3& z1, const Vec3& z2) {
    const auto h = [](const Vec3& v, int i, int j) {
        Vec3 ei{}, ej{};
        ei[static_cast<std::size_t>(i)] = 1.0;
        ej[static_cast<std::size_t>(j)] = 1.0;
        const Vec3 ci = cross(v, ei);
        const Vec3 cj = cross(v, ej);
        const double m[3] = {0.5, 0.5, 1.0};
        double s = (i == j) ? 1.0 : 0.0;
        for (int k = 0; k < 3; ++k) s -= ci[static_cast<std::size_t>(k)] * m[k] * cj[static_cast<std::size_t>(k)];
        return s;
    };
    // exact second partials of the quadratic h at V = 0 by central differences
    const double step = 1e-3;
    const auto d2h = [&](int a, int b, int i, int j) {
        Vec3 va{}, vb{}, vab{}, vmab{};
        va[static_cast<std::size_t>(a)] += step;
        vb[static_cast<std::size_t>(b)] += step;
        vab[static_cast<std::size_t>(a)] += step;
        vab[static_cast<std::size_t>(b)] += step;
        vmab[static_cast<std::size_t>(a)] += step;
        vmab[static_cast<std::size_t>(b)] -= step;
        if (a == b) {
            Vec3 vm{};
            vm[static_cast<std::size_t>(a)] -= step;
            return (h(va, i, j) - 2.0 * h({0, 0, 0}, i, j) + h(vm, i, j)) / (step * step);
        }
        Vec3 vmba{};
        vmba[static_cast<std::size_t>(a)] -= step;
        vmba[static_cast<std::size_t>(b)] += step;
        Vec3 vmm{};
        vmm[static_cast<std::size_t>(a)] -= step;
        vmm[static_cast<std::size_t>(b)] -= step;
        return (h(vab, i, j) - h(vmba, i, j) - h(vmab, i, j) + h(vmm, i, j)) / (4.0 * step * step);
    };
    // R_{ijkl} at 0 for g = I + q with dq(0) = 0:
    // R_{ijkl} = (1/2)(d_i d_k q_jl + d_j d_l q_ik - d_i d_l q_jk - d_j d_k q_il)
    const auto riem = [&](int i, int j, int k, int l) {
        return 0.5 * (d2h(i, k, j, l) + d2h(j, l, i, k) - d2h(i, l, j, k) - d2h(j, k, i, l));
    };
    // sectional of orthonormal (z1, z2): K = -R_{1212}-form with this index
    // layout (the round-sphere normal-coordinate expansion fixes the sign)
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    s += riem(i, j, k, l) * z1[static_cast<std::size_t>(i)] * z2[static_cast<std::size_t>(j)] *
                         z1[static_cast<std::size_t>(k)] * z2[static_cast<std::size_t>(l)];
    return -s;
}

} // namespace

TEST_CASE("product metric sectional curvatures") {
    const MetricModel m = product_model();
    const ChartPoint pt = make_point(Chart::North, 0.4, -0.1, 0.3, 0.2, -0.5);
    const CurvaturePacket pk = curvature_at(m, pt, 2);
    const Vec5 e0 = {1, 0, 0, 0, 0}, e1 = {0, 1, 0, 0, 0}, f0 = {0, 0, 1, 0, 0};
    CHECK(pk.sectional(e0, e1) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(std::abs(pk.sectional(e0, f0)) < 1e-12);
}

TEST_CASE("vertical plane curvatures against the quadratic-expansion oracle") {
    // oracle values in the adapted basis (third axis = base point)
    const double k_contain = fiber_oracle_sectional({0, 0, 1}, {1, 0, 0});
    const double k_orth = fiber_oracle_sectional({1, 0, 0}, {0, 1, 0});
    CHECK(k_contain == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(k_orth == doctest::Approx(3.0).epsilon(1e-6));

    const MetricModel m = cheeger_model();
    const ChartPoint pt = make_point(Chart::North, 0.31, -0.12);
    const NullityVector nv = nullity_at(m, pt);
    const SoulFrame fr = soul_frame(m, pt, {1.0, 0.0}, {nv.W[2], nv.W[3], nv.W[4]});
    CHECK(vertical_sectional(m, fr, 0.0) == doctest::Approx(k_contain).epsilon(1e-9));
    CHECK(vertical_sectional(m, fr, M_PI / 2.0) == doctest::Approx(k_orth).epsilon(1e-9));
    // full profile
    for (int k = 0; k <= 8; ++k) {
        const double th = 0.5 * M_PI * k / 8.0;
        const double expect = 3.0 * std::sin(th) * std::sin(th) + 1.5 * std::cos(th) * std::cos(th);
        CHECK(vertical_sectional(m, fr, th) == doctest::Approx(expect).epsilon(1e-8));
    }
}

TEST_CASE("vertical curvature is symmetric under rotations about the kernel axis") {
    const MetricModel m = cheeger_model();
    const ChartPoint pt = make_point(Chart::North, -0.2, 0.45);
    const NullityVector nv = nullity_at(m, pt);
    const CurvaturePacket pk = curvature_at(m, pt, 2);
    const Mat5 g = metric_value(m, pt);

    // plane at fixed angle with the axis, rotated about the axis
    const SoulFrame fr = soul_frame(m, pt, {1.0, 0.0}, {nv.W[2], nv.W[3], nv.W[4]});
    const double ang = 0.7;
    double first = 0.0;
    for (int k = 0; k < 6; ++k) {
        const double rot = 2.0 * M_PI * k / 6.0;
        Vec5 u{}, v{};
        for (int i = 0; i < 5; ++i) {
            const double ui = std::cos(rot) * fr.U[static_cast<std::size_t>(i)] +
                              std::sin(rot) * fr.V[static_cast<std::size_t>(i)];
            const double vi = -std::sin(rot) * fr.U[static_cast<std::size_t>(i)] +
                              std::cos(rot) * fr.V[static_cast<std::size_t>(i)];
            u[static_cast<std::size_t>(i)] = std::cos(ang) * fr.W[static_cast<std::size_t>(i)] + std::sin(ang) * ui;
            v[static_cast<std::size_t>(i)] = vi;
        }
        const double kv = pk.sectional(u, v);
        if (k == 0) first = kv;
        else CHECK(kv == doctest::Approx(first).epsilon(1e-7));
    }
    (void)g;
}

TEST_CASE("curvature tensor symmetries and Bianchi identities") {
    Rng rng(41);
    for (const Family fam : {Family::CheegerSO3, Family::Product}) {
        MetricModel m;
        m.family = fam;
        for (int t = 0; t < 3; ++t) {
            const ChartPoint pt = make_point(Chart::North, rng.uniform(-1, 1), rng.uniform(-1, 1),
                                             rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8));
            const CurvaturePacket pk = curvature_at(m, pt, 3);
            double scale_r = 0.0;
            for (double x : pk.riem) scale_r = std::max(scale_r, std::abs(x));
            const double tol = 1e-9 * std::max(1.0, scale_r);
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j)
                    for (int k = 0; k < 5; ++k)
                        for (int l = 0; l < 5; ++l) {
                            CHECK(std::abs(pk.R(i, j, k, l) + pk.R(j, i, k, l)) < tol);
                            CHECK(std::abs(pk.R(i, j, k, l) + pk.R(i, j, l, k)) < tol);
                            CHECK(std::abs(pk.R(i, j, k, l) - pk.R(k, l, i, j)) < tol);
                            // first Bianchi (cyclic over the last three slots)
                            CHECK(std::abs(pk.R(i, j, k, l) + pk.R(i, k, l, j) + pk.R(i, l, j, k)) < tol);
                        }
            // second Bianchi at a coarse sample of index tuples
            for (int e = 0; e < 5; ++e)
                for (int i = 0; i < 5; ++i)
                    for (int j = 0; j < 3; ++j) {
                        const int k = (i + 1) % 5, l = (j + 3) % 5;
                        const double cyc =
                            pk.dR(e, i, j, k, l) + pk.dR(i, j, e, k, l) + pk.dR(j, e, i, k, l);
                        CHECK(std::abs(cyc) < 1e-8 * std::max(1.0, scale_r));
                    }
        }
    }
}

TEST_CASE("soul geometry of both families") {
    const MetricModel pr = product_model();
    const MetricModel ch = cheeger_model();
    Rng rng(43);
    for (int t = 0; t < 8; ++t) {
        const double a = 2.0 * M_PI * rng.uniform(), r = 1.2 * rng.uniform();
        const ChartPoint pt = make_point(t % 2 ? Chart::North : Chart::South, r * std::cos(a), r * std::sin(a));
        const SoulGeometry sp = soul_geometry(pr, pt);
        CHECK(sp.gauss == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(sp.second_fundamental_norm <= 1e-10);
        const SoulGeometry sc = soul_geometry(ch, pt);
        CHECK(sc.gauss == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(sc.second_fundamental_norm <= 1e-8);
    }
}

TEST_CASE("Gauss equation consistency on tangent planes") {
    Rng rng(47);
    for (const Family fam : {Family::CheegerSO3, Family::Product}) {
        MetricModel m;
        m.family = fam;
        for (int t = 0; t < 5; ++t) {
            const double a = 2.0 * M_PI * rng.uniform(), r = 1.1 * rng.uniform();
            const ChartPoint pt = make_point(Chart::North, r * std::cos(a), r * std::sin(a));
            const SoulGeometry sg = soul_geometry(m, pt);
            const CurvaturePacket pk = curvature_at(m, pt, 2);
            const Vec5 e0 = {1, 0, 0, 0, 0}, e1 = {0, 1, 0, 0, 0};
            CHECK(pk.sectional(e0, e1) == doctest::Approx(sg.gauss).epsilon(1e-7));
        }
    }
}

TEST_CASE("normal curvature operator") {
    const MetricModel pr = product_model();
    const MetricModel ch = cheeger_model();
    const ChartPoint pt = make_point(Chart::North, 0.31, -0.12);

    const NormalCurvature np = normal_curvature(pr, soul_frame(pr, pt));
    CHECK(np.norm <= 1e-12);

    const SoulFrame fr = soul_frame(ch, pt);
    const NormalCurvature nc = normal_curvature(ch, fr);
    CHECK(nc.norm == doctest::Approx(1.5).epsilon(1e-6));

    // kernel axis is the base point direction
    const auto pamb = embed_sphere<double>(pt.chart, pt.u);
    const Vec5 pdir = {0, 0, pamb[0], pamb[1], pamb[2]};
    const Mat5 g = metric_value(ch, pt);
    Vec3 comp{};
    const std::array<Vec5, 3> nb = {fr.W, fr.U, fr.V};
    for (int a = 0; a < 3; ++a)
        comp[static_cast<std::size_t>(a)] = inner<double, 5>(g, pdir, nb[static_cast<std::size_t>(a)]);
    CHECK(norm<3>(matvec(nc.matrix, comp)) <= 1e-8);

    // orientation flip negates the operator exactly
    SoulFrame flipped = fr;
    flipped.X = fr.Y;
    flipped.Y = fr.X;
    const NormalCurvature nf = normal_curvature(ch, flipped);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(nf.matrix(i, j) == doctest::Approx(-nc.matrix(i, j)).epsilon(1e-12));

    // non-orthonormal tangent input is rejected
    CHECK_THROWS_AS(normal_curvature(ch, pt, Vec5{1, 0, 0, 0, 0}, Vec5{0, 1, 0, 0, 0}), FrameError);
}

TEST_CASE("sectional curvature stays nonnegative on sampled planes") {
    Rng rng(53);
    const MetricModel m = cheeger_model();
    for (int t = 0; t < 6; ++t) {
        const ChartPoint pt = make_point(Chart::North, rng.uniform(-1, 1), rng.uniform(-1, 1),
                                         rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8));
        const CurvaturePacket pk = curvature_at(m, pt, 2);
        for (int s = 0; s < 50; ++s) {
            Vec5 x{}, y{};
            for (int i = 0; i < 5; ++i) {
                x[static_cast<std::size_t>(i)] = rng.normal();
                y[static_cast<std::size_t>(i)] = rng.normal();
            }
            CHECK(pk.sectional(x, y) >= -1e-8);
        }
    }
}

TEST_CASE("jet and finite-difference backends agree on the curvature tensor") {
    Rng rng(59);
    const MetricModel m = cheeger_model();
    for (int t = 0; t < 4; ++t) {
        const ChartPoint pt = make_point(Chart::North, rng.uniform(-1, 1), rng.uniform(-1, 1),
                                         rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7));
        const CurvaturePacket a = curvature_at(m, pt, 2);
        const CurvaturePacket b = fd_curvature_at(m, pt);
        double worst = 0.0, scale_r = 0.0;
        for (std::size_t i = 0; i < a.riem.size(); ++i) {
            worst = std::max(worst, std::abs(a.riem[i] - b.riem[i]));
            scale_r = std::max(scale_r, std::abs(a.riem[i]));
        }
        CHECK(worst / scale_r < 1e-5);
    }
}

TEST_CASE("curvature pipeline rejects invalid orders") {
    const MetricModel m = cheeger_model();
    CHECK_THROWS_AS(curvature_at(m, make_point(Chart::North, 0, 0), 5), DomainError);
    CHECK_THROWS_AS(curvature_at(m, make_point(Chart::North, 0, 0), 0), DomainError);
}

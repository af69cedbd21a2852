#include "soulcurv/connection.hpp"

#include <algorithm>
#include <cmath>

#include "soulcurv/chart.hpp"
#include "soulcurv/ode.hpp"
#include "soulcurv/rng.hpp"

namespace soulcurv {

namespace {

std::array<Jet1, 3> circle_jet(const Vec3& p, const Vec3& x) {
    // one-variable jet of the great circle at t = 0 (variable slot 0)
    const Jet1 t = Jet1::variable(0.0, 0);
    const double s = norm<3>(x);
    std::array<Jet1, 3> c;
    if (s < 1e-15) {
        for (int i = 0; i < 3; ++i) c[static_cast<std::size_t>(i)] = Jet1(p[static_cast<std::size_t>(i)]);
        return c;
    }
    const Vec3 xh = scale<3>(x, 1.0 / s);
    const Jet1 cs = cos(s * t), sn = sin(s * t);
    for (int i = 0; i < 3; ++i)
        c[static_cast<std::size_t>(i)] = cs * p[static_cast<std::size_t>(i)] + sn * xh[static_cast<std::size_t>(i)];
    return c;
}

} // namespace

Vec3 base_map_differential(const ConnectionFamily& fam, const Vec3& p, const Vec3& x) {
    switch (fam.map) {
        case BaseMap::Identity:
            return x;
        case BaseMap::Rotated:
            return matvec(fam.rotation, x);
        case BaseMap::LatitudeReparam: {
            const auto fj = base_map_eval<Jet1>(fam, circle_jet(p, x));
            Vec3 d;
            for (int i = 0; i < 3; ++i) d[static_cast<std::size_t>(i)] = fj[static_cast<std::size_t>(i)].c[1];
            return d;
        }
    }
    throw DomainError("unknown base map");
}

Mat3 phi(const Vec3& p, const Vec3& x) {
    if (std::abs(norm<3>(p) - 1.0) > 1e-10) throw DomainError("phi needs a unit base point");
    if (std::abs(dot<double, 3>(p, x)) > 1e-10) throw DomainError("phi needs X tangent at p");
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            m(i, j) = x[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(j)] -
                      p[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
    return m;
}

Mat3 difference_form(const ConnectionFamily& fam, const Vec3& p, const Vec3& x) {
    Vec3 fp;
    {
        const std::array<double, 3> fe = base_map_eval<double>(fam, p);
        fp = {fe[0], fe[1], fe[2]};
    }
    Vec3 xb = base_map_differential(fam, p, x);
    // guard the tangency of the numerical differential
    const double c = dot<double, 3>(fp, xb);
    for (int i = 0; i < 3; ++i) xb[static_cast<std::size_t>(i)] -= c * fp[static_cast<std::size_t>(i)];
    return phi(fp, xb);
}

Vec3 covariant_derivative(const ConnectionFamily& fam, const Vec3& p, const Vec3& x, const Section& s) {
    const auto sj = s(circle_jet(p, x));
    Vec3 flat, sp;
    for (int i = 0; i < 3; ++i) {
        flat[static_cast<std::size_t>(i)] = sj[static_cast<std::size_t>(i)].c[1];
        sp[static_cast<std::size_t>(i)] = sj[static_cast<std::size_t>(i)].c[0];
    }
    const Mat3 d = difference_form(fam, p, x);
    const Vec3 dx = matvec(d, sp);
    return add<3>(flat, scale<3>(dx, fam.lambda));
}

ConnectionCurvature curvature_closed_form(const ConnectionFamily& fam, const Vec3& p, const Vec3& x, const Vec3& y) {
    const Vec3 xb = base_map_differential(fam, p, x);
    const Vec3 yb = base_map_differential(fam, p, y);
    const double c = fam.lambda * (fam.lambda + 2.0);
    ConnectionCurvature out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.matrix(i, j) = c * (yb[static_cast<std::size_t>(i)] * xb[static_cast<std::size_t>(j)] -
                                    xb[static_cast<std::size_t>(i)] * yb[static_cast<std::size_t>(j)]);
    out.norm = std::abs(c) * norm<3>(cross(xb, yb));
    return out;
}

Mat3 family_transport(const ConnectionFamily& fam, const AmbientCurve& curve, double t0, double t1, double rel_tol) {
    ode::State y(9, 0.0);
    y[0] = y[4] = y[8] = 1.0; // columns are the transported standard frame
    const auto rhs = [&](double t, const ode::State& s, ode::State& ds) {
        Vec3 pos, vel;
        curve(t, pos, vel);
        // keep pos on the sphere against parameterization drift
        const double n = norm<3>(pos);
        pos = scale<3>(pos, 1.0 / n);
        const Mat3 d = difference_form(fam, pos, sub<3>(vel, scale<3>(pos, dot<double, 3>(pos, vel))));
        // s' = -lambda D s, column by column
        for (int col = 0; col < 3; ++col)
            for (int row = 0; row < 3; ++row) {
                double a = 0.0;
                for (int k = 0; k < 3; ++k) a += d(row, k) * s[static_cast<std::size_t>(3 * k + col)];
                ds[static_cast<std::size_t>(3 * row + col)] = -fam.lambda * a;
            }
    };
    ode::Options opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = 1e-13;
    ode::integrate(rhs, y, t0, t1, opts, [](double, ode::State&) {});
    Mat3 q;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) q(i, j) = y[static_cast<std::size_t>(3 * i + j)];
    return q;
}

Mat3 curvature_via_loops(const ConnectionFamily& fam, const Vec3& p, const Vec3& x, const Vec3& y, double h) {
    const Chart chart = preferred_chart(p);
    const auto u0 = project_sphere(chart, p);
    const auto tx = sphere_tangent_to_chart<double>(chart, u0, x);
    const auto ty = sphere_tangent_to_chart<double>(chart, u0, y);
    if (h * h * (tx[0] * tx[0] + tx[1] * tx[1] + ty[0] * ty[0] + ty[1] * ty[1]) > 1.0)
        throw DomainError("loop rectangle leaves the chart; reduce h");

    // rectangle centered and based at p: out-leg, four sides (+X +Y -X -Y),
    // back-leg; the legs cancel so the holonomy is expressed at p itself
    const std::array<std::array<double, 2>, 6> dirs = {
        std::array<double, 2>{-0.5 * h * (tx[0] + ty[0]), -0.5 * h * (tx[1] + ty[1])},
        {h * tx[0], h * tx[1]},
        {h * ty[0], h * ty[1]},
        {-h * tx[0], -h * tx[1]},
        {-h * ty[0], -h * ty[1]},
        {0.5 * h * (tx[0] + ty[0]), 0.5 * h * (tx[1] + ty[1])}};
    std::array<double, 2> corner = u0;
    Mat3 q = Mat3::identity();
    for (const auto& d : dirs) {
        const std::array<double, 2> c = corner;
        const AmbientCurve side = [&, c, d](double t, Vec3& pos, Vec3& vel) {
            const std::array<double, 2> u = {c[0] + t * d[0], c[1] + t * d[1]};
            const auto e = embed_sphere<double>(chart, u);
            pos = {e[0], e[1], e[2]};
            const auto tv = chart_tangent_to_sphere<double>(chart, u, {d[0], d[1]});
            vel = {tv[0], tv[1], tv[2]};
        };
        q = matmul(family_transport(fam, side, 0.0, 1.0), q);
        corner[0] += d[0];
        corner[1] += d[1];
    }

    // holonomy of the oriented coordinate rectangle: Q = I - area * R(X,Y) + O(h^3)
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = -(q(i, j) - (i == j ? 1.0 : 0.0)) / (h * h);
    // report the skew part; the symmetric remainder is O(h^2)
    Mat3 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out(i, j) = 0.5 * (r(i, j) - r(j, i));
    return out;
}

double section_parallel_deviation(const ConnectionFamily& fam, int arcs, double seed_offset) {
    double worst = 0.0;
    for (int i = 0; i < arcs; ++i) {
        const auto a3 = fibonacci_sphere_point(i, arcs, seed_offset);
        const auto b3 = fibonacci_sphere_point(i + arcs, 2 * arcs + 1, seed_offset + 0.37);
        const Vec3 a = {a3[0], a3[1], a3[2]};
        Vec3 q = {b3[0], b3[1], b3[2]};
        const double c = dot<double, 3>(a, q);
        q = normalized<3>(sub<3>(q, scale<3>(a, c)));
        const double ang = 0.7 + 0.2 * (i % 3);
        const AmbientCurve curve = [&a, &q](double t, Vec3& pos, Vec3& vel) {
            for (int k = 0; k < 3; ++k) {
                pos[static_cast<std::size_t>(k)] =
                    std::cos(t) * a[static_cast<std::size_t>(k)] + std::sin(t) * q[static_cast<std::size_t>(k)];
                vel[static_cast<std::size_t>(k)] =
                    -std::sin(t) * a[static_cast<std::size_t>(k)] + std::cos(t) * q[static_cast<std::size_t>(k)];
            }
        };
        const Mat3 tr = family_transport(fam, curve, 0.0, ang);
        Vec3 pend, vend;
        curve(ang, pend, vend);
        const auto f0 = base_map_eval<double>(fam, {a[0], a[1], a[2]});
        const auto f1 = base_map_eval<double>(fam, {pend[0], pend[1], pend[2]});
        const Vec3 moved = matvec(tr, {f0[0], f0[1], f0[2]});
        worst = std::max(worst, norm<3>(sub<3>(moved, {f1[0], f1[1], f1[2]})));
    }
    return worst;
}

FamilyHolonomy family_holonomy(const ConnectionFamily& fam, int loops, double seed_offset, double threshold) {
    FamilyHolonomy out;
    std::vector<Vec3> logs;
    double fixres = 0.0;

    // common basepoint so the elements live in one holonomy group
    const int nv = std::max(6, 2 * loops + 3);
    std::vector<Vec3> verts;
    for (int i = 0; i < nv; ++i) {
        const auto p = fibonacci_sphere_point(i, nv, seed_offset);
        verts.push_back({p[0], p[1], p[2]});
    }
    for (int i = 0; i < loops; ++i) {
        const Vec3& a = verts.front();
        const Vec3& b = verts[static_cast<std::size_t>((1 + 2 * i) % (nv - 1) + 1)];
        const Vec3& c = verts[static_cast<std::size_t>((2 + 2 * i) % (nv - 1) + 1)];
        Mat3 q = Mat3::identity();
        const std::array<std::pair<Vec3, Vec3>, 3> sides = {std::pair{a, b}, {b, c}, {c, a}};
        bool degenerate = false;
        for (const auto& [s, e] : sides) {
            double cs = dot<double, 3>(s, e);
            cs = std::max(-1.0, std::min(1.0, cs));
            if (cs < -1.0 + 1e-8) { degenerate = true; break; }
            const double ang = std::acos(cs);
            if (ang < 1e-8) { degenerate = true; break; }
            const Vec3 dir = normalized<3>(sub<3>(e, scale<3>(s, cs)));
            const AmbientCurve side = [s2 = s, dir](double t, Vec3& pos, Vec3& vel) {
                for (int k = 0; k < 3; ++k) {
                    pos[static_cast<std::size_t>(k)] =
                        std::cos(t) * s2[static_cast<std::size_t>(k)] + std::sin(t) * dir[static_cast<std::size_t>(k)];
                    vel[static_cast<std::size_t>(k)] =
                        -std::sin(t) * s2[static_cast<std::size_t>(k)] + std::cos(t) * dir[static_cast<std::size_t>(k)];
                }
            };
            q = matmul(family_transport(fam, side, 0.0, ang), q);
        }
        if (degenerate) continue;
        const Mat3 rot = project_to_rotation(q);
        logs.push_back(rotation_log(rot));
        // the loop is based at vertex a
        const auto fa = base_map_eval<double>(fam, {a[0], a[1], a[2]});
        const Vec3 qf = matvec(rot, {fa[0], fa[1], fa[2]});
        fixres = std::max(fixres, norm<3>(sub<3>(qf, {fa[0], fa[1], fa[2]})));
    }
    Mat3 gram;
    for (const auto& w : logs)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) gram(i, j) += w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
    Vec3 evals{};
    Mat3 evecs;
    jacobi_eigen<3>(gram, evals, evecs);
    std::vector<double> sv;
    for (int i = 0; i < 3; ++i) sv.push_back(std::sqrt(std::max(0.0, evals[static_cast<std::size_t>(i)])));
    std::sort(sv.begin(), sv.end(), std::greater<>());
    out.singular_values = sv;
    for (double s : sv)
        if (s > threshold) ++out.dimension;
    out.fixes_base_section = fixres;
    return out;
}

} // namespace soulcurv

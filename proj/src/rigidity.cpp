#include "soulcurv/rigidity.hpp"

#include <algorithm>
#include <cmath>

namespace soulcurv {

namespace {

Vec5 lincomb(double a, const Vec5& x, double b, const Vec5& y) {
    Vec5 r;
    for (int i = 0; i < 5; ++i)
        r[static_cast<std::size_t>(i)] = a * x[static_cast<std::size_t>(i)] + b * y[static_cast<std::size_t>(i)];
    return r;
}

// transported tangent/normal frame data at one stencil offset
struct StencilPoint {
    ChartPoint q;
    Vec5 X;                      // unit tangent of the geodesic
    Vec5 Y;                      // transported tangent completion
    std::array<Vec5, 3> normal;  // transported normal triple (order W, U, V of the base frame)
};

// frame at p in the order (W, U, V) with W from the nullity axis when given
struct BaseFrame {
    SoulFrame fr;
    std::array<Vec5, 3> normal;
};

BaseFrame base_frame(const MetricModel& model, const ChartPoint& pt, const Vec5* wseed) {
    std::array<double, 3> seedn = {0.0, 0.0, 1.0};
    if (wseed) seedn = {(*wseed)[2], (*wseed)[3], (*wseed)[4]};
    SoulFrame fr = soul_frame(model, pt, {1.0, 0.0}, seedn);
    BaseFrame b;
    b.fr = fr;
    b.normal = {fr.W, fr.U, fr.V};
    return b;
}

StencilPoint stencil_point(const MetricModel& model, const ChartPoint& pt, const Vec5& X, const Vec5& Y,
                           const std::array<Vec5, 3>& normal, double t, const IntegrationOptions& opts) {
    StencilPoint sp;
    if (t == 0.0) {
        sp.q = pt;
        sp.X = X;
        sp.Y = Y;
        sp.normal = normal;
        return sp;
    }
    const Curve geo = geodesic(model, pt, X, t, opts);
    std::vector<Vec5> vecs = {Y, normal[0], normal[1], normal[2]};
    const TransportResult tr = parallel_transport(model, geo, vecs, TransportMode::Ambient, opts);
    sp.q = tr.end;
    // unit tangent of the geodesic at the endpoint
    const CurveSample& last = geo.samples.back();
    Vec5 vel = last.v;
    if (last.x.chart != tr.end.chart) vel = transition_velocity(last.x, vel);
    const Mat5 g = metric_value(model, sp.q);
    const double sp2 = inner<double, 5>(g, vel, vel);
    sp.X = scale<5>(vel, 1.0 / std::sqrt(sp2));
    sp.Y = tr.vectors[0];
    // re-project transported normals exactly onto the normal space
    const auto on = gram_schmidt<5>(g, {tr.vectors[1], tr.vectors[2], tr.vectors[3]});
    sp.normal = {on[0], on[1], on[2]};
    return sp;
}

// five-point first and second derivative stencils on a uniform grid
double d1_5pt(const std::array<double, 5>& f, double h) {
    return (-f[4] + 8.0 * f[3] - 8.0 * f[1] + f[0]) / (12.0 * h);
}
double d2_5pt(const std::array<double, 5>& f, double h) {
    return (-f[4] + 16.0 * f[3] - 30.0 * f[2] + 16.0 * f[1] - f[0]) / (12.0 * h * h);
}

IntegrationOptions tight_opts() {
    IntegrationOptions o;
    o.rel_tol = 1e-11;
    o.abs_tol = 1e-13;
    return o;
}

} // namespace

NullityVector nullity_at(const MetricModel& model, const ChartPoint& pt, double f_floor) {
    const SoulFrame fr = soul_frame(model, pt);
    const NormalCurvature nc = normal_curvature(model, fr);
    NullityVector out;
    out.F = nc.norm;
    if (nc.norm < f_floor) {
        out.indeterminate = true;
        return out;
    }
    // operator z -> F z x W means axis = -F W in frame coordinates
    const Vec3 axis = scale<3>(nc.axis, -1.0 / nc.norm);
    const std::array<Vec5, 3> basis = {fr.W, fr.U, fr.V};
    Vec5 w{};
    for (int a = 0; a < 3; ++a)
        w = lincomb(1.0, w, axis[static_cast<std::size_t>(a)], basis[static_cast<std::size_t>(a)]);
    out.W = w;
    return out;
}

NullityField nullity_section(const MetricModel& model, const std::vector<ChartPoint>& samples, double f_floor) {
    NullityField out;
    out.points = samples;
    out.W.resize(samples.size());
    out.F.resize(samples.size());
    out.indeterminate.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const NullityVector nv = nullity_at(model, samples[i], f_floor);
        out.W[i] = nv.W;
        out.F[i] = nv.F;
        out.indeterminate[i] = nv.indeterminate;
    }

    const std::size_t n = samples.size();
    std::size_t determinate = 0;
    for (std::size_t i = 0; i < n; ++i) determinate += out.indeterminate[i] ? 0 : 1;
    if (determinate == 0) {
        out.trivial = true;
        return out;
    }

    // fiber coordinates identify all normal spaces, so the v-components of W
    // compare directly; synchronize signs along a nearest-neighbor tree
    auto vpart = [](const Vec5& w) { return Vec3{w[2], w[3], w[4]}; };
    std::vector<bool> visited(n, false);
    std::size_t root = 0;
    while (out.indeterminate[root]) ++root;
    visited[root] = true;
    for (std::size_t step = 1; step < n; ++step) {
        double best = 1e300;
        std::size_t bi = n, bj = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!visited[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (visited[j]) continue;
                const double d = ambient_distance(samples[i], samples[j]);
                if (d < best) { best = d; bi = i; bj = j; }
            }
        }
        if (bj == n) break;
        visited[bj] = true;
        if (out.indeterminate[bj]) {
            out.W[bj] = out.W[bi]; // filled from the neighbor
            ++out.filled;
        } else if (dot<double, 3>(vpart(out.W[bj]), vpart(out.W[bi])) < 0.0) {
            out.W[bj] = scale<5>(out.W[bj], -1.0);
        }
    }
    return out;
}

SoulScalars soul_scalars(const MetricModel& model, const ChartPoint& pt, const Vec5& X, double stencil) {
    const IntegrationOptions opts = tight_opts();
    const NullityVector nv = nullity_at(model, pt);
    if (nv.indeterminate) throw DomainError("nullity axis indeterminate at the sample (flat normal bundle?)");

    const Mat5 g = metric_value(model, pt);
    // oriented tangent pair with X as given
    const auto p3 = embed_sphere<double>(pt.chart, pt.u);
    const auto xb = chart_tangent_to_sphere<double>(pt.chart, pt.u, {X[0], X[1]});
    const Vec3 yb = cross(p3, xb);
    const auto yc = sphere_tangent_to_chart<double>(pt.chart, pt.u, yb);
    const auto ton = gram_schmidt<5>(g, {X, Vec5{yc[0], yc[1], 0.0, 0.0, 0.0}});

    const BaseFrame bf = base_frame(model, pt, &nv.W);

    // derivative of the nullity field in the transported frame
    std::array<std::array<double, 3>, 5> w{};
    const std::array<double, 5> ts = {-2.0 * stencil, -stencil, 0.0, stencil, 2.0 * stencil};
    for (int k = 0; k < 5; ++k) {
        const StencilPoint sp = stencil_point(model, pt, ton[0], ton[1], bf.normal, ts[static_cast<std::size_t>(k)], opts);
        const NullityVector nq = nullity_at(model, sp.q);
        if (nq.indeterminate) throw DomainError("nullity axis indeterminate along the stencil");
        const Mat5 gq = metric_value(model, sp.q);
        for (int a = 0; a < 3; ++a)
            w[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)] =
                inner<double, 5>(gq, nq.W, sp.normal[static_cast<std::size_t>(a)]);
        // orientation guard against a sign flip of the kernel axis
        if (w[static_cast<std::size_t>(k)][0] < 0.0)
            for (int a = 0; a < 3; ++a) w[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)] *= -1.0;
    }
    Vec3 dw{};
    for (int a = 0; a < 3; ++a) {
        std::array<double, 5> comp{};
        for (int k = 0; k < 5; ++k) comp[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)];
        dw[static_cast<std::size_t>(a)] = d1_5pt(comp, stencil);
    }

    SoulScalars out;
    out.F = nv.F;
    out.a = norm<3>(dw);
    out.X = ton[0];
    out.Y = ton[1];
    out.W = nv.W;

    // V = (nabla_X W)/a when a > 0, else an arbitrary completion
    Vec5 V{};
    if (out.a > 1e-8) {
        for (int a = 0; a < 3; ++a)
            V = lincomb(1.0, V, dw[static_cast<std::size_t>(a)] / out.a, bf.normal[static_cast<std::size_t>(a)]);
    } else {
        V = bf.normal[2];
    }
    // U = V x W in fiber components, then orthonormalize the triple exactly
    const Vec3 v3 = {V[2], V[3], V[4]};
    const Vec3 w3 = {nv.W[2], nv.W[3], nv.W[4]};
    const Vec3 u3 = cross(v3, w3);
    const auto ntri = gram_schmidt<5>(g, {nv.W, V, Vec5{0.0, 0.0, u3[0], u3[1], u3[2]}});
    out.W = ntri[0];
    out.V = ntri[1];
    out.U = ntri[2];

    const CurvaturePacket pk = curvature_at(model, pt, 2);
    out.g0 = pk.R4(out.W, out.U, out.U, out.W);
    out.g1 = pk.R4(out.U, out.V, out.V, out.U);
    return out;
}

double derivative_on_soul(const MetricModel& model, const SoulField& field, const ChartPoint& pt, const Vec5& X,
                          double stencil) {
    const IntegrationOptions opts = tight_opts();
    std::array<double, 5> f{};
    const std::array<double, 5> ts = {-2.0 * stencil, -stencil, 0.0, stencil, 2.0 * stencil};
    for (int k = 0; k < 5; ++k) {
        const double t = ts[static_cast<std::size_t>(k)];
        const ChartPoint q = (t == 0.0) ? pt : geodesic(model, pt, X, t, opts).end();
        f[static_cast<std::size_t>(k)] = field(q);
    }
    return d1_5pt(f, stencil);
}

double hessian_on_soul(const MetricModel& model, const SoulField& field, const ChartPoint& pt, const Vec5& X,
                       double stencil) {
    const IntegrationOptions opts = tight_opts();
    std::array<double, 5> f{};
    const std::array<double, 5> ts = {-2.0 * stencil, -stencil, 0.0, stencil, 2.0 * stencil};
    for (int k = 0; k < 5; ++k) {
        const double t = ts[static_cast<std::size_t>(k)];
        const ChartPoint q = (t == 0.0) ? pt : geodesic(model, pt, X, t, opts).end();
        f[static_cast<std::size_t>(k)] = field(q);
    }
    return d2_5pt(f, stencil);
}

double field_F(const MetricModel& model, const ChartPoint& pt) { return nullity_at(model, pt).F; }

double field_g0(const MetricModel& model, const ChartPoint& pt) {
    const NullityVector nv = nullity_at(model, pt);
    if (nv.indeterminate) throw DomainError("g0 undefined where the nullity axis is indeterminate");
    const BaseFrame bf = base_frame(model, pt, &nv.W);
    const CurvaturePacket pk = curvature_at(model, pt, 2);
    return pk.R4(bf.normal[0], bf.normal[1], bf.normal[1], bf.normal[0]);
}

double field_g1(const MetricModel& model, const ChartPoint& pt) {
    const NullityVector nv = nullity_at(model, pt);
    if (nv.indeterminate) throw DomainError("g1 undefined where the nullity axis is indeterminate");
    const BaseFrame bf = base_frame(model, pt, &nv.W);
    const CurvaturePacket pk = curvature_at(model, pt, 2);
    return pk.R4(bf.normal[1], bf.normal[2], bf.normal[2], bf.normal[1]);
}

double normal_curvature_derivative_transport(const MetricModel& model, const ChartPoint& pt, const Vec5& X,
                                             const Vec5& E1, const Vec5& E2, double stencil) {
    const IntegrationOptions opts = tight_opts();
    const Mat5 g = metric_value(model, pt);
    const auto p3 = embed_sphere<double>(pt.chart, pt.u);
    const auto xb = chart_tangent_to_sphere<double>(pt.chart, pt.u, {X[0], X[1]});
    const Vec3 yb = cross(p3, xb);
    const auto yc = sphere_tangent_to_chart<double>(pt.chart, pt.u, yb);
    const auto ton = gram_schmidt<5>(g, {X, Vec5{yc[0], yc[1], 0.0, 0.0, 0.0}});

    // complete (E1, E2) to a normal triple for transport
    const Vec3 e13 = {E1[2], E1[3], E1[4]};
    const Vec3 e23 = {E2[2], E2[3], E2[4]};
    const Vec3 e33 = cross(e13, e23);
    const auto ntri = gram_schmidt<5>(g, {E1, E2, Vec5{0.0, 0.0, e33[0], e33[1], e33[2]}});

    std::array<double, 5> f{};
    const std::array<double, 5> ts = {-2.0 * stencil, -stencil, 0.0, stencil, 2.0 * stencil};
    for (int k = 0; k < 5; ++k) {
        const StencilPoint sp =
            stencil_point(model, pt, ton[0], ton[1], {ntri[0], ntri[1], ntri[2]}, ts[static_cast<std::size_t>(k)], opts);
        const CurvaturePacket pk = curvature_at(model, sp.q, 2);
        f[static_cast<std::size_t>(k)] = pk.R4(sp.X, sp.Y, sp.normal[0], sp.normal[1]);
    }
    return d1_5pt(f, stencil);
}

RigidityGap rigidity_gap(const CurvaturePacket& packet, const Vec5& X, const Vec5& Y, const Vec5& E1,
                         const Vec5& E2) {
    RigidityGap out;
    const double dr = packet.dR5(X, X, Y, E1, E2);
    const double d2r = packet.d2R6(X, X, E1, E2, E2, E1);
    const double kxy = packet.R4(X, Y, Y, X);
    const double rn = packet.R4(X, Y, E1, E2);

    // ambient |R(E1,E2)X|^2
    const Vec5 rv = packet.apply(E1, E2, X);
    const double rnorm2 = packet.inner_g(rv, rv);

    out.lhs_ambient = dr * dr;
    out.rhs_ambient = (rnorm2 + (2.0 / 3.0) * d2r) * kxy;
    out.gap_ambient = out.rhs_ambient - out.lhs_ambient;

    out.lhs_normal = dr * dr;
    out.rhs_normal = kxy * (rn * rn + (2.0 / 3.0) * d2r);
    out.gap_normal = out.rhs_normal - out.lhs_normal;
    out.form_difference = out.gap_ambient - out.gap_normal;
    return out;
}

RigidityGap rigidity_gap(const MetricModel& model, const ChartPoint& pt, const Vec5& X, const Vec5& Y, const Vec5& E1,
                         const Vec5& E2) {
    const Mat5 g = metric_value(model, pt);
    auto check_unit = [&](const Vec5& a, const Vec5& b) {
        if (std::abs(inner<double, 5>(g, a, a) - 1.0) > 1e-8 || std::abs(inner<double, 5>(g, b, b) - 1.0) > 1e-8 ||
            std::abs(inner<double, 5>(g, a, b)) > 1e-8)
            throw FrameError("rigidity gap needs orthonormal pairs");
    };
    check_unit(X, Y);
    check_unit(E1, E2);
    const CurvaturePacket pk = curvature_at(model, pt, 4);
    return rigidity_gap(pk, X, Y, E1, E2);
}

NullityResiduals nullity_residuals(const MetricModel& model, const ChartPoint& pt, const Vec5& X) {
    NullityResiduals out;
    out.scalars = soul_scalars(model, pt, X);
    out.gauss = soul_geometry(model, pt).gauss;
    out.hess_g0 = hessian_on_soul(model, [&](const ChartPoint& q) { return field_g0(model, q); }, pt, out.scalars.X);
    out.hess_g1 = hessian_on_soul(model, [&](const ChartPoint& q) { return field_g1(model, q); }, pt, out.scalars.X);
    out.xf = derivative_on_soul(model, [&](const ChartPoint& q) { return field_F(model, q); }, pt, out.scalars.X);

    const double k = out.gauss;
    const double F = out.scalars.F, a = out.scalars.a, g0 = out.scalars.g0, g1 = out.scalars.g1;
    out.r1 = k * (F * F + (2.0 / 3.0) * out.hess_g1 - (4.0 * a * a / 3.0) * (g1 - g0)) - out.xf * out.xf;
    out.r2 = (2.0 / 3.0) * k * (out.hess_g0 + 2.0 * a * a * (g1 - g0)) - a * a * F * F;
    out.r3 = (2.0 / 3.0) * k * out.hess_g0;
    return out;
}

NullityPlaneResidual nullity_plane_residual(const MetricModel& model, const ChartPoint& pt, const Vec5& X,
                                            double half_length, int grid_points) {
    const IntegrationOptions opts = tight_opts();
    if (grid_points < 7 || grid_points % 2 == 0) throw DomainError("grid must be odd and at least 7");
    const NullityVector nv0 = nullity_at(model, pt);
    NullityPlaneResidual out;
    if (nv0.indeterminate) {
        // flat normal curvature: any unit normal qualifies, W is parallel
        out.parallel_branch = true;
        out.max_residual = 0.0;
        return out;
    }

    const Mat5 g = metric_value(model, pt);
    const auto ton = gram_schmidt<5>(g, {X});
    const BaseFrame bf = base_frame(model, pt, &nv0.W);

    const int n = grid_points;
    const double h = 2.0 * half_length / (n - 1);
    std::vector<Vec3> w(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double t = -half_length + j * h;
        const StencilPoint sp = stencil_point(model, pt, ton[0], bf.fr.Y, bf.normal, t, opts);
        const NullityVector nq = nullity_at(model, sp.q);
        if (nq.indeterminate) throw DomainError("nullity axis indeterminate along the geodesic");
        const Mat5 gq = metric_value(model, sp.q);
        for (int a = 0; a < 3; ++a)
            w[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)] =
                inner<double, 5>(gq, nq.W, sp.normal[static_cast<std::size_t>(a)]);
    }
    // synchronize signs from the center outward
    const int mid = n / 2;
    for (int j = mid + 1; j < n; ++j)
        if (dot<double, 3>(w[static_cast<std::size_t>(j)], w[static_cast<std::size_t>(j - 1)]) < 0.0)
            w[static_cast<std::size_t>(j)] = scale<3>(w[static_cast<std::size_t>(j)], -1.0);
    for (int j = mid - 1; j >= 0; --j)
        if (dot<double, 3>(w[static_cast<std::size_t>(j)], w[static_cast<std::size_t>(j + 1)]) < 0.0)
            w[static_cast<std::size_t>(j)] = scale<3>(w[static_cast<std::size_t>(j)], -1.0);

    double worst = 0.0;
    bool parallel = false;
    Vec3 wpp_mid{};
    for (int j = 2; j < n - 2; ++j) {
        Vec3 w1{}, w2{};
        for (int a = 0; a < 3; ++a) {
            const std::array<double, 5> comp = {
                w[static_cast<std::size_t>(j - 2)][static_cast<std::size_t>(a)],
                w[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(a)],
                w[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)],
                w[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(a)],
                w[static_cast<std::size_t>(j + 2)][static_cast<std::size_t>(a)]};
            w1[static_cast<std::size_t>(a)] = d1_5pt(comp, h);
            w2[static_cast<std::size_t>(a)] = d2_5pt(comp, h);
        }
        if (j == mid) wpp_mid = w2;
        // component of w'' orthogonal to span{w, w'}
        std::vector<Vec3> span = {w[static_cast<std::size_t>(j)]};
        if (norm<3>(w1) > 1e-8) span.push_back(w1);
        else parallel = true;
        Vec3 resid = w2;
        for (const auto& s : span) {
            const Vec3 e = normalized<3>(s);
            const double c = dot<double, 3>(resid, e);
            resid = sub<3>(resid, scale<3>(e, c));
        }
        worst = std::max(worst, norm<3>(resid));
    }
    out.max_residual = worst;
    out.parallel_branch = parallel;

    // cross-check at t = 0: (D_{X,X}R)(U,V,W,V) = (g1 - g0) <W''(0), U>
    const SoulScalars sc = soul_scalars(model, pt, ton[0]);
    const CurvaturePacket pk = curvature_at(model, pt, 4);
    const double lhs = pk.d2R6(sc.X, sc.X, sc.U, sc.V, sc.W, sc.V);
    // express W'' back as a chart vector through the (parallel at t=0) frame
    Vec5 wpp{};
    for (int a = 0; a < 3; ++a)
        wpp = lincomb(1.0, wpp, wpp_mid[static_cast<std::size_t>(a)], bf.normal[static_cast<std::size_t>(a)]);
    const double rhs = (sc.g1 - sc.g0) * inner<double, 5>(g, wpp, sc.U);
    out.cross_check = lhs - rhs;
    return out;
}

// ---------------------------------------------------------------------------
// sectional minimization
// ---------------------------------------------------------------------------

namespace {

struct OrthoBasis {
    std::array<Vec5, 5> vecs; // g-orthonormal basis (columns of L^{-T})
};

OrthoBasis orthonormal_basis(const Mat5& g) {
    const Mat5 L = cholesky(g);
    OrthoBasis b;
    for (int col = 0; col < 5; ++col) {
        Vec5 e{};
        e[static_cast<std::size_t>(col)] = 1.0;
        // solve L^T x = e
        Vec5 x{};
        for (int i = 4; i >= 0; --i) {
            double s = e[static_cast<std::size_t>(i)];
            for (int k = i + 1; k < 5; ++k) s -= L(k, i) * x[static_cast<std::size_t>(k)];
            x[static_cast<std::size_t>(i)] = s / L(i, i);
        }
        b.vecs[static_cast<std::size_t>(col)] = x;
    }
    return b;
}

struct FrameObjective {
    std::array<std::array<std::array<std::array<double, 5>, 5>, 5>, 5> r{};

    double value(const std::array<double, 10>& e) const {
        double s = 0.0;
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b) {
                const double e1a = e[static_cast<std::size_t>(a)], e2b = e[static_cast<std::size_t>(5 + b)];
                if (e1a == 0.0 && e2b == 0.0) continue;
                for (int c = 0; c < 5; ++c)
                    for (int d = 0; d < 5; ++d)
                        s += r[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][static_cast<std::size_t>(c)]
                              [static_cast<std::size_t>(d)] *
                             e1a * e2b * e[static_cast<std::size_t>(5 + c)] * e[static_cast<std::size_t>(d)];
            }
        return s;
    }

    std::array<double, 10> gradient(const std::array<double, 10>& e) const {
        std::array<double, 10> g{};
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b)
                for (int c = 0; c < 5; ++c)
                    for (int d = 0; d < 5; ++d) {
                        const double rv = r[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]
                                           [static_cast<std::size_t>(c)][static_cast<std::size_t>(d)];
                        if (rv == 0.0) continue;
                        const double e1a = e[static_cast<std::size_t>(a)], e2b = e[static_cast<std::size_t>(5 + b)],
                                     e2c = e[static_cast<std::size_t>(5 + c)], e1d = e[static_cast<std::size_t>(d)];
                        g[static_cast<std::size_t>(a)] += rv * e2b * e2c * e1d;
                        g[static_cast<std::size_t>(d)] += rv * e1a * e2b * e2c;
                        g[static_cast<std::size_t>(5 + b)] += rv * e1a * e2c * e1d;
                        g[static_cast<std::size_t>(5 + c)] += rv * e1a * e2b * e1d;
                    }
        return g;
    }
};

void retract(std::array<double, 10>& e) {
    // Gram-Schmidt of the two 5-columns
    double n1 = 0.0;
    for (int i = 0; i < 5; ++i) n1 += e[static_cast<std::size_t>(i)] * e[static_cast<std::size_t>(i)];
    n1 = std::sqrt(n1);
    if (n1 < 1e-12) throw OptimizationError("frame column collapsed");
    for (int i = 0; i < 5; ++i) e[static_cast<std::size_t>(i)] /= n1;
    double c = 0.0;
    for (int i = 0; i < 5; ++i) c += e[static_cast<std::size_t>(i)] * e[static_cast<std::size_t>(5 + i)];
    for (int i = 0; i < 5; ++i) e[static_cast<std::size_t>(5 + i)] -= c * e[static_cast<std::size_t>(i)];
    double n2 = 0.0;
    for (int i = 0; i < 5; ++i) n2 += e[static_cast<std::size_t>(5 + i)] * e[static_cast<std::size_t>(5 + i)];
    n2 = std::sqrt(n2);
    if (n2 < 1e-12) throw OptimizationError("frame columns degenerate");
    for (int i = 0; i < 5; ++i) e[static_cast<std::size_t>(5 + i)] /= n2;
}

void project_tangent(const std::array<double, 10>& e, std::array<double, 10>& g) {
    // remove sym(E^T G) E from G (Stiefel tangent projection)
    double s11 = 0.0, s12 = 0.0, s21 = 0.0, s22 = 0.0;
    for (int i = 0; i < 5; ++i) {
        s11 += e[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
        s12 += e[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(5 + i)];
        s21 += e[static_cast<std::size_t>(5 + i)] * g[static_cast<std::size_t>(i)];
        s22 += e[static_cast<std::size_t>(5 + i)] * g[static_cast<std::size_t>(5 + i)];
    }
    const double a12 = 0.5 * (s12 + s21);
    for (int i = 0; i < 5; ++i) {
        const double gi = g[static_cast<std::size_t>(i)] - (e[static_cast<std::size_t>(i)] * s11 +
                                                            e[static_cast<std::size_t>(5 + i)] * a12);
        const double gi2 = g[static_cast<std::size_t>(5 + i)] - (e[static_cast<std::size_t>(i)] * a12 +
                                                                 e[static_cast<std::size_t>(5 + i)] * s22);
        g[static_cast<std::size_t>(i)] = gi;
        g[static_cast<std::size_t>(5 + i)] = gi2;
    }
}

} // namespace

MinSectionalResult min_sectional(const MetricModel& model, const ChartPoint& pt, int restarts, Rng& rng,
                                 bool restrict_to_sphere_block) {
    if (restarts < 8) throw DomainError("min_sectional needs at least 8 restarts");
    const CurvaturePacket pk = curvature_at(model, pt, 2);
    const OrthoBasis basis = orthonormal_basis(pk.g);

    if (restrict_to_sphere_block) {
        // the sphere block is two-dimensional: a single plane
        const Vec5 e0 = {1.0, 0.0, 0.0, 0.0, 0.0};
        const Vec5 e1 = {0.0, 1.0, 0.0, 0.0, 0.0};
        MinSectionalResult out;
        out.value = pk.sectional(e0, e1);
        out.frame = {e0, e1};
        return out;
    }

    FrameObjective obj;
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
            for (int c = 0; c < 5; ++c)
                for (int d = 0; d < 5; ++d)
                    obj.r[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][static_cast<std::size_t>(c)]
                         [static_cast<std::size_t>(d)] =
                        pk.R4(basis.vecs[static_cast<std::size_t>(a)], basis.vecs[static_cast<std::size_t>(b)],
                              basis.vecs[static_cast<std::size_t>(c)], basis.vecs[static_cast<std::size_t>(d)]);

    MinSectionalResult out;
    out.value = 1e300;
    int failed = 0;
    std::array<double, 10> best{};
    for (int r = 0; r < restarts; ++r) {
        std::array<double, 10> e{};
        for (auto& x : e) x = rng.normal();
        try {
            retract(e);
            double f = obj.value(e);
            for (int it = 0; it < 400; ++it) {
                auto g = obj.gradient(e);
                project_tangent(e, g);
                double gn2 = 0.0;
                for (double x : g) gn2 += x * x;
                if (gn2 < 1e-24) break;
                double alpha = 1.0;
                bool moved = false;
                for (int ls = 0; ls < 40; ++ls) {
                    std::array<double, 10> trial = e;
                    for (int i = 0; i < 10; ++i) trial[static_cast<std::size_t>(i)] -= alpha * g[static_cast<std::size_t>(i)];
                    retract(trial);
                    const double ft = obj.value(trial);
                    if (ft <= f - 1e-4 * alpha * gn2) {
                        e = trial;
                        f = ft;
                        moved = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                if (!moved) break;
            }
            if (f < out.value) {
                out.value = f;
                best = e;
            }
        } catch (const OptimizationError&) {
            ++failed;
        }
    }
    if (failed == restarts) throw OptimizationError("all restarts failed");
    out.failed_restarts = failed;
    Vec5 f1{}, f2{};
    for (int bidx = 0; bidx < 5; ++bidx) {
        f1 = lincomb(1.0, f1, best[static_cast<std::size_t>(bidx)], basis.vecs[static_cast<std::size_t>(bidx)]);
        f2 = lincomb(1.0, f2, best[static_cast<std::size_t>(5 + bidx)], basis.vecs[static_cast<std::size_t>(bidx)]);
    }
    out.frame = {f1, f2};
    return out;
}

double min_sectional_brute(const MetricModel& model, const ChartPoint& pt, int count, Rng& rng) {
    const CurvaturePacket pk = curvature_at(model, pt, 2);
    const OrthoBasis basis = orthonormal_basis(pk.g);
    double mn = 1e300;
    for (int i = 0; i < count; ++i) {
        std::array<double, 10> e{};
        for (auto& x : e) x = rng.normal();
        try {
            retract(e);
        } catch (const OptimizationError&) {
            continue;
        }
        Vec5 f1{}, f2{};
        for (int bidx = 0; bidx < 5; ++bidx) {
            f1 = lincomb(1.0, f1, e[static_cast<std::size_t>(bidx)], basis.vecs[static_cast<std::size_t>(bidx)]);
            f2 = lincomb(1.0, f2, e[static_cast<std::size_t>(5 + bidx)], basis.vecs[static_cast<std::size_t>(bidx)]);
        }
        mn = std::min(mn, pk.R4(f1, f2, f2, f1));
    }
    return mn;
}

// ---------------------------------------------------------------------------
// quasi-strictness scan
// ---------------------------------------------------------------------------

std::vector<ChartPoint> soul_samples(int count, std::uint64_t seed) {
    std::vector<ChartPoint> pts;
    const double offset = 0.5 + 0.25 * std::sin(static_cast<double>(seed % 1000));
    for (int i = 0; i < count; ++i) {
        const auto p = fibonacci_sphere_point(i, count, offset);
        pts.push_back(point_from_ambient({p[0], p[1], p[2]}, {0.0, 0.0, 0.0}));
    }
    return pts;
}

namespace {

struct FrameEval {
    const CurvaturePacket& pk;
    const SoulFrame& fr;
    Vec5 wtilde;
    Vec5 n1, n2; // orthonormal completion of wtilde in the normal space

    RigidityGap eval(double alpha, double beta) const {
        Vec5 X{}, Y{}, V{};
        for (int i = 0; i < 5; ++i) {
            X[static_cast<std::size_t>(i)] = std::cos(alpha) * fr.X[static_cast<std::size_t>(i)] +
                                             std::sin(alpha) * fr.Y[static_cast<std::size_t>(i)];
            Y[static_cast<std::size_t>(i)] = -std::sin(alpha) * fr.X[static_cast<std::size_t>(i)] +
                                             std::cos(alpha) * fr.Y[static_cast<std::size_t>(i)];
            V[static_cast<std::size_t>(i)] = std::cos(beta) * n1[static_cast<std::size_t>(i)] +
                                             std::sin(beta) * n2[static_cast<std::size_t>(i)];
        }
        return rigidity_gap(pk, X, Y, wtilde, V);
    }
};

} // namespace

RigidityReport quasi_strict_scan(const MetricModel& model, const ScanPlan& plan) {
    RigidityReport rep;
    rep.plan = plan;
    rep.seed = plan.seed;
    rep.min_gap = 1e300;
    rep.min_gap_ambient = 1e300;
    rep.worst_direction_gap = -1e300;

    const std::vector<ChartPoint> pts = soul_samples(plan.soul_points, plan.seed);
    Rng rng(plan.seed);

    for (int pi = 0; pi < static_cast<int>(pts.size()); ++pi) {
        const ChartPoint& pt = pts[static_cast<std::size_t>(pi)];
        const CurvaturePacket pk = curvature_at(model, pt, 4);
        const SoulFrame fr = soul_frame(model, pt);
        const Mat5 g = pk.g;
        const NullityVector nullity = nullity_at(model, pt);
        if (nullity.indeterminate) ++rep.indeterminate;

        for (int di = 0; di < plan.normal_directions; ++di) {
            // seeded unit normal direction in the frame's normal coordinates
            Rng drng = rng.fork(static_cast<std::uint64_t>(pi * 1000 + di));
            const auto dir3 = drng.unit_vector3();
            Vec5 wt{};
            const std::array<Vec5, 3> nb = {fr.W, fr.U, fr.V};
            for (int a = 0; a < 3; ++a)
                wt = lincomb(1.0, wt, dir3[static_cast<std::size_t>(a)], nb[static_cast<std::size_t>(a)]);

            // orthonormal completion of the normal space: W~, then two more
            std::vector<Vec5> tri;
            for (const auto& cand : {nb[0], nb[1], nb[2]}) {
                try {
                    tri = gram_schmidt<5>(g, {wt, cand});
                    break;
                } catch (const FrameError&) {
                }
            }
            Vec5 m1 = tri[1];
            Vec5 m2{};
            {
                const Vec3 a3 = {tri[0][2], tri[0][3], tri[0][4]};
                const Vec3 b3 = {m1[2], m1[3], m1[4]};
                const Vec3 c3 = cross(a3, b3);
                const auto full = gram_schmidt<5>(g, {tri[0], m1, Vec5{0.0, 0.0, c3[0], c3[1], c3[2]}});
                m1 = full[1];
                m2 = full[2];
            }

            FrameEval fe{pk, fr, tri[0], m1, m2};

            // seed grid over the completion torus, then Nelder-Mead refinement
            double bestf = 1e300, besta = 0.0, bestb = 0.0;
            double best_amb = 1e300;
            const int na = 8, nbeta = plan.frame_seeds / 8 > 0 ? plan.frame_seeds / 8 : 5;
            for (int ia = 0; ia < na; ++ia)
                for (int ib = 0; ib < nbeta; ++ib) {
                    const double al = M_PI * ia / na;
                    const double be = M_PI * ib / nbeta;
                    const RigidityGap gp = fe.eval(al, be);
                    best_amb = std::min(best_amb, gp.gap_ambient);
                    if (gp.gap_normal < bestf) {
                        bestf = gp.gap_normal;
                        besta = al;
                        bestb = be;
                    }
                }

            // Nelder-Mead on (alpha, beta)
            std::array<std::array<double, 2>, 3> simplex = {
                std::array<double, 2>{besta, bestb}, {besta + 0.15, bestb}, {besta, bestb + 0.15}};
            std::array<double, 3> fv{};
            auto geval = [&](const std::array<double, 2>& q) { return fe.eval(q[0], q[1]).gap_normal; };
            for (int i = 0; i < 3; ++i) fv[static_cast<std::size_t>(i)] = geval(simplex[static_cast<std::size_t>(i)]);
            for (int it = 0; it < 220; ++it) {
                std::array<int, 3> ord = {0, 1, 2};
                std::sort(ord.begin(), ord.end(), [&](int a, int b) {
                    return fv[static_cast<std::size_t>(a)] < fv[static_cast<std::size_t>(b)];
                });
                const auto& xb = simplex[static_cast<std::size_t>(ord[0])];
                const auto& xm = simplex[static_cast<std::size_t>(ord[1])];
                auto& xw = simplex[static_cast<std::size_t>(ord[2])];
                if (std::abs(fv[static_cast<std::size_t>(ord[2])] - fv[static_cast<std::size_t>(ord[0])]) < 1e-15 &&
                    it > 30)
                    break;
                const std::array<double, 2> cen = {0.5 * (xb[0] + xm[0]), 0.5 * (xb[1] + xm[1])};
                const std::array<double, 2> refl = {2.0 * cen[0] - xw[0], 2.0 * cen[1] - xw[1]};
                const double fr_ = geval(refl);
                if (fr_ < fv[static_cast<std::size_t>(ord[0])]) {
                    const std::array<double, 2> exp_ = {3.0 * cen[0] - 2.0 * xw[0], 3.0 * cen[1] - 2.0 * xw[1]};
                    const double fe_ = geval(exp_);
                    if (fe_ < fr_) { xw = exp_; fv[static_cast<std::size_t>(ord[2])] = fe_; }
                    else { xw = refl; fv[static_cast<std::size_t>(ord[2])] = fr_; }
                } else if (fr_ < fv[static_cast<std::size_t>(ord[1])]) {
                    xw = refl;
                    fv[static_cast<std::size_t>(ord[2])] = fr_;
                } else {
                    const std::array<double, 2> con = {0.5 * (cen[0] + xw[0]), 0.5 * (cen[1] + xw[1])};
                    const double fc = geval(con);
                    if (fc < fv[static_cast<std::size_t>(ord[2])]) {
                        xw = con;
                        fv[static_cast<std::size_t>(ord[2])] = fc;
                    } else {
                        for (int m : {ord[1], ord[2]}) {
                            auto& xs = simplex[static_cast<std::size_t>(m)];
                            xs = {0.5 * (xs[0] + xb[0]), 0.5 * (xs[1] + xb[1])};
                            fv[static_cast<std::size_t>(m)] = geval(xs);
                        }
                    }
                }
            }
            int bi = 0;
            for (int i = 1; i < 3; ++i)
                if (fv[static_cast<std::size_t>(i)] < fv[static_cast<std::size_t>(bi)]) bi = i;
            const RigidityGap gmin = fe.eval(simplex[static_cast<std::size_t>(bi)][0], simplex[static_cast<std::size_t>(bi)][1]);

            ScanRecord rec;
            rec.point_index = pi;
            rec.direction_index = di;
            rec.alpha = simplex[static_cast<std::size_t>(bi)][0];
            rec.beta = simplex[static_cast<std::size_t>(bi)][1];
            rec.lhs = gmin.lhs_normal;
            rec.rhs = gmin.rhs_normal;
            rec.min_gap = gmin.gap_normal;
            rec.min_gap_ambient = std::min(best_amb, gmin.gap_ambient);
            if (!nullity.indeterminate) {
                Vec5 vmin{};
                for (int ii = 0; ii < 5; ++ii)
                    vmin[static_cast<std::size_t>(ii)] =
                        std::cos(rec.beta) * m1[static_cast<std::size_t>(ii)] +
                        std::sin(rec.beta) * m2[static_cast<std::size_t>(ii)];
                const double c1 = inner<double, 5>(g, tri[0], nullity.W);
                const double c2 = inner<double, 5>(g, vmin, nullity.W);
                rec.axis_containment = c1 * c1 + c2 * c2;
            }
            rep.records.push_back(rec);

            rep.min_gap = std::min(rep.min_gap, rec.min_gap);
            rep.min_gap_ambient = std::min(rep.min_gap_ambient, rec.min_gap_ambient);
            rep.worst_direction_gap = std::max(rep.worst_direction_gap, rec.min_gap);
        }
    }
    rep.quasi_strict = rep.worst_direction_gap > plan.gap_tolerance;
    return rep;
}

} // namespace soulcurv

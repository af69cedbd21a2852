#include "soulcurv/transport.hpp"

#include <algorithm>
#include <cmath>

#include "soulcurv/ode.hpp"
#include "soulcurv/rng.hpp"

namespace soulcurv {

namespace {

using ode::Rhs;
using ode::State;

void integrate(const Rhs& rhs, State& y, double t0, double t1, const IntegrationOptions& opts,
               const ode::AcceptFn& on_accept) {
    ode::integrate(rhs, y, t0, t1, ode::Options{opts.rel_tol, opts.abs_tol, opts.max_step}, on_accept);
}

struct GammaCache {
    const MetricModel& model;
    // Christoffels at chart coordinates via degree-1 jets
    void eval(Chart chart, const double* x, double gamma[5][5][5], Mat5* g_out = nullptr) const {
        std::array<Jet1, 2> u = {Jet1::variable(x[0], 0), Jet1::variable(x[1], 1)};
        std::array<Jet1, 3> v = {Jet1::variable(x[2], 2), Jet1::variable(x[3], 3), Jet1::variable(x[4], 4)};
        const SmallMat<Jet1, 5> gj = metric_matrix<Jet1>(model, chart, u, v);
        const SmallMat<Jet1, 5> gi = spd_inverse<Jet1, 5>(gj);
        for (int k = 0; k < 5; ++k)
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j <= i; ++j) {
                    Jet1 s(0.0);
                    for (int l = 0; l < 5; ++l)
                        s += gi(k, l) * (jet_derivative(gj(j, l), i) + jet_derivative(gj(i, l), j) -
                                         jet_derivative(gj(i, j), l));
                    gamma[k][i][j] = 0.5 * s.value();
                    gamma[k][j][i] = gamma[k][i][j];
                }
        if (g_out) {
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) (*g_out)(i, j) = gj(i, j).value();
        }
    }
};

// right-hand side of the geodesic + optional frame transport system; layout
// y = (x[5], w[5], xi_0[5], ..., xi_{k-1}[5])
void geodesic_rhs(const GammaCache& gc, Chart chart, int nframe, const State& y, State& dy) {
    double gamma[5][5][5];
    gc.eval(chart, y.data(), gamma);
    for (int i = 0; i < 5; ++i) dy[i] = y[5 + i];
    for (int k = 0; k < 5; ++k) {
        double s = 0.0;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) s += gamma[k][i][j] * y[5 + i] * y[5 + j];
        dy[5 + k] = -s;
    }
    for (int m = 0; m < nframe; ++m) {
        const int off = 10 + 5 * m;
        for (int k = 0; k < 5; ++k) {
            double s = 0.0;
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) s += gamma[k][i][j] * y[5 + i] * y[off + j];
            dy[off + k] = -s;
        }
    }
}

// transport along a known path x(t), w(t): y = (xi_0[5], ...)
void transport_rhs(const GammaCache& gc, Chart chart, const double* x, const double* w, const State& y, State& dy) {
    double gamma[5][5][5];
    gc.eval(chart, x, gamma);
    const int nframe = static_cast<int>(y.size()) / 5;
    for (int m = 0; m < nframe; ++m) {
        const int off = 5 * m;
        for (int k = 0; k < 5; ++k) {
            double s = 0.0;
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) s += gamma[k][i][j] * w[i] * y[off + j];
            dy[off + k] = -s;
        }
    }
}

// position/velocity of an analytic segment at local time t in a given chart
void analytic_state(const CurveSegment& seg, Chart chart, double t, double x[5], double w[5]) {
    if (seg.kind == SegmentKind::SoulArc) {
        Vec3 p, dp;
        for (int i = 0; i < 3; ++i) {
            p[static_cast<std::size_t>(i)] =
                std::cos(t) * seg.arc_p[static_cast<std::size_t>(i)] + std::sin(t) * seg.arc_q[static_cast<std::size_t>(i)];
            dp[static_cast<std::size_t>(i)] =
                -std::sin(t) * seg.arc_p[static_cast<std::size_t>(i)] + std::cos(t) * seg.arc_q[static_cast<std::size_t>(i)];
        }
        const auto u = project_sphere(chart, p);
        const auto tc = sphere_tangent_to_chart<double>(chart, u, dp);
        x[0] = u[0];
        x[1] = u[1];
        x[2] = x[3] = x[4] = 0.0;
        w[0] = tc[0];
        w[1] = tc[1];
        w[2] = w[3] = w[4] = 0.0;
    } else { // ChartLine
        x[0] = seg.start.u[0] + t * seg.line_du[0];
        x[1] = seg.start.u[1] + t * seg.line_du[1];
        for (int i = 0; i < 3; ++i)
            x[2 + i] = seg.start.v[static_cast<std::size_t>(i)] + t * seg.line_dv[static_cast<std::size_t>(i)];
        w[0] = seg.line_du[0];
        w[1] = seg.line_du[1];
        w[2] = seg.line_dv[0];
        w[3] = seg.line_dv[1];
        w[4] = seg.line_dv[2];
    }
}

void switch_chart_state(Chart& chart, State& y, int nvec, int off0) {
    // y holds x[5] at 0 in position modes; vectors at off0 + 5m
    ChartPoint pt{chart, {y[0], y[1]}, {y[2], y[3], y[4]}};
    const ChartPoint flipped = transition(pt);
    for (int m = 0; m < nvec; ++m) {
        const int off = off0 + 5 * m;
        Vec5 v = {y[off], y[off + 1], y[off + 2], y[off + 3], y[off + 4]};
        v = transition_velocity(pt, v);
        for (int i = 0; i < 5; ++i) y[off + i] = v[static_cast<std::size_t>(i)];
    }
    y[0] = flipped.u[0];
    y[1] = flipped.u[1];
    chart = flipped.chart;
}

} // namespace

Curve geodesic(const MetricModel& model, const ChartPoint& pt, const Vec5& v, double T,
               const IntegrationOptions& opts) {
    bool nonzero = false;
    for (double c : v) nonzero |= (c != 0.0);
    if (!nonzero) throw DomainError("geodesic needs a non-zero initial velocity");

    Curve curve;
    GammaCache gc{model};
    Chart chart = pt.chart;
    State y(10);
    for (int i = 0; i < 5; ++i) y[i] = pt.coords()[static_cast<std::size_t>(i)];
    for (int i = 0; i < 5; ++i) y[5 + i] = v[static_cast<std::size_t>(i)];

    CurveSegment seg;
    seg.kind = SegmentKind::Integrated;
    seg.start = pt;
    seg.v0 = v;
    seg.duration = T;

    curve.samples.push_back({0.0, pt, v});
    if (T != 0.0) {
        integrate([&](double, const State& s, State& ds) { geodesic_rhs(gc, chart, 0, s, ds); }, y, 0.0, T, opts,
                  [&](double t, State& s) {
                      if (s[0] * s[0] + s[1] * s[1] > opts.chart_switch_radius2) {
                          switch_chart_state(chart, s, 1, 5);
                          ++curve.chart_switches;
                      }
                      ChartPoint x{chart, {s[0], s[1]}, {s[2], s[3], s[4]}};
                      curve.samples.push_back({t, x, Vec5{s[5], s[6], s[7], s[8], s[9]}});
                  });
    }
    seg.end = ChartPoint{chart, {y[0], y[1]}, {y[2], y[3], y[4]}};
    curve.segments.push_back(seg);
    return curve;
}

Curve soul_arc(const ChartPoint& from, const Vec3& ambient_dir, double angle) {
    const auto [p, voff] = ambient_pair(from);
    if (norm<3>(voff) > 1e-9) throw DomainError("soul arcs start on the soul");
    Vec3 q = ambient_dir;
    const double pq = dot<double, 3>(p, q);
    for (int i = 0; i < 3; ++i) q[static_cast<std::size_t>(i)] -= pq * p[static_cast<std::size_t>(i)];
    q = normalized<3>(q);

    CurveSegment seg;
    seg.kind = SegmentKind::SoulArc;
    seg.duration = angle;
    seg.start = from;
    seg.arc_p = p;
    seg.arc_q = q;
    Vec3 pe;
    for (int i = 0; i < 3; ++i)
        pe[static_cast<std::size_t>(i)] =
            std::cos(angle) * p[static_cast<std::size_t>(i)] + std::sin(angle) * q[static_cast<std::size_t>(i)];
    seg.end = point_from_ambient(pe, {0.0, 0.0, 0.0}, std::abs(pe[2]) < 0.9 ? from.chart : preferred_chart(pe));

    Curve c;
    c.segments.push_back(seg);
    const int ns = std::max(2, static_cast<int>(angle / 0.05));
    for (int k = 0; k <= ns; ++k) {
        const double t = angle * k / ns;
        Vec3 pos, vel;
        for (int i = 0; i < 3; ++i) {
            pos[static_cast<std::size_t>(i)] =
                std::cos(t) * p[static_cast<std::size_t>(i)] + std::sin(t) * q[static_cast<std::size_t>(i)];
            vel[static_cast<std::size_t>(i)] =
                -std::sin(t) * p[static_cast<std::size_t>(i)] + std::cos(t) * q[static_cast<std::size_t>(i)];
        }
        const Chart ch = std::abs(pos[2]) < 0.9 ? from.chart : preferred_chart(pos);
        const ChartPoint x = point_from_ambient(pos, {0.0, 0.0, 0.0}, ch);
        c.samples.push_back({t, x, vector_from_ambient(x, vel, {0.0, 0.0, 0.0})});
    }
    return c;
}

Curve soul_arc_between(const ChartPoint& a, const ChartPoint& b) {
    const auto [pa, va] = ambient_pair(a);
    const auto [pb, vb] = ambient_pair(b);
    if (norm<3>(va) > 1e-9 || norm<3>(vb) > 1e-9) throw DomainError("soul arcs connect soul points");
    double cang = dot<double, 3>(pa, pb);
    cang = std::max(-1.0, std::min(1.0, cang));
    if (cang < -1.0 + 1e-10) throw DomainError("soul arc between antipodal points is not unique");
    const double ang = std::acos(cang);
    Vec3 q;
    for (int i = 0; i < 3; ++i) q[static_cast<std::size_t>(i)] = pb[static_cast<std::size_t>(i)] - cang * pa[static_cast<std::size_t>(i)];
    return soul_arc(a, q, ang);
}

Curve soul_triangle(const ChartPoint& a, const ChartPoint& b, const ChartPoint& c) {
    Curve t = soul_arc_between(a, b);
    const Curve s2 = soul_arc_between(t.end(), c);
    const Curve s3 = soul_arc_between(s2.end(), a);
    t.segments.push_back(s2.segments.front());
    t.segments.push_back(s3.segments.front());
    return t;
}

Curve coordinate_rectangle(const ChartPoint& corner, double h1, double h2) {
    // traversal order chosen so that log(holonomy)/area approaches
    // +R(d_u1, d_u2) in the engine's curvature sign convention
    Curve c;
    ChartPoint p = corner;
    const std::array<Vec2, 4> dirs = {Vec2{0.0, h2}, Vec2{h1, 0.0}, Vec2{0.0, -h2}, Vec2{-h1, 0.0}};
    for (const auto& d : dirs) {
        CurveSegment seg;
        seg.kind = SegmentKind::ChartLine;
        seg.duration = 1.0;
        seg.start = p;
        seg.line_du = d;
        seg.end = p;
        seg.end.u[0] += d[0];
        seg.end.u[1] += d[1];
        c.segments.push_back(seg);
        p = seg.end;
    }
    return c;
}

Curve centered_rectangle_loop(const ChartPoint& center, double h1, double h2) {
    // based at the center so its holonomy log compares against the curvature
    // at the same point and frame; the in-and-out diagonal legs cancel
    Curve c;
    CurveSegment out;
    out.kind = SegmentKind::ChartLine;
    out.duration = 1.0;
    out.start = center;
    out.line_du = {-0.5 * h1, -0.5 * h2};
    out.end = center;
    out.end.u[0] -= 0.5 * h1;
    out.end.u[1] -= 0.5 * h2;
    c.segments.push_back(out);
    const Curve rect = coordinate_rectangle(out.end, h1, h2);
    for (const auto& s : rect.segments) c.segments.push_back(s);
    CurveSegment back;
    back.kind = SegmentKind::ChartLine;
    back.duration = 1.0;
    back.start = out.end;
    back.line_du = {0.5 * h1, 0.5 * h2};
    back.end = center;
    c.segments.push_back(back);
    return c;
}

Curve reversed(const Curve& c) {
    Curve r;
    r.chart_switches = c.chart_switches;
    for (auto it = c.segments.rbegin(); it != c.segments.rend(); ++it) {
        CurveSegment s = *it;
        std::swap(s.start, s.end);
        switch (s.kind) {
            case SegmentKind::SoulArc: {
                // run the same circle backwards from the old endpoint
                Vec3 p, q;
                for (int i = 0; i < 3; ++i) {
                    p[static_cast<std::size_t>(i)] = std::cos(s.duration) * it->arc_p[static_cast<std::size_t>(i)] +
                                                     std::sin(s.duration) * it->arc_q[static_cast<std::size_t>(i)];
                    q[static_cast<std::size_t>(i)] = -(-std::sin(s.duration) * it->arc_p[static_cast<std::size_t>(i)] +
                                                       std::cos(s.duration) * it->arc_q[static_cast<std::size_t>(i)]);
                }
                s.arc_p = p;
                s.arc_q = q;
                break;
            }
            case SegmentKind::ChartLine:
                s.start = it->end;
                s.line_du = {-it->line_du[0], -it->line_du[1]};
                s.line_dv = {-it->line_dv[0], -it->line_dv[1], -it->line_dv[2]};
                break;
            case SegmentKind::Integrated:
                throw DomainError("reversing integrated segments is not supported; rebuild the geodesic");
        }
        r.segments.push_back(s);
    }
    return r;
}

namespace {

void project_to_normal(const Mat5& g, State& y, int off) {
    // remove the g-tangential part (tangent space of the soul = u-plane)
    Mat2 m;
    m(0, 0) = g(0, 0);
    m(0, 1) = g(0, 1);
    m(1, 0) = g(1, 0);
    m(1, 1) = g(1, 1);
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    double b0 = 0.0, b1 = 0.0;
    for (int j = 0; j < 5; ++j) {
        b0 += g(0, j) * y[off + j];
        b1 += g(1, j) * y[off + j];
    }
    const double a0 = (m(1, 1) * b0 - m(0, 1) * b1) / det;
    const double a1 = (-m(1, 0) * b0 + m(0, 0) * b1) / det;
    y[off + 0] -= a0;
    y[off + 1] -= a1;
}

void orthonormalize_frame(const Mat5& g, State& y, int off0, int nvec) {
    std::vector<Vec5> vs;
    for (int m = 0; m < nvec; ++m) {
        const int off = off0 + 5 * m;
        vs.push_back({y[off], y[off + 1], y[off + 2], y[off + 3], y[off + 4]});
    }
    const auto on = gram_schmidt<5>(g, vs);
    for (int m = 0; m < nvec; ++m)
        for (int i = 0; i < 5; ++i) y[off0 + 5 * m + i] = on[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)];
}

} // namespace

TransportResult parallel_transport(const MetricModel& model, const Curve& curve, const std::vector<Vec5>& vectors,
                                   TransportMode mode, const IntegrationOptions& opts) {
    GammaCache gc{model};
    const int nvec = static_cast<int>(vectors.size());
    TransportResult res;
    if (nvec == 0) throw DomainError("no vectors to transport");

    // initial Gram matrix for drift accounting
    std::vector<double> gram0(static_cast<std::size_t>(nvec * nvec));
    {
        const Mat5 g0 = metric_value(model, curve.start());
        for (int a = 0; a < nvec; ++a)
            for (int b = 0; b < nvec; ++b)
                gram0[static_cast<std::size_t>(a * nvec + b)] =
                    inner<double, 5>(g0, vectors[static_cast<std::size_t>(a)], vectors[static_cast<std::size_t>(b)]);
    }

    std::vector<Vec5> cur = vectors;
    ChartPoint at = curve.start();

    for (const auto& seg : curve.segments) {
        if (mode == TransportMode::Normal) {
            const double voff = norm<3>(seg.start.v) + norm<3>(seg.end.v);
            if (voff > 1e-8) throw DomainError("normal transport requested along a curve off the soul");
        }
        // express current vectors in the segment's start chart
        if (at.chart != seg.start.chart) {
            const ChartPoint flipped = transition(at);
            for (auto& v : cur) v = transition_velocity(at, v);
            at = flipped;
        }

        Chart chart = seg.start.chart;
        if (seg.kind == SegmentKind::Integrated) {
            State y(static_cast<std::size_t>(10 + 5 * nvec));
            const auto c0 = seg.start.coords();
            for (int i = 0; i < 5; ++i) y[i] = c0[static_cast<std::size_t>(i)];
            for (int i = 0; i < 5; ++i) y[5 + i] = seg.v0[static_cast<std::size_t>(i)];
            for (int m = 0; m < nvec; ++m)
                for (int i = 0; i < 5; ++i) y[10 + 5 * m + i] = cur[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)];
            integrate([&](double, const State& s, State& ds) { geodesic_rhs(gc, chart, nvec, s, ds); }, y, 0.0,
                      seg.duration, opts, [&](double, State& s) {
                          if (s[0] * s[0] + s[1] * s[1] > opts.chart_switch_radius2)
                              switch_chart_state(chart, s, 1 + nvec, 5);
                          if (opts.reproject && mode == TransportMode::Normal) {
                              const Mat5 g = metric_matrix<double>(model, chart, {s[0], s[1]}, {s[2], s[3], s[4]});
                              for (int m = 0; m < nvec; ++m) project_to_normal(g, s, 10 + 5 * m);
                              if (nvec > 1) orthonormalize_frame(g, s, 10, nvec);
                          }
                      });
            at = ChartPoint{chart, {y[0], y[1]}, {y[2], y[3], y[4]}};
            for (int m = 0; m < nvec; ++m)
                for (int i = 0; i < 5; ++i) cur[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] = y[10 + 5 * m + i];
        } else {
            State y(static_cast<std::size_t>(5 * nvec));
            for (int m = 0; m < nvec; ++m)
                for (int i = 0; i < 5; ++i) y[5 * m + i] = cur[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)];
            double xcur[5], wcur[5];
            integrate(
                [&](double t, const State& s, State& ds) {
                    analytic_state(seg, chart, t, xcur, wcur);
                    transport_rhs(gc, chart, xcur, wcur, s, ds);
                },
                y, 0.0, seg.duration, opts, [&](double t, State& s) {
                    analytic_state(seg, chart, t, xcur, wcur);
                    if (seg.kind == SegmentKind::SoulArc && xcur[0] * xcur[0] + xcur[1] * xcur[1] > opts.chart_switch_radius2) {
                        ChartPoint here{chart, {xcur[0], xcur[1]}, {xcur[2], xcur[3], xcur[4]}};
                        for (int m = 0; m < nvec; ++m) {
                            const int off = 5 * m;
                            Vec5 v = {s[off], s[off + 1], s[off + 2], s[off + 3], s[off + 4]};
                            v = transition_velocity(here, v);
                            for (int i = 0; i < 5; ++i) s[off + i] = v[static_cast<std::size_t>(i)];
                        }
                        chart = other_chart(chart);
                        analytic_state(seg, chart, t, xcur, wcur);
                    }
                    if (opts.reproject && mode == TransportMode::Normal) {
                        const Mat5 g = metric_matrix<double>(model, chart, {xcur[0], xcur[1]},
                                                             {xcur[2], xcur[3], xcur[4]});
                        for (int m = 0; m < nvec; ++m) project_to_normal(g, s, 5 * m);
                        if (nvec > 1) orthonormalize_frame(g, s, 0, nvec);
                    }
                });
            analytic_state(seg, chart, seg.duration, xcur, wcur);
            at = ChartPoint{chart, {xcur[0], xcur[1]}, {xcur[2], xcur[3], xcur[4]}};
            for (int m = 0; m < nvec; ++m)
                for (int i = 0; i < 5; ++i) cur[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] = y[5 * m + i];
        }
    }

    res.vectors = cur;
    res.end = at;
    const Mat5 g1 = metric_value(model, at);
    double drift = 0.0;
    for (int a = 0; a < nvec; ++a)
        for (int b = 0; b < nvec; ++b) {
            const double gab = inner<double, 5>(g1, cur[static_cast<std::size_t>(a)], cur[static_cast<std::size_t>(b)]);
            drift = std::max(drift, std::abs(gab - gram0[static_cast<std::size_t>(a * nvec + b)]));
        }
    res.gram_drift = drift;
    return res;
}

HolonomyElement holonomy_loop(const MetricModel& model, const Curve& loop, const IntegrationOptions& opts) {
    const double gap = loop.closure();
    if (gap > 1e-8) throw LoopClosureError("loop endpoints differ by " + std::to_string(gap));

    const SoulFrame fr = soul_frame(model, loop.start());
    const std::vector<Vec5> frame = {fr.W, fr.U, fr.V};
    const TransportResult tr = parallel_transport(model, loop, frame, TransportMode::Normal, opts);

    // endpoint may sit in the other chart than the basepoint
    std::vector<Vec5> back = tr.vectors;
    ChartPoint at = tr.end;
    if (at.chart != loop.start().chart) {
        for (auto& v : back) v = transition_velocity(at, v);
        at = transition(at);
    }

    const Mat5 g = metric_value(model, loop.start());
    Mat3 q;
    const std::array<Vec5, 3> base = {fr.W, fr.U, fr.V};
    for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a)
            q(a, b) = inner<double, 5>(g, base[static_cast<std::size_t>(a)], back[static_cast<std::size_t>(b)]);

    HolonomyElement out;
    out.closure = gap;
    Mat3 qt = q;
    out.rotation = project_to_rotation(q);
    double resid = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) resid = std::max(resid, std::abs(qt(i, j) - out.rotation(i, j)));
    out.ortho_residual = resid;
    out.log = rotation_log(out.rotation);
    return out;
}

HolonomyAlgebra holonomy_algebra(const MetricModel& model, const std::vector<Curve>& loops, double threshold,
                                 const IntegrationOptions& opts) {
    if (loops.size() < 6) throw DomainError("holonomy algebra estimation needs at least 6 loops");
    HolonomyAlgebra out;
    std::vector<Vec3> logs;
    for (const auto& loop : loops) {
        const HolonomyElement h = holonomy_loop(model, loop, opts);
        const double angle = norm<3>(h.log);
        if (angle > M_PI - 1e-3 && loop.segments.size() == 3 && loop.segments[0].kind == SegmentKind::SoulArc) {
            // near-pi branch: replace the triangle by its midpoint subdivision
            ++out.subdivided;
            const ChartPoint a = loop.segments[0].start;
            const ChartPoint b = loop.segments[1].start;
            const ChartPoint c = loop.segments[2].start;
            auto midpoint = [](const ChartPoint& x, const ChartPoint& y) {
                const auto px = ambient_pair(x).first;
                const auto py = ambient_pair(y).first;
                return point_from_ambient(normalized<3>(add<3>(px, py)), {0.0, 0.0, 0.0});
            };
            const ChartPoint ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
            for (const auto& tri : {soul_triangle(a, ab, ca), soul_triangle(ab, b, bc), soul_triangle(ca, bc, c),
                                    soul_triangle(ab, bc, ca)}) {
                const HolonomyElement hs = holonomy_loop(model, tri, opts);
                if (norm<3>(hs.log) > M_PI - 1e-3)
                    throw DomainError("holonomy logarithm stuck near the branch cut after subdivision");
                logs.push_back(hs.log);
            }
        } else {
            logs.push_back(h.log);
        }
    }

    Mat3 gram;
    for (const auto& w : logs)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) gram(i, j) += w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
    Vec3 evals{};
    Mat3 evecs;
    jacobi_eigen<3>(gram, evals, evecs);

    std::vector<std::pair<double, int>> sv;
    for (int i = 0; i < 3; ++i) sv.push_back({std::sqrt(std::max(0.0, evals[static_cast<std::size_t>(i)])), i});
    std::sort(sv.begin(), sv.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (const auto& [s, idx] : sv) {
        out.singular_values.push_back(s);
        if (s > threshold) {
            ++out.dimension;
            out.basis.push_back(skew_from_axis({evecs(0, idx), evecs(1, idx), evecs(2, idx)}));
        }
    }
    return out;
}

std::vector<Curve> triangle_basket(int count, double seed_offset) {
    // every loop shares the same basepoint: holonomy elements then live in
    // one group and their logs span its algebra
    std::vector<Curve> loops;
    const int nv = std::max(6, 2 * count + 3);
    std::vector<ChartPoint> pts;
    for (int i = 0; i < nv; ++i) {
        const auto p = fibonacci_sphere_point(i, nv, seed_offset);
        pts.push_back(point_from_ambient({p[0], p[1], p[2]}, {0.0, 0.0, 0.0}));
    }
    const ChartPoint& base = pts.front();
    for (int i = 0; i < count; ++i) {
        const ChartPoint& b = pts[static_cast<std::size_t>((1 + 2 * i) % (nv - 1) + 1)];
        const ChartPoint& c = pts[static_cast<std::size_t>((2 + 2 * i) % (nv - 1) + 1)];
        loops.push_back(soul_triangle(base, b, c));
    }
    return loops;
}

} // namespace soulcurv

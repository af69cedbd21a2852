#include "soulcurv/curvature.hpp"

#include <array>
#include <cmath>

#include "soulcurv/partials.hpp"

namespace soulcurv {

namespace {

constexpr int N = 5;

inline std::size_t i3(int k, int i, int j) { return static_cast<std::size_t>((k * N + i) * N + j); }
inline std::size_t i4(int i, int j, int k, int l) { return static_cast<std::size_t>(((i * N + j) * N + k) * N + l); }
inline std::size_t i5(int e, int i, int j, int k, int l) {
    return static_cast<std::size_t>((((e * N + i) * N + j) * N + k) * N + l);
}
inline std::size_t i6(int f, int e, int i, int j, int k, int l) {
    return static_cast<std::size_t>(((((f * N + e) * N + i) * N + j) * N + k) * N + l);
}

// Levi-Civita pipeline over jets of degree D. Each covariant-derivative stage
// consumes one jet degree, so D = order of the deepest requested tensor.
template <int D>
void pipeline(const SmallMat<Jet<D>, N>& gj, CurvaturePacket& out) {
    using J = Jet<D>;
    const int order = out.order;

    const SmallMat<J, N> ginvj = spd_inverse<J, N>(gj);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            out.g(i, j) = gj(i, j).value();
            out.ginv(i, j) = ginvj(i, j).value();
        }

    // dg[e](i,j)
    std::vector<J> dg(static_cast<std::size_t>(N * N * N));
    for (int e = 0; e < N; ++e)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j <= i; ++j) {
                dg[i3(e, i, j)] = jet_derivative(gj(i, j), e);
                dg[i3(e, j, i)] = dg[i3(e, i, j)];
            }

    // Christoffels as jets (valid one degree down)
    std::vector<J> gam(static_cast<std::size_t>(N * N * N));
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j <= i; ++j) {
                J s(0.0);
                for (int l = 0; l < N; ++l)
                    s += ginvj(k, l) * (dg[i3(i, j, l)] + dg[i3(j, i, l)] - dg[i3(l, i, j)]);
                s *= 0.5;
                gam[i3(k, i, j)] = s;
                gam[i3(k, j, i)] = s;
            }
    out.gamma.assign(static_cast<std::size_t>(N * N * N), 0.0);
    for (std::size_t t = 0; t < gam.size(); ++t) out.gamma[t] = gam[t].value();
    if (order < 2) return;

    // R^m_{ijk}: d_i Gam^m_jk - d_j Gam^m_ik + Gam^m_ia Gam^a_jk - Gam^m_ja Gam^a_ik
    std::vector<J> rup(static_cast<std::size_t>(N * N * N * N));
    for (int m = 0; m < N; ++m)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < i; ++j) {
                for (int k = 0; k < N; ++k) {
                    J s = jet_derivative(gam[i3(m, j, k)], i) - jet_derivative(gam[i3(m, i, k)], j);
                    for (int a = 0; a < N; ++a)
                        s += gam[i3(m, i, a)] * gam[i3(a, j, k)] - gam[i3(m, j, a)] * gam[i3(a, i, k)];
                    rup[i4(m, i, j, k)] = s;
                    rup[i4(m, j, i, k)] = -s;
                }
            }

    // lowered tensor R(i,j,k,l) = g_{lm} R^m_{ijk}
    std::vector<J> rlow(static_cast<std::size_t>(N * N * N * N));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < i; ++j)
            for (int k = 0; k < N; ++k)
                for (int l = 0; l < N; ++l) {
                    J s(0.0);
                    for (int m = 0; m < N; ++m) s += gj(l, m) * rup[i4(m, i, j, k)];
                    rlow[i4(i, j, k, l)] = s;
                    rlow[i4(j, i, k, l)] = -s;
                }
    out.riem.assign(static_cast<std::size_t>(N * N * N * N), 0.0);
    for (std::size_t t = 0; t < rlow.size(); ++t) out.riem[t] = rlow[t].value();
    if (order < 3) return;

    // nabla_e R
    std::vector<J> drlow(static_cast<std::size_t>(N * N * N * N * N));
    for (int e = 0; e < N; ++e)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < i; ++j)
                for (int k = 0; k < N; ++k)
                    for (int l = 0; l < N; ++l) {
                        J s = jet_derivative(rlow[i4(i, j, k, l)], e);
                        for (int m = 0; m < N; ++m) {
                            s -= gam[i3(m, e, i)] * rlow[i4(m, j, k, l)];
                            s -= gam[i3(m, e, j)] * rlow[i4(i, m, k, l)];
                            s -= gam[i3(m, e, k)] * rlow[i4(i, j, m, l)];
                            s -= gam[i3(m, e, l)] * rlow[i4(i, j, k, m)];
                        }
                        drlow[i5(e, i, j, k, l)] = s;
                        drlow[i5(e, j, i, k, l)] = -s;
                    }
    out.driem.assign(static_cast<std::size_t>(N * N * N * N * N), 0.0);
    for (std::size_t t = 0; t < drlow.size(); ++t) out.driem[t] = drlow[t].value();
    if (order < 4) return;

    // nabla_f nabla_e R, values only
    out.d2riem.assign(static_cast<std::size_t>(N) * N * N * N * N * N, 0.0);
    for (int f = 0; f < N; ++f)
        for (int e = 0; e < N; ++e)
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < i; ++j)
                    for (int k = 0; k < N; ++k)
                        for (int l = 0; l < N; ++l) {
                            double s = jet_derivative(drlow[i5(e, i, j, k, l)], f).value();
                            for (int m = 0; m < N; ++m) {
                                s -= gam[i3(m, f, e)].value() * drlow[i5(m, i, j, k, l)].value();
                                s -= gam[i3(m, f, i)].value() * drlow[i5(e, m, j, k, l)].value();
                                s -= gam[i3(m, f, j)].value() * drlow[i5(e, i, m, k, l)].value();
                                s -= gam[i3(m, f, k)].value() * drlow[i5(e, i, j, m, l)].value();
                                s -= gam[i3(m, f, l)].value() * drlow[i5(e, i, j, k, m)].value();
                            }
                            out.d2riem[i6(f, e, i, j, k, l)] = s;
                            out.d2riem[i6(f, e, j, i, k, l)] = -s;
                        }
}

} // namespace

double CurvaturePacket::R4(const Vec5& x, const Vec5& y, const Vec5& z, const Vec5& w) const {
    double s = 0.0;
    for (int i = 0; i < N; ++i) {
        if (x[static_cast<std::size_t>(i)] == 0.0) continue;
        for (int j = 0; j < N; ++j) {
            if (y[static_cast<std::size_t>(j)] == 0.0) continue;
            const double xy = x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
            for (int k = 0; k < N; ++k) {
                if (z[static_cast<std::size_t>(k)] == 0.0) continue;
                const double xyz = xy * z[static_cast<std::size_t>(k)];
                for (int l = 0; l < N; ++l)
                    s += xyz * w[static_cast<std::size_t>(l)] * R(i, j, k, l);
            }
        }
    }
    return s;
}

double CurvaturePacket::dR5(const Vec5& e, const Vec5& x, const Vec5& y, const Vec5& z, const Vec5& w) const {
    double s = 0.0;
    for (int a = 0; a < N; ++a) {
        if (e[static_cast<std::size_t>(a)] == 0.0) continue;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
                for (int k = 0; k < N; ++k)
                    for (int l = 0; l < N; ++l)
                        s += e[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(i)] *
                             y[static_cast<std::size_t>(j)] * z[static_cast<std::size_t>(k)] *
                             w[static_cast<std::size_t>(l)] * dR(a, i, j, k, l);
    }
    return s;
}

double CurvaturePacket::d2R6(const Vec5& f, const Vec5& e, const Vec5& x, const Vec5& y, const Vec5& z,
                             const Vec5& w) const {
    double s = 0.0;
    for (int b = 0; b < N; ++b) {
        if (f[static_cast<std::size_t>(b)] == 0.0) continue;
        for (int a = 0; a < N; ++a) {
            if (e[static_cast<std::size_t>(a)] == 0.0) continue;
            const double fe = f[static_cast<std::size_t>(b)] * e[static_cast<std::size_t>(a)];
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j) {
                    const double xy = x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
                    if (xy == 0.0) continue;
                    for (int k = 0; k < N; ++k)
                        for (int l = 0; l < N; ++l)
                            s += fe * xy * z[static_cast<std::size_t>(k)] * w[static_cast<std::size_t>(l)] *
                                 d2R(b, a, i, j, k, l);
                }
        }
    }
    return s;
}

double CurvaturePacket::sectional(const Vec5& x, const Vec5& y) const {
    const double gxx = inner_g(x, x), gyy = inner_g(y, y), gxy = inner_g(x, y);
    const double area2 = gxx * gyy - gxy * gxy;
    if (area2 < 1e-14) throw FrameError("sectional curvature of a degenerate plane");
    return R4(x, y, y, x) / area2;
}

Vec5 CurvaturePacket::apply(const Vec5& x, const Vec5& y, const Vec5& z) const {
    // lowered components then raise
    Vec5 low{};
    for (int l = 0; l < N; ++l) {
        Vec5 el{};
        el[static_cast<std::size_t>(l)] = 1.0;
        low[static_cast<std::size_t>(l)] = R4(x, y, z, el);
    }
    return matvec(ginv, low);
}

CurvaturePacket curvature_at(const MetricModel& model, const ChartPoint& pt, int order) {
    if (order < 1 || order > 4) throw DomainError("curvature order must be in 1..4");
    CurvaturePacket out;
    out.point = pt;
    out.order = order;
    if (order <= 2) {
        pipeline<2>(metric_jets<2>(model, pt), out);
    } else {
        pipeline<4>(metric_jets<4>(model, pt), out);
    }
    return out;
}

CurvaturePacket fd_curvature_at(const MetricModel& model, const ChartPoint& pt, double step) {
    CurvaturePacket out;
    out.point = pt;
    out.order = 2;
    const auto x0 = pt.coords();

    // metric, d g, d2 g via central differences + one Richardson level
    auto gfun = [&](int i, int j) {
        return ScalarField([&model, chart = pt.chart, i, j](const std::array<double, 5>& x) {
            const SmallMat<double, 5> g =
                metric_matrix<double>(model, chart, {x[0], x[1]}, {x[2], x[3], x[4]});
            return g(i, j);
        });
    };

    std::vector<double> g(N * N), dg(N * N * N), d2g(N * N * N * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j <= i; ++j) {
            const auto f = gfun(i, j);
            const double v = f(x0);
            g[static_cast<std::size_t>(i * N + j)] = v;
            g[static_cast<std::size_t>(j * N + i)] = v;
            for (int e = 0; e < N; ++e) {
                std::array<int, 5> o{};
                o[static_cast<std::size_t>(e)] = 1;
                const double d = fd_partials(f, x0, o, step);
                dg[i3(e, i, j)] = d;
                dg[i3(e, j, i)] = d;
                for (int e2 = e; e2 < N; ++e2) {
                    std::array<int, 5> o2 = o;
                    o2[static_cast<std::size_t>(e2)] += 1;
                    const double d2 = fd_partials(f, x0, o2, step);
                    d2g[i4(e, e2, i, j)] = d2;
                    d2g[i4(e2, e, i, j)] = d2;
                    d2g[i4(e, e2, j, i)] = d2;
                    d2g[i4(e2, e, j, i)] = d2;
                }
            }
        }

    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) out.g(i, j) = g[static_cast<std::size_t>(i * N + j)];
    out.ginv = spd_inverse<double, 5>(out.g);

    out.gamma.assign(static_cast<std::size_t>(N * N * N), 0.0);
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j <= i; ++j) {
                double s = 0.0;
                for (int l = 0; l < N; ++l)
                    s += out.ginv(k, l) * (dg[i3(i, j, l)] + dg[i3(j, i, l)] - dg[i3(l, i, j)]);
                s *= 0.5;
                out.gamma[i3(k, i, j)] = s;
                out.gamma[i3(k, j, i)] = s;
            }

    // dGamma from dg/d2g: dGam[e][k][i][j]
    std::vector<double> dginv(static_cast<std::size_t>(N * N * N));
    // d(g^{-1}) = -g^{-1} dg g^{-1}
    for (int e = 0; e < N; ++e)
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                double s = 0.0;
                for (int a = 0; a < N; ++a)
                    for (int b = 0; b < N; ++b) s += out.ginv(i, a) * dg[i3(e, a, b)] * out.ginv(b, j);
                dginv[i3(e, i, j)] = -s;
            }
    std::vector<double> dgam(static_cast<std::size_t>(N * N * N * N));
    for (int e = 0; e < N; ++e)
        for (int k = 0; k < N; ++k)
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < N; ++l) {
                        s += dginv[i3(e, k, l)] * (dg[i3(i, j, l)] + dg[i3(j, i, l)] - dg[i3(l, i, j)]);
                        s += out.ginv(k, l) * (d2g[i4(e, i, j, l)] + d2g[i4(e, j, i, l)] - d2g[i4(e, l, i, j)]);
                    }
                    dgam[i4(e, k, i, j)] = 0.5 * s;
                }

    out.riem.assign(static_cast<std::size_t>(N * N * N * N), 0.0);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < i; ++j)
            for (int k = 0; k < N; ++k) {
                std::array<double, N> up{};
                for (int m = 0; m < N; ++m) {
                    double s = dgam[i4(i, m, j, k)] - dgam[i4(j, m, i, k)];
                    for (int a = 0; a < N; ++a)
                        s += out.gamma[i3(m, i, a)] * out.gamma[i3(a, j, k)] -
                             out.gamma[i3(m, j, a)] * out.gamma[i3(a, i, k)];
                    up[static_cast<std::size_t>(m)] = s;
                }
                for (int l = 0; l < N; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < N; ++m) s += out.g(l, m) * up[static_cast<std::size_t>(m)];
                    out.riem[i4(i, j, k, l)] = s;
                    out.riem[i4(j, i, k, l)] = -s;
                }
            }
    return out;
}

SoulGeometry soul_geometry(const MetricModel& model, const ChartPoint& pt) {
    SoulGeometry out;

    // induced metric: u-block of the ambient metric restricted to {V = 0},
    // run through the same pipeline padded with an identity block
    CurvaturePacket p2;
    p2.point = pt;
    p2.order = 2;
    {
        std::array<Jet2, 2> u = {Jet2::variable(pt.u[0], 0), Jet2::variable(pt.u[1], 1)};
        std::array<Jet2, 3> v0 = {Jet2(0.0), Jet2(0.0), Jet2(0.0)};
        const SmallMat<Jet2, 5> amb = metric_matrix<Jet2>(model, pt.chart, u, v0);
        SmallMat<Jet2, 5> ind;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) ind(i, j) = amb(i, j);
        for (int i = 2; i < 5; ++i) ind(i, i) = Jet2(1.0);
        pipeline<2>(ind, p2);
    }
    out.induced(0, 0) = p2.g(0, 0);
    out.induced(0, 1) = p2.g(0, 1);
    out.induced(1, 0) = p2.g(1, 0);
    out.induced(1, 1) = p2.g(1, 1);
    const double det2 = p2.g(0, 0) * p2.g(1, 1) - p2.g(0, 1) * p2.g(1, 0);
    out.gauss = p2.R(0, 1, 1, 0) / det2;

    // second fundamental form from ambient Christoffels: II(d_a, d_b) normal
    // component; {V = 0} is a coordinate submanifold so coordinate fields are
    // adapted extensions.
    const CurvaturePacket amb = curvature_at(model, pt, 1);
    const SoulFrame fr = soul_frame(model, pt);
    const std::array<Vec5, 2> tang = {fr.X, fr.Y};
    const std::array<Vec5, 3> norm3 = {fr.W, fr.U, fr.V};
    double ii2 = 0.0;
    for (const auto& ta : tang)
        for (const auto& tb : tang)
            for (const auto& nrm : norm3) {
                // <nabla_{ta} tb, nrm> with ta, tb spanned by coordinate fields:
                // ta^i tb^j Gamma^k_{ij} g_{kl} nrm^l (derivative terms drop since
                // tb has constant chart components along the soul's u-plane)
                double s = 0.0;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        const double tt = ta[static_cast<std::size_t>(i)] * tb[static_cast<std::size_t>(j)];
                        if (tt == 0.0) continue;
                        for (int k = 0; k < N; ++k) {
                            double gl = 0.0;
                            for (int l = 0; l < N; ++l) gl += amb.g(k, l) * nrm[static_cast<std::size_t>(l)];
                            s += tt * amb.Gamma(k, i, j) * gl;
                        }
                    }
                ii2 += s * s;
            }
    out.second_fundamental_norm = std::sqrt(ii2);
    return out;
}

NormalCurvature normal_curvature(const MetricModel& model, const ChartPoint& pt, const Vec5& X, const Vec5& Y) {
    const Mat5 g = metric_value(model, pt);
    const double oxx = inner<double, 5>(g, X, X) - 1.0;
    const double oyy = inner<double, 5>(g, Y, Y) - 1.0;
    const double oxy = inner<double, 5>(g, X, Y);
    if (std::abs(oxx) > 1e-8 || std::abs(oyy) > 1e-8 || std::abs(oxy) > 1e-8)
        throw FrameError("normal curvature needs an orthonormal oriented tangent pair");
    SoulFrame fr = soul_frame(model, pt);
    fr.X = X;
    fr.Y = Y;
    return normal_curvature(model, fr);
}

NormalCurvature normal_curvature(const MetricModel& model, const SoulFrame& frame) {
    const CurvaturePacket pk = curvature_at(model, frame.point, 2);
    const std::array<Vec5, 3> nrm = {frame.W, frame.U, frame.V};
    NormalCurvature out;
    out.frame = frame;
    // entries <R(X,Y) xi_a, xi_b>; operator matrix column a holds the image
    // of xi_a, then exact skew-symmetrization
    Mat3 s;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            s(b, a) = pk.R4(frame.X, frame.Y, nrm[static_cast<std::size_t>(a)], nrm[static_cast<std::size_t>(b)]);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) out.matrix(a, b) = 0.5 * (s(a, b) - s(b, a));
    out.axis = axis_from_skew(out.matrix);
    out.norm = norm<3>(out.axis);
    return out;
}

double vertical_sectional(const MetricModel& model, const SoulFrame& frame, double angle) {
    const CurvaturePacket pk = curvature_at(model, frame.point, 2);
    Vec5 a{}, b{};
    for (int i = 0; i < 5; ++i) {
        a[static_cast<std::size_t>(i)] =
            std::cos(angle) * frame.W[static_cast<std::size_t>(i)] + std::sin(angle) * frame.U[static_cast<std::size_t>(i)];
        b[static_cast<std::size_t>(i)] = frame.V[static_cast<std::size_t>(i)];
    }
    return pk.sectional(a, b);
}

} // namespace soulcurv

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "soulcurv/chart.hpp"
#include "soulcurv/errors.hpp"
#include "soulcurv/jet.hpp"
#include "soulcurv/linalg.hpp"

namespace soulcurv {

enum class Family { Product, CheegerSO3, ClosedFormReference };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Product: return "product";
        case Family::CheegerSO3: return "cheeger_so3";
        case Family::ClosedFormReference: return "closed_form_reference";
    }
    return "?";
}

Family family_from_name(const std::string& s);

// SO(3)-invariant fiber metric dr^2 + phi(r)^2 * round, stored through its
// smooth even extension: phi(r)^2 = r^2 * A(r^2) with A(t) = 1 + sum c_k t^k.
// In Cartesian fiber coordinates g_f(z,w) = A(|V|^2) <z,w> + B(|V|^2) <z,V><w,V>
// with B(t) = (1 - A(t))/t, which is again polynomial. Empty coefficients mean
// phi(r) = r, i.e. the flat fiber.
struct WarpProfile {
    std::vector<double> coeffs;

    bool flat() const { return coeffs.empty(); }

    template <class T>
    T A(const T& rho) const {
        T a = T(1.0);
        T p = T(1.0);
        for (double c : coeffs) {
            p = p * rho;
            a += c * p;
        }
        return a;
    }

    template <class T>
    T B(const T& rho) const {
        T b = T(0.0);
        T p = T(1.0);
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            b -= coeffs[k] * p;
            p = p * rho;
        }
        return b;
    }
};

struct MetricModel {
    Family family = Family::CheegerSO3;
    double scale = 1.0; // Gram scale of the group factor; all quoted constants assume 1
    WarpProfile warp;
};

// Adapted orthonormal data at a soul point: oriented tangent pair and a
// right-handed normal triple (w, u = v x w, v), all chart 5-vectors.
struct SoulFrame {
    ChartPoint point;
    Vec5 X{}, Y{};
    Vec5 W{}, U{}, V{};
    double theta = 0.0;
};

namespace detail_metric {

template <class T>
inline std::array<T, 3> cross3(const std::array<T, 3>& a, const std::array<T, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

template <class T>
inline T dot3(const std::array<T, 3>& a, const std::array<T, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// product metric: round sphere block (+) warped fiber block
template <class T>
inline SmallMat<T, 5> product_metric(const MetricModel& model, Chart /*chart*/, const std::array<T, 2>& u,
                                     const std::array<T, 3>& v) {
    SmallMat<T, 5> g;
    T s = u[0] * u[0] + u[1] * u[1];
    T w = s + 1.0;
    T f = 4.0 * reciprocal(w * w);
    g(0, 0) = f;
    g(1, 1) = f;
    T rho = dot3<T>(v, v);
    T a = model.warp.A(rho);
    T b = model.warp.B(rho);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            T e = b * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
            if (i == j) e += a;
            g(2 + i, 2 + j) = e;
        }
    }
    return g;
}

// Diagonal-rotation Killing fields at (p, V) expressed in chart components.
template <class T>
inline std::array<std::array<T, 5>, 3> killing_fields(Chart chart, const std::array<T, 2>& u,
                                                      const std::array<T, 3>& v) {
    const auto p = embed_sphere<T>(chart, u);
    const auto jac = embed_jacobian<T>(chart, u);
    T s = u[0] * u[0] + u[1] * u[1];
    T w = s + 1.0;
    T f = w * w * 0.25;
    std::array<std::array<T, 5>, 3> out;
    for (int axis = 0; axis < 3; ++axis) {
        std::array<T, 3> e{};
        e[static_cast<std::size_t>(axis)] = T(1.0);
        const auto tau = cross3<T>(e, p);
        const auto kv = cross3<T>(e, v);
        std::array<T, 5>& k = out[static_cast<std::size_t>(axis)];
        for (int i = 0; i < 2; ++i)
            k[static_cast<std::size_t>(i)] = f * (jac[static_cast<std::size_t>(i)][0] * tau[0] +
                                                  jac[static_cast<std::size_t>(i)][1] * tau[1] +
                                                  jac[static_cast<std::size_t>(i)][2] * tau[2]);
        for (int i = 0; i < 3; ++i) k[static_cast<std::size_t>(2 + i)] = kv[static_cast<std::size_t>(i)];
    }
    return out;
}

// Quotient metric by the Gram-complement formula
//   g~(x,y) = g(x,y) - m(x)^T (s I + K)^{-1} m(y),
// m_a(x) = g(x, T_a), K_ab = g(T_a, T_b). Smooth everywhere the charts are.
template <class T>
inline SmallMat<T, 5> cheeger_metric(const MetricModel& model, Chart chart, const std::array<T, 2>& u,
                                     const std::array<T, 3>& v) {
    SmallMat<T, 5> g = product_metric<T>(model, chart, u, v);
    const auto killing = killing_fields<T>(chart, u, v);

    // m columns: m[i][a] = (g K_a)_i
    std::array<std::array<T, 5>, 3> m;
    for (int a = 0; a < 3; ++a) {
        for (int i = 0; i < 5; ++i) {
            T s_ = T(0.0);
            for (int j = 0; j < 5; ++j)
                s_ += g(i, j) * killing[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)];
            m[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] = s_;
        }
    }

    SmallMat<T, 3> srk;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b <= a; ++b) {
            T s_ = T(0.0);
            for (int i = 0; i < 5; ++i)
                s_ += killing[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] *
                      m[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)];
            srk(a, b) = s_;
            srk(b, a) = s_;
        }
    for (int a = 0; a < 3; ++a) srk(a, a) += model.scale;

    const SmallMat<T, 3> inv = spd_inverse<T, 3>(srk);

    SmallMat<T, 5> gt = g;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j <= i; ++j) {
            T corr = T(0.0);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    corr += m[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] * inv(a, b) *
                            m[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
            gt(i, j) -= corr;
            gt(j, i) = gt(i, j);
        }
    return gt;
}

// Frame-expression matrix of the quotient metric in the adapted basis
// {X, A, Y, B, r^}: M = N^T K'~ N with the Gram matrix K of the Killing triple
// rescaled to K (I + K)^{-1} on orbit directions. Valid for theta away from
// {0, pi}; serves as the independent reference for the complement formula.
template <class T>
inline SmallMat<T, 5> frame_expression_matrix(const T& theta, const T& r) {
    using std::size_t;
    T s1 = sin(theta);
    T c1 = cos(theta);
    if (std::abs(value_of(s1)) < 1e-8)
        throw FrameError("adapted frame degenerates at theta in {0, pi}; use the chart metric instead");
    T r2 = r * r;

    SmallMat<T, 3> K;
    K(0, 0) = r2 + 1.0;
    K(1, 1) = r2 * s1 * s1;
    K(1, 2) = r2 * s1 * c1;
    K(2, 1) = K(1, 2);
    K(2, 2) = r2 * c1 * c1 + 1.0;

    SmallMat<T, 3> ipk = K;
    for (int i = 0; i < 3; ++i) ipk(i, i) += 1.0;
    const SmallMat<T, 3> kt = matmul(K, spd_inverse<T, 3>(ipk));

    SmallMat<T, 5> ktp;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ktp(i, j) = kt(i, j);
    ktp(3, 3) = r2 + 1.0;
    ktp(4, 4) = T(1.0);

    // frame coords (x, a, y, b, rho) -> Killing-basis coords
    T is1 = reciprocal(s1);
    T ir = reciprocal(r);
    SmallMat<T, 5> n;
    n(0, 0) = T(0.5); n(0, 2) = 0.5 * ir;
    n(1, 1) = -c1 * is1; n(1, 3) = ir * is1;
    n(2, 1) = T(1.0);
    n(3, 0) = T(0.5); n(3, 2) = -0.5 * ir;
    n(4, 4) = T(1.0);

    return matmul(transpose(matmul(ktp, n)), n); // N^T Ktp N with Ktp symmetric
}

// Adapted frame at (p, V) with V != 0 and V not parallel to p, as chart
// 5-vectors {X, A, Y, B, r^}.
template <class T>
inline std::array<std::array<T, 5>, 5> adapted_frame(Chart chart, const std::array<T, 2>& u,
                                                     const std::array<T, 3>& v, T& theta_out, T& r_out) {
    const auto p = embed_sphere<T>(chart, u);
    T rho = dot3<T>(v, v);
    if (value_of(rho) < 1e-16) throw FrameError("adapted frame undefined on the soul (V = 0)");
    T r = sqrt(rho);
    T ir = reciprocal(r);
    std::array<T, 3> vhat = {v[0] * ir, v[1] * ir, v[2] * ir};
    T ct = dot3<T>(p, vhat);
    if (std::abs(value_of(ct)) > 1.0 - 1e-10) throw FrameError("adapted frame degenerates at theta in {0, pi}");
    T theta = acos(ct);
    T st = sin(theta);
    T ist = reciprocal(st);

    std::array<T, 3> w3 = {(vhat[0] - ct * p[0]) * ist, (vhat[1] - ct * p[1]) * ist, (vhat[2] - ct * p[2]) * ist};
    const auto u3 = cross3<T>(w3, p);

    std::array<std::array<T, 5>, 5> frame{};
    // X = (-W, 0)
    {
        const auto t = sphere_tangent_to_chart<T>(chart, u, {-w3[0], -w3[1], -w3[2]});
        frame[0][0] = t[0];
        frame[0][1] = t[1];
    }
    // A = (U, 0)
    {
        const auto t = sphere_tangent_to_chart<T>(chart, u, u3);
        frame[1][0] = t[0];
        frame[1][1] = t[1];
    }
    // Y = (0, sin(theta) p - cos(theta) W)
    for (int i = 0; i < 3; ++i)
        frame[2][static_cast<std::size_t>(2 + i)] = st * p[static_cast<std::size_t>(i)] - ct * w3[static_cast<std::size_t>(i)];
    // B = (0, U)
    for (int i = 0; i < 3; ++i) frame[3][static_cast<std::size_t>(2 + i)] = u3[static_cast<std::size_t>(i)];
    // r^ = (0, V / r)
    for (int i = 0; i < 3; ++i) frame[4][static_cast<std::size_t>(2 + i)] = vhat[static_cast<std::size_t>(i)];

    theta_out = theta;
    r_out = r;
    return frame;
}

template <class T>
inline SmallMat<T, 5> closed_form_chart_metric(const MetricModel& model, Chart chart, const std::array<T, 2>& u,
                                               const std::array<T, 3>& v) {
    if (model.scale != 1.0 || !model.warp.flat())
        throw DomainError("closed-form reference metric is defined for scale 1 and the flat fiber");
    T theta{}, r{};
    const auto frame = adapted_frame<T>(chart, u, v, theta, r);
    const SmallMat<T, 5> mframe = frame_expression_matrix<T>(theta, r);

    // columns of F are the frame vectors in chart components
    SmallMat<T, 5> fmat;
    for (int col = 0; col < 5; ++col)
        for (int row = 0; row < 5; ++row) fmat(row, col) = frame[static_cast<std::size_t>(col)][static_cast<std::size_t>(row)];
    const SmallMat<T, 5> finv = lu_inverse<T, 5>(fmat);
    return matmul(transpose(finv), matmul(mframe, finv));
}

} // namespace detail_metric

// The 5x5 metric matrix of the configured family at chart coordinates (u, v),
// over double or jet scalars.
template <class T>
inline SmallMat<T, 5> metric_matrix(const MetricModel& model, Chart chart, const std::array<T, 2>& u,
                                    const std::array<T, 3>& v) {
    switch (model.family) {
        case Family::Product: return detail_metric::product_metric<T>(model, chart, u, v);
        case Family::CheegerSO3: return detail_metric::cheeger_metric<T>(model, chart, u, v);
        case Family::ClosedFormReference: return detail_metric::closed_form_chart_metric<T>(model, chart, u, v);
    }
    throw DomainError("unknown metric family");
}

// metric as jets of the requested degree, seeded at the chart point
template <int D>
inline SmallMat<Jet<D>, 5> metric_jets(const MetricModel& model, const ChartPoint& pt) {
    std::array<Jet<D>, 2> u = {Jet<D>::variable(pt.u[0], 0), Jet<D>::variable(pt.u[1], 1)};
    std::array<Jet<D>, 3> v = {Jet<D>::variable(pt.v[0], 2), Jet<D>::variable(pt.v[1], 3), Jet<D>::variable(pt.v[2], 4)};
    return metric_matrix<Jet<D>>(model, pt.chart, u, v);
}

SmallMat<Jet4, 5> metric_at(const MetricModel& model, const ChartPoint& pt);
Mat5 metric_value(const MetricModel& model, const ChartPoint& pt);

// Frame-basis metric matrix (reference normalization: scale 1, flat fiber).
Mat5 closed_form_metric(double theta, double radius = 1.0);

// The two displayed horizontal spanning vectors {X + Y/2, A + cos(theta) B/2}
// at a point off the soul, as chart 5-vectors.
std::array<Vec5, 2> horizontal_space(const MetricModel& model, const ChartPoint& pt);

// Gram-orthonormalized adapted frame at a soul point. seed_tangent seeds X
// (chart u-components); Y completes the pair so the tangent orientation
// matches the outward orientation of the sphere factor. seed_normal seeds the
// W axis (fiber components); V completes, U = V x W.
SoulFrame soul_frame(const MetricModel& model, const ChartPoint& pt,
                     const std::array<double, 2>& seed_tangent = {1.0, 0.0},
                     const std::array<double, 3>& seed_normal = {0.0, 0.0, 1.0});

// SPD check helper: smallest eigenvalue of the metric at a point.
double metric_smallest_eigenvalue(const MetricModel& model, const ChartPoint& pt);

} // namespace soulcurv

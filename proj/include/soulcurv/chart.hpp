#pragma once

#include <array>
#include <cmath>
#include <string>

#include "soulcurv/errors.hpp"
#include "soulcurv/jet.hpp"
#include "soulcurv/linalg.hpp"

namespace soulcurv {

// Two stereographic charts cover S^2 x R^3: "north" projects from the north
// pole (u = 0 sits at the south pole), "south" from the south pole. The R^3
// factor keeps Cartesian coordinates (v1, v2, v3) in both charts.
enum class Chart { North, South };

inline const char* chart_name(Chart c) { return c == Chart::North ? "north-stereographic" : "south-stereographic"; }

struct ChartPoint {
    Chart chart = Chart::North;
    std::array<double, 2> u{};
    std::array<double, 3> v{};

    std::array<double, 5> coords() const { return {u[0], u[1], v[0], v[1], v[2]}; }
};

inline ChartPoint make_point(Chart c, double u0, double u1, double v0 = 0.0, double v1 = 0.0, double v2 = 0.0) {
    return ChartPoint{c, {u0, u1}, {v0, v1, v2}};
}

template <class T>
inline std::array<T, 3> embed_sphere(Chart chart, const std::array<T, 2>& u) {
    const double sign = (chart == Chart::North) ? 1.0 : -1.0;
    T s = u[0] * u[0] + u[1] * u[1];
    T w = s + 1.0;
    T iw = reciprocal(w);
    return {2.0 * u[0] * iw, 2.0 * u[1] * iw, sign * (s - 1.0) * iw};
}

// Columns d(embed)/du_i; stereographic charts are conformal with
// |col_i|^2 = 4/w^2 and col_0 . col_1 = 0.
template <class T>
inline std::array<std::array<T, 3>, 2> embed_jacobian(Chart chart, const std::array<T, 2>& u) {
    const double sign = (chart == Chart::North) ? 1.0 : -1.0;
    T s = u[0] * u[0] + u[1] * u[1];
    T w = s + 1.0;
    T iw2 = reciprocal(w * w);
    std::array<std::array<T, 3>, 2> j;
    j[0] = {2.0 * (1.0 + u[1] * u[1] - u[0] * u[0]) * iw2, -4.0 * u[0] * u[1] * iw2, sign * 4.0 * u[0] * iw2};
    j[1] = {-4.0 * u[0] * u[1] * iw2, 2.0 * (1.0 + u[0] * u[0] - u[1] * u[1]) * iw2, sign * 4.0 * u[1] * iw2};
    return j;
}

// Ambient tangent (tangent to the sphere at the chart point) -> chart
// components, using conformality: t = (w^2/4) J^T tau.
template <class T>
inline std::array<T, 2> sphere_tangent_to_chart(Chart chart, const std::array<T, 2>& u, const std::array<T, 3>& tau) {
    const auto j = embed_jacobian<T>(chart, u);
    T s = u[0] * u[0] + u[1] * u[1];
    T w = s + 1.0;
    T f = w * w * 0.25;
    std::array<T, 2> t;
    for (int i = 0; i < 2; ++i)
        t[static_cast<std::size_t>(i)] =
            f * (j[static_cast<std::size_t>(i)][0] * tau[0] + j[static_cast<std::size_t>(i)][1] * tau[1] +
                 j[static_cast<std::size_t>(i)][2] * tau[2]);
    return t;
}

template <class T>
inline std::array<T, 3> chart_tangent_to_sphere(Chart chart, const std::array<T, 2>& u, const std::array<T, 2>& t) {
    const auto j = embed_jacobian<T>(chart, u);
    std::array<T, 3> tau;
    for (int k = 0; k < 3; ++k)
        tau[static_cast<std::size_t>(k)] = j[0][static_cast<std::size_t>(k)] * t[0] + j[1][static_cast<std::size_t>(k)] * t[1];
    return tau;
}

inline std::array<double, 2> project_sphere(Chart chart, const Vec3& p) {
    const double d = (chart == Chart::North) ? (1.0 - p[2]) : (1.0 + p[2]);
    if (std::abs(d) < 1e-12) throw ChartError(std::string("point at the ") + chart_name(chart) + " projection pole");
    return {p[0] / d, p[1] / d};
}

inline Chart preferred_chart(const Vec3& p) { return p[2] <= 0.0 ? Chart::North : Chart::South; }

inline ChartPoint point_from_ambient(const Vec3& p, const Vec3& v, Chart chart) {
    const auto u = project_sphere(chart, p);
    return ChartPoint{chart, u, v};
}

inline ChartPoint point_from_ambient(const Vec3& p, const Vec3& v) {
    return point_from_ambient(p, v, preferred_chart(p));
}

inline Chart other_chart(Chart c) { return c == Chart::North ? Chart::South : Chart::North; }

// u' = u/|u|^2 in the opposite chart; v unchanged.
inline ChartPoint transition(const ChartPoint& pt) {
    const double s = pt.u[0] * pt.u[0] + pt.u[1] * pt.u[1];
    if (s < 1e-14) throw ChartError("chart transition at the projection pole of the target chart");
    return ChartPoint{other_chart(pt.chart), {pt.u[0] / s, pt.u[1] / s}, pt.v};
}

// Jacobian of u -> u/|u|^2 (the same formula in both directions).
inline Mat2 transition_jacobian(const std::array<double, 2>& u) {
    const double s = u[0] * u[0] + u[1] * u[1];
    Mat2 j;
    j(0, 0) = (s - 2.0 * u[0] * u[0]) / (s * s);
    j(0, 1) = (-2.0 * u[0] * u[1]) / (s * s);
    j(1, 0) = j(0, 1);
    j(1, 1) = (s - 2.0 * u[1] * u[1]) / (s * s);
    return j;
}

// transported 5-velocity across the chart switch
inline Vec5 transition_velocity(const ChartPoint& pt, const Vec5& vel) {
    const Mat2 j = transition_jacobian(pt.u);
    return {j(0, 0) * vel[0] + j(0, 1) * vel[1], j(1, 0) * vel[0] + j(1, 1) * vel[1], vel[2], vel[3], vel[4]};
}

// Position of the sphere factor in R^3 plus the fiber point: used for
// chart-independent distances and loop-closure checks.
inline std::pair<Vec3, Vec3> ambient_pair(const ChartPoint& pt) {
    return {embed_sphere<double>(pt.chart, pt.u), pt.v};
}

inline double ambient_distance(const ChartPoint& a, const ChartPoint& b) {
    const auto [pa, va] = ambient_pair(a);
    const auto [pb, vb] = ambient_pair(b);
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        s += (pa[static_cast<std::size_t>(i)] - pb[static_cast<std::size_t>(i)]) *
             (pa[static_cast<std::size_t>(i)] - pb[static_cast<std::size_t>(i)]);
        s += (va[static_cast<std::size_t>(i)] - vb[static_cast<std::size_t>(i)]) *
             (va[static_cast<std::size_t>(i)] - vb[static_cast<std::size_t>(i)]);
    }
    return std::sqrt(s);
}

// Chart 5-vector -> (sphere tangent in R^3, fiber vector in R^3).
inline std::pair<Vec3, Vec3> vector_to_ambient(const ChartPoint& pt, const Vec5& x) {
    const auto tau = chart_tangent_to_sphere<double>(pt.chart, pt.u, {x[0], x[1]});
    return {tau, Vec3{x[2], x[3], x[4]}};
}

inline Vec5 vector_from_ambient(const ChartPoint& pt, const Vec3& tau, const Vec3& f) {
    const auto t = sphere_tangent_to_chart<double>(pt.chart, pt.u, tau);
    return {t[0], t[1], f[0], f[1], f[2]};
}

} // namespace soulcurv

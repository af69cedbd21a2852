#pragma once

#include <functional>
#include <vector>

#include "soulcurv/jet.hpp"
#include "soulcurv/linalg.hpp"

namespace soulcurv {

// Family of connections nabla = flat + lambda * (Phi o df) on the trivial
// R^3-bundle over S^2, parameterized by a base map f from a differentiable
// catalog and a real lambda.
enum class BaseMap { Identity, Rotated, LatitudeReparam };

struct ConnectionFamily {
    BaseMap map = BaseMap::Identity;
    double lambda = -0.5;
    Mat3 rotation = Mat3::identity(); // Rotated: f = R o id
    double reparam_eps = 0.0;         // LatitudeReparam: rho(theta) = theta + eps sin(2 theta), |eps| < 1/2
};

// f over double or jet scalars; LatitudeReparam is undefined at the poles.
template <class T>
inline std::array<T, 3> base_map_eval(const ConnectionFamily& fam, const std::array<T, 3>& p) {
    switch (fam.map) {
        case BaseMap::Identity:
            return p;
        case BaseMap::Rotated: {
            std::array<T, 3> r{};
            for (int i = 0; i < 3; ++i) {
                T s = T(0.0);
                for (int j = 0; j < 3; ++j) s += fam.rotation(i, j) * p[static_cast<std::size_t>(j)];
                r[static_cast<std::size_t>(i)] = s;
            }
            return r;
        }
        case BaseMap::LatitudeReparam: {
            const T z = p[2];
            if (std::abs(value_of(z)) > 1.0 - 1e-6)
                throw DomainError("latitude-reparameterized map evaluated at a pole");
            T theta = acos(z);
            T rho = theta + fam.reparam_eps * sin(2.0 * theta);
            T st = sin(theta);
            T f = sin(rho) * reciprocal(st);
            return {p[0] * f, p[1] * f, cos(rho)};
        }
    }
    throw DomainError("unknown base map");
}

// tangent map df_p(X) via a one-variable jet along the great circle in the
// direction X (X tangent at p, |p| = 1)
Vec3 base_map_differential(const ConnectionFamily& fam, const Vec3& p, const Vec3& x);

// Phi(p, X) W = <p,W> X - <X,W> p, the canonical skew matrix.
Mat3 phi(const Vec3& p, const Vec3& x);

// connection difference form D_X = Phi(f(p), df(X))
Mat3 difference_form(const ConnectionFamily& fam, const Vec3& p, const Vec3& x);

// sections are jet-evaluable maps R^3 -> R^3 restricted to the sphere
using Section = std::function<std::array<Jet1, 3>(const std::array<Jet1, 3>&)>;

// nabla_X s = flat derivative along the great circle + lambda D_X s(p)
Vec3 covariant_derivative(const ConnectionFamily& fam, const Vec3& p, const Vec3& x, const Section& s);

struct ConnectionCurvature {
    Mat3 matrix; // R(X,Y) as an operator on the fiber
    double norm; // |lambda^2 + 2 lambda| * |Xbar wedge Ybar|
};

ConnectionCurvature curvature_closed_form(const ConnectionFamily& fam, const Vec3& p, const Vec3& x, const Vec3& y);

// ambient-parameterized base curve t -> (p(t), p'(t)) on the unit sphere
using AmbientCurve = std::function<void(double, Vec3&, Vec3&)>;

// transport operator of the family connection along the curve
Mat3 family_transport(const ConnectionFamily& fam, const AmbientCurve& curve, double t0, double t1,
                      double rel_tol = 1e-11);

// holonomy log of the rectangle spanned by (h X, h Y) in stereographic
// coordinates at p, divided by the signed coordinate area; matches the closed
// form to O(h^2).
Mat3 curvature_via_loops(const ConnectionFamily& fam, const Vec3& p, const Vec3& x, const Vec3& y, double h);

// max |P_gamma f(p0) - f(gamma(end))| over a seeded family of arcs: zero when
// f is a parallel section (lambda = -1)
double section_parallel_deviation(const ConnectionFamily& fam, int arcs, double seed_offset);

struct FamilyHolonomy {
    int dimension = 0;
    std::vector<double> singular_values;
    double fixes_base_section; // max |Q f(p0) - f(p0)| over loops
};

FamilyHolonomy family_holonomy(const ConnectionFamily& fam, int loops, double seed_offset, double threshold = 1e-5);

} // namespace soulcurv

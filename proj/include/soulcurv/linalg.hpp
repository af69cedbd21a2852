#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "soulcurv/errors.hpp"
#include "soulcurv/jet.hpp"

namespace soulcurv {

template <class T, int N>
using SmallVec = std::array<T, static_cast<std::size_t>(N)>;

// Dense n x n matrix over double or jets, n <= 8.
template <class T, int N>
struct SmallMat {
    std::array<T, static_cast<std::size_t>(N) * N> a{};

    T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * N + static_cast<std::size_t>(j)]; }
    const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * N + static_cast<std::size_t>(j)]; }

    static SmallMat identity() {
        SmallMat m;
        for (int i = 0; i < N; ++i) m(i, i) = T(1.0);
        return m;
    }
};

template <class T, int N>
inline SmallVec<T, N> matvec(const SmallMat<T, N>& m, const SmallVec<T, N>& x) {
    SmallVec<T, N> r{};
    for (int i = 0; i < N; ++i) {
        T s = T(0.0);
        for (int j = 0; j < N; ++j) s += m(i, j) * x[static_cast<std::size_t>(j)];
        r[static_cast<std::size_t>(i)] = s;
    }
    return r;
}

template <class T, int N>
inline SmallMat<T, N> matmul(const SmallMat<T, N>& a, const SmallMat<T, N>& b) {
    SmallMat<T, N> r;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            T s = T(0.0);
            for (int k = 0; k < N; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

template <class T, int N>
inline SmallMat<T, N> transpose(const SmallMat<T, N>& m) {
    SmallMat<T, N> r;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) r(i, j) = m(j, i);
    return r;
}

template <class T, int N>
inline T dot(const SmallVec<T, N>& x, const SmallVec<T, N>& y) {
    T s = T(0.0);
    for (int i = 0; i < N; ++i) s += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    return s;
}

// inner product x^T M y
template <class T, int N>
inline T inner(const SmallMat<T, N>& m, const SmallVec<T, N>& x, const SmallVec<T, N>& y) {
    return dot<T, N>(x, matvec(m, y));
}

// Cholesky factor (lower). Pivot values are checked against 1e-10 so a
// near-singular metric surfaces as a factorization error, never a NaN.
template <class T, int N>
inline SmallMat<T, N> cholesky(const SmallMat<T, N>& m) {
    SmallMat<T, N> L;
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j <= i; ++j) {
            T s = m(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            if (i == j) {
                if (value_of(s) < 1e-10) throw FactorizationError(i, value_of(s));
                L(i, i) = sqrt(s);
            } else {
                L(i, j) = s / L(j, j);
            }
        }
    }
    return L;
}

template <class T, int N>
inline SmallVec<T, N> cholesky_solve(const SmallMat<T, N>& L, const SmallVec<T, N>& b) {
    SmallVec<T, N> y{};
    for (int i = 0; i < N; ++i) {
        T s = b[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) s -= L(i, k) * y[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(i)] = s / L(i, i);
    }
    SmallVec<T, N> x{};
    for (int i = N - 1; i >= 0; --i) {
        T s = y[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < N; ++k) s -= L(k, i) * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = s / L(i, i);
    }
    return x;
}

// Solve A x = b for symmetric positive definite A.
template <class T, int N>
inline SmallVec<T, N> solve_spd(const SmallMat<T, N>& a, const SmallVec<T, N>& b) {
    return cholesky_solve(cholesky(a), b);
}

template <class T, int N>
inline SmallMat<T, N> spd_inverse(const SmallMat<T, N>& a) {
    const SmallMat<T, N> L = cholesky(a);
    SmallMat<T, N> inv;
    for (int col = 0; col < N; ++col) {
        SmallVec<T, N> e{};
        e[static_cast<std::size_t>(col)] = T(1.0);
        const SmallVec<T, N> x = cholesky_solve(L, e);
        for (int i = 0; i < N; ++i) inv(i, col) = x[static_cast<std::size_t>(i)];
    }
    // enforce symmetry of the output
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < i; ++j) {
            T s = (inv(i, j) + inv(j, i)) * 0.5;
            inv(i, j) = s;
            inv(j, i) = s;
        }
    return inv;
}

// LU with partial pivoting (pivot chosen on the value part), for general
// small systems like frame-basis changes. Throws on numerically singular input.
template <class T, int N>
inline SmallVec<T, N> lu_solve(SmallMat<T, N> a, SmallVec<T, N> b) {
    std::array<int, N> perm{};
    for (int i = 0; i < N; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int col = 0; col < N; ++col) {
        int piv = col;
        double best = std::abs(value_of(a(col, col)));
        for (int r = col + 1; r < N; ++r) {
            const double m = std::abs(value_of(a(r, col)));
            if (m > best) { best = m; piv = r; }
        }
        if (best < 1e-10) throw FactorizationError(col, best);
        if (piv != col) {
            for (int j = 0; j < N; ++j) std::swap(a(col, j), a(piv, j));
            std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(piv)]);
        }
        for (int r = col + 1; r < N; ++r) {
            T f = a(r, col) / a(col, col);
            a(r, col) = f;
            for (int j = col + 1; j < N; ++j) a(r, j) -= f * a(col, j);
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    SmallVec<T, N> x{};
    for (int i = N - 1; i >= 0; --i) {
        T s = b[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < N; ++j) s -= a(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / a(i, i);
    }
    return x;
}

template <class T, int N>
inline SmallMat<T, N> lu_inverse(const SmallMat<T, N>& a) {
    SmallMat<T, N> inv;
    for (int col = 0; col < N; ++col) {
        SmallVec<T, N> e{};
        e[static_cast<std::size_t>(col)] = T(1.0);
        const SmallVec<T, N> x = lu_solve<T, N>(a, e);
        for (int i = 0; i < N; ++i) inv(i, col) = x[static_cast<std::size_t>(i)];
    }
    return inv;
}

// ---------------------------------------------------------------------------
// double-only helpers
// ---------------------------------------------------------------------------

using Vec2 = SmallVec<double, 2>;
using Vec3 = SmallVec<double, 3>;
using Vec5 = SmallVec<double, 5>;
using Mat2 = SmallMat<double, 2>;
using Mat3 = SmallMat<double, 3>;
using Mat5 = SmallMat<double, 5>;

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

template <int N>
inline double norm(const SmallVec<double, N>& v) {
    return std::sqrt(dot<double, N>(v, v));
}

template <int N>
inline SmallVec<double, N> normalized(const SmallVec<double, N>& v) {
    const double n = norm<N>(v);
    if (n < 1e-14) throw DomainError("normalizing a zero vector");
    SmallVec<double, N> r = v;
    for (auto& x : r) x /= n;
    return r;
}

template <int N>
inline SmallVec<double, N> scale(const SmallVec<double, N>& v, double s) {
    SmallVec<double, N> r = v;
    for (auto& x : r) x *= s;
    return r;
}

template <int N>
inline SmallVec<double, N> add(const SmallVec<double, N>& a, const SmallVec<double, N>& b) {
    SmallVec<double, N> r;
    for (int i = 0; i < N; ++i) r[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(i)];
    return r;
}

template <int N>
inline SmallVec<double, N> sub(const SmallVec<double, N>& a, const SmallVec<double, N>& b) {
    SmallVec<double, N> r;
    for (int i = 0; i < N; ++i) r[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
    return r;
}

// Cyclic Jacobi eigen-decomposition for symmetric matrices.
template <int N>
inline void jacobi_eigen(SmallMat<double, N> a, SmallVec<double, N>& values, SmallMat<double, N>& vectors) {
    vectors = SmallMat<double, N>::identity();
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < N; ++p)
            for (int q = p + 1; q < N; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-26) break;
        for (int p = 0; p < N; ++p) {
            for (int q = p + 1; q < N; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double cth = 1.0 / std::sqrt(t * t + 1.0);
                const double sth = t * cth;
                for (int k = 0; k < N; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = cth * akp - sth * akq;
                    a(k, q) = sth * akp + cth * akq;
                }
                for (int k = 0; k < N; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = cth * apk - sth * aqk;
                    a(q, k) = sth * apk + cth * aqk;
                }
                for (int k = 0; k < N; ++k) {
                    const double vkp = vectors(k, p), vkq = vectors(k, q);
                    vectors(k, p) = cth * vkp - sth * vkq;
                    vectors(k, q) = sth * vkp + cth * vkq;
                }
            }
        }
    }
    for (int i = 0; i < N; ++i) values[static_cast<std::size_t>(i)] = a(i, i);
}

template <int N>
inline double smallest_eigenvalue(const SmallMat<double, N>& m) {
    SmallVec<double, N> values{};
    SmallMat<double, N> vectors;
    jacobi_eigen<N>(m, values, vectors);
    double mn = values[0];
    for (int i = 1; i < N; ++i) mn = std::min(mn, values[static_cast<std::size_t>(i)]);
    return mn;
}

// Gram-Schmidt against an arbitrary SPD inner product matrix; vectors are
// columns of the returned list.
template <int N>
inline std::vector<SmallVec<double, N>> gram_schmidt(const SmallMat<double, N>& g,
                                                     const std::vector<SmallVec<double, N>>& seeds,
                                                     double degeneracy_tol = 1e-10) {
    std::vector<SmallVec<double, N>> out;
    for (const auto& s : seeds) {
        SmallVec<double, N> v = s;
        for (const auto& e : out) {
            const double c = inner<double, N>(g, e, v);
            for (int i = 0; i < N; ++i) v[static_cast<std::size_t>(i)] -= c * e[static_cast<std::size_t>(i)];
        }
        const double n2 = inner<double, N>(g, v, v);
        if (n2 < degeneracy_tol) throw FrameError("Gram-Schmidt seed is degenerate");
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& x : v) x *= inv;
        out.push_back(v);
    }
    return out;
}

// skew 3x3 <-> axis vector: A z = axis x z
inline Mat3 skew_from_axis(const Vec3& w) {
    Mat3 m;
    m(0, 1) = -w[2]; m(0, 2) = w[1];
    m(1, 0) = w[2];  m(1, 2) = -w[0];
    m(2, 0) = -w[1]; m(2, 1) = w[0];
    return m;
}

inline Vec3 axis_from_skew(const Mat3& m) {
    return {0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1))};
}

// Rodrigues rotation about a (not necessarily unit) angular-velocity vector.
inline Mat3 rotation_exp(const Vec3& w) {
    const double th = norm<3>(w);
    Mat3 r = Mat3::identity();
    if (th < 1e-300) return r;
    const Vec3 u = {w[0] / th, w[1] / th, w[2] / th};
    const Mat3 k = skew_from_axis(u);
    const Mat3 k2 = matmul(k, k);
    const double s = std::sin(th), c1 = 1.0 - std::cos(th);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) += s * k(i, j) + c1 * k2(i, j);
    return r;
}

// Matrix logarithm of a rotation, robust near angle pi (axis sign there is a
// genuine branch choice; callers that only need the span never notice).
inline Vec3 rotation_log(const Mat3& q) {
    const double tr = q(0, 0) + q(1, 1) + q(2, 2);
    double cth = (tr - 1.0) * 0.5;
    cth = std::max(-1.0, std::min(1.0, cth));
    const double th = std::acos(cth);
    if (th < 1e-8) {
        // log(Q) ~ skew part
        const Mat3 s = q;
        return {0.5 * (s(2, 1) - s(1, 2)), 0.5 * (s(0, 2) - s(2, 0)), 0.5 * (s(1, 0) - s(0, 1))};
    }
    if (th > M_PI - 1e-4) {
        // near pi: axis from the dominant column of Q + I
        Mat3 b = q;
        for (int i = 0; i < 3; ++i) b(i, i) += 1.0;
        int col = 0;
        double best = 0.0;
        for (int j = 0; j < 3; ++j) {
            double n2 = 0.0;
            for (int i = 0; i < 3; ++i) n2 += b(i, j) * b(i, j);
            if (n2 > best) { best = n2; col = j; }
        }
        Vec3 u = {b(0, col), b(1, col), b(2, col)};
        u = normalized<3>(u);
        // fix sign with the skew part when it is not numerically zero
        const Vec3 s = {0.5 * (q(2, 1) - q(1, 2)), 0.5 * (q(0, 2) - q(2, 0)), 0.5 * (q(1, 0) - q(0, 1))};
        if (dot<double, 3>(u, s) < 0.0) u = scale<3>(u, -1.0);
        return scale<3>(u, th);
    }
    const double f = th / (2.0 * std::sin(th));
    return {f * (q(2, 1) - q(1, 2)), f * (q(0, 2) - q(2, 0)), f * (q(1, 0) - q(0, 1))};
}

// Nearest rotation (polar projection via Gram-Schmidt + determinant fix).
inline Mat3 project_to_rotation(const Mat3& m) {
    std::vector<Vec3> cols;
    for (int j = 0; j < 3; ++j) cols.push_back({m(0, j), m(1, j), m(2, j)});
    auto on = gram_schmidt<3>(Mat3::identity(), cols);
    Mat3 r;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) r(i, j) = on[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    // det must be +1 for a proper rotation
    const double det = r(0, 0) * (r(1, 1) * r(2, 2) - r(1, 2) * r(2, 1)) -
                       r(0, 1) * (r(1, 0) * r(2, 2) - r(1, 2) * r(2, 0)) +
                       r(0, 2) * (r(1, 0) * r(2, 1) - r(1, 1) * r(2, 0));
    if (det < 0.0)
        for (int i = 0; i < 3; ++i) r(i, 2) = -r(i, 2);
    return r;
}

template <int N>
inline double max_abs_diff(const SmallMat<double, N>& a, const SmallMat<double, N>& b) {
    double m = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

template <int N>
inline double frobenius(const SmallMat<double, N>& a) {
    double s = 0.0;
    for (const auto& x : a.a) s += x * x;
    return std::sqrt(s);
}

} // namespace soulcurv

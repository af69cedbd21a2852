#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "soulcurv/errors.hpp"

namespace soulcurv {

// Truncated multivariate Taylor arithmetic ("jets") in a fixed arity of 5
// chart variables. The degree is a template parameter: D=4 carries every
// metric partial needed for the second covariant derivative of the curvature
// tensor, D=1 is enough for Christoffel symbols inside ODE right-hand sides.
//
// Coefficient c[idx(alpha)] stores the Taylor coefficient of the monomial
// x^alpha, i.e. (d^alpha f)(x0) / alpha!.

inline constexpr int kJetVars = 5;

constexpr int jet_coeff_count(int degree) {
    // C(degree + 5, 5)
    int n = 1;
    for (int i = 1; i <= kJetVars; ++i) n = n * (degree + i) / i;
    return n;
}

namespace detail {

struct MultTriple {
    std::uint16_t a, b, r;
};

struct DerivEntry {
    std::uint16_t target, source;
    double factor;
};

template <int D>
struct JetTables {
    static constexpr int NC = jet_coeff_count(D);

    std::vector<std::array<std::uint8_t, kJetVars>> exps;
    std::array<std::int16_t, 3125> key_to_idx; // base-5 exponent key
    std::vector<MultTriple> mult;
    std::array<std::vector<DerivEntry>, kJetVars> deriv;
    std::array<int, kJetVars> var_index; // index of the degree-1 monomial e_v

    static int key(const std::array<std::uint8_t, kJetVars>& e) {
        int k = 0;
        for (int v = 0; v < kJetVars; ++v) k = k * 5 + e[v];
        return k;
    }

    JetTables() {
        key_to_idx.fill(-1);
        std::array<std::uint8_t, kJetVars> e{};
        for (int d = 0; d <= D; ++d) enumerate(d, 0, d, e);
        for (int i = 0; i < static_cast<int>(exps.size()); ++i)
            key_to_idx[static_cast<std::size_t>(key(exps[i]))] = static_cast<std::int16_t>(i);
        for (int v = 0; v < kJetVars; ++v) {
            e.fill(0);
            e[static_cast<std::size_t>(v)] = 1;
            var_index[static_cast<std::size_t>(v)] = key_to_idx[static_cast<std::size_t>(key(e))];
        }
        build_mult();
        build_deriv();
    }

    JetTables(const JetTables&) = delete;

    static const JetTables& instance() {
        static const JetTables tables;
        return tables;
    }

private:
    void enumerate(int remaining, int var, int degree, std::array<std::uint8_t, kJetVars>& e) {
        if (var == kJetVars - 1) {
            e[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(remaining);
            if (total(e) == degree) exps.push_back(e);
            e[static_cast<std::size_t>(var)] = 0;
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            e[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(k);
            enumerate(remaining - k, var + 1, degree, e);
        }
        e[static_cast<std::size_t>(var)] = 0;
    }

    static int total(const std::array<std::uint8_t, kJetVars>& e) {
        int t = 0;
        for (auto x : e) t += x;
        return t;
    }

    void build_mult() {
        const int n = static_cast<int>(exps.size());
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (total(exps[static_cast<std::size_t>(i)]) + total(exps[static_cast<std::size_t>(j)]) > D) continue;
                std::array<std::uint8_t, kJetVars> s{};
                for (int v = 0; v < kJetVars; ++v)
                    s[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(
                        exps[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)] +
                        exps[static_cast<std::size_t>(j)][static_cast<std::size_t>(v)]);
                mult.push_back({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j),
                                static_cast<std::uint16_t>(key_to_idx[static_cast<std::size_t>(key(s))])});
            }
        }
    }

    void build_deriv() {
        const int n = static_cast<int>(exps.size());
        for (int v = 0; v < kJetVars; ++v) {
            for (int t = 0; t < n; ++t) {
                if (total(exps[static_cast<std::size_t>(t)]) >= D) continue; // top degree has no stored derivative
                std::array<std::uint8_t, kJetVars> s = exps[static_cast<std::size_t>(t)];
                s[static_cast<std::size_t>(v)]++;
                const int src = key_to_idx[static_cast<std::size_t>(key(s))];
                deriv[static_cast<std::size_t>(v)].push_back(
                    {static_cast<std::uint16_t>(t), static_cast<std::uint16_t>(src),
                     static_cast<double>(exps[static_cast<std::size_t>(t)][static_cast<std::size_t>(v)] + 1)});
            }
        }
    }
};

} // namespace detail

template <int D>
struct Jet {
    static constexpr int degree = D;
    static constexpr int NC = jet_coeff_count(D);

    std::array<double, NC> c{};

    Jet() = default;
    Jet(double v) { c[0] = v; } // NOLINT: implicit by design, constants promote

    double value() const { return c[0]; }

    static Jet variable(double v, int var) {
        Jet j(v);
        j.c[static_cast<std::size_t>(detail::JetTables<D>::instance().var_index[static_cast<std::size_t>(var)])] = 1.0;
        return j;
    }

    // Taylor coefficient of x^alpha.
    double coeff(const std::array<int, kJetVars>& alpha) const {
        std::array<std::uint8_t, kJetVars> e{};
        int total = 0;
        for (int v = 0; v < kJetVars; ++v) {
            e[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(alpha[static_cast<std::size_t>(v)]);
            total += alpha[static_cast<std::size_t>(v)];
        }
        if (total > D) throw UnsupportedOrderError("jet coefficient beyond truncation degree");
        const auto idx = detail::JetTables<D>::instance().key_to_idx[static_cast<std::size_t>(detail::JetTables<D>::key(e))];
        return c[static_cast<std::size_t>(idx)];
    }

    Jet& operator+=(const Jet& o) {
        for (int i = 0; i < NC; ++i) c[static_cast<std::size_t>(i)] += o.c[static_cast<std::size_t>(i)];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int i = 0; i < NC; ++i) c[static_cast<std::size_t>(i)] -= o.c[static_cast<std::size_t>(i)];
        return *this;
    }
    Jet& operator*=(double s) {
        for (auto& x : c) x *= s;
        return *this;
    }
    Jet operator-() const {
        Jet r;
        for (int i = 0; i < NC; ++i) r.c[static_cast<std::size_t>(i)] = -c[static_cast<std::size_t>(i)];
        return r;
    }
};

template <int D>
inline Jet<D> operator+(Jet<D> a, const Jet<D>& b) { return a += b; }
template <int D>
inline Jet<D> operator-(Jet<D> a, const Jet<D>& b) { return a -= b; }

template <int D>
inline Jet<D> operator*(const Jet<D>& a, const Jet<D>& b) {
    Jet<D> r;
    for (const auto& t : detail::JetTables<D>::instance().mult)
        r.c[t.r] += a.c[t.a] * b.c[t.b];
    return r;
}

template <int D>
inline Jet<D> operator*(Jet<D> a, double s) { return a *= s; }
template <int D>
inline Jet<D> operator*(double s, Jet<D> a) { return a *= s; }
template <int D>
inline Jet<D> operator+(Jet<D> a, double s) { a.c[0] += s; return a; }
template <int D>
inline Jet<D> operator+(double s, Jet<D> a) { a.c[0] += s; return a; }
template <int D>
inline Jet<D> operator-(Jet<D> a, double s) { a.c[0] -= s; return a; }
template <int D>
inline Jet<D> operator-(double s, const Jet<D>& a) { Jet<D> r = -a; r.c[0] += s; return r; }

// f(u) from the derivative list f^(k)(u0), k = 0..D, via Horner on (u - u0).
template <int D>
inline Jet<D> jet_compose(const Jet<D>& u, const std::array<double, D + 1>& derivs) {
    Jet<D> h = u;
    h.c[0] = 0.0;
    // Taylor coefficients f^(k)/k!
    std::array<double, D + 1> a{};
    double fact = 1.0;
    for (int k = 0; k <= D; ++k) {
        if (k > 0) fact *= k;
        a[static_cast<std::size_t>(k)] = derivs[static_cast<std::size_t>(k)] / fact;
    }
    Jet<D> r(a[D]);
    for (int k = D - 1; k >= 0; --k) r = r * h + a[static_cast<std::size_t>(k)];
    return r;
}

template <int D>
inline Jet<D> reciprocal(const Jet<D>& u) {
    const double x = u.value();
    if (std::abs(x) < 1e-10)
        throw DomainError("jet reciprocal: value part within 1e-10 of zero");
    // d_k = (-1)^k k! / x^{k+1}
    std::array<double, D + 1> d{};
    double dk = 1.0 / x;
    d[0] = dk;
    for (int k = 1; k <= D; ++k) {
        dk *= -k / x;
        d[static_cast<std::size_t>(k)] = dk;
    }
    return jet_compose(u, d);
}

template <int D>
inline Jet<D> operator/(const Jet<D>& a, const Jet<D>& b) { return a * reciprocal(b); }
template <int D>
inline Jet<D> operator/(Jet<D> a, double s) { return a *= (1.0 / s); }
template <int D>
inline Jet<D> operator/(double s, const Jet<D>& b) { return reciprocal(b) * s; }

template <int D>
inline Jet<D> sqrt(const Jet<D>& u) {
    const double x = u.value();
    if (x <= 0.0) throw DomainError("jet sqrt of non-positive value");
    // d_k = sqrt(x) * prod_{j=0}^{k-1}(1/2 - j) / x^k
    std::array<double, D + 1> d{};
    d[0] = std::sqrt(x);
    double prod = 1.0;
    for (int k = 1; k <= D; ++k) {
        prod *= (0.5 - (k - 1));
        d[static_cast<std::size_t>(k)] = d[0] * prod / std::pow(x, k);
    }
    return jet_compose(u, d);
}

template <int D>
inline Jet<D> exp(const Jet<D>& u) {
    std::array<double, D + 1> d{};
    const double e = std::exp(u.value());
    for (int k = 0; k <= D; ++k) d[static_cast<std::size_t>(k)] = e;
    return jet_compose(u, d);
}

template <int D>
inline Jet<D> log(const Jet<D>& u) {
    const double x = u.value();
    if (x <= 0.0) throw DomainError("jet log of non-positive value");
    std::array<double, D + 1> d{};
    d[0] = std::log(x);
    double fact = 1.0;
    for (int k = 1; k <= D; ++k) {
        if (k > 1) fact *= (k - 1);
        d[static_cast<std::size_t>(k)] = std::pow(-1.0, k - 1) * fact / std::pow(x, k);
    }
    return jet_compose(u, d);
}

template <int D>
inline Jet<D> sin(const Jet<D>& u) {
    std::array<double, D + 1> d{};
    const double s = std::sin(u.value()), c = std::cos(u.value());
    const double cycle[4] = {s, c, -s, -c};
    for (int k = 0; k <= D; ++k) d[static_cast<std::size_t>(k)] = cycle[k % 4];
    return jet_compose(u, d);
}

template <int D>
inline Jet<D> cos(const Jet<D>& u) {
    std::array<double, D + 1> d{};
    const double s = std::sin(u.value()), c = std::cos(u.value());
    const double cycle[4] = {c, -s, -c, s};
    for (int k = 0; k <= D; ++k) d[static_cast<std::size_t>(k)] = cycle[k % 4];
    return jet_compose(u, d);
}

template <int D>
inline Jet<D> acos(const Jet<D>& u) {
    const double z = u.value();
    if (std::abs(z) >= 1.0 - 1e-12) throw DomainError("jet acos at domain endpoint");
    const double w = 1.0 - z * z;
    std::array<double, D + 1> d{};
    d[0] = std::acos(z);
    if constexpr (D >= 1) d[1] = -1.0 / std::sqrt(w);
    if constexpr (D >= 2) d[2] = -z / std::pow(w, 1.5);
    if constexpr (D >= 3) d[3] = -(1.0 + 2.0 * z * z) / std::pow(w, 2.5);
    if constexpr (D >= 4) d[4] = -z * (9.0 + 6.0 * z * z) / std::pow(w, 3.5);
    return jet_compose(u, d);
}

template <int D>
inline Jet<D> pow(const Jet<D>& u, double a) {
    const double x = u.value();
    if (x <= 0.0) throw DomainError("jet pow with non-positive base");
    std::array<double, D + 1> d{};
    double coef = 1.0;
    for (int k = 0; k <= D; ++k) {
        d[static_cast<std::size_t>(k)] = coef * std::pow(x, a - k);
        coef *= (a - k);
    }
    return jet_compose(u, d);
}

// Partial derivative as a jet one degree down (top coefficients zeroed).
// Only coefficients of total degree <= D-1 of the result are meaningful.
template <int D>
inline Jet<D> jet_derivative(const Jet<D>& u, int var) {
    Jet<D> r;
    for (const auto& e : detail::JetTables<D>::instance().deriv[static_cast<std::size_t>(var)])
        r.c[e.target] = e.factor * u.c[e.source];
    return r;
}

// value extraction helpers usable in scalar-generic code
inline double value_of(double x) { return x; }
template <int D>
inline double value_of(const Jet<D>& j) { return j.value(); }

// double passthroughs so scalar-generic code finds one name for both types
inline double sqrt(double x) { return std::sqrt(x); }
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double acos(double x) { return std::acos(x); }
inline double pow(double x, double a) { return std::pow(x, a); }
inline double reciprocal(double x) {
    if (std::abs(x) < 1e-10) throw DomainError("reciprocal: value within 1e-10 of zero");
    return 1.0 / x;
}

using Jet1 = Jet<1>;
using Jet2 = Jet<2>;
using Jet4 = Jet<4>;

} // namespace soulcurv

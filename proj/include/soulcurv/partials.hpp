#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "soulcurv/errors.hpp"
#include "soulcurv/jet.hpp"

namespace soulcurv {

using JetField = std::function<Jet4(const std::array<Jet4, 5>&)>;
using ScalarField = std::function<double(const std::array<double, 5>&)>;

inline int multi_index_order(const std::array<int, 5>& orders) {
    int t = 0;
    for (int o : orders) {
        if (o < 0) throw UnsupportedOrderError("negative derivative order");
        t += o;
    }
    return t;
}

// Exact mixed partial via jet propagation; |orders| <= 4.
inline double partials(const JetField& field, const std::array<double, 5>& x, const std::array<int, 5>& orders) {
    if (multi_index_order(orders) > 4) throw UnsupportedOrderError("jet backend carries partials up to total order 4");
    std::array<Jet4, 5> seeded;
    for (int i = 0; i < 5; ++i) seeded[static_cast<std::size_t>(i)] = Jet4::variable(x[static_cast<std::size_t>(i)], i);
    const Jet4 out = field(seeded);
    double fact = 1.0;
    for (int o : orders)
        for (int k = 2; k <= o; ++k) fact *= k;
    return out.coeff(orders) * fact;
}

namespace detail_fd {

// plain central-difference mixed partial at step h (second-order accurate)
inline double central(const ScalarField& f, std::array<double, 5> x, std::array<int, 5> orders, double h) {
    int var = -1;
    for (int i = 0; i < 5; ++i)
        if (orders[static_cast<std::size_t>(i)] > 0) { var = i; break; }
    if (var < 0) return f(x);
    orders[static_cast<std::size_t>(var)] -= 1;
    std::array<double, 5> xp = x, xm = x;
    xp[static_cast<std::size_t>(var)] += h;
    xm[static_cast<std::size_t>(var)] -= h;
    if (xp[static_cast<std::size_t>(var)] == x[static_cast<std::size_t>(var)])
        throw StepTooSmallError("finite-difference step underflowed");
    return (central(f, xp, orders, h) - central(f, xm, orders, h)) / (2.0 * h);
}

} // namespace detail_fd

// Central finite differences with one Richardson extrapolation level; the
// independent cross-check of the jet backend.
inline double fd_partials(const ScalarField& field, const std::array<double, 5>& x, const std::array<int, 5>& orders,
                          double step = 1e-3) {
    if (multi_index_order(orders) > 4) throw UnsupportedOrderError("finite-difference backend limited to total order 4");
    if (!(step > 0.0)) throw StepTooSmallError("finite-difference step must be positive");
    const double coarse = detail_fd::central(field, x, orders, step);
    const double fine = detail_fd::central(field, x, orders, 0.5 * step);
    return (4.0 * fine - coarse) / 3.0;
}

} // namespace soulcurv

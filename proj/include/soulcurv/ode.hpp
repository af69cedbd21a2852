#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "soulcurv/errors.hpp"

namespace soulcurv::ode {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.05;
};

using State = std::vector<double>;
using Rhs = std::function<void(double, const State&, State&)>;
using AcceptFn = std::function<void(double, State&)>;

// Adaptive Dormand-Prince 5(4). on_accept may mutate the state (chart
// switches, frame re-projection); integration continues from the mutated
// state.
inline void integrate(const Rhs& rhs, State& y, double t0, double t1, const Options& opts,
                      const AcceptFn& on_accept) {
    constexpr double A21 = 1.0 / 5;
    constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
    constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
    constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729;
    constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                     A65 = -5103.0 / 18656;
    constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84;
    constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                     E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                     E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;

    const int n = static_cast<int>(y.size());
    State k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), k5(y.size()), k6(y.size()), k7(y.size()),
        tmp(y.size()), y5(y.size());
    double t = t0;
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    double h = dir * std::min(opts.max_step, std::abs(t1 - t0));
    if (h == 0.0) return;
    int rejects = 0;

    while (dir * (t1 - t) > 1e-15 * (1.0 + std::abs(t1))) {
        if (dir * (t + h - t1) > 0.0) h = t1 - t;
        rhs(t, y, k1);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * A21 * k1[i];
        rhs(t + h / 5.0, tmp, k2);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        rhs(t + 3.0 * h / 10.0, tmp, k3);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        rhs(t + 4.0 * h / 5.0, tmp, k4);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        rhs(t + 8.0 * h / 9.0, tmp, k5);
        for (int i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        rhs(t + h, tmp, k6);
        for (int i = 0; i < n; ++i)
            y5[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        rhs(t + h, y5, k7);

        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            const double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(e) / sc);
        }

        if (err <= 1.0) {
            t += h;
            y = y5;
            rejects = 0;
            on_accept(t, y);
            const double grow = (err == 0.0) ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
            h *= std::max(grow, 0.2);
            if (std::abs(h) > opts.max_step) h = dir * opts.max_step;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (++rejects > 60 || std::abs(h) < 1e-14 * (1.0 + std::abs(t)))
                throw IntegrationError("step-size collapse at t = " + std::to_string(t));
        }
    }
}

} // namespace soulcurv::ode

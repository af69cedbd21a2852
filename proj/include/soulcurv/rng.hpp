#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace soulcurv {

// Deterministic, platform-independent generator (splitmix64 core).
// std::mt19937 is portable but the <random> distributions are not; every
// sampled value in reports must be bit-stable across library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Marsaglia polar method with cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    std::array<double, 3> unit_vector3() {
        const double z = 2.0 * uniform() - 1.0;
        const double phi = 2.0 * M_PI * uniform();
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

    // Derive an independent stream (for per-sample parallel determinism).
    Rng fork(std::uint64_t salt) const {
        Rng child(state_ ^ (0xA0761D6478BD642Full * (salt + 1)));
        child.next_u64();
        return child;
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Fibonacci-lattice points on the unit sphere: seeded low-discrepancy set.
inline std::array<double, 3> fibonacci_sphere_point(int i, int n, double offset) {
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double phi = 2.0 * M_PI * (std::fmod(i / golden + offset, 1.0));
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

} // namespace soulcurv

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "soulcurv/jet.hpp"
#include "soulcurv/linalg.hpp"
#include "soulcurv/partials.hpp"
#include "soulcurv/rng.hpp"

using namespace soulcurv;

namespace {

Jet4 random_jet(Rng& rng) {
    Jet4 j;
    for (auto& c : j.c) c = rng.uniform(-1.0, 1.0);
    return j;
}

// random polynomial of total degree <= 4 in 5 variables, evaluable on any
// scalar type
struct Poly {
    std::vector<std::pair<double, std::array<int, 5>>> terms;

    static Poly random(Rng& rng, int nterms) {
        Poly p;
        for (int t = 0; t < nterms; ++t) {
            std::array<int, 5> e{};
            int budget = 4;
            for (int v = 0; v < 5; ++v) {
                const int k = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(budget + 1));
                e[static_cast<std::size_t>(v)] = k;
                budget -= k;
            }
            p.terms.push_back({rng.uniform(-1.0, 1.0), e});
        }
        return p;
    }

    template <class T>
    T eval(const std::array<T, 5>& x) const {
        T s = T(0.0);
        for (const auto& [c, e] : terms) {
            T m = T(c);
            for (int v = 0; v < 5; ++v)
                for (int k = 0; k < e[static_cast<std::size_t>(v)]; ++k) m = m * x[static_cast<std::size_t>(v)];
            s += m;
        }
        return s;
    }
};

} // namespace

TEST_CASE("partials on simple fields") {
    // f(u) = u^2, d/du at u = 3
    const JetField sq = [](const std::array<Jet4, 5>& x) { return x[0] * x[0]; };
    CHECK(partials(sq, {3, 0, 0, 0, 0}, {1, 0, 0, 0, 0}) == doctest::Approx(6.0).epsilon(1e-14));

    // d^4 sin = sin at pi/2
    const JetField sn = [](const std::array<Jet4, 5>& x) { return sin(x[0]); };
    CHECK(partials(sn, {M_PI / 2, 0, 0, 0, 0}, {4, 0, 0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-13));

    // bilinear mixed partial
    const JetField uv = [](const std::array<Jet4, 5>& x) { return x[0] * x[1]; };
    CHECK(partials(uv, {0.7, -2.1, 0, 0, 0}, {1, 1, 0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(partials(sq, {0, 0, 0, 0, 0}, {3, 2, 0, 0, 0}), UnsupportedOrderError);
}

TEST_CASE("fd_partials matches jets and simple fields") {
    const ScalarField sq = [](const std::array<double, 5>& x) { return x[0] * x[0]; };
    CHECK(std::abs(fd_partials(sq, {3, 0, 0, 0, 0}, {1, 0, 0, 0, 0}, 1e-3) - 6.0) < 1e-9);

    const ScalarField ex = [](const std::array<double, 5>& x) { return std::exp(x[0]); };
    CHECK(std::abs(fd_partials(ex, {0, 0, 0, 0, 0}, {4, 0, 0, 0, 0}, 1e-2) - 1.0) < 1e-4);

    CHECK_THROWS_AS(fd_partials(sq, {0, 0, 0, 0, 0}, {1, 0, 0, 0, 0}, 0.0), StepTooSmallError);

    // agreement on 100 random polynomial fields, all orders <= 4
    Rng rng(7);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Poly p = Poly::random(rng, 6);
        std::array<double, 5> x{};
        for (auto& c : x) c = rng.uniform(-0.6, 0.6);
        std::array<int, 5> orders{};
        int budget = 1 + static_cast<int>(rng.next_u64() % 4);
        for (int v = 0; v < 5 && budget > 0; ++v) {
            const int k = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(budget + 1));
            orders[static_cast<std::size_t>(v)] = k;
            budget -= k;
        }
        const double exact = partials([&p](const std::array<Jet4, 5>& q) { return p.eval<Jet4>(q); }, x, orders);
        const double fd = fd_partials([&p](const std::array<double, 5>& q) { return p.eval<double>(q); }, x, orders,
                                      1e-2);
        worst = std::max(worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("fd_partials converges at second order or better on smooth fields") {
    const ScalarField f = [](const std::array<double, 5>& x) { return std::sin(2.0 * x[0]) * std::exp(x[1]); };
    const std::array<double, 5> at = {0.3, -0.2, 0, 0, 0};
    const std::array<int, 5> orders = {2, 1, 0, 0, 0};
    const double exact = partials(
        [](const std::array<Jet4, 5>& x) { return sin(2.0 * x[0]) * exp(x[1]); }, at, orders);
    const double e1 = std::abs(fd_partials(f, at, orders, 2e-2) - exact);
    const double e2 = std::abs(fd_partials(f, at, orders, 1e-2) - exact);
    CHECK(std::log2(e1 / e2) > 2.0);
}

TEST_CASE("jet ring axioms and value parts") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Jet4 a = random_jet(rng), b = random_jet(rng), c = random_jet(rng);
        const Jet4 lhs = (a * b) * c;
        const Jet4 rhs = a * (b * c);
        double scale = 0.0, diff = 0.0;
        for (int i = 0; i < Jet4::NC; ++i) {
            scale = std::max(scale, std::abs(lhs.c[static_cast<std::size_t>(i)]));
            diff = std::max(diff, std::abs(lhs.c[static_cast<std::size_t>(i)] - rhs.c[static_cast<std::size_t>(i)]));
        }
        CHECK(diff <= 1e-13 * std::max(1.0, scale));

        CHECK((a * b).value() == doctest::Approx(a.value() * b.value()).epsilon(1e-14));
        CHECK((a + b).value() == doctest::Approx(a.value() + b.value()).epsilon(1e-14));
    }
}

TEST_CASE("jet chain rule on random polynomials") {
    // jets of a composition equal the composition of jets
    Rng rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const Poly inner = Poly::random(rng, 4);
        std::array<double, 5> x{};
        for (auto& c : x) c = rng.uniform(-0.5, 0.5);

        // outer univariate polynomial q(t) = 0.3 t^2 - t + 2 evaluated two ways
        std::array<Jet4, 5> seeded;
        for (int i = 0; i < 5; ++i) seeded[static_cast<std::size_t>(i)] = Jet4::variable(x[static_cast<std::size_t>(i)], i);
        const Jet4 t = inner.eval<Jet4>(seeded);
        const Jet4 composed = 0.3 * t * t - t + 2.0;

        const Jet4 direct = [&] {
            const Jet4 s = inner.eval<Jet4>(seeded);
            return 0.3 * s * s - s + 2.0;
        }();
        for (int i = 0; i < Jet4::NC; ++i)
            CHECK(composed.c[static_cast<std::size_t>(i)] ==
                  doctest::Approx(direct.c[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }
}

TEST_CASE("jet elementary functions against finite differences") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const double x0 = rng.uniform(0.2, 1.4);
        const JetField field = [](const std::array<Jet4, 5>& x) {
            return sqrt(x[0]) * exp(x[1]) + log(x[0] + 2.0) * cos(x[2]);
        };
        const ScalarField fieldd = [](const std::array<double, 5>& x) {
            return std::sqrt(x[0]) * std::exp(x[1]) + std::log(x[0] + 2.0) * std::cos(x[2]);
        };
        const std::array<double, 5> at = {x0, rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), 0, 0};
        for (const std::array<int, 5> orders : {std::array<int, 5>{1, 0, 0, 0, 0}, {0, 2, 0, 0, 0}, {1, 1, 1, 0, 0}}) {
            const double jet = partials(field, at, orders);
            const double fd = fd_partials(fieldd, at, orders, 1e-2);
            CHECK(std::abs(jet - fd) < 1e-5 * std::max(1.0, std::abs(jet)));
        }
    }
}

TEST_CASE("jet division guards near-zero value parts") {
    Jet4 tiny(1e-12);
    CHECK_THROWS_AS(reciprocal(tiny), DomainError);
    const Jet4 ok = reciprocal(Jet4(2.0));
    CHECK(ok.value() == doctest::Approx(0.5));
}

TEST_CASE("solve_spd basics") {
    SmallMat<double, 3> eye = SmallMat<double, 3>::identity();
    const SmallVec<double, 3> b = {1.0, -2.0, 0.5};
    const auto x = solve_spd<double, 3>(eye, b);
    for (int i = 0; i < 3; ++i) CHECK(x[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(i)]);

    SmallMat<double, 3> d2;
    d2(0, 0) = d2(1, 1) = d2(2, 2) = 2.0;
    const auto y = solve_spd<double, 3>(d2, {2.0, 0.0, 0.0});
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(0.0));
}

TEST_CASE("solve_spd rejects non-SPD input naming the pivot") {
    SmallMat<double, 3> m;
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    m(2, 2) = 1.0;
    try {
        (void)solve_spd<double, 3>(m, {1.0, 1.0, 1.0});
        CHECK(false);
    } catch (const FactorizationError& e) {
        CHECK(e.pivot == 1);
        CHECK(std::string(e.what()).find("pivot 1") != std::string::npos);
    }
}

TEST_CASE("Killing Gram columns through the resolvent at theta = pi/2") {
    // K = diag(2, 1, 1) at theta = pi/2; (I + K)^{-1} K has columns
    // diag(2/3, 1/2, 1/2)
    SmallMat<double, 3> k;
    k(0, 0) = 2.0;
    k(1, 1) = 1.0;
    k(2, 2) = 1.0;
    SmallMat<double, 3> ipk = k;
    for (int i = 0; i < 3; ++i) ipk(i, i) += 1.0;
    const std::array<double, 3> expect = {2.0 / 3.0, 0.5, 0.5};
    for (int col = 0; col < 3; ++col) {
        SmallVec<double, 3> kc{};
        for (int i = 0; i < 3; ++i) kc[static_cast<std::size_t>(i)] = k(i, col);
        const auto x = solve_spd<double, 3>(ipk, kc);
        for (int i = 0; i < 3; ++i)
            CHECK(x[static_cast<std::size_t>(i)] ==
                  doctest::Approx(i == col ? expect[static_cast<std::size_t>(col)] : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("SPD inverse is symmetric and accurate") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        SmallMat<double, 5> a;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
        // SPD via A^T A + I
        SmallMat<double, 5> spd;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                double s = (i == j) ? 1.0 : 0.0;
                for (int m = 0; m < 5; ++m) s += a(m, i) * a(m, j);
                spd(i, j) = s;
            }
        const auto inv = spd_inverse<double, 5>(spd);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                CHECK(inv(i, j) == doctest::Approx(inv(j, i)).epsilon(1e-14));
                double s = 0.0;
                for (int m = 0; m < 5; ++m) s += spd(i, m) * inv(m, j);
                CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-12);
            }
    }
}

TEST_CASE("jet derivative extraction consistency") {
    Rng rng(31);
    const Poly p = Poly::random(rng, 8);
    std::array<double, 5> x{};
    for (auto& c : x) c = rng.uniform(-0.5, 0.5);
    std::array<Jet4, 5> seeded;
    for (int i = 0; i < 5; ++i) seeded[static_cast<std::size_t>(i)] = Jet4::variable(x[static_cast<std::size_t>(i)], i);
    const Jet4 f = p.eval<Jet4>(seeded);
    for (int v = 0; v < 5; ++v) {
        const Jet4 df = jet_derivative(f, v);
        std::array<int, 5> o{};
        o[static_cast<std::size_t>(v)] = 1;
        CHECK(df.value() == doctest::Approx(f.coeff(o)).epsilon(1e-13));
    }
}

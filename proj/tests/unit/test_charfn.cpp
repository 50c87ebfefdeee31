#include "anticonc/charfn.hpp"
#include "anticonc/errors.hpp"
#include "support/instances.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace anticonc;
using namespace anticonc::testing;

namespace {

// Oracle: product of the law's cf, summed atom by atom.
std::complex<double> cf_oracle(const FiniteDiscreteMeasure& law, const CoefficientVector& a, const std::vector<double>& t) {
    std::complex<double> prod = 1.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double s = 0.0;
        for (std::size_t c = 0; c < t.size(); ++c) s += t[c] * a[k][c];
        std::complex<double> phi = 0.0;
        for (std::size_t i = 0; i < law.size(); ++i) phi += law.mass(i) * std::polar(1.0, s * law.location(i));
        prod *= phi;
    }
    return prod;
}

// Composite Simpson on a fine grid; only used on smooth 1-d integrands.
template <class F>
double simpson(F f, double lo, double hi, int n = 20000) {
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return s * h / 3.0;
}

CharFn constant_one(std::size_t dim) {
    return CharFn{dim, [](std::span<const double>) { return std::complex<double>(1.0, 0.0); }, true, 0.0};
}

}  // namespace

TEST_CASE("weighted-sum characteristic function") {
    const auto rad = rademacher();
    const auto a = CoefficientVector::scalars({1, 1});
    const std::vector<double> zero{0.0};
    const std::vector<double> pi{std::numbers::pi};
    CHECK(std::abs(cf_weighted_sum(rad, a, zero) - 1.0) < 1e-15);
    CHECK(std::abs(cf_weighted_sum(rad, a, pi) - 1.0) < 1e-12);

    const auto one = FiniteDiscreteMeasure::point_mass({1.0});
    CounterRng rng(31);
    for (int i = 0; i < 50; ++i) {
        const std::vector<double> t{uniform(rng, -20, 20)};
        CHECK(std::abs(std::abs(cf_weighted_sum(one, a, t)) - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(cf_weighted_sum(rad, a, std::vector<double>{0.0, 0.0}), DimensionError);
}

TEST_CASE("weighted-sum cf matches the oracle and is Hermitian") {
    CounterRng rng(32);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = pick(rng, 1, 3);
        const auto law = random_real_law(rng, pick(rng, 1, 5));
        const auto a = random_coefficients(rng, d, pick(rng, 1, 6));
        const auto t = random_point(rng, d, 5.0);
        std::vector<double> neg(t);
        for (double& v : neg) v = -v;
        const auto value = cf_weighted_sum(law, a, t);
        CHECK(std::abs(value - cf_oracle(law, a, t)) < 1e-12);
        CHECK(std::abs(value) <= 1.0 + 1e-12);
        CHECK(std::abs(cf_weighted_sum(law, a, neg) - std::conj(value)) < 1e-12);
    }
}

TEST_CASE("cf_H examples and identities") {
    const auto a1 = CoefficientVector::scalars({1});
    CHECK(cf_H(a1, 1.0, 1.0, std::vector<double>{0.0}) == 1.0);
    CHECK(cf_H(a1, 1.0, 1.0, std::vector<double>{std::numbers::pi}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

    CounterRng rng(33);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = pick(rng, 1, 3);
        const auto a = random_coefficients(rng, d, pick(rng, 1, 6));
        const auto t = random_point(rng, d, 4.0);
        const double z = uniform(rng, -3, 3);
        const double l1 = uniform(rng, 0, 2);
        const double l2 = uniform(rng, 0, 2);
        std::vector<double> zt(t);
        std::vector<double> neg(t);
        for (std::size_t c = 0; c < d; ++c) {
            zt[c] *= z;
            neg[c] = -t[c];
        }
        const double h = cf_H(a, z, l1, t);
        CHECK(h > 0.0);
        CHECK(std::abs(h - cf_H(a, 1.0, l1, zt)) < 1e-12);
        CHECK(std::abs(h - cf_H(a, -z, l1, t)) < 1e-12);
        CHECK(std::abs(h - cf_H(a, z, l1, neg)) < 1e-12);
        CHECK(std::abs(cf_H(a, z, l1 + l2, t) - h * cf_H(a, z, l2, t)) < 1e-12);
    }
}

TEST_CASE("symmetrization envelope dominates the weighted-sum cf") {
    CounterRng rng(34);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = pick(rng, 1, 3);
        const auto law = trial % 2 ? random_real_law(rng, pick(rng, 1, 4)) : random_grid_law(rng, pick(rng, 1, 4), 4);
        const auto a = random_coefficients(rng, d, pick(rng, 1, 5));
        const auto t = random_point(rng, d, 6.0);
        const auto g = symmetrize(law);
        CHECK(std::abs(cf_weighted_sum(law, a, t)) <= symmetrization_envelope(a, g, t) + 1e-12);
    }
}

TEST_CASE("envelope edge cases") {
    const auto a = CoefficientVector::scalars({1, 2, 3});
    const auto g0 = symmetrize(FiniteDiscreteMeasure::point_mass({2.5}));
    CounterRng rng(35);
    for (int i = 0; i < 20; ++i) CHECK(symmetrization_envelope(a, g0, std::vector<double>{uniform(rng, -9, 9)}) == 1.0);
    CHECK(symmetrization_envelope(a, symmetrize(rademacher()), std::vector<double>{0.0}) == 1.0);
    const FiniteDiscreteMeasure skew(1, {0.0, 1.0}, {0.5, 0.5});
    CHECK_THROWS_AS(symmetrization_envelope(a, skew, std::vector<double>{1.0}), InvalidInputError);
}

TEST_CASE("replacing G by a sub-measure raises the envelope") {
    CounterRng rng(36);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = pick(rng, 1, 2);
        const auto g = symmetrize(random_real_law(rng, pick(rng, 1, 4)));
        std::vector<double> w(g.size());
        for (double& v : w) v = uniform(rng, 0, 1);
        const SubMeasureSpec v(g, w);
        const auto a = random_coefficients(rng, d, pick(rng, 1, 4));
        const auto t = random_point(rng, d, 5.0);
        CHECK(submeasure_envelope(a, v, t) >= symmetrization_envelope(a, g, t) - 1e-15);
    }
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
    for (std::size_t n : {1u, 2u, 5u, 16u, 32u}) {
        const auto& rule = gauss_legendre(n);
        REQUIRE(rule.nodes.size() == n);
        for (std::size_t p = 0; p < 2 * n; ++p) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], static_cast<double>(p));
            const double exact = p % 2 ? 0.0 : 2.0 / static_cast<double>(p + 1);
            CHECK(std::abs(s - exact) < 1e-13);
        }
    }
    const auto poly = [](std::span<const double> t) {
        double v = 1.0;
        for (double c : t) v *= c * c;
        return v;
    };
    // (2 T^3 / 3)^d with T = 2
    CHECK(integrate_box_fixed(poly, 2, 2.0, 3, 4) == doctest::Approx(std::pow(16.0 / 3.0, 2)).epsilon(1e-13));
    CHECK(integrate_box_fixed(poly, 3, 2.0, 1, 4) == doctest::Approx(std::pow(16.0 / 3.0, 3)).epsilon(1e-13));
}

TEST_CASE("Esseen functional examples") {
    CHECK(esseen_functional(constant_one(1), 1.0).value == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(esseen_functional(constant_one(2), 0.5).value == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(esseen_functional(constant_one(3), 3.0).value == doctest::Approx(8.0).epsilon(1e-14));

    const CharFn gauss{1, [](std::span<const double> t) { return std::complex<double>(std::exp(-t[0] * t[0] / 2), 0.0); },
                       true, 0.0};
    const double oracle = std::sqrt(2.0 * std::numbers::pi) * std::erf(1.0 / std::numbers::sqrt2);
    CHECK(std::abs(oracle - 1.711249) < 1e-6);
    CHECK(std::abs(esseen_functional(gauss, 1.0).value - oracle) < 1e-8);

    CHECK_THROWS_AS(esseen_functional(constant_one(1), 0.0), InvalidInputError);
    CHECK_THROWS_AS(esseen_functional(constant_one(4), 1.0), DimensionError);
}

TEST_CASE("Esseen functional of cf_H matches an independent 1-d integral") {
    CounterRng rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_coefficients(rng, 1, pick(rng, 1, 5));
        const double lambda = uniform(rng, 0.1, 3.0);
        const double tau = uniform(rng, 0.2, 2.0);
        const auto oracle = tau * simpson([&](double t) { return cf_H(a, 1.0, lambda, std::vector<double>{t}); },
                                          -1.0 / tau, 1.0 / tau, 200000);
        const auto got = esseen_functional(make_H_cf(a, 1.0, lambda), tau).value;
        CHECK(std::abs(got - oracle) < 1e-7);
        CHECK(got <= 2.0 + 1e-8);
    }
}

TEST_CASE("Esseen functional is stable when nodes per panel double") {
    CounterRng rng(38);
    const QuadratureSpec base{};
    QuadratureSpec doubled = base;
    doubled.nodes_per_panel = 32;
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t d = pick(rng, 1, 2);
        const auto law = random_real_law(rng, pick(rng, 2, 3));
        const auto a = random_coefficients(rng, d, pick(rng, 1, 4));
        const double tau = uniform(rng, 0.3, 1.5);
        const auto cf = make_weighted_sum_cf(law, a);
        const double v16 = esseen_functional(cf, tau, base).value;
        const double v32 = esseen_functional(cf, tau, doubled).value;
        CHECK(std::abs(v16 - v32) < 10.0 * base.tolerance);
        CHECK(v16 <= std::pow(2.0, static_cast<double>(d)) + base.tolerance);
    }
}

TEST_CASE("refinement limit raises an unconverged error with the best estimate") {
    const CharFn wiggly{1, [](std::span<const double> t) { return std::complex<double>(std::cos(40.0 * t[0]), 0.0); },
                        false, 0.0};
    QuadratureSpec spec;
    spec.nodes_per_panel = 2;
    spec.tolerance = 1e-14;
    spec.max_refinements = 1;
    try {
        (void)esseen_functional(wiggly, 0.05, spec);
        FAIL("expected an unconverged error");
    } catch (const UnconvergedError& e) {
        CHECK(std::isfinite(e.best_estimate()));
        CHECK(e.last_change() > 0.0);
    }
}

TEST_CASE("every CharFn is 1 at the origin and bounded by 1") {
    CounterRng rng(39);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = pick(rng, 1, 3);
        const auto a = random_coefficients(rng, d, pick(rng, 1, 4));
        const auto law = random_real_law(rng, pick(rng, 1, 4));
        const std::vector<double> origin(d, 0.0);
        for (const auto& cf : {make_weighted_sum_cf(law, a), make_H_cf(a, uniform(rng, 0.1, 2), uniform(rng, 0, 3))}) {
            CHECK(std::abs(cf(origin) - 1.0) < 1e-15);
            for (int i = 0; i < 20; ++i) CHECK(std::abs(cf(random_point(rng, d, 10.0))) <= 1.0 + 1e-12);
        }
    }
}

#include "anticonc/errors.hpp"
#include "anticonc/io.hpp"
#include "anticonc/measure.hpp"
#include "support/instances.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>

using namespace anticonc;
using namespace anticonc::testing;

namespace {

// Oracle: law of X1 - X2 by enumerating all outcome pairs.
std::map<double, double> difference_law_by_enumeration(const FiniteDiscreteMeasure& law) {
    std::map<double, double> out;
    for (std::size_t i = 0; i < law.size(); ++i) {
        for (std::size_t j = 0; j < law.size(); ++j) out[law.location(i) - law.location(j)] += law.mass(i) * law.mass(j);
    }
    return out;
}

FiniteDiscreteMeasure uniform_on(std::vector<double> points) {
    const std::size_t n = points.size();
    return FiniteDiscreteMeasure(1, std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

}  // namespace

TEST_CASE("construction merges near-duplicate atoms and sorts") {
    FiniteDiscreteMeasure m(1, {{{2.0}, 0.25}, {{0.0}, 0.5}, {{2.0 + 1e-13}, 0.25}});
    REQUIRE(m.size() == 2);
    CHECK(m.location(0) == 0.0);
    CHECK(m.location(1) == 2.0);
    CHECK(m.mass(1) == doctest::Approx(0.5));
    CHECK(m.total_mass() == doctest::Approx(1.0));
}

TEST_CASE("construction validates masses, coordinates and kind") {
    CHECK_THROWS_AS(FiniteDiscreteMeasure(1, {{{0.0}, 0.0}, {{1.0}, 1.0}}), InvalidMeasureError);
    CHECK_THROWS_AS(FiniteDiscreteMeasure(1, {{{0.0}, -0.1}, {{1.0}, 1.1}}), InvalidMeasureError);
    CHECK_THROWS_AS(FiniteDiscreteMeasure(1, {{{std::nan("")}, 1.0}}), InvalidMeasureError);
    CHECK_THROWS_AS(FiniteDiscreteMeasure(1, {{{0.0}, 0.5}}), InvalidMeasureError);
    CHECK_NOTHROW(FiniteDiscreteMeasure(1, {{{0.0}, 0.5}}, MeasureKind::sub_probability));
    CHECK_THROWS_AS(FiniteDiscreteMeasure(1, {{{0.0}, 0.7}, {{1.0}, 0.7}}, MeasureKind::sub_probability),
                    InvalidMeasureError);
    CHECK_NOTHROW(FiniteDiscreteMeasure(1, {{{0.0}, 3.0}}, MeasureKind::unnormalized));
    CHECK_THROWS_AS(FiniteDiscreteMeasure(2, {{{0.0}, 1.0}}), DimensionError);
}

TEST_CASE("multivariate merging uses the sup-norm") {
    FiniteDiscreteMeasure m(2, {{{0.0, 1.0}, 0.5}, {{5e-13, 1.0 - 5e-13}, 0.25}, {{0.0, 1.0 + 1e-9}, 0.25}});
    CHECK(m.size() == 2);
    const std::vector<double> probe{0.0, 1.0};
    CHECK(m.mass_at(probe) == doctest::Approx(0.75));
}

TEST_CASE("symmetrize examples") {
    SUBCASE("Rademacher") {
        const auto g = symmetrize(rademacher());
        REQUIRE(g.size() == 3);
        CHECK(g.location(0) == -2.0);
        CHECK(g.mass(0) == doctest::Approx(0.25));
        CHECK(g.location(1) == 0.0);
        CHECK(g.mass(1) == doctest::Approx(0.5));
        CHECK(g.location(2) == 2.0);
        CHECK(g.mass(2) == doctest::Approx(0.25));
    }
    SUBCASE("point mass goes to zero") {
        const auto g = symmetrize(FiniteDiscreteMeasure::point_mass({3.5}));
        REQUIRE(g.size() == 1);
        CHECK(g.location(0) == 0.0);
        CHECK(g.mass(0) == doctest::Approx(1.0));
    }
    SUBCASE("uniform on {0,1,2}") {
        const auto g = symmetrize(uniform_on({0.0, 1.0, 2.0}));
        const auto oracle = difference_law_by_enumeration(uniform_on({0.0, 1.0, 2.0}));
        REQUIRE(g.size() == 5);
        const double expected[] = {1.0 / 9, 2.0 / 9, 3.0 / 9, 2.0 / 9, 1.0 / 9};
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(g.location(i) == doctest::Approx(static_cast<double>(i) - 2.0));
            CHECK(g.mass(i) == doctest::Approx(expected[i]).epsilon(1e-12));
            CHECK(g.mass(i) == doctest::Approx(oracle.at(g.location(i))).epsilon(1e-12));
        }
    }
    SUBCASE("non-probability input is rejected") {
        FiniteDiscreteMeasure half(1, {{{0.0}, 0.5}}, MeasureKind::sub_probability);
        CHECK_THROWS_AS(symmetrize(half), InvalidMeasureError);
    }
}

TEST_CASE("symmetrize is symmetric, normalized and matches enumeration on random laws") {
    CounterRng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const auto law = random_grid_law(rng, pick(rng, 1, 5));
        const auto g = symmetrize(law);
        CHECK(g.is_symmetric(1e-12));
        CHECK(g.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
        const auto oracle = difference_law_by_enumeration(law);
        REQUIRE(oracle.size() == g.size());
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(g.mass(i) - oracle.at(g.location(i))) < 1e-12);
    }
}

TEST_CASE("paper_floor is the strict floor") {
    CHECK(paper_floor(1.0) == 0);
    CHECK(paper_floor(2.5) == 2);
    CHECK(paper_floor(-0.5) == -1);
    CHECK(paper_floor(0.0) == -1);
    CHECK(paper_floor(-3.0) == -4);
    CounterRng rng(5);
    for (int i = 0; i < 2000; ++i) {
        const double x = i % 4 == 0 ? std::round(uniform(rng, -50, 50)) : uniform(rng, -50, 50);
        const auto k = static_cast<double>(paper_floor(x));
        CHECK(k < x);
        CHECK(x <= k + 1.0);
    }
}

TEST_CASE("log_factor examples and shape") {
    CHECK(log_factor(2.0, 1.0, 1.0) == 0.0);
    CHECK(log_factor(1.0, 1.0, 0.1) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
    CHECK(log_factor(0.0, 1.0, 1.0) == std::numeric_limits<double>::infinity());
    // tau/(eps|z|) = 2 exactly: strict floor gives 1, so log 2.
    CHECK(log_factor(0.5, 1.0, 1.0) == doctest::Approx(std::log(2.0)));
    CHECK(log_factor(-1.0, 1.0, 0.1) == log_factor(1.0, 1.0, 0.1));

    CounterRng rng(6);
    for (int i = 0; i < 500; ++i) {
        const double tau = uniform(rng, 0.1, 3.0);
        const double eps = uniform(rng, 0.1, 3.0);
        const double z1 = uniform(rng, 1e-3, 10.0);
        const double z2 = z1 + uniform(rng, 0.0, 5.0);
        CHECK(log_factor(z1, tau, eps) >= log_factor(z2, tau, eps));
        CHECK(log_factor(z1, tau, eps) >= 0.0);
        if (z1 >= tau / eps) CHECK(log_factor(z1, tau, eps) == 0.0);
    }
}

TEST_CASE("tail_mass examples and monotonicity") {
    const auto g = symmetrize(rademacher());
    CHECK(tail_mass(g, 1.0) == doctest::Approx(0.5));
    CHECK(tail_mass(g, 2.0) == doctest::Approx(0.5));  // closed inequality
    CHECK(tail_mass(g, 2.5) == 0.0);
    CHECK(tail_mass(g, 1e-300) == doctest::Approx(0.5));

    CounterRng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const auto law = symmetrize(random_grid_law(rng, pick(rng, 1, 4)));
        double prev = 1.0 + 1e-12;
        for (double delta = 0.25; delta < 8.0; delta += 0.25) {
            const double p = tail_mass(law, delta);
            CHECK(p <= prev);
            prev = p;
        }
    }
}

TEST_CASE("SubMeasureSpec enforces 0 <= f <= 1 and computes lambda") {
    const auto g = symmetrize(rademacher());
    CHECK_THROWS_AS(SubMeasureSpec(g, {1.0, 1.2, 0.0}), InvalidMeasureError);
    CHECK_THROWS_AS(SubMeasureSpec(g, {1.0, -0.1, 0.0}), InvalidMeasureError);
    CHECK_THROWS_AS(SubMeasureSpec(g, {1.0, 1.0}), InvalidMeasureError);
    const SubMeasureSpec v(g, {1.0, 0.0, 0.5});
    CHECK(v.lambda() == doctest::Approx(0.375));
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(v.mass(j) <= g.mass(j));
    const auto vm = v.measure();
    CHECK(vm.size() == 2);
    CHECK(vm.total_mass() == doctest::Approx(0.375));

    const auto tail = SubMeasureSpec::indicator_tail(g, 1.0);
    CHECK(tail.lambda() == doctest::Approx(tail_mass(g, 1.0)));
}

TEST_CASE("weighted_sum_law matches brute-force enumeration") {
    CounterRng rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const auto law = random_grid_law(rng, pick(rng, 1, 3));
        const std::size_t n = pick(rng, 1, 5);
        const std::size_t d = pick(rng, 1, 2);
        const auto a = random_coefficients(rng, d, n);
        const auto fa = weighted_sum_law(law, a);
        CHECK(fa.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
        // Enumerate every outcome tuple and compare masses at each reached point.
        std::size_t tuples = 1;
        for (std::size_t k = 0; k < n; ++k) tuples *= law.size();
        for (std::size_t code = 0; code < tuples; ++code) {
            std::vector<double> point(d, 0.0);
            std::size_t rest = code;
            for (std::size_t k = 0; k < n; ++k) {
                const double x = law.location(rest % law.size());
                rest /= law.size();
                for (std::size_t c = 0; c < d; ++c) point[c] += x * a[k][c];
            }
            CHECK(fa.mass_at(point) > 0.0);
        }
    }
}

TEST_CASE("Gaussian discretization is symmetric with unit variance") {
    const auto g = discretize_gaussian();
    CHECK(g.size() == 256);
    CHECK(g.is_symmetric());
    double var = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) var += g.mass(i) * g.location(i) * g.location(i);
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
    CHECK(discretize_gaussian(5).mass_at(std::vector<double>{0.0}) == doctest::Approx(0.2));
}

TEST_CASE("JSON readers accept the schemas and reject bad input") {
    const auto m = parse_measure(R"({"dim": 1, "atoms": [{"x": [-1], "p": 0.5}, {"x": [1], "p": 0.5}]})");
    CHECK(m.size() == 2);
    CHECK(m.kind() == MeasureKind::probability);
    CHECK(parse_measure(to_json(m)).size() == 2);

    const auto a = parse_coefficients(R"({"dim": 2, "a": [[1, 0], [0.5, 2]]})");
    CHECK(a.size() == 2);
    CHECK(a[1][1] == 2.0);

    CHECK_THROWS_AS(parse_measure(R"({"dim": 1, "atoms": [{"x": [0], "p": 0}]})"), ParseError);
    CHECK_THROWS_AS(parse_measure(R"({"dim": 1, "atoms": [{"x": [0], "p": -1}]})"), ParseError);
    CHECK_THROWS_AS(parse_measure(R"({"dim": 1, "atoms": [{"x": [0, 1], "p": 1}]})"), ParseError);
    CHECK_THROWS_AS(parse_measure(R"({"dim": 1, "atoms": [{"x": [1e999], "p": 1}]})"), ParseError);
    CHECK_THROWS_AS(parse_measure(R"({"dim": 1, "atoms": [{"x": [NaN], "p": 1}]})"), ParseError);
    CHECK_THROWS_AS(parse_measure(R"({"dim": 1, "atoms": [)"), ParseError);
    CHECK_THROWS_AS(parse_coefficients(R"({"dim": 1})"), ParseError);
    CHECK_THROWS_AS(parse_weights("[0.5, 1.5]"), ParseError);

    try {
        parse_measure(R"({"dim": 1, "atoms": [{"x": [0], "p": 1}, {"x": [1]}]})");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.where() == "/atoms/1/p");
    }

    const auto model = parse_compound_poisson(R"({"dim": 1, "alpha": 2.5, "atoms": [{"x": [1], "p": 1}]})");
    CHECK(model.alpha() == 2.5);
}

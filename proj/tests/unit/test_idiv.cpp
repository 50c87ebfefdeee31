#include "anticonc/charfn.hpp"
#include "anticonc/errors.hpp"
#include "anticonc/idiv.hpp"
#include "support/instances.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace anticonc;
using namespace anticonc::testing;

namespace {

std::complex<double> empirical_cf(const PointCloud& cloud, std::span<const double> t) {
    std::complex<double> s = 0.0;
    const std::size_t n = cloud.coords.size() / cloud.dim;
    for (std::size_t i = 0; i < n; ++i) {
        double dot = 0.0;
        for (std::size_t c = 0; c < cloud.dim; ++c) dot += t[c] * cloud.coords[i * cloud.dim + c];
        s += std::polar(1.0, dot);
    }
    return s / static_cast<double>(n);
}

// Oracle: exp(alpha (M^(t) - 1)) written out atom by atom.
std::complex<double> cp_oracle(double alpha, const FiniteDiscreteMeasure& m, std::span<const double> t) {
    std::complex<double> mhat = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double dot = 0.0;
        for (std::size_t c = 0; c < m.dim(); ++c) dot += t[c] * m.point(i)[c];
        mhat += m.mass(i) * std::polar(1.0, dot);
    }
    return std::exp(alpha * (mhat - 1.0));
}

}  // namespace

TEST_CASE("spectral model of the coefficients") {
    const auto one = spectral_of_coefficients(CoefficientVector::scalars({2.0}), 1.0);
    CHECK(one.alpha() == 0.5);
    REQUIRE(one.jump_law().size() == 2);
    CHECK(one.jump_law().location(0) == -2.0);
    CHECK(one.jump_law().mass(0) == 0.5);
    CHECK(one.jump_law().location(1) == 2.0);

    const CoefficientVector pair(2, std::vector<std::vector<double>>{{1, 2}, {-1, -2}});
    const auto merged = spectral_of_coefficients(pair, 3.0);
    CHECK(merged.alpha() == 3.0);
    REQUIRE(merged.jump_law().size() == 2);
    CHECK(merged.jump_law().mass(0) == 0.5);
    CHECK(merged.jump_law().mass(1) == 0.5);

    CHECK_THROWS_AS(spectral_of_coefficients(CoefficientVector::scalars({1.0}), 0.0), InvalidInputError);
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(CompoundPoissonModel(-1.0, rademacher()), InvalidInputError);
    CHECK_THROWS_AS(CompoundPoissonModel(1.0, FiniteDiscreteMeasure(1, {0.0}, {0.5})), InvalidMeasureError);
    CHECK_NOTHROW(CompoundPoissonModel(0.0, rademacher()));
}

TEST_CASE("compound Poisson cf equals cf_H and the oracle") {
    CounterRng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = pick(rng, 1, 3);
        const auto a = random_coefficients(rng, d, pick(rng, 1, 6));
        const double lambda = uniform(rng, 0.05, 4.0);
        const auto model = spectral_of_coefficients(a, lambda);
        const auto t = random_point(rng, d, 5.0);
        const auto v = cf_compound_poisson(model, t);
        CHECK(std::abs(v - cf_H(a, 1.0, lambda, t)) < 1e-12);
        CHECK(std::abs(v.imag()) < 1e-12);
        CHECK(std::abs(make_compound_poisson_cf(model)(t) - v) < 1e-15);
    }
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = pick(rng, 1, 2);
        std::vector<Atom> atoms;
        const std::size_t k = pick(rng, 1, 4);
        for (std::size_t i = 0; i < k; ++i) atoms.push_back({random_point(rng, d, 2.0), 1.0 / static_cast<double>(k)});
        const CompoundPoissonModel model(uniform(rng, 0, 5), FiniteDiscreteMeasure(d, atoms));
        const auto t = random_point(rng, d, 4.0);
        const auto v = cf_compound_poisson(model, t);
        CHECK(std::abs(v - cp_oracle(model.alpha(), model.jump_law(), t)) < 1e-12);
        CHECK(std::abs(v) <= 1.0 + 1e-12);
    }
    const CompoundPoissonModel pm(1.0, rademacher());
    CHECK(std::abs(cf_compound_poisson(pm, std::vector<double>{0.0}) - 1.0) < 1e-15);
    CHECK(cf_compound_poisson(pm, std::vector<double>{std::numbers::pi}).real() ==
          doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
}

TEST_CASE("sampling: zero intensity, mean, determinism") {
    const auto zero = sample_compound_poisson(CompoundPoissonModel(0.0, rademacher()), 500, 1);
    for (double v : zero.coords) CHECK(v == 0.0);

    // Jumps {1: 0.7, -2: 0.3}: mean 0.1, second moment 1.9.
    const CompoundPoissonModel m(3.0, FiniteDiscreteMeasure(1, {1.0, -2.0}, {0.7, 0.3}));
    const std::size_t n = 100000;
    const auto s = sample_compound_poisson(m, n, 42);
    REQUIRE(s.coords.size() == n);
    double mean = 0.0;
    for (double v : s.coords) mean += v;
    mean /= static_cast<double>(n);
    const double se = std::sqrt(3.0 * 1.9 / static_cast<double>(n));
    CHECK(std::abs(mean - 3.0 * 0.1) < 4.0 * se);

    const auto again = sample_compound_poisson(m, n, 42);
    CHECK(again.coords == s.coords);
    const auto other = sample_compound_poisson(m, n, 43);
    CHECK(other.coords != s.coords);
    const auto via_sampler = compound_poisson_sampler(m)(n, 42);
    CHECK(via_sampler.coords == s.coords);
    CHECK_THROWS_AS(sample_compound_poisson(m, 0, 1), InvalidInputError);
}

TEST_CASE("large intensity uses the rejection Poisson path and keeps the mean") {
    const CompoundPoissonModel m(200.0, FiniteDiscreteMeasure::point_mass({1.0}));
    const std::size_t n = 50000;
    const auto s = sample_compound_poisson(m, n, 7);
    double mean = 0.0;
    double sq = 0.0;
    for (double v : s.coords) {
        CHECK(v == std::round(v));
        mean += v;
        sq += v * v;
    }
    mean /= static_cast<double>(n);
    const double var = sq / static_cast<double>(n) - mean * mean;
    CHECK(std::abs(mean - 200.0) < 4.0 * std::sqrt(200.0 / static_cast<double>(n)));
    CHECK(var == doctest::Approx(200.0).epsilon(0.05));
}

TEST_CASE("empirical cf matches the exact cf") {
    CounterRng rng(43);
    const std::size_t n = 100000;
    for (int trial = 0; trial < 3; ++trial) {
        const std::size_t d = pick(rng, 1, 2);
        const auto a = random_coefficients(rng, d, pick(rng, 1, 4));
        const auto model = spectral_of_coefficients(a, uniform(rng, 0.5, 4.0));
        const auto cloud = sample_compound_poisson(model, n, 100 + trial);
        for (int i = 0; i < 20; ++i) {
            const auto t = random_point(rng, d, 3.0);
            const auto emp = empirical_cf(cloud, t);
            CHECK(std::abs(emp - cf_compound_poisson(model, t)) < 4.0 / std::sqrt(static_cast<double>(n)));
            // symmetric jumps
            CHECK(std::abs(emp.imag()) < 4.0 / std::sqrt(static_cast<double>(n)));
        }
    }
}

TEST_CASE("semigroup: independent sums of alpha1 and alpha2 look like alpha1 + alpha2") {
    const FiniteDiscreteMeasure jumps(1, {-1.0, 0.5, 2.0}, {0.2, 0.5, 0.3});
    const std::size_t n = 100000;
    const auto s1 = sample_compound_poisson(CompoundPoissonModel(1.5, jumps), n, 11);
    const auto s2 = sample_compound_poisson(CompoundPoissonModel(2.5, jumps), n, 12);
    PointCloud sum{1, s1.coords};
    for (std::size_t i = 0; i < n; ++i) sum.coords[i] += s2.coords[i];
    const CompoundPoissonModel joint(4.0, jumps);
    CounterRng rng(44);
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> t{uniform(rng, -3, 3)};
        CHECK(std::abs(empirical_cf(sum, t) - cf_compound_poisson(joint, t)) < 4.0 / std::sqrt(static_cast<double>(n)));
    }
}

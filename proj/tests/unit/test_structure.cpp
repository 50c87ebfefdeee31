#include "anticonc/concentration.hpp"
#include "anticonc/errors.hpp"
#include "anticonc/structure.hpp"
#include "support/instances.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace anticonc;
using namespace anticonc::testing;

namespace {

// Oracle: all 3^r sign patterns without dedup.
std::vector<std::vector<double>> k1_oracle(const GeneratorSet& u) {
    std::vector<std::vector<double>> pts{std::vector<double>(u.dim(), 0.0)};
    for (std::size_t j = 0; j < u.size(); ++j) {
        std::vector<std::vector<double>> next;
        for (const auto& p : pts) {
            for (int s = -1; s <= 1; ++s) {
                auto q = p;
                for (std::size_t c = 0; c < u.dim(); ++c) q[c] += s * u[j][c];
                next.push_back(q);
            }
        }
        pts = std::move(next);
    }
    return pts;
}

double sup_distance(std::span<const double> x, const std::vector<double>& y) {
    double d = 0.0;
    for (std::size_t c = 0; c < y.size(); ++c) d = std::max(d, std::abs(x[c] - y[c]));
    return d;
}

double deficit_oracle(const FiniteDiscreteMeasure& m, double alpha, const GeneratorSet& u, double tau) {
    const auto pts = k1_oracle(u);
    double out = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double best = 1e300;
        for (const auto& p : pts) best = std::min(best, sup_distance(m.point(i), p));
        if (best > tau) out += m.mass(i);
    }
    return alpha * out;
}

GeneratorSet random_generators(CounterRng& rng, std::size_t dim, std::size_t r, double half_width = 4.0) {
    std::vector<double> flat;
    for (std::size_t j = 0; j < r; ++j) {
        const auto p = random_point(rng, dim, half_width);
        flat.insert(flat.end(), p.begin(), p.end());
    }
    return GeneratorSet(dim, flat);
}

// Atoms placed at random K_1(u) points plus sup-norm jitter of at most tau / 4.
FiniteDiscreteMeasure planted(CounterRng& rng, const GeneratorSet& u, double tau, std::size_t atoms) {
    const auto pts = k1_oracle(u);
    std::vector<Atom> out;
    for (std::size_t i = 0; i < atoms; ++i) {
        auto p = pts[rng.below(pts.size())];
        for (double& c : p) c += uniform(rng, -tau / 4, tau / 4);
        out.push_back({p, 1.0 / static_cast<double>(atoms)});
    }
    return FiniteDiscreteMeasure(u.dim(), out);
}

}  // namespace

TEST_CASE("K_1 examples") {
    const auto empty = enumerate_K1(GeneratorSet(1));
    CHECK(empty.coords == std::vector<double>{0.0});
    CHECK(enumerate_K1(GeneratorSet(1, {1.0, 3.0})).coords ==
          std::vector<double>{-4, -3, -2, -1, 0, 1, 2, 3, 4});
    CHECK(enumerate_K1(GeneratorSet(1, {1.0, 1.0})).coords == std::vector<double>{-2, -1, 0, 1, 2});
    CHECK_THROWS_AS(enumerate_K1(GeneratorSet(1, std::vector<double>(13, 1.0))), TooManyGeneratorsError);
}

TEST_CASE("K_1 invariants against the oracle") {
    CounterRng rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = pick(rng, 1, 2);
        const std::size_t r = pick(rng, 0, 5);
        // integer generators so that dedup is exact
        std::vector<double> flat;
        for (std::size_t i = 0; i < d * r; ++i) flat.push_back(static_cast<double>(pick(rng, 0, 6)) - 3.0);
        const GeneratorSet u(d, flat);
        const auto k = enumerate_K1(u);
        std::set<std::vector<double>> expected;
        for (const auto& p : k1_oracle(u)) expected.insert(p);
        std::set<std::vector<double>> got;
        const std::size_t count = k.coords.size() / d;
        for (std::size_t i = 0; i < count; ++i) got.insert(std::vector<double>(k.coords.begin() + i * d, k.coords.begin() + (i + 1) * d));
        CHECK(got == expected);
        CHECK(got.size() == count);
        CHECK(count <= static_cast<std::size_t>(std::pow(3.0, static_cast<double>(r))));
        CHECK(got.count(std::vector<double>(d, 0.0)) == 1);
        for (auto p : got) {
            for (double& c : p) c = -c + 0.0;
            CHECK(got.count(p) == 1);
        }
        const auto bigger = enumerate_K1(u.with(random_point(rng, d, 3.0)));
        const std::size_t big_count = bigger.coords.size() / d;
        for (const auto& p : got) {
            bool found = false;
            for (std::size_t i = 0; i < big_count && !found; ++i) {
                found = std::equal(p.begin(), p.end(), bigger.coords.begin() + i * d);
            }
            CHECK(found);
        }
    }
}

TEST_CASE("deficit examples") {
    const GeneratorSet u(1, {1.0, 3.0});
    CHECK(deficit(FiniteDiscreteMeasure::point_mass({5.0}), 2.5, u, 0.5) == 2.5);
    CHECK(deficit(FiniteDiscreteMeasure::point_mass({5.0}), 2.5, u, 1.0) == 0.0);
    CHECK(deficit(FiniteDiscreteMeasure::point_mass({4.4}), 1.0, u, 0.5) == 0.0);
    const FiniteDiscreteMeasure m(1, {-2.0, 0.3, 7.0}, {0.25, 0.5, 0.25});
    CHECK(deficit(m, 4.0, u, 0.3) == doctest::Approx(1.0));
    CHECK(deficit(m, 8.0, u, 0.3) == doctest::Approx(2.0));
    CHECK_THROWS_AS(deficit(m, 1.0, GeneratorSet(1, std::vector<double>(19, 1.0)), 0.1), TooManyGeneratorsError);
}

TEST_CASE("depth-first neighborhood test matches the brute-force distance oracle") {
    CounterRng rng(62);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t d = pick(rng, 1, 2);
        const auto u = random_generators(rng, d, pick(rng, 0, 6));
        const double tau = uniform(rng, 0.0, 1.5);
        std::vector<Atom> atoms;
        const std::size_t n = pick(rng, 1, 12);
        for (std::size_t i = 0; i < n; ++i) atoms.push_back({random_point(rng, d, 10.0), 1.0 / static_cast<double>(n)});
        const FiniteDiscreteMeasure m(d, atoms);
        CHECK(deficit(m, 1.0, u, tau) == doctest::Approx(deficit_oracle(m, 1.0, u, tau)).epsilon(1e-12));
        const auto pts = k1_oracle(u);
        for (std::size_t i = 0; i < m.size(); ++i) {
            double best = 1e300;
            for (const auto& p : pts) best = std::min(best, sup_distance(m.point(i), p));
            CHECK(in_K1_neighborhood(m.point(i), u, tau) == (best <= tau));
        }
        // exact K_1 points are covered at radius zero
        for (std::size_t i = 0; i < std::min<std::size_t>(pts.size(), 10); ++i) CHECK(in_K1_neighborhood(pts[i], u, 0.0));
    }
}

TEST_CASE("deficit is monotone in generators and radius") {
    CounterRng rng(63);
    for (int trial = 0; trial < 80; ++trial) {
        const auto m = random_real_law(rng, pick(rng, 2, 10));
        auto u = GeneratorSet(1);
        double prev = deficit(m, 1.0, u, 0.2);
        for (int j = 0; j < 4; ++j) {
            u = u.with(random_point(rng, 1, 3.0));
            const double cur = deficit(m, 1.0, u, 0.2);
            CHECK(cur <= prev + 1e-15);
            prev = cur;
            double prev_tau = deficit(m, 1.0, u, 0.0);
            for (double tau = 0.1; tau < 2.0; tau += 0.3) {
                const double c = deficit(m, 1.0, u, tau);
                CHECK(c <= prev_tau + 1e-15);
                prev_tau = c;
            }
        }
    }
}

TEST_CASE("search with no generators") {
    const FiniteDiscreteMeasure m(2, {{{0.1, 0.1}, 0.5}, {{3, 0}, 0.25}, {{0, 0.5}, 0.25}});
    const auto rep = search_generators(m, 2.0, 0.4, 0, SearchMode::greedy);
    CHECK(rep.r == 0);
    CHECK(rep.deficit == doctest::Approx(2.0 * 0.5));
    CHECK(rep.uncovered.size() == 2);
    CHECK(search_generators(m, 2.0, 0.4, 0, SearchMode::exact).deficit == rep.deficit);
}

TEST_CASE("greedy recovers planted structure") {
    CounterRng rng(64);
    int successes = 0;
    const int trials = 20;
    for (int trial = 0; trial < trials; ++trial) {
        const std::size_t d = pick(rng, 1, 2);
        const auto u = random_generators(rng, d, 2, 5.0);
        const double tau = 0.3;
        const auto m = planted(rng, u, tau, 50);
        const auto rep = search_generators(m, 1.0, tau, 4, SearchMode::greedy, std::nullopt, trial);
        if (rep.deficit == 0.0 && rep.r <= 4) ++successes;
        // deficit history never increases
        for (std::size_t i = 1; i < rep.deficit_history.size(); ++i) {
            CHECK(rep.deficit_history[i] <= rep.deficit_history[i - 1] + 1e-15);
        }
        CHECK(rep.deficit == doctest::Approx(deficit_oracle(m, 1.0, rep.generators, tau)).epsilon(1e-12));
    }
    CHECK(successes >= trials - 1);
}

TEST_CASE("exact search never loses to greedy on tiny pools") {
    CounterRng rng(65);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d = pick(rng, 1, 2);
        std::vector<Atom> atoms;
        const std::size_t n = pick(rng, 3, 8);
        for (std::size_t i = 0; i < n; ++i) atoms.push_back({random_point(rng, d, 4.0), uniform(rng, 0.1, 1.0)});
        const FiniteDiscreteMeasure m(d, atoms, MeasureKind::unnormalized);
        std::vector<double> flat;
        const std::size_t pool_size = pick(rng, 4, 12);
        for (std::size_t i = 0; i < pool_size; ++i) {
            const auto p = random_point(rng, d, 4.0);
            flat.insert(flat.end(), p.begin(), p.end());
        }
        const PointCloud pool{d, flat};
        const std::size_t r_max = pick(rng, 1, 3);
        const double tau = uniform(rng, 0.2, 1.0);
        const auto g = search_generators(m, 1.0, tau, r_max, SearchMode::greedy, pool);
        const auto e = search_generators(m, 1.0, tau, r_max, SearchMode::exact, pool);
        CHECK(e.deficit <= g.deficit + 1e-12);
        CHECK(e.deficit == doctest::Approx(deficit_oracle(m, 1.0, e.generators, tau)).epsilon(1e-12));
    }
}

TEST_CASE("exact search rejects huge pools; default pool contains the atoms") {
    CounterRng rng(66);
    const auto m = random_real_law(rng, 40);
    CHECK_THROWS_AS(search_generators(m, 1.0, 0.1, 6, SearchMode::exact), InstanceTooLargeError);
    const auto pool = default_candidate_pool(m, 0);
    std::set<double> entries(pool.coords.begin(), pool.coords.end());
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(entries.count(std::abs(m.location(i))) == 1);
    const auto thin = default_candidate_pool(m, 0, 100);
    CHECK(thin.coords.size() <= std::max<std::size_t>(100, m.size()));
    CHECK(default_candidate_pool(m, 0, 100).coords == thin.coords);
}

TEST_CASE("scaling report: deterministic and stable across an intensity sweep") {
    const FiniteDiscreteMeasure jumps(1, {-1.0, 1.0}, {0.5, 0.5});
    std::vector<StructureReport> reps;
    for (double alpha : {4.0, 16.0, 64.0}) reps.push_back(theorem_scaling_report(CompoundPoissonModel(alpha, jumps), 0.5, 6, 20000, 5));
    for (std::size_t i = 1; i < reps.size(); ++i) CHECK(*reps[i].gamma < *reps[i - 1].gamma);
    double lo = 1e300;
    double hi = 0.0;
    for (const auto& r : reps) {
        CHECK(r.ratio_r.has_value());
        lo = std::min(lo, *r.ratio_r);
        hi = std::max(hi, *r.ratio_r);
    }
    CHECK(hi <= 10.0 * lo);
    const auto again = theorem_scaling_report(CompoundPoissonModel(16.0, jumps), 0.5, 6, 20000, 5);
    CHECK(*again.gamma == *reps[1].gamma);
    CHECK(again.deficit == reps[1].deficit);

    const auto tiny = theorem_scaling_report(CompoundPoissonModel(0.01, FiniteDiscreteMeasure::point_mass({0.1})), 0.5, 3, 20000, 5);
    CHECK(tiny.r == 0);
    CHECK(tiny.deficit == 0.0);
    CHECK(*tiny.gamma > 0.95);
}

TEST_CASE("product report uses exact gamma for small factors") {
    std::vector<FiniteDiscreteMeasure> factors;
    for (int j = 0; j < 6; ++j) factors.push_back(translate(rademacher(), std::vector<double>{static_cast<double>(j)}));
    const auto rep = product_scaling_report(factors, 1.0, 4, 20000, 3);
    // sum of 6 shifted signs: the central binomial mass
    CHECK(*rep.gamma == doctest::Approx(20.0 / 64.0).epsilon(1e-12));
    CHECK(rep.gamma_half_width == 0.0);
    CHECK(!rep.notes.empty());
}

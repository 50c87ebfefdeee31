#include "verify.hpp"

#include "anticonc/bounds.hpp"
#include "anticonc/charfn.hpp"
#include "anticonc/concentration.hpp"
#include "anticonc/idiv.hpp"
#include "anticonc/rng.hpp"
#include "anticonc/structure.hpp"

#include <cmath>
#include <functional>

namespace anticonc::cli {

namespace {

double uniform(CounterRng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

std::size_t pick(CounterRng& rng, std::size_t lo, std::size_t hi) { return lo + rng.below(hi - lo + 1); }

FiniteDiscreteMeasure random_law(CounterRng& rng, std::size_t atoms) {
    std::vector<double> x(atoms);
    std::vector<double> p(atoms);
    double total = 0.0;
    for (std::size_t i = 0; i < atoms; ++i) {
        x[i] = uniform(rng, -3.0, 3.0);
        p[i] = uniform(rng, 0.1, 1.0);
        total += p[i];
    }
    for (double& v : p) v /= total;
    return FiniteDiscreteMeasure(1, x, p);
}

CoefficientVector random_coeffs(CounterRng& rng, std::size_t dim, std::size_t n) {
    std::vector<double> flat(dim * n);
    for (double& v : flat) v = uniform(rng, -2.0, 2.0);
    return CoefficientVector(dim, flat);
}

std::vector<double> random_vec(CounterRng& rng, std::size_t dim, double half_width) {
    std::vector<double> v(dim);
    for (double& x : v) x = uniform(rng, -half_width, half_width);
    return v;
}

std::vector<double> positive_weights(CounterRng& rng, const FiniteDiscreteMeasure& g) {
    std::vector<double> w(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) w[j] = std::abs(g.location(j)) < 1e-12 ? 0.0 : uniform(rng, 0.1, 1.0);
    return w;
}

using Trial = std::function<bool(CounterRng&)>;

struct Check {
    const char* name;
    std::size_t trials;
    Trial trial;
};

std::vector<Check> checks() {
    std::vector<Check> out;
    out.push_back({"littlewood_offord_all_ones", 20, [n = 0](CounterRng&) mutable {
                       ++n;
                       double c = 1.0;
                       for (int i = 0; i < n / 2; ++i) c = c * (n - i) / (i + 1);
                       const auto v = rademacher_sum_concentration(CoefficientVector::scalars(std::vector<double>(n, 1.0)), 1.0);
                       return std::abs(v.value - c / std::ldexp(1.0, n)) <= 1e-12;
                   }});
    out.push_back({"rademacher_dp_matches_exact", 40, [](CounterRng& rng) {
                       std::vector<double> a(pick(rng, 1, 10));
                       for (double& v : a) v = static_cast<double>(pick(rng, 1, 8)) / 4.0;
                       const double tau = uniform(rng, 0.0, 3.0);
                       const auto coeffs = CoefficientVector::scalars(a);
                       const double dp = rademacher_sum_concentration(coeffs, tau).value;
                       const double ex = concentration_exact_1d(weighted_sum_law(rademacher(), coeffs), tau).value;
                       return std::abs(dp - ex) <= 1e-12;
                   }});
    out.push_back({"q_monotone_in_radius", 200, [](CounterRng& rng) {
                       const auto f = random_law(rng, pick(rng, 1, 10));
                       const double l1 = uniform(rng, 0.0, 4.0);
                       const double l2 = l1 + uniform(rng, 0.0, 2.0);
                       return concentration_exact_1d(f, l1).value <= concentration_exact_1d(f, l2).value + 1e-15;
                   }});
    out.push_back({"regularity", 500, [](CounterRng& rng) {
                       const auto f = random_law(rng, pick(rng, 1, 10));
                       const double mu = uniform(rng, 0.01, 6.0);
                       const double lambda = uniform(rng, 0.01, 6.0);
                       const double k = static_cast<double>(paper_floor(mu / lambda) + 2);
                       return concentration_exact_1d(f, mu).value <= k * concentration_exact_1d(f, lambda).value + 1e-12;
                   }});
    out.push_back({"q_scaling", 200, [](CounterRng& rng) {
                       const auto f = random_law(rng, pick(rng, 1, 10));
                       const double z = uniform(rng, 0.2, 5.0) * (rng.below(2) ? 1.0 : -1.0);
                       const double tau = uniform(rng, 0.0, 4.0);
                       const double lhs = concentration_exact_1d(scale(f, z), tau).value;
                       const double rhs = concentration_exact_1d(f, tau / std::abs(z)).value;
                       return std::abs(lhs - rhs) <= 1e-12;
                   }});
    out.push_back({"cf_origin_bound_hermitian", 300, [](CounterRng& rng) {
                       const std::size_t d = pick(rng, 1, 3);
                       const auto law = random_law(rng, pick(rng, 1, 4));
                       const auto a = random_coeffs(rng, d, pick(rng, 1, 5));
                       auto t = random_vec(rng, d, 5.0);
                       const auto v = cf_weighted_sum(law, a, t);
                       for (double& x : t) x = -x;
                       const auto w = cf_weighted_sum(law, a, t);
                       const auto one = cf_weighted_sum(law, a, std::vector<double>(d, 0.0));
                       return std::abs(one - 1.0) <= 1e-12 && std::abs(v) <= 1.0 + 1e-12 &&
                              std::abs(w - std::conj(v)) <= 1e-12;
                   }});
    out.push_back({"envelope_dominance", 1000, [](CounterRng& rng) {
                       const std::size_t d = pick(rng, 1, 3);
                       const auto law = random_law(rng, pick(rng, 1, 4));
                       const auto a = random_coeffs(rng, d, pick(rng, 1, 5));
                       const auto t = random_vec(rng, d, 6.0);
                       return std::abs(cf_weighted_sum(law, a, t)) <= symmetrization_envelope(a, symmetrize(law), t) + 1e-12;
                   }});
    out.push_back({"envelope_submeasure_monotone", 300, [](CounterRng& rng) {
                       const auto g = symmetrize(random_law(rng, pick(rng, 1, 4)));
                       std::vector<double> w(g.size());
                       for (double& x : w) x = uniform(rng, 0.0, 1.0);
                       const auto a = random_coeffs(rng, 1, pick(rng, 1, 4));
                       const auto t = random_vec(rng, 1, 5.0);
                       return submeasure_envelope(a, SubMeasureSpec(g, w), t) >= symmetrization_envelope(a, g, t) - 1e-15;
                   }});
    out.push_back({"cf_H_identities", 1000, [](CounterRng& rng) {
                       const std::size_t d = pick(rng, 1, 3);
                       const auto a = random_coeffs(rng, d, pick(rng, 1, 6));
                       const auto t = random_vec(rng, d, 4.0);
                       const double z = uniform(rng, -3.0, 3.0);
                       const double l1 = uniform(rng, 0.0, 2.0);
                       const double l2 = uniform(rng, 0.0, 2.0);
                       auto zt = t;
                       for (double& x : zt) x *= z;
                       const double h = cf_H(a, z, l1, t);
                       return h > 0.0 && std::abs(h - cf_H(a, 1.0, l1, zt)) <= 1e-12 &&
                              std::abs(h - cf_H(a, -z, l1, t)) <= 1e-12 &&
                              std::abs(cf_H(a, z, l1 + l2, t) - h * cf_H(a, z, l2, t)) <= 1e-12;
                   }});
    out.push_back({"compound_poisson_cf_equals_cf_H", 100, [](CounterRng& rng) {
                       const std::size_t d = pick(rng, 1, 3);
                       const auto a = random_coeffs(rng, d, pick(rng, 1, 6));
                       const double lambda = uniform(rng, 0.05, 4.0);
                       const auto t = random_vec(rng, d, 5.0);
                       return std::abs(cf_compound_poisson(spectral_of_coefficients(a, lambda), t) -
                                       cf_H(a, 1.0, lambda, t)) <= 1e-12;
                   }});
    out.push_back({"threshold_equals_theorem1", 20, [](CounterRng& rng) {
                       const auto g = symmetrize(random_law(rng, pick(rng, 2, 3)));
                       const auto a = random_coeffs(rng, 1, pick(rng, 1, 4));
                       const double eps = uniform(rng, 0.3, 2.0);
                       const double tau = uniform(rng, 0.1, 3.0);
                       const double delta = std::abs(g.location(g.size() - 1));
                       const auto c = corollary_threshold_rhs(a, g, delta, eps, tau);
                       const auto t = theorem1_rhs(a, SubMeasureSpec::indicator_tail(g, delta), eps, tau);
                       return std::abs(c.rhs - t.rhs) <= 1e-12 * std::max(1.0, t.rhs) &&
                              std::abs(c.exponent_integral - t.exponent_integral) <= 1e-12;
                   }});
    out.push_back({"logweight_exponent_bounded", 30, [](CounterRng& rng) {
                       const auto g = symmetrize(random_law(rng, pick(rng, 2, 4)));
                       const auto r = corollary_logweight_rhs(random_coeffs(rng, 1, pick(rng, 1, 3)), g,
                                                              uniform(rng, 0.2, 2.0), uniform(rng, 0.2, 5.0));
                       return r.exponent_integral <= *r.bounding_exponent + 1e-12;
                   }});
    out.push_back({"theorem1_rhs_at_least_q", 20, [](CounterRng& rng) {
                       const auto g = symmetrize(random_law(rng, pick(rng, 2, 3)));
                       const auto r = theorem1_rhs(random_coeffs(rng, 1, pick(rng, 1, 3)),
                                                   SubMeasureSpec(g, positive_weights(rng, g)), uniform(rng, 0.3, 2.0),
                                                   uniform(rng, 0.1, 3.0));
                       return r.exponent_integral >= 0.0 && r.rhs >= r.q_proxy;
                   }});
    out.push_back({"holder_step", 10, [](CounterRng& rng) {
                       const auto a = random_coeffs(rng, 1, pick(rng, 1, 4));
                       std::vector<double> z(pick(rng, 1, 3));
                       for (double& v : z) v = uniform(rng, 0.2, 2.0);
                       const FiniteDiscreteMeasure f(1, z, std::vector<double>(z.size(), 1.0 / static_cast<double>(z.size())));
                       const auto h = holder_step(a, f, uniform(rng, 0.2, 2.0), uniform(rng, 0.5, 3.0));
                       return h.lhs <= h.rhs * (1.0 + 1e-6);
                   }});
    out.push_back({"proof_chain_ordered", 8, [](CounterRng& rng) {
                       const auto law = random_law(rng, pick(rng, 2, 3));
                       const auto a = random_coeffs(rng, 1, pick(rng, 1, 3));
                       const auto g = symmetrize(law);
                       const auto c = theorem1_chain(a, law, positive_weights(rng, g), uniform(rng, 0.3, 1.5));
                       const double s = 1.0 + 1e-6;
                       return c.esseen_fa <= c.esseen_envelope_g * s && c.esseen_envelope_g <= c.esseen_envelope_v * s &&
                              c.esseen_envelope_v <= c.holder_bound * s;
                   }});
    out.push_back({"k1_symmetric_contains_origin", 100, [](CounterRng& rng) {
                       const std::size_t d = pick(rng, 1, 2);
                       const std::size_t r = pick(rng, 0, 6);
                       std::vector<double> flat(d * r);
                       for (double& v : flat) v = static_cast<double>(pick(rng, 0, 6)) - 3.0;
                       const GeneratorSet u(d, flat);
                       const auto k = enumerate_K1(u);
                       if (k.size() > static_cast<std::size_t>(std::pow(3.0, static_cast<double>(r)))) return false;
                       for (std::size_t i = 0; i < k.size(); ++i) {
                           std::vector<double> neg(k.point(i).begin(), k.point(i).end());
                           for (double& v : neg) v = -v;
                           if (!in_K1_neighborhood(neg, u, 0.0)) return false;
                       }
                       return in_K1_neighborhood(std::vector<double>(d, 0.0), u, 0.0);
                   }});
    out.push_back({"deficit_monotone", 100, [](CounterRng& rng) {
                       const auto m = random_law(rng, pick(rng, 2, 10));
                       GeneratorSet u(1);
                       const double tau = uniform(rng, 0.0, 1.0);
                       double prev = deficit(m, 1.0, u, tau);
                       for (int j = 0; j < 4; ++j) {
                           u = u.with(random_vec(rng, 1, 3.0));
                           const double cur = deficit(m, 1.0, u, tau);
                           if (cur > prev + 1e-15 || deficit(m, 1.0, u, tau + 0.5) > cur + 1e-15) return false;
                           prev = cur;
                       }
                       return true;
                   }});
    out.push_back({"exact_search_dominates_greedy", 10, [](CounterRng& rng) {
                       const auto m = random_law(rng, pick(rng, 3, 8));
                       std::vector<double> flat(pick(rng, 4, 10));
                       for (double& v : flat) v = uniform(rng, -3.0, 3.0);
                       const PointCloud pool{1, flat};
                       const std::size_t r = pick(rng, 1, 3);
                       const double tau = uniform(rng, 0.1, 0.8);
                       const auto g = search_generators(m, 1.0, tau, r, SearchMode::greedy, pool);
                       const auto e = search_generators(m, 1.0, tau, r, SearchMode::exact, pool);
                       return e.deficit <= g.deficit + 1e-12;
                   }});
    return out;
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed) {
    const CounterRng root(seed);
    std::vector<CheckResult> results;
    std::uint64_t stream = 0;
    for (auto& check : checks()) {
        CounterRng rng = root.split(stream++);
        CheckResult r{check.name, check.trials, 0};
        for (std::size_t i = 0; i < check.trials; ++i) {
            if (!check.trial(rng)) ++r.failures;
        }
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace anticonc::cli

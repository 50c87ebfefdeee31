#include "anticonc/bounds.hpp"

#include "anticonc/errors.hpp"
#include "anticonc/idiv.hpp"
#include "anticonc/parallel.hpp"
#include "anticonc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <string>

namespace anticonc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_zero_atom(double z) {
    return std::abs(z) <= FiniteDiscreteMeasure::kMergeTolerance;
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInputError(std::string(name) + " must be positive and finite");
}

void require_scalar_law(const FiniteDiscreteMeasure& g, const char* op) {
    if (g.dim() != 1) throw DimensionError(std::string(op) + ": G must live on R");
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void finish(BoundReport& r) {
    if (r.infinite || !std::isfinite(r.exponent_integral)) {
        r.infinite = true;
        r.exponent_integral = kInf;
        r.rhs = kInf;
        return;
    }
    r.rhs = r.q_proxy * std::exp(r.exponent_integral);
    if (!std::isfinite(r.rhs)) r.infinite = true;
}

void fill_proxy(BoundReport& r, const CoefficientVector& a, const BoundOptions& options) {
    const QProxy q = q_proxy(a, r.lambda, r.eps, options);
    r.q_proxy = q.value;
    r.q_half_width = q.half_width;
    r.quadrature = q.quadrature;
    if (options.q_mode == QProxyMode::monte_carlo) r.notes.emplace_back("q_proxy estimated by Monte Carlo");
}

}  // namespace

QProxy q_proxy(const CoefficientVector& a, double lambda, double eps, const BoundOptions& options) {
    require_positive(lambda, "lambda");
    require_positive(eps, "eps");
    if (options.q_mode == QProxyMode::monte_carlo) {
        const auto model = spectral_of_coefficients(a, lambda);
        const auto mc = concentration_mc(compound_poisson_sampler(model), eps, options.mc_samples, options.seed);
        return {mc.value, mc.half_width, {}};
    }
    const auto e = esseen_functional(make_H_cf(a, 1.0, lambda), eps, options.quadrature);
    return {e.value, 0.0, e.quadrature};
}

BoundReport theorem1_rhs(const CoefficientVector& a, const SubMeasureSpec& v, double eps, double tau,
                         const BoundOptions& options) {
    require_positive(eps, "eps");
    require_positive(tau, "tau");
    const auto& g = v.base();
    require_scalar_law(g, "theorem1_rhs");
    if (!(v.lambda() > 0.0)) throw EmptySubmeasureError("theorem1_rhs: V has zero total mass");

    BoundReport r;
    r.method = "theorem1";
    r.dim = a.dim();
    r.eps = eps;
    r.tau = tau;
    r.lambda = v.lambda();

    const double d = static_cast<double>(a.dim());
    double integral = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double mass = v.mass(j);
        if (mass <= 0.0) continue;
        if (is_zero_atom(g.location(j))) {
            r.infinite = true;
            r.notes.emplace_back("V charges z = 0; the exponent diverges");
            break;
        }
        integral += mass / r.lambda * log_factor(g.location(j), tau, eps);
    }
    r.exponent_integral = r.infinite ? kInf : d * integral;
    fill_proxy(r, a, options);
    finish(r);
    return r;
}

BoundReport corollary_threshold_rhs(const CoefficientVector& a, const FiniteDiscreteMeasure& g, double delta,
                                    double eps, double tau, const BoundOptions& options) {
    require_positive(delta, "delta");
    require_positive(eps, "eps");
    require_positive(tau, "tau");
    require_scalar_law(g, "corollary_threshold_rhs");
    const double p = tail_mass(g, delta);
    if (!(p > 0.0)) {
        throw ZeroTailError("p(delta) = G{|z| >= " + std::to_string(delta) + "} is zero");
    }

    BoundReport r;
    r.method = "cor-threshold";
    r.dim = a.dim();
    r.eps = eps;
    r.tau = tau;
    r.delta = delta;
    r.p_delta = p;
    r.lambda = p;

    double sum = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double z = g.location(j);
        if (std::abs(z) >= delta) sum += log_factor(z, tau, eps) * g.mass(j);
    }
    r.exponent_integral = static_cast<double>(a.dim()) / p * sum;
    fill_proxy(r, a, options);
    finish(r);
    return r;
}

std::vector<double> logweight_weights(const FiniteDiscreteMeasure& g, double eps, double tau) {
    require_scalar_law(g, "logweight_weights");
    std::vector<double> w(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double z = g.location(j);
        w[j] = is_zero_atom(z) ? 0.0 : 1.0 / std::max(1.0, log_factor(z, tau, eps));
    }
    return w;
}

BoundReport corollary_logweight_rhs(const CoefficientVector& a, const FiniteDiscreteMeasure& g, double eps,
                                    double tau, const BoundOptions& options) {
    require_positive(eps, "eps");
    require_positive(tau, "tau");
    require_scalar_law(g, "corollary_logweight_rhs");
    const auto weights = logweight_weights(g, eps, tau);
    const SubMeasureSpec v(g, weights);
    if (!(v.lambda() > 0.0)) throw DegenerateLawError("G is concentrated at zero; the log-weight measure is empty");

    BoundReport r;
    r.method = "cor-logweight";
    r.dim = a.dim();
    r.eps = eps;
    r.tau = tau;
    r.lambda = v.lambda();

    const double d = static_cast<double>(a.dim());
    double integral = 0.0;
    double near_mass = 0.0;
    const double threshold = tau / eps;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double z = g.location(j);
        if (std::abs(z) < threshold) near_mass += g.mass(j);
        if (weights[j] > 0.0) integral += v.mass(j) / r.lambda * log_factor(z, tau, eps);
    }
    r.exponent_integral = d * integral;
    r.bounding_exponent = d * near_mass / r.lambda;
    if (r.exponent_integral > *r.bounding_exponent * (1.0 + 1e-12) + 1e-12) {
        r.notes.emplace_back("exact exponent exceeds the bounding exponent");
    }
    fill_proxy(r, a, options);
    finish(r);
    return r;
}

ThresholdSearch optimize_threshold(const CoefficientVector& a, const FiniteDiscreteMeasure& g, double eps, double tau,
                                   std::span<const double> delta_grid, const BoundOptions& options) {
    if (delta_grid.empty()) throw InvalidInputError("optimize_threshold: empty delta grid");
    require_scalar_law(g, "optimize_threshold");

    ThresholdSearch out;
    out.table.resize(delta_grid.size() + 1);
    parallel_for(delta_grid.size(), [&](std::size_t i) {
        ThresholdRow& row = out.table[i];
        row.delta = delta_grid[i];
        if (!(delta_grid[i] > 0.0) || !(tail_mass(g, delta_grid[i]) > 0.0)) return;
        row.report = corollary_threshold_rhs(a, g, delta_grid[i], eps, tau, options);
        row.feasible = true;
    });
    ThresholdRow& logweight = out.table.back();
    try {
        logweight.report = corollary_logweight_rhs(a, g, eps, tau, options);
        logweight.feasible = true;
    } catch (const DegenerateLawError&) {
        logweight.feasible = false;
    }

    std::optional<std::size_t> best;
    auto better = [](const BoundReport& x, const BoundReport& y) {
        return x.rhs < y.rhs * (1.0 - 1e-12);
    };
    auto tied = [&](const BoundReport& x, const BoundReport& y) { return !better(x, y) && !better(y, x); };
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        const ThresholdRow& row = out.table[i];
        if (!row.feasible) continue;
        if (!best) {
            best = i;
            continue;
        }
        const ThresholdRow& cur = out.table[*best];
        if (better(row.report, cur.report) || (tied(row.report, cur.report) && *row.delta > *cur.delta)) best = i;
    }
    if (!best) throw ZeroTailError("optimize_threshold: p(delta) = 0 for every grid entry");
    if (logweight.feasible && better(logweight.report, out.table[*best].report)) best = delta_grid.size();

    out.best_row = *best;
    out.best_delta = out.table[*best].delta;
    out.best = out.table[*best].report;
    return out;
}

SupFormReport sup_form_identity(const CoefficientVector& a, double p, double eps, double tau, std::uint64_t seed,
                                std::size_t n_samples) {
    require_positive(eps, "eps");
    require_positive(tau, "tau");
    if (!(p > 0.0 && p <= 1.0)) throw InvalidInputError("sup_form_identity: p must lie in (0, 1]");

    SupFormReport out;

    // (i) H^_z(t) = H^_1(z t) at random probes in the box |t| <= 1/tau.
    CounterRng rng(seed, 0x5c0ffee);
    const std::size_t d = a.dim();
    std::vector<double> t(d);
    std::vector<double> zt(d);
    out.cf_probes = 1000;
    for (std::size_t i = 0; i < out.cf_probes; ++i) {
        const double z = (rng.uniform() * 2.0 - 1.0) * 8.0 * tau / eps;
        for (std::size_t c = 0; c < d; ++c) {
            t[c] = (rng.uniform() * 2.0 - 1.0) / tau;
            zt[c] = z * t[c];
        }
        const double err = std::abs(cf_H(a, z, p, t) - cf_H(a, 1.0, p, zt));
        out.cf_scaling_error = std::max(out.cf_scaling_error, err);
    }

    // (ii) Q(H_z^p, tau) = Q(H_1^p, tau/z) over the grid, on one shared sample.
    const auto model = spectral_of_coefficients(a, p);
    const PointCloud shared = sample_compound_poisson(model, n_samples, seed);
    for (int i = 0; i < 4; ++i) {
        const double z = tau / eps * std::ldexp(1.0, i);
        out.z_grid.push_back(z);
        out.grid_values.push_back(concentration_of_samples(shared, tau / z, seed));
    }
    out.argmax = 0;
    for (std::size_t i = 1; i < out.grid_values.size(); ++i) {
        if (out.grid_values[i].value > out.grid_values[out.argmax].value) out.argmax = i;
    }
    const auto& first = out.grid_values.front();
    out.sup_at_smallest_z = out.grid_values[out.argmax].value - first.value <= 3.0 * first.half_width;

    const PointCloud fresh = sample_compound_poisson(model, n_samples, seed ^ 0x9e3779b97f4a7c15ull);
    out.direct = concentration_of_samples(fresh, eps, seed + 1);
    out.direct_agrees =
        std::abs(first.value - out.direct.value) <= 3.0 * std::max(first.half_width, out.direct.half_width);
    return out;
}

HolderCheck holder_step(const CoefficientVector& a, const FiniteDiscreteMeasure& f, double lambda,
                        double half_width, const QuadratureSpec& spec) {
    require_scalar_law(f, "holder_step");
    require_positive(lambda, "lambda");
    require_positive(half_width, "half_width");
    const std::size_t d = a.dim();
    const std::size_t panels = initial_panels(half_width, max_abs(a.flat()) * max_abs(f.coords()));

    auto integrate = [&](const std::function<double(std::span<const double>)>& fn) {
        const auto q = integrate_box(fn, d, half_width, spec, panels);
        if (!q.converged) throw UnconvergedError("holder_step quadrature did not converge", q.value, q.last_change);
        return q.value;
    };

    std::vector<double> masses(f.masses().begin(), f.masses().end());
    for (double& m : masses) m *= lambda;
    HolderCheck out;
    out.lhs = integrate([&](std::span<const double> t) {
        return std::exp(-0.5 * dispersion(a, f.coords(), masses, t));
    });

    double log_rhs = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double z = f.location(j);
        const double ij = integrate([&](std::span<const double> t) { return cf_H(a, z, lambda, t); });
        log_rhs += f.mass(j) * std::log(ij);
    }
    out.rhs = std::exp(log_rhs);
    return out;
}

ChainCheck theorem1_chain(const CoefficientVector& a, const FiniteDiscreteMeasure& law, std::span<const double> weights,
                          double tau, const QuadratureSpec& spec) {
    require_positive(tau, "tau");
    const FiniteDiscreteMeasure g = symmetrize(law);
    const SubMeasureSpec v(g, std::vector<double>(weights.begin(), weights.end()));
    if (!(v.lambda() > 0.0)) throw EmptySubmeasureError("theorem1_chain: V has zero total mass");

    const std::size_t d = a.dim();
    const double half_width = 1.0 / tau;
    const double scale = std::pow(tau, static_cast<double>(d));
    const double freq = max_abs(a.flat()) * max_abs(g.coords());
    const std::size_t panels = initial_panels(half_width, freq);

    auto integrate = [&](const std::function<double(std::span<const double>)>& fn) {
        const auto q = integrate_box(fn, d, half_width, spec, panels, scale);
        if (!q.converged) throw UnconvergedError("theorem1_chain quadrature did not converge", scale * q.value,
                                                 q.last_change);
        return scale * q.value;
    };

    ChainCheck out;
    out.esseen_fa = esseen_functional(make_weighted_sum_cf(law, a), tau, spec).value;
    std::vector<double> v_masses(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) v_masses[j] = v.mass(j);
    out.esseen_envelope_g = integrate([&](std::span<const double> t) {
        return std::exp(-0.5 * dispersion(a, g.coords(), g.masses(), t));
    });
    out.esseen_envelope_v = integrate([&](std::span<const double> t) {
        return std::exp(-0.5 * dispersion(a, g.coords(), v_masses, t));
    });

    const double lambda = v.lambda();
    double log_bound = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double mass = v.mass(j);
        if (mass <= 0.0) continue;
        const double ij = esseen_functional(make_H_cf(a, g.location(j), lambda), tau, spec).value;
        log_bound += mass / lambda * std::log(ij);
    }
    out.holder_bound = std::exp(log_bound);
    return out;
}

}  // namespace anticonc

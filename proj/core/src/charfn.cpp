#include "anticonc/charfn.hpp"

#include "anticonc/errors.hpp"
#include "anticonc/idiv.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

namespace anticonc {

namespace {

void require_same_dim(const CoefficientVector& a, std::span<const double> t, const char* op) {
    if (t.size() != a.dim()) {
        throw DimensionError(std::string(op) + ": t has dimension " + std::to_string(t.size()) + ", coefficients " +
                             std::to_string(a.dim()));
    }
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

std::complex<double> cf_weighted_sum(const FiniteDiscreteMeasure& law, const CoefficientVector& a,
                                     std::span<const double> t) {
    if (law.dim() != 1) throw DimensionError("cf_weighted_sum: law of X must live on R");
    require_same_dim(a, t, "cf_weighted_sum");
    std::complex<double> product(1.0, 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double s = a.dot(k, t);
        double re = 0.0;
        double im = 0.0;
        for (std::size_t j = 0; j < law.size(); ++j) {
            const double phase = s * law.location(j);
            re += law.mass(j) * std::cos(phase);
            im += law.mass(j) * std::sin(phase);
        }
        product *= std::complex<double>(re, im);
    }
    return product;
}

double cf_H(const CoefficientVector& a, double z, double lambda, std::span<const double> t) {
    require_same_dim(a, t, "cf_H");
    if (!(lambda >= 0.0)) throw InvalidInputError("cf_H: lambda must be nonnegative");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += 1.0 - std::cos(a.dot(k, t) * z);
    return std::exp(-0.5 * lambda * s);
}

double dispersion(const CoefficientVector& a, std::span<const double> z, std::span<const double> masses,
                  std::span<const double> t) {
    require_same_dim(a, t, "dispersion");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double u = a.dot(k, t);
        double inner = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) inner += masses[j] * (1.0 - std::cos(u * z[j]));
        s += inner;
    }
    return s;
}

double symmetrization_envelope(const CoefficientVector& a, const FiniteDiscreteMeasure& g,
                               std::span<const double> t) {
    if (g.dim() != 1) throw DimensionError("symmetrization_envelope: G must live on R");
    if (!g.is_symmetric()) throw InvalidInputError("symmetrization_envelope: G must be symmetric");
    return std::exp(-0.5 * dispersion(a, g.coords(), g.masses(), t));
}

double submeasure_envelope(const CoefficientVector& a, const SubMeasureSpec& v, std::span<const double> t) {
    const auto& g = v.base();
    if (g.dim() != 1) throw DimensionError("submeasure_envelope: G must live on R");
    std::vector<double> masses(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) masses[j] = v.mass(j);
    return std::exp(-0.5 * dispersion(a, g.coords(), masses, t));
}

CharFn make_weighted_sum_cf(FiniteDiscreteMeasure law, CoefficientVector a) {
    const double freq = max_abs(a.flat()) * max_abs(law.coords());
    const std::size_t d = a.dim();
    auto shared_law = std::make_shared<const FiniteDiscreteMeasure>(std::move(law));
    auto shared_a = std::make_shared<const CoefficientVector>(std::move(a));
    return CharFn{d,
                  [shared_law, shared_a](std::span<const double> t) {
                      return cf_weighted_sum(*shared_law, *shared_a, t);
                  },
                  false, freq};
}

CharFn make_H_cf(CoefficientVector a, double z, double lambda) {
    const double freq = max_abs(a.flat()) * std::abs(z);
    const std::size_t d = a.dim();
    auto shared_a = std::make_shared<const CoefficientVector>(std::move(a));
    return CharFn{d,
                  [shared_a, z, lambda](std::span<const double> t) {
                      return std::complex<double>(cf_H(*shared_a, z, lambda, t), 0.0);
                  },
                  true, freq};
}

CharFn make_compound_poisson_cf(const CompoundPoissonModel& model) {
    auto shared = std::make_shared<const CompoundPoissonModel>(model);
    const auto& jumps = model.jump_law();
    return CharFn{model.dim(),
                  [shared](std::span<const double> t) { return cf_compound_poisson(*shared, t); },
                  jumps.is_symmetric(), max_abs(jumps.coords())};
}

std::size_t initial_panels(double half_width, double frequency) {
    const double panels = std::ceil(half_width * frequency / std::numbers::pi);
    if (!(panels >= 1.0)) return 1;
    return static_cast<std::size_t>(std::min(panels, 4096.0));
}

EsseenResult esseen_functional(const CharFn& cf, double tau, const QuadratureSpec& spec) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidInputError("esseen_functional: tau must be positive");
    if (cf.dim == 0 || cf.dim > 3) throw DimensionError("esseen_functional supports d <= 3");
    const double half_width = 1.0 / tau;
    const double scale = std::pow(tau, static_cast<double>(cf.dim));
    auto integrand = [&cf](std::span<const double> t) {
        const auto v = cf(t);
        return cf.nonnegative ? v.real() : std::abs(v);
    };
    const auto q = integrate_box(integrand, cf.dim, half_width, spec, initial_panels(half_width, cf.frequency), scale);
    EsseenResult out{scale * q.value, q};
    if (!q.converged) {
        throw UnconvergedError("Esseen quadrature did not converge within " + std::to_string(spec.max_refinements) +
                                   " refinements",
                               out.value, q.last_change);
    }
    return out;
}

}  // namespace anticonc

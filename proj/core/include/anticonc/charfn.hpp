#pragma once

#include "anticonc/measure.hpp"
#include "anticonc/quadrature.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <span>

namespace anticonc {

class CompoundPoissonModel;

/// A characteristic function t in R^d -> C with integration hints.
struct CharFn {
    std::size_t dim = 1;
    std::function<std::complex<double>(std::span<const double>)> eval;
    /// Known to be real and >= 0 everywhere (e.g. H_z^lambda). With this flag
    /// the Esseen functional is also a lower bound for Q up to a d-constant.
    bool nonnegative = false;
    /// Largest angular frequency along any axis; seeds the initial panel count.
    double frequency = 0.0;

    std::complex<double> operator()(std::span<const double> t) const { return eval(t); }
};

/// F^_a(t) = prod_k phi_X(<t, a_k>) for X ~ law on R.
std::complex<double> cf_weighted_sum(const FiniteDiscreteMeasure& law, const CoefficientVector& a,
                                     std::span<const double> t);

/// H^_z^lambda(t) = exp(-(lambda/2) sum_k (1 - cos(<t, a_k> z))).
double cf_H(const CoefficientVector& a, double z, double lambda, std::span<const double> t);

/// sum_k sum_j m_j (1 - cos(<t, a_k> z_j)) over the atoms of a measure on R.
double dispersion(const CoefficientVector& a, std::span<const double> z, std::span<const double> masses,
                  std::span<const double> t);

/// exp(-1/2 sum_k E(1 - cos(<t, a_k> Z))), Z ~ G. Dominates |F^_a(t)| when
/// G is the symmetrization of the law of X. Requires G symmetric on R.
double symmetrization_envelope(const CoefficientVector& a, const FiniteDiscreteMeasure& g,
                               std::span<const double> t);

/// The same exponent taken against V = f * G; no symmetry required.
double submeasure_envelope(const CoefficientVector& a, const SubMeasureSpec& v, std::span<const double> t);

CharFn make_weighted_sum_cf(FiniteDiscreteMeasure law, CoefficientVector a);
CharFn make_H_cf(CoefficientVector a, double z, double lambda);
CharFn make_compound_poisson_cf(const CompoundPoissonModel& model);

struct EsseenResult {
    double value = 0.0;
    QuadratureResult quadrature;
};

/// tau^d * integral over the sup-norm box |t| <= 1/tau of |cf(t)|.
/// Throws UnconvergedError (carrying the finest estimate) at the refinement limit.
EsseenResult esseen_functional(const CharFn& cf, double tau, const QuadratureSpec& spec = {});

/// Panel count resolving cosines of angular frequency `frequency` on [-T, T].
std::size_t initial_panels(double half_width, double frequency);

}  // namespace anticonc

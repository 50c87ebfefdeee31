#pragma once

#include "anticonc/measure.hpp"
#include "anticonc/sampling.hpp"

#include <complex>
#include <cstdint>
#include <span>

namespace anticonc {

/// Compound Poisson law with characteristic function exp(alpha (M^(t) - 1)):
/// a Poisson(alpha) number of i.i.d. jumps drawn from M.
class CompoundPoissonModel {
public:
    /// Throws InvalidInputError for negative or non-finite alpha and
    /// InvalidMeasureError when the jump law is not a probability measure.
    CompoundPoissonModel(double alpha, FiniteDiscreteMeasure jump_law);

    double alpha() const noexcept { return alpha_; }
    const FiniteDiscreteMeasure& jump_law() const noexcept { return jump_law_; }
    std::size_t dim() const noexcept { return jump_law_.dim(); }

private:
    double alpha_;
    FiniteDiscreteMeasure jump_law_;
};

/// H_1^lambda as a compound Poisson law. Its Levy measure is
/// (lambda/4) sum_k (E_{a_k} + E_{-a_k}), i.e. alpha = lambda n / 2 with
/// mass 1/(2n) on each of +-a_k.
CompoundPoissonModel spectral_of_coefficients(const CoefficientVector& a, double lambda);

std::complex<double> cf_compound_poisson(const CompoundPoissonModel& model, std::span<const double> t);

/// n i.i.d. draws; deterministic in (model, n, seed).
PointCloud sample_compound_poisson(const CompoundPoissonModel& model, std::size_t n, std::uint64_t seed);

/// The same draws packaged for concentration_mc.
BatchSampler compound_poisson_sampler(CompoundPoissonModel model);

}  // namespace anticonc

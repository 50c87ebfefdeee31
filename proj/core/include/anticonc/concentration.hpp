#pragma once

#include "anticonc/measure.hpp"
#include "anticonc/sampling.hpp"

#include <cstddef>
#include <cstdint>

namespace anticonc {

// Q(F, lambda) = sup_x P(Y in x + lambda B), B the closed Euclidean ball of
// radius 1/2. In d = 1 this is the largest mass of a closed interval of
// length lambda; in d = 2 of a closed disk of radius lambda/2.

enum class ConcentrationMethod { exact_1d, exact_2d, monte_carlo, dp };

const char* to_string(ConcentrationMethod method) noexcept;

struct ConcentrationResult {
    double value = 0.0;
    ConcentrationMethod method = ConcentrationMethod::exact_1d;
    /// Bootstrap half-width (1.96 standard deviations); zero for exact methods.
    double half_width = 0.0;
    std::size_t samples = 0;
};

/// Resamples used by the Monte Carlo confidence half-width.
inline constexpr std::size_t kBootstrapResamples = 200;
inline constexpr std::size_t kMinMonteCarloSamples = 100;

/// Sliding closed window over sorted atoms. lambda = 0 gives the largest atom.
ConcentrationResult concentration_exact_1d(const FiniteDiscreteMeasure& f, double lambda);

/// Candidate-center search: every atom, and for each pair at distance <= lambda
/// both centers of radius-lambda/2 circles through the pair. O(n^3).
ConcentrationResult concentration_exact_2d(const FiniteDiscreteMeasure& f, double lambda);

/// Dispatches on dimension; DimensionError for d >= 3.
ConcentrationResult concentration_exact(const FiniteDiscreteMeasure& f, double lambda);

/// Monte Carlo estimate from `n_samples` draws of `sampler`. In d = 1 the
/// empirical measure's window maximum is exact; in d >= 2 the sample points
/// serve as candidate centers, so the statistic is a lower bound of the
/// empirical concentration. Deterministic given the seed.
ConcentrationResult concentration_mc(const BatchSampler& sampler, double lambda, std::size_t n_samples,
                                     std::uint64_t seed);

/// Same estimator applied to an existing sample; `seed` drives the bootstrap only.
ConcentrationResult concentration_of_samples(const PointCloud& samples, double lambda, std::uint64_t seed);

/// Exact Q(F_a, tau) for Rademacher X. Dyadic coefficients go through an
/// integer subset-sum DP (any n); otherwise the 2^n sign patterns are
/// enumerated with atom merging, which is limited by kMaxEnumerationAtoms.
ConcentrationResult rademacher_sum_concentration(const CoefficientVector& a, double tau);

inline constexpr std::size_t kMaxEnumerationAtoms = std::size_t{1} << 25;
inline constexpr std::size_t kMaxDpBins = std::size_t{1} << 26;

}  // namespace anticonc

#pragma once

#include "anticonc/measure.hpp"
#include "anticonc/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace anticonc {

/// n points in R^d, stored row-major.
struct PointCloud {
    std::size_t dim = 1;
    std::vector<double> coords;

    std::size_t size() const noexcept { return dim == 0 ? 0 : coords.size() / dim; }
    std::span<const double> point(std::size_t i) const noexcept { return {coords.data() + i * dim, dim}; }
};

/// Produces n points deterministically from a seed.
using BatchSampler = std::function<PointCloud(std::size_t n, std::uint64_t seed)>;

/// Samples per RNG stream; batch b of a run with seed s draws from CounterRng(s).split(b).
inline constexpr std::size_t kSampleBatch = 4096;

/// Walker/Vose alias table over a finite weight vector.
class AliasTable {
public:
    explicit AliasTable(std::span<const double> weights);

    std::size_t operator()(CounterRng& rng) const noexcept;
    std::size_t size() const noexcept { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

/// Poisson(mean) variate: sequential inversion below 30, Hormann's PTRS
/// transformed rejection above.
std::uint64_t sample_poisson(double mean, CounterRng& rng);

/// Sampler for S_a = sum_k X_k a_k with X_k i.i.d. from `law` (d = 1).
BatchSampler weighted_sum_sampler(FiniteDiscreteMeasure law, CoefficientVector a);

/// Fills a cloud of n points by running `fill(rng, out)` once per point, in
/// batches of kSampleBatch evaluated concurrently under split streams.
PointCloud sample_in_batches(std::size_t dim, std::size_t n, std::uint64_t seed,
                             const std::function<void(CounterRng&, std::span<double>)>& fill);

/// Empirical measure with mass 1/n per sample (duplicates merged).
FiniteDiscreteMeasure empirical_measure(const PointCloud& cloud);

}  // namespace anticonc

#include "anticonc/sampling.hpp"

#include "anticonc/errors.hpp"
#include "anticonc/parallel.hpp"

#include <cmath>
#include <memory>
#include <numeric>

namespace anticonc {

AliasTable::AliasTable(std::span<const double> weights) : prob_(weights.size()), alias_(weights.size()) {
    const std::size_t n = weights.size();
    if (n == 0) throw InvalidInputError("alias table needs at least one weight");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw InvalidInputError("alias table weights must have positive total");

    std::vector<double> scaled(n);
    std::vector<std::size_t> small;
    std::vector<std::size_t> large;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = weights[i] * static_cast<double>(n) / total;
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        const std::size_t s = small.back();
        small.pop_back();
        const std::size_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (std::size_t i : large) {
        prob_[i] = 1.0;
        alias_[i] = i;
    }
    for (std::size_t i : small) {
        prob_[i] = 1.0;
        alias_[i] = i;
    }
}

std::size_t AliasTable::operator()(CounterRng& rng) const noexcept {
    const std::size_t column = rng.below(prob_.size());
    return rng.uniform() < prob_[column] ? column : alias_[column];
}

std::uint64_t sample_poisson(double mean, CounterRng& rng) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw InvalidInputError("Poisson mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
        double p = std::exp(-mean);
        double cdf = p;
        const double u = rng.uniform();
        std::uint64_t k = 0;
        while (u > cdf) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
            if (p <= 0.0) break;  // tail beyond double resolution
        }
        return k;
    }

    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform_open();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

PointCloud sample_in_batches(std::size_t dim, std::size_t n, std::uint64_t seed,
                             const std::function<void(CounterRng&, std::span<double>)>& fill) {
    PointCloud cloud{dim, std::vector<double>(n * dim, 0.0)};
    const std::size_t batches = (n + kSampleBatch - 1) / kSampleBatch;
    const CounterRng root(seed);
    parallel_for(batches, [&](std::size_t b) {
        CounterRng rng = root.split(b);
        const std::size_t end = std::min(n, (b + 1) * kSampleBatch);
        for (std::size_t i = b * kSampleBatch; i < end; ++i) {
            fill(rng, std::span<double>(cloud.coords.data() + i * dim, dim));
        }
    });
    return cloud;
}

BatchSampler weighted_sum_sampler(FiniteDiscreteMeasure law, CoefficientVector a) {
    if (law.dim() != 1) throw DimensionError("weighted_sum_sampler: law of X must live on R");
    auto table = std::make_shared<AliasTable>(law.masses());
    auto shared_law = std::make_shared<FiniteDiscreteMeasure>(std::move(law));
    auto shared_a = std::make_shared<CoefficientVector>(std::move(a));
    return [table, shared_law, shared_a](std::size_t n, std::uint64_t seed) {
        const auto& coeffs = *shared_a;
        const std::size_t d = coeffs.dim();
        return sample_in_batches(d, n, seed, [&](CounterRng& rng, std::span<double> out) {
            for (std::size_t k = 0; k < coeffs.size(); ++k) {
                const double x = shared_law->location((*table)(rng));
                const auto ak = coeffs[k];
                for (std::size_t c = 0; c < d; ++c) out[c] += x * ak[c];
            }
        });
    };
}

FiniteDiscreteMeasure empirical_measure(const PointCloud& cloud) {
    const std::size_t n = cloud.size();
    if (n == 0) throw InsufficientSamplesError("empirical measure of an empty sample");
    return FiniteDiscreteMeasure(cloud.dim, cloud.coords, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

}  // namespace anticonc

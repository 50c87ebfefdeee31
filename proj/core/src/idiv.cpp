#include "anticonc/idiv.hpp"

#include "anticonc/errors.hpp"

#include <cmath>
#include <memory>

namespace anticonc {

CompoundPoissonModel::CompoundPoissonModel(double alpha, FiniteDiscreteMeasure jump_law)
    : alpha_(alpha), jump_law_(std::move(jump_law)) {
    if (!std::isfinite(alpha) || alpha < 0.0) throw InvalidInputError("compound Poisson intensity must be >= 0");
    if (jump_law_.kind() != MeasureKind::probability) {
        throw InvalidMeasureError("compound Poisson jump law must be a probability measure");
    }
}

CompoundPoissonModel spectral_of_coefficients(const CoefficientVector& a, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidInputError("spectral_of_coefficients: lambda must be positive");
    }
    const std::size_t n = a.size();
    const std::size_t d = a.dim();
    std::vector<double> coords;
    coords.reserve(2 * n * d);
    for (std::size_t k = 0; k < n; ++k) {
        for (double v : a[k]) coords.push_back(v);
        for (double v : a[k]) coords.push_back(-v);
    }
    std::vector<double> masses(2 * n, 1.0 / (2.0 * static_cast<double>(n)));
    return CompoundPoissonModel(lambda * static_cast<double>(n) / 2.0,
                                FiniteDiscreteMeasure(d, std::move(coords), std::move(masses)));
}

std::complex<double> cf_compound_poisson(const CompoundPoissonModel& model, std::span<const double> t) {
    const auto& m = model.jump_law();
    if (t.size() != m.dim()) throw DimensionError("cf_compound_poisson: argument dimension mismatch");
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
        const auto x = m.point(j);
        double phase = 0.0;
        for (std::size_t c = 0; c < t.size(); ++c) phase += t[c] * x[c];
        re += m.mass(j) * (std::cos(phase) - 1.0);
        im += m.mass(j) * std::sin(phase);
    }
    return std::exp(model.alpha() * std::complex<double>(re, im));
}

PointCloud sample_compound_poisson(const CompoundPoissonModel& model, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InvalidInputError("sample_compound_poisson: need at least one sample");
    const auto& m = model.jump_law();
    const AliasTable table(m.masses());
    const double alpha = model.alpha();
    const std::size_t d = m.dim();
    return sample_in_batches(d, n, seed, [&](CounterRng& rng, std::span<double> out) {
        const std::uint64_t jumps = sample_poisson(alpha, rng);
        for (std::uint64_t i = 0; i < jumps; ++i) {
            const auto x = m.point(table(rng));
            for (std::size_t c = 0; c < d; ++c) out[c] += x[c];
        }
    });
}

BatchSampler compound_poisson_sampler(CompoundPoissonModel model) {
    auto shared = std::make_shared<const CompoundPoissonModel>(std::move(model));
    return [shared](std::size_t n, std::uint64_t seed) { return sample_compound_poisson(*shared, n, seed); };
}

}  // namespace anticonc

#include "anticonc/structure.hpp"

#include "anticonc/concentration.hpp"
#include "anticonc/errors.hpp"
#include "anticonc/parallel.hpp"
#include "anticonc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace anticonc {

namespace {

double sup_norm(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

double cover_slack(double tau, double scale) {
    return 1e-12 * (1.0 + tau + scale);
}

/// Branch-and-bound membership test against [K_1(u)]_tau.
class NeighborhoodTest {
public:
    NeighborhoodTest(const GeneratorSet& u, double tau) : u_(u), tau_(tau), d_(u.dim()), r_(u.size()) {
        // reach_[j * d + c] = sum_{i >= j} |u_i[c]|
        reach_.assign((r_ + 1) * d_, 0.0);
        for (std::size_t j = r_; j-- > 0;) {
            for (std::size_t c = 0; c < d_; ++c) reach_[j * d_ + c] = reach_[(j + 1) * d_ + c] + std::abs(u_[j][c]);
        }
        scale_ = sup_norm(std::span<const double>(reach_.data(), d_));
    }

    bool contains(std::span<const double> x, std::span<const double> shift = {}, double sign = 0.0) const {
        std::vector<double> residual(x.begin(), x.end());
        if (!shift.empty()) {
            for (std::size_t c = 0; c < d_; ++c) residual[c] -= sign * shift[c];
        }
        const double limit = tau_ + cover_slack(tau_, scale_ + sup_norm(residual));
        return search(residual, 0, limit);
    }

private:
    bool search(std::vector<double>& res, std::size_t j, double limit) const {
        for (std::size_t c = 0; c < d_; ++c) {
            if (std::abs(res[c]) - reach_[j * d_ + c] > limit) return false;
        }
        if (j == r_) return true;
        const auto uj = u_[j];
        if (search(res, j + 1, limit)) return true;
        for (double s : {1.0, -1.0}) {
            for (std::size_t c = 0; c < d_; ++c) res[c] -= s * uj[c];
            const bool hit = search(res, j + 1, limit);
            for (std::size_t c = 0; c < d_; ++c) res[c] += s * uj[c];
            if (hit) return true;
        }
        return false;
    }

    const GeneratorSet& u_;
    double tau_;
    std::size_t d_;
    std::size_t r_;
    std::vector<double> reach_;
    double scale_ = 0.0;
};

void require_streamable(const GeneratorSet& u) {
    if (u.size() > kMaxStreamingGenerators) {
        throw TooManyGeneratorsError("r = " + std::to_string(u.size()) + " exceeds the streaming limit of " +
                                     std::to_string(kMaxStreamingGenerators));
    }
}

/// Atom weights alpha * M{x_i} and a flag per atom for coverage.
struct Instance {
    const FiniteDiscreteMeasure& m;
    std::vector<double> weight;
    double tau;
};

double uncovered_weight(const Instance& inst, const GeneratorSet& u, double stop_above,
                        std::vector<std::size_t>* uncovered = nullptr) {
    const NeighborhoodTest test(u, inst.tau);
    double total = 0.0;
    for (std::size_t i = 0; i < inst.m.size(); ++i) {
        if (test.contains(inst.m.point(i))) continue;
        total += inst.weight[i];
        if (uncovered) uncovered->push_back(i);
        if (total > stop_above) return total;
    }
    return total;
}

void canonical_sign(std::span<double> v) {
    for (double& x : v) {
        if (std::abs(x) <= FiniteDiscreteMeasure::kMergeTolerance) continue;
        if (x < 0.0) {
            for (double& y : v) y = -y;
        }
        return;
    }
}

StructureReport greedy_search(const Instance& inst, std::size_t r_max, const PointCloud& pool) {
    const std::size_t d = inst.m.dim();
    const std::size_t k = pool.size();

    StructureReport report;
    report.mode = "greedy";
    report.pool_size = k;
    GeneratorSet u(d);
    std::vector<std::size_t> open;
    double current = uncovered_weight(inst, u, std::numeric_limits<double>::infinity(), &open);
    report.deficit_history.push_back(current);

    while (u.size() < r_max && current > 0.0 && k > 0) {
        // Gain of each candidate over the currently uncovered atoms.
        std::vector<double> gain(k, 0.0);
        {
            const NeighborhoodTest test(u, inst.tau);
            parallel_for(k, [&](std::size_t c) {
                const auto cand = pool.point(c);
                double g = 0.0;
                for (std::size_t i : open) {
                    const auto x = inst.m.point(i);
                    if (test.contains(x, cand, 1.0) || test.contains(x, cand, -1.0)) g += inst.weight[i];
                }
                gain[c] = g;
            });
        }
        const std::size_t pick = static_cast<std::size_t>(std::max_element(gain.begin(), gain.end()) - gain.begin());
        GeneratorSet next = gain[pick] > 0.0 ? u.with(pool.point(pick)) : u;
        double next_deficit = current - gain[pick];

        // One pass of single-generator replacement on the enlarged set.
        for (std::size_t j = 0; j < next.size() && next_deficit > 0.0; ++j) {
            std::vector<double> trial(k, std::numeric_limits<double>::infinity());
            parallel_for(k, [&](std::size_t c) {
                trial[c] = uncovered_weight(inst, next.replaced(j, pool.point(c)), next_deficit);
            });
            const std::size_t best =
                static_cast<std::size_t>(std::min_element(trial.begin(), trial.end()) - trial.begin());
            if (trial[best] < next_deficit) {
                next = next.replaced(j, pool.point(best));
                next_deficit = trial[best];
            }
        }
        if (next.size() == u.size() && !(next_deficit < current)) break;  // no progress possible

        u = std::move(next);
        open.clear();
        current = uncovered_weight(inst, u, std::numeric_limits<double>::infinity(), &open);
        report.deficit_history.push_back(current);
    }

    report.generators = u;
    report.r = u.size();
    report.deficit = current;
    report.uncovered = std::move(open);
    return report;
}

double binomial(std::size_t n, std::size_t k) {
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return c;
}

StructureReport exact_search(const Instance& inst, std::size_t r_max, const PointCloud& pool) {
    const std::size_t d = inst.m.dim();
    const std::size_t k = pool.size();
    // Multisets: a repeated generator v adds +-2v, which greedy can reach.
    const std::size_t r = k == 0 ? 0 : r_max;
    if (r > 0 && binomial(k + r - 1, r) > 1e6) {
        throw InstanceTooLargeError("exact search would visit C(" + std::to_string(k + r - 1) + ", " +
                                    std::to_string(r) + ") > 10^6 generator multisets");
    }

    StructureReport report;
    report.mode = "exact";
    report.pool_size = k;
    GeneratorSet best_u(d);
    double best = uncovered_weight(inst, best_u, std::numeric_limits<double>::infinity());
    report.deficit_history.push_back(best);

    std::vector<std::size_t> idx(r, 0);
    while (r > 0 && best > 0.0) {
        std::vector<double> flat;
        flat.reserve(r * d);
        for (std::size_t i : idx) {
            const auto p = pool.point(i);
            flat.insert(flat.end(), p.begin(), p.end());
        }
        GeneratorSet u(d, std::move(flat));
        const double value = uncovered_weight(inst, u, best);
        if (value < best) {
            best = value;
            best_u = std::move(u);
        }
        // Next nondecreasing index tuple.
        std::size_t pos = r;
        while (pos > 0 && idx[pos - 1] == k - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t q = pos; q < r; ++q) idx[q] = idx[pos - 1];
    }

    report.generators = best_u;
    report.r = best_u.size();
    std::vector<std::size_t> open;
    report.deficit = uncovered_weight(inst, best_u, std::numeric_limits<double>::infinity(), &open);
    report.uncovered = std::move(open);
    report.deficit_history.push_back(report.deficit);
    return report;
}

void fill_ratios(StructureReport& report, double gamma, double half_width) {
    report.gamma = gamma;
    report.gamma_half_width = half_width;
    const double scale = std::abs(std::log(gamma)) + 1.0;
    report.ratio_r = static_cast<double>(report.r) / scale;
    report.ratio_deficit = report.deficit / (scale * scale * scale);
}

}  // namespace

GeneratorSet::GeneratorSet(std::size_t dim, std::vector<double> flat) : dim_(dim), flat_(std::move(flat)) {
    if (dim == 0) throw DimensionError("generator dimension must be positive");
    if (flat_.size() % dim != 0) throw DimensionError("generator storage is not a multiple of dim");
    for (double v : flat_) {
        if (!std::isfinite(v)) throw InvalidInputError("generators must be finite");
    }
}

GeneratorSet GeneratorSet::with(std::span<const double> v) const {
    if (v.size() != dim_) throw DimensionError("generator dimension mismatch");
    std::vector<double> flat = flat_;
    flat.insert(flat.end(), v.begin(), v.end());
    return GeneratorSet(dim_, std::move(flat));
}

GeneratorSet GeneratorSet::replaced(std::size_t j, std::span<const double> v) const {
    if (v.size() != dim_) throw DimensionError("generator dimension mismatch");
    std::vector<double> flat = flat_;
    std::copy(v.begin(), v.end(), flat.begin() + static_cast<std::ptrdiff_t>(j * dim_));
    return GeneratorSet(dim_, std::move(flat));
}

PointCloud enumerate_K1(const GeneratorSet& u) {
    const std::size_t r = u.size();
    if (r > kMaxMaterializedGenerators) {
        throw TooManyGeneratorsError("cannot materialize K_1 for r = " + std::to_string(r) + " > " +
                                     std::to_string(kMaxMaterializedGenerators));
    }
    const std::size_t d = u.dim();
    std::vector<double> coords{};
    coords.assign(d, 0.0);
    // Each generator triples the set: S -> S - u_j, S, S + u_j.
    for (std::size_t j = 0; j < r; ++j) {
        const std::size_t count = coords.size() / d;
        std::vector<double> next;
        next.reserve(3 * coords.size());
        for (double s : {-1.0, 0.0, 1.0}) {
            for (std::size_t i = 0; i < count; ++i) {
                for (std::size_t c = 0; c < d; ++c) next.push_back(coords[i * d + c] + s * u[j][c]);
            }
        }
        coords = std::move(next);
    }
    // Deduplicate through the measure canonicalization (merge tolerance 1e-12).
    const std::size_t count = coords.size() / d;
    FiniteDiscreteMeasure set(d, std::move(coords), std::vector<double>(count, 1.0), MeasureKind::unnormalized);
    return PointCloud{d, std::vector<double>(set.coords().begin(), set.coords().end())};
}

bool in_K1_neighborhood(std::span<const double> x, const GeneratorSet& u, double tau) {
    if (x.size() != u.dim()) throw DimensionError("in_K1_neighborhood: dimension mismatch");
    require_streamable(u);
    return NeighborhoodTest(u, tau).contains(x);
}

double deficit(const FiniteDiscreteMeasure& m, double alpha, const GeneratorSet& u, double tau) {
    if (m.dim() != u.dim()) throw DimensionError("deficit: measure and generators live in different dimensions");
    if (!(alpha >= 0.0) || !(tau >= 0.0)) throw InvalidInputError("deficit: alpha and tau must be nonnegative");
    require_streamable(u);
    const NeighborhoodTest test(u, tau);
    double outside = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!test.contains(m.point(i))) outside += m.mass(i);
    }
    return alpha * outside;
}

PointCloud default_candidate_pool(const FiniteDiscreteMeasure& m, std::uint64_t seed, std::size_t cap) {
    const std::size_t d = m.dim();
    const std::size_t n = m.size();
    std::vector<double> atoms;
    std::vector<double> derived;
    std::vector<double> v(d);
    auto push = [&](std::vector<double>& out) {
        canonical_sign(v);
        if (sup_norm(v) <= FiniteDiscreteMeasure::kMergeTolerance) return;
        out.insert(out.end(), v.begin(), v.end());
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = m.point(i);
        std::copy(x.begin(), x.end(), v.begin());
        push(atoms);
        for (std::size_t c = 0; c < d; ++c) v[c] = 0.5 * x[c];
        push(derived);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto y = m.point(j);
            for (std::size_t c = 0; c < d; ++c) v[c] = x[c] - y[c];
            push(derived);
            for (std::size_t c = 0; c < d; ++c) v[c] = 0.5 * (x[c] - y[c]);
            push(derived);
        }
    }

    auto dedup = [d](std::vector<double> coords) {
        if (coords.empty()) return coords;
        const std::size_t count = coords.size() / d;
        FiniteDiscreteMeasure set(d, std::move(coords), std::vector<double>(count, 1.0), MeasureKind::unnormalized);
        return std::vector<double>(set.coords().begin(), set.coords().end());
    };
    atoms = dedup(std::move(atoms));
    derived = dedup(std::move(derived));

    const std::size_t atom_count = atoms.size() / d;
    const std::size_t derived_count = derived.size() / d;
    if (atom_count + derived_count > cap && derived_count > 0) {
        // Keep a seeded subset of the derived candidates.
        std::vector<std::size_t> order(derived_count);
        std::iota(order.begin(), order.end(), std::size_t{0});
        CounterRng rng(seed, 0xca11d1da7e);
        for (std::size_t i = derived_count; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        const std::size_t keep = cap > atom_count ? cap - atom_count : 0;
        order.resize(std::min(keep, derived_count));
        std::sort(order.begin(), order.end());
        std::vector<double> kept;
        for (std::size_t i : order) kept.insert(kept.end(), derived.begin() + i * d, derived.begin() + (i + 1) * d);
        derived = std::move(kept);
    }
    atoms.insert(atoms.end(), derived.begin(), derived.end());
    return PointCloud{d, dedup(std::move(atoms))};
}

StructureReport search_generators(const FiniteDiscreteMeasure& m, double alpha, double tau, std::size_t r_max,
                                  SearchMode mode, const std::optional<PointCloud>& candidate_pool, std::uint64_t seed) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInputError("search_generators: alpha must be >= 0");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidInputError("search_generators: tau must be >= 0");
    if (r_max > kMaxStreamingGenerators) {
        throw TooManyGeneratorsError("r_max = " + std::to_string(r_max) + " exceeds " +
                                     std::to_string(kMaxStreamingGenerators));
    }
    const PointCloud pool = candidate_pool ? *candidate_pool : default_candidate_pool(m, seed);
    if (pool.size() > 0 && pool.dim != m.dim()) throw DimensionError("candidate pool dimension mismatch");

    Instance inst{m, std::vector<double>(m.size()), tau};
    for (std::size_t i = 0; i < m.size(); ++i) inst.weight[i] = alpha * m.mass(i);

    StructureReport report = mode == SearchMode::greedy ? greedy_search(inst, r_max, pool) : exact_search(inst, r_max, pool);
    if (!candidate_pool) report.notes.emplace_back("candidate pool: atoms, pairwise differences and halves");
    return report;
}

StructureReport theorem_scaling_report(const CompoundPoissonModel& model, double tau, std::size_t r_max,
                                       std::size_t mc_samples, std::uint64_t seed) {
    const PointCloud samples = sample_compound_poisson(model, mc_samples, seed);
    const ConcentrationResult gamma = concentration_of_samples(samples, tau, seed);
    StructureReport report =
        search_generators(model.jump_law(), model.alpha(), tau, r_max, SearchMode::greedy, std::nullopt, seed);
    fill_ratios(report, gamma.value, gamma.half_width);
    if (model.dim() >= 2) report.notes.emplace_back("gamma is a sample-center lower bound in d >= 2");
    return report;
}

StructureReport product_scaling_report(const std::vector<FiniteDiscreteMeasure>& factors, double tau,
                                       std::size_t r_max, std::size_t mc_samples, std::uint64_t seed) {
    if (factors.empty()) throw InvalidInputError("product_scaling_report: no factors");
    const std::size_t d = factors.front().dim();
    for (const auto& f : factors) {
        if (f.dim() != d) throw DimensionError("product_scaling_report: factors differ in dimension");
        if (f.kind() != MeasureKind::probability) throw InvalidMeasureError("factors must be probability measures");
    }

    // gamma: exact when the convolution stays small, Monte Carlo otherwise.
    std::optional<ConcentrationResult> gamma;
    constexpr std::size_t kExactAtoms1d = std::size_t{1} << 20;
    constexpr std::size_t kExactAtoms2d = 400;
    if (d <= 2) {
        const std::size_t limit = d == 1 ? kExactAtoms1d : kExactAtoms2d;
        std::optional<FiniteDiscreteMeasure> product = factors.front();
        for (std::size_t j = 1; j < factors.size() && product; ++j) {
            if (product->size() * factors[j].size() > 16 * limit) {
                product.reset();
                break;
            }
            product = convolve(*product, factors[j]);
            if (product->size() > limit) product.reset();
        }
        if (product) gamma = concentration_exact(*product, tau);
    }
    if (!gamma) {
        std::vector<AliasTable> tables;
        tables.reserve(factors.size());
        for (const auto& f : factors) tables.emplace_back(f.masses());
        const PointCloud samples = sample_in_batches(d, mc_samples, seed, [&](CounterRng& rng, std::span<double> out) {
            for (std::size_t j = 0; j < factors.size(); ++j) {
                const auto x = factors[j].point(tables[j](rng));
                for (std::size_t c = 0; c < d; ++c) out[c] += x[c];
            }
        });
        gamma = concentration_of_samples(samples, tau, seed);
    }

    // Shift every factor by its heaviest atom (lexicographically first on ties).
    std::vector<double> coords;
    std::vector<double> masses;
    for (const auto& f : factors) {
        std::size_t top = 0;
        for (std::size_t i = 1; i < f.size(); ++i) {
            if (f.mass(i) > f.mass(top)) top = i;
        }
        const auto shift = f.point(top);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const auto p = f.point(i);
            for (std::size_t c = 0; c < d; ++c) coords.push_back(p[c] - shift[c]);
            masses.push_back(f.mass(i));
        }
    }
    const FiniteDiscreteMeasure combined(d, std::move(coords), std::move(masses), MeasureKind::unnormalized);
    StructureReport report = search_generators(combined, 1.0, tau, r_max, SearchMode::greedy, std::nullopt, seed);
    fill_ratios(report, gamma->value, gamma->half_width);
    report.notes.emplace_back("per-factor shifts fixed at each factor's heaviest atom before the search");
    return report;
}

}  // namespace anticonc

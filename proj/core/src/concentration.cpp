#include "anticonc/concentration.hpp"

#include "anticonc/errors.hpp"
#include "anticonc/parallel.hpp"
#include "anticonc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>

namespace anticonc {

namespace {

// Closed windows admit a relative slack so ties at the endpoints survive rounding.
double window_slack(double lambda, double scale) {
    return 1e-12 * (1.0 + lambda + scale);
}

double max_abs_coord(std::span<const double> coords) {
    double m = 0.0;
    for (double v : coords) m = std::max(m, std::abs(v));
    return m;
}

double clamp01(double v) {
    return std::clamp(v, 0.0, 1.0);
}

void require_radius(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidInputError("concentration radius must be finite and nonnegative");
    }
}

/// For sorted locations, first[r] is the smallest l with x[r] - x[l] <= lambda.
std::vector<std::size_t> window_starts(std::span<const double> sorted, double lambda) {
    const double reach = lambda + window_slack(lambda, max_abs_coord(sorted));
    std::vector<std::size_t> first(sorted.size());
    std::size_t l = 0;
    for (std::size_t r = 0; r < sorted.size(); ++r) {
        while (sorted[r] - sorted[l] > reach) ++l;
        first[r] = l;
    }
    return first;
}

template <typename Weights>
double max_window(const std::vector<std::size_t>& first, const Weights& w) {
    // prefix[i] = w[0] + ... + w[i-1]
    std::vector<double> prefix(first.size() + 1, 0.0);
    for (std::size_t i = 0; i < first.size(); ++i) prefix[i + 1] = prefix[i] + static_cast<double>(w[i]);
    double best = 0.0;
    for (std::size_t r = 0; r < first.size(); ++r) best = std::max(best, prefix[r + 1] - prefix[first[r]]);
    return best;
}

/// Distinct sample points with multiplicities, plus each sample's atom index.
struct SampleAtoms {
    std::size_t dim = 1;
    std::vector<double> coords;
    std::vector<std::uint64_t> counts;
    std::vector<std::uint32_t> atom_of_sample;
};

SampleAtoms group_samples(const PointCloud& cloud) {
    const std::size_t n = cloud.size();
    const std::size_t d = cloud.dim;
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t i, std::uint32_t j) {
        const auto a = cloud.point(i);
        const auto b = cloud.point(j);
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    });

    SampleAtoms out;
    out.dim = d;
    out.atom_of_sample.resize(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
        const auto p = cloud.point(order[idx]);
        bool same = !out.counts.empty();
        if (same) {
            const double* last = out.coords.data() + out.coords.size() - d;
            for (std::size_t c = 0; c < d && same; ++c) {
                same = std::abs(p[c] - last[c]) <= FiniteDiscreteMeasure::kMergeTolerance;
            }
        }
        if (!same) {
            out.coords.insert(out.coords.end(), p.begin(), p.end());
            out.counts.push_back(0);
        }
        ++out.counts.back();
        out.atom_of_sample[order[idx]] = static_cast<std::uint32_t>(out.counts.size() - 1);
    }
    return out;
}

/// Candidate center -> atoms within the closed ball of radius lambda/2, via a grid hash.
std::vector<std::vector<std::uint32_t>> ball_members(const SampleAtoms& atoms, double lambda) {
    const std::size_t d = atoms.dim;
    const std::size_t k = atoms.counts.size();
    const double radius = lambda / 2.0;
    const double reach = radius + window_slack(lambda, max_abs_coord(atoms.coords));
    const double cell = std::max(reach, 1e-300);

    auto cell_of = [&](std::size_t i, std::vector<long long>& key) {
        for (std::size_t c = 0; c < d; ++c) key[c] = static_cast<long long>(std::floor(atoms.coords[i * d + c] / cell));
    };
    auto hash_key = [](const std::vector<long long>& key) {
        std::uint64_t h = 1469598103934665603ull;
        for (long long v : key) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ull;
        return h;
    };

    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid;
    std::vector<long long> key(d);
    for (std::size_t i = 0; i < k; ++i) {
        cell_of(i, key);
        grid[hash_key(key)].push_back(static_cast<std::uint32_t>(i));
    }

    std::size_t offsets = 1;
    for (std::size_t c = 0; c < d; ++c) offsets *= 3;

    std::vector<std::vector<std::uint32_t>> members(k);
    parallel_for(k, [&](std::size_t i) {
        std::vector<long long> base(d);
        std::vector<long long> probe(d);
        cell_of(i, base);
        for (std::size_t code = 0; code < offsets; ++code) {
            std::size_t rest = code;
            for (std::size_t c = 0; c < d; ++c) {
                probe[c] = base[c] + static_cast<long long>(rest % 3) - 1;
                rest /= 3;
            }
            const auto it = grid.find(hash_key(probe));
            if (it == grid.end()) continue;
            for (std::uint32_t j : it->second) {
                double dist2 = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    const double diff = atoms.coords[i * d + c] - atoms.coords[j * d + c];
                    dist2 += diff * diff;
                }
                if (dist2 <= reach * reach) members[i].push_back(j);
            }
        }
        // Hash collisions can list a cell twice.
        std::sort(members[i].begin(), members[i].end());
        members[i].erase(std::unique(members[i].begin(), members[i].end()), members[i].end());
    });
    return members;
}

std::uint64_t bootstrap_seed(std::uint64_t seed) {
    std::uint64_t z = seed + 0x632be59bd9b4e019ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

const char* to_string(ConcentrationMethod method) noexcept {
    switch (method) {
        case ConcentrationMethod::exact_1d: return "exact-1d";
        case ConcentrationMethod::exact_2d: return "exact-2d";
        case ConcentrationMethod::monte_carlo: return "monte-carlo";
        case ConcentrationMethod::dp: return "dp";
    }
    return "unknown";
}

ConcentrationResult concentration_exact_1d(const FiniteDiscreteMeasure& f, double lambda) {
    if (f.dim() != 1) throw DimensionError("concentration_exact_1d: measure must live on R");
    require_radius(lambda);
    if (f.empty()) return {0.0, ConcentrationMethod::exact_1d, 0.0, 0};
    const auto first = window_starts(f.coords(), lambda);
    return {clamp01(max_window(first, f.masses())), ConcentrationMethod::exact_1d, 0.0, 0};
}

ConcentrationResult concentration_exact_2d(const FiniteDiscreteMeasure& f, double lambda) {
    if (f.dim() != 2) throw DimensionError("concentration_exact_2d: measure must live on R^2");
    require_radius(lambda);
    const std::size_t n = f.size();
    if (n == 0) return {0.0, ConcentrationMethod::exact_2d, 0.0, 0};
    if (lambda == 0.0) return {clamp01(f.max_mass()), ConcentrationMethod::exact_2d, 0.0, 0};

    const double radius = lambda / 2.0;
    const double scale = max_abs_coord(f.coords());
    // Circumcenters carry rounding from the square root below; allow a few ulps of the scale.
    const double reach = radius + 1e-10 * (1.0 + lambda + scale);

    auto disk_mass = [&](double cx, double cy) {
        double m = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const auto p = f.point(k);
            const double dx = p[0] - cx;
            const double dy = p[1] - cy;
            if (dx * dx + dy * dy <= reach * reach) m += f.mass(k);
        }
        return m;
    };

    std::vector<double> best_per_atom(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        const auto p = f.point(i);
        double best = disk_mass(p[0], p[1]);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto q = f.point(j);
            const double dx = q[0] - p[0];
            const double dy = q[1] - p[1];
            const double dist = std::hypot(dx, dy);
            if (dist > lambda + 1e-12 * (1.0 + lambda + scale)) continue;
            const double mx = 0.5 * (p[0] + q[0]);
            const double my = 0.5 * (p[1] + q[1]);
            const double h = std::sqrt(std::max(0.0, radius * radius - 0.25 * dist * dist));
            const double ux = -dy / dist;
            const double uy = dx / dist;
            best = std::max(best, disk_mass(mx + h * ux, my + h * uy));
            best = std::max(best, disk_mass(mx - h * ux, my - h * uy));
        }
        best_per_atom[i] = best;
    });
    return {clamp01(*std::max_element(best_per_atom.begin(), best_per_atom.end())), ConcentrationMethod::exact_2d,
            0.0, 0};
}

ConcentrationResult concentration_exact(const FiniteDiscreteMeasure& f, double lambda) {
    switch (f.dim()) {
        case 1: return concentration_exact_1d(f, lambda);
        case 2: return concentration_exact_2d(f, lambda);
        default:
            throw DimensionError("no exact concentration path in dimension " + std::to_string(f.dim()) +
                                 "; use the Monte Carlo estimator");
    }
}

ConcentrationResult concentration_of_samples(const PointCloud& samples, double lambda, std::uint64_t seed) {
    require_radius(lambda);
    const std::size_t n = samples.size();
    if (n < kMinMonteCarloSamples) {
        throw InsufficientSamplesError("Monte Carlo concentration needs at least " +
                                       std::to_string(kMinMonteCarloSamples) + " samples, got " + std::to_string(n));
    }
    const SampleAtoms atoms = group_samples(samples);
    const std::size_t k = atoms.counts.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    std::function<double(const std::vector<std::uint64_t>&)> statistic;
    if (atoms.dim == 1) {
        auto first = std::make_shared<std::vector<std::size_t>>(window_starts(atoms.coords, lambda));
        statistic = [first](const std::vector<std::uint64_t>& counts) { return max_window(*first, counts); };
    } else {
        auto members = std::make_shared<std::vector<std::vector<std::uint32_t>>>(ball_members(atoms, lambda));
        statistic = [members](const std::vector<std::uint64_t>& counts) {
            std::uint64_t best = 0;
            for (const auto& ball : *members) {
                std::uint64_t s = 0;
                for (std::uint32_t j : ball) s += counts[j];
                best = std::max(best, s);
            }
            return static_cast<double>(best);
        };
    }

    const double value = statistic(atoms.counts) * inv_n;

    std::vector<double> replicates(kBootstrapResamples);
    const CounterRng root(bootstrap_seed(seed));
    parallel_for(kBootstrapResamples, [&](std::size_t b) {
        CounterRng rng = root.split(b);
        std::vector<std::uint64_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) ++counts[atoms.atom_of_sample[rng.below(n)]];
        replicates[b] = statistic(counts) * inv_n;
    });
    const double mean = std::accumulate(replicates.begin(), replicates.end(), 0.0) / kBootstrapResamples;
    double var = 0.0;
    for (double r : replicates) var += (r - mean) * (r - mean);
    var /= static_cast<double>(kBootstrapResamples - 1);

    return {clamp01(value), ConcentrationMethod::monte_carlo, 1.96 * std::sqrt(var), n};
}

ConcentrationResult concentration_mc(const BatchSampler& sampler, double lambda, std::size_t n_samples,
                                     std::uint64_t seed) {
    if (n_samples < kMinMonteCarloSamples) {
        throw InsufficientSamplesError("Monte Carlo concentration needs at least " +
                                       std::to_string(kMinMonteCarloSamples) + " samples");
    }
    return concentration_of_samples(sampler(n_samples, seed), lambda, seed);
}

namespace {

/// Smallest m <= 52 with every a_k * 2^m an integer, if the DP fits its budget.
std::optional<int> dyadic_exponent(std::span<const double> a) {
    for (int m = 0; m <= 52; ++m) {
        const double s = std::ldexp(1.0, m);
        double range = 0.0;
        bool integral = true;
        for (double v : a) {
            const double scaled = v * s;
            if (std::abs(scaled) > 0x1.0p52 || scaled != std::round(scaled)) {
                integral = false;
                break;
            }
            range += std::abs(scaled);
        }
        if (!integral) continue;
        if (2.0 * range + 1.0 > static_cast<double>(kMaxDpBins)) return std::nullopt;
        return m;
    }
    return std::nullopt;
}

}  // namespace

ConcentrationResult rademacher_sum_concentration(const CoefficientVector& a, double tau) {
    if (a.dim() != 1) throw DimensionError("rademacher_sum_concentration: coefficients must be scalars");
    require_radius(tau);
    const auto coeffs = a.flat();

    if (const auto m = dyadic_exponent(coeffs); m && a.size() <= 52) {
        // Probabilities are multiples of 2^-n, exact in double for n <= 52.
        const double s = std::ldexp(1.0, *m);
        std::vector<long long> steps;
        long long offset = 0;
        for (double v : coeffs) {
            steps.push_back(static_cast<long long>(std::abs(v * s)));
            offset += steps.back();
        }
        std::vector<double> dist(static_cast<std::size_t>(2 * offset + 1), 0.0);
        std::vector<double> next(dist.size(), 0.0);
        dist[static_cast<std::size_t>(offset)] = 1.0;
        long long reach = 0;
        for (long long c : steps) {
            const long long lo = offset - reach - c;
            const long long hi = offset + reach + c;
            std::fill(next.begin() + lo, next.begin() + hi + 1, 0.0);
            for (long long i = offset - reach; i <= offset + reach; ++i) {
                const double p = dist[static_cast<std::size_t>(i)];
                if (p == 0.0) continue;
                next[static_cast<std::size_t>(i - c)] += 0.5 * p;
                next[static_cast<std::size_t>(i + c)] += 0.5 * p;
            }
            reach += c;
            std::swap(dist, next);
        }
        std::vector<double> coords;
        std::vector<double> masses;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (dist[i] == 0.0) continue;
            coords.push_back(static_cast<double>(static_cast<long long>(i) - offset) / s);
            masses.push_back(dist[i]);
        }
        auto result = concentration_exact_1d(FiniteDiscreteMeasure(1, std::move(coords), std::move(masses)), tau);
        result.method = ConcentrationMethod::dp;
        return result;
    }

    if (a.size() > 30) {
        throw InstanceTooLargeError("rademacher_sum_concentration: n = " + std::to_string(a.size()) +
                                    " > 30 with non-dyadic coefficients");
    }
    return concentration_exact_1d(weighted_sum_law(rademacher(), a, kMaxEnumerationAtoms), tau);
}

}  // namespace anticonc

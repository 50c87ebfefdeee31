#pragma once

#include "anticonc/idiv.hpp"
#include "anticonc/measure.hpp"
#include "anticonc/sampling.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace anticonc {

/// Generators u = (u_1, ..., u_r) in (R^d)^r.
class GeneratorSet {
public:
    explicit GeneratorSet(std::size_t dim, std::vector<double> flat = {});

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return flat_.size() / dim_; }
    bool empty() const noexcept { return flat_.empty(); }
    std::span<const double> operator[](std::size_t j) const noexcept { return {flat_.data() + j * dim_, dim_}; }
    std::span<const double> flat() const noexcept { return flat_; }

    GeneratorSet with(std::span<const double> v) const;
    GeneratorSet replaced(std::size_t j, std::span<const double> v) const;

private:
    std::size_t dim_;
    std::vector<double> flat_;
};

inline constexpr std::size_t kMaxMaterializedGenerators = 12;
inline constexpr std::size_t kMaxStreamingGenerators = 18;

/// K_1(u) = { sum_j n_j u_j : n_j in {-1, 0, 1} }, deduplicated and sorted
/// lexicographically. Throws TooManyGeneratorsError for r > 12.
PointCloud enumerate_K1(const GeneratorSet& u);

/// True when x lies in the closed sup-norm tau-neighborhood [K_1(u)]_tau.
/// Depth-first over the 3^r sign patterns with reach pruning; no materialization.
bool in_K1_neighborhood(std::span<const double> x, const GeneratorSet& u, double tau);

/// alpha * M{R^d \ [K_1(u)]_tau}. Throws TooManyGeneratorsError for r > 18.
double deficit(const FiniteDiscreteMeasure& m, double alpha, const GeneratorSet& u, double tau);

enum class SearchMode { greedy, exact };

struct StructureReport {
    std::string mode;
    GeneratorSet generators{1};
    std::size_t r = 0;
    double deficit = 0.0;
    std::vector<std::size_t> uncovered;
    /// Deficit after each greedy step (index 0 = no generators).
    std::vector<double> deficit_history;
    std::size_t pool_size = 0;

    // Scaling-report fields.
    std::optional<double> gamma;
    double gamma_half_width = 0.0;
    std::optional<double> ratio_r;
    std::optional<double> ratio_deficit;
    std::vector<std::string> notes;
};

/// Canonical candidate pool: atom locations, pairwise differences, and the
/// halves of both, sign-normalized (first nonzero coordinate positive),
/// deduplicated and sorted. Pools above `cap` are thinned by a seeded shuffle
/// that always keeps the atom locations.
PointCloud default_candidate_pool(const FiniteDiscreteMeasure& m, std::uint64_t seed, std::size_t cap = 6000);

/// Greedy: add the candidate with the largest newly covered mass
/// (lexicographically smallest on ties), then one replacement pass, until
/// the deficit is zero or r_max generators are placed. Exact: all size-r_max multisets
/// of the pool (at most 10^6 of them, else InstanceTooLargeError).
StructureReport search_generators(const FiniteDiscreteMeasure& m, double alpha, double tau, std::size_t r_max,
                                  SearchMode mode, const std::optional<PointCloud>& candidate_pool = std::nullopt,
                                  std::uint64_t seed = 0);

/// gamma = Q(D, tau) by Monte Carlo, greedy search on the jump law, and the
/// ratios r / (|log gamma| + 1) and deficit / (|log gamma| + 1)^3.
StructureReport theorem_scaling_report(const CompoundPoissonModel& model, double tau, std::size_t r_max,
                                       std::size_t mc_samples, std::uint64_t seed);

/// Product-measure variant: gamma = Q(F_1 * ... * F_n, tau); each F_j is
/// shifted by its highest-mass atom x_j before one joint search on
/// M = sum_j F_j(. + x_j) with alpha = 1.
StructureReport product_scaling_report(const std::vector<FiniteDiscreteMeasure>& factors, double tau,
                                       std::size_t r_max, std::size_t mc_samples, std::uint64_t seed);

}  // namespace anticonc

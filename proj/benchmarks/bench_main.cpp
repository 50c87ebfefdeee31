#include "anticonc/bounds.hpp"
#include "anticonc/charfn.hpp"
#include "anticonc/concentration.hpp"
#include "anticonc/idiv.hpp"
#include "anticonc/structure.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace anticonc;

namespace {

CoefficientVector ramp(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = 1.0 + 0.37 * static_cast<double>(k);
    return CoefficientVector::scalars(v);
}

void BM_RademacherExact(benchmark::State& state) {
    const auto a = CoefficientVector::scalars(std::vector<double>(static_cast<std::size_t>(state.range(0)), 1.0));
    for (auto _ : state) benchmark::DoNotOptimize(rademacher_sum_concentration(a, 1.0));
}
BENCHMARK(BM_RademacherExact)->Arg(10)->Arg(20)->Arg(30);

void BM_EsseenFunctional(benchmark::State& state) {
    const auto cf = make_H_cf(ramp(static_cast<std::size_t>(state.range(0))), 1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(esseen_functional(cf, 0.1));
}
BENCHMARK(BM_EsseenFunctional)->Arg(4)->Arg(32);

void BM_OptimizeThreshold(benchmark::State& state) {
    const auto g = symmetrize(discretize_gaussian(16));
    const auto a = ramp(8);
    const std::vector<double> grid{0.25, 0.5, 1.0, 2.0};
    for (auto _ : state) benchmark::DoNotOptimize(optimize_threshold(a, g, 1.0, 1.0, grid));
}
BENCHMARK(BM_OptimizeThreshold);

void BM_CompoundPoissonSampling(benchmark::State& state) {
    const auto model = spectral_of_coefficients(ramp(8), 4.0);
    for (auto _ : state) benchmark::DoNotOptimize(sample_compound_poisson(model, 10000, 1));
    state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_CompoundPoissonSampling);

void BM_GreedySearch(benchmark::State& state) {
    const GeneratorSet u(1, {1.0, 3.3, 7.9});
    const auto cloud = enumerate_K1(u);
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < cloud.size(); ++i) atoms.push_back({{cloud.point(i)[0]}, 1.0});
    const FiniteDiscreteMeasure m(1, atoms, MeasureKind::unnormalized);
    for (auto _ : state) benchmark::DoNotOptimize(search_generators(m, 1.0, 0.05, 4, SearchMode::greedy));
}
BENCHMARK(BM_GreedySearch);

}  // namespace

BENCHMARK_MAIN();

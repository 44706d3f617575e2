#include <benchmark/benchmark.h>

#include "sieve/dataset.hpp"
#include "sieve/inference.hpp"

using namespace sieve;

namespace {

TruthSpec truth_for(FamilyKind kind) {
    return kind == FamilyKind::histogram ? default_histogram_truth()
                                         : generate_truth(kind, TruthGenerator::self_similar, 1.0, 1.0, 256, 1);
}

}  // namespace

static void BM_EvidenceTable(benchmark::State& state) {
    const auto kind = static_cast<FamilyKind>(state.range(0));
    const int n = 2000, cap = 21;
    const auto family = make_family(kind, FamilyOptions{n, cap});
    const auto lik = family->bind(simulate(truth_for(kind), n, 2));
    const auto prior = SievePriorSpec::default_for(kind).conditional;
    for (auto _ : state) benchmark::DoNotOptimize(marginal_likelihood_table(*family, prior, *lik, cap));
    state.SetLabel(to_string(kind));
}
BENCHMARK(BM_EvidenceTable)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

static void BM_Metropolis(benchmark::State& state) {
    const int n = 2000, k = static_cast<int>(state.range(0));
    const auto family = make_family(FamilyKind::log_linear, FamilyOptions{n, k});
    const auto lik = family->bind(simulate(truth_for(FamilyKind::log_linear), n, 2));
    SamplerOptions opt;
    opt.burn_in = 1000;
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_given_k(*family, ConditionalPrior::gaussian(), *lik, k, 1000, ++seed, opt));
    state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_Metropolis)->Arg(4)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_ConjugateDraws(benchmark::State& state) {
    const int n = 2000, k = static_cast<int>(state.range(0));
    RegressionFamily family(n, k, BasisKind::trigonometric);
    const auto lik = family.bind(simulate(truth_for(FamilyKind::regression), n, 2));
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_given_k(family, ConditionalPrior::gaussian(), *lik, k, 2000, ++seed));
}
BENCHMARK(BM_ConjugateDraws)->Arg(4)->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "sieve/family.hpp"

using namespace sieve;

static void BM_LogNormalizer(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    LogLinearFamily family(k, BasisKind::trigonometric, QuadratureRule::standard());
    Vector theta = Vector::Constant(k, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(family.density().log_normalizer(theta));
}
BENCHMARK(BM_LogNormalizer)->Arg(2)->Arg(8)->Arg(32);

static void BM_LogLinearMoments(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    LogLinearFamily family(k, BasisKind::trigonometric, QuadratureRule::standard());
    Vector theta = Vector::Constant(k, 0.1), mean;
    Matrix cov;
    for (auto _ : state) benchmark::DoNotOptimize(family.density().moments(theta, &mean, &cov));
}
BENCHMARK(BM_LogLinearMoments)->Arg(2)->Arg(8)->Arg(32);

static void BM_LogLinearProjection(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    LogLinearFamily family(k, BasisKind::trigonometric, QuadratureRule::standard());
    const auto truth = generate_truth(FamilyKind::log_linear, TruthGenerator::self_similar, 1.0, 1.0, 256, 3);
    for (auto _ : state) benchmark::DoNotOptimize(family.project(truth, k));
}
BENCHMARK(BM_LogLinearProjection)->Arg(4)->Arg(16);

#include <benchmark/benchmark.h>

#include "hypflow/conjugacy.hpp"
#include "hypflow/lifted_flow.hpp"
#include "hypflow/random.hpp"
#include "stable_pairs.hpp"

using namespace hypflow;

static void BM_MatExp(benchmark::State& state) {
  Rng rng(1);
  const Matrix a = rng.uniform_matrix(static_cast<std::size_t>(state.range(0)), -2.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(mat_exp(a, 1.7));
}
BENCHMARK(BM_MatExp)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_Spectrum(benchmark::State& state) {
  Rng rng(2);
  const Matrix a = rng.uniform_matrix(static_cast<std::size_t>(state.range(0)), -2.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(a));
}
BENCHMARK(BM_Spectrum)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_Certify(benchmark::State& state) {
  Rng rng(3);
  const Matrix a = random_stable_matrix(rng, static_cast<std::size_t>(state.range(0)), 1.0, 0.5, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(certify(a));
}
BENCHMARK(BM_Certify)->Arg(2)->Arg(4)->Arg(8);

static void BM_CrossingTime(benchmark::State& state) {
  Rng rng(4);
  const HyperbolicityCertificate cert = certify(random_stable_matrix(rng, 4, 1.0, 0.5, 1.0));
  const Vector v = scale(rng.normal_vector(4), 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(crossing_time(cert, v));
}
BENCHMARK(BM_CrossingTime);

static void BM_VerifyConjugacy(benchmark::State& state) {
  const auto pairs = testing_support::stable_pairs(3, 5);
  const auto& [a, b] = pairs[2];
  const ConjugacyData cd(certify(a), certify(b));
  VerifyOptions opts;
  opts.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(verify_conjugacy(cd, opts));
}
BENCHMARK(BM_VerifyConjugacy)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

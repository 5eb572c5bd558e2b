#include <random>

#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "nikit/freq_cert.hpp"
#include "nikit/loop_analysis.hpp"
#include "nikit/ni_cert.hpp"
#include "nikit/zoh.hpp"

namespace {

using namespace nikit;

void BM_MatrixExponential(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix M = testing::random_matrix(rng, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(matrix_exponential(M));
}
BENCHMARK(BM_MatrixExponential)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_DiscretizeZoh(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto msd = testing::random_mass_spring_damper(rng, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(discretize_zoh(msd.plant, SamplePeriod(0.1)));
}
BENCHMARK(BM_DiscretizeZoh)->Arg(1)->Arg(4);

void BM_CertifyNi(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto msd = testing::random_mass_spring_damper(rng, state.range(0));
  const auto sys = discretize_zoh(msd.plant, SamplePeriod(0.3));
  for (auto _ : state) benchmark::DoNotOptimize(certify_ni(sys));
}
BENCHMARK(BM_CertifyNi)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

void BM_CertifyNiAlternatingProjection(benchmark::State& state) {
  CertifyOptions opts;
  opts.only_route = CertifyRoute::AlternatingProjection;
  const auto sys = testing::S1();
  for (auto _ : state) benchmark::DoNotOptimize(certify_ni(sys, opts));
}
BENCHMARK(BM_CertifyNiAlternatingProjection)->Unit(benchmark::kMicrosecond);

void BM_FreqCheck(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto msd = testing::random_mass_spring_damper(rng, 2);
  const auto sys = discretize_zoh(msd.plant, SamplePeriod(0.3));
  FreqOptions opts;
  opts.grid_size = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(freq_check(sys, opts));
}
BENCHMARK(BM_FreqCheck)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_AuditDissipation(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const auto msd = testing::random_mass_spring_damper(rng, 2);
  const auto sys = discretize_zoh(msd.plant, SamplePeriod(0.3));
  AuditOptions opts;
  opts.count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(audit_dissipation(
        linear_dynamics(sys), quadratic_storage(msd.storage),
        uniform_box_sampler(sys.states(), sys.ports(), -10, 10), opts));
  }
}
BENCHMARK(BM_AuditDissipation)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SimulateLoop(benchmark::State& state) {
  const auto loop = with_certificates(
      close_loop(testing::S1(), testing::scalar_controller(0.5), AdvanceSide::Controller),
      testing::scalar(1.0), testing::scalar(0.5));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(loop, Vector::Ones(2), 200));
}
BENCHMARK(BM_SimulateLoop)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

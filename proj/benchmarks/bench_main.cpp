#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "rapidtail/copulatail.hpp"
#include "rapidtail/skewell.hpp"
#include "rapidtail/tailasym.hpp"
#include "rapidtail/tails1d.hpp"
#include "rapidtail/verify.hpp"

namespace {

const rapidtail::SkewEllipticalSpec& spec() {
  static const auto s = rapidtail::make_bivariate_skew_normal(0.5, 0.6, 0.6);
  return s;
}

void BM_LogDensity(benchmark::State& state) {
  const Eigen::Vector2d y(1.0, -0.5);
  for (auto _ : state) benchmark::DoNotOptimize(rapidtail::log_density(spec(), y));
}
BENCHMARK(BM_LogDensity);

void BM_LogSurvival(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(rapidtail::log_survival(spec(), 0, 5.0));
}
BENCHMARK(BM_LogSurvival);

void BM_UpperQuantile(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(rapidtail::upper_quantile(spec(), 0, 1e-6));
}
BENCHMARK(BM_UpperQuantile);

void BM_NumericLambda(benchmark::State& state) {
  const auto scaling = rapidtail::build_scaling(spec());
  const Eigen::Vector2d w(1.0, -1.0);
  for (auto _ : state) benchmark::DoNotOptimize(rapidtail::numeric_lambda(scaling, w, 6.0));
}
BENCHMARK(BM_NumericLambda);

void BM_JointSurvivalQuadrature(benchmark::State& state) {
  const Eigen::Vector2d a(4.0, 4.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(rapidtail::joint_survival_quadrature(spec(), a).log_prob);
}
BENCHMARK(BM_JointSurvivalQuadrature)->Unit(benchmark::kMillisecond);

void BM_JointSurvivalImportance(benchmark::State& state) {
  const Eigen::Vector2d a(4.0, 4.0);
  rapidtail::ImportanceOptions opts;
  opts.samples = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(rapidtail::joint_survival_importance(spec(), a, opts).log_prob);
}
BENCHMARK(BM_JointSurvivalImportance)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);

void BM_CopulaDensityUpper(benchmark::State& state) {
  const Eigen::Vector2d tail(1e-6, 2e-6);
  for (auto _ : state)
    benchmark::DoNotOptimize(rapidtail::log_copula_density_upper(spec(), tail));
}
BENCHMARK(BM_CopulaDensityUpper);

}  // namespace
BENCHMARK_MAIN();

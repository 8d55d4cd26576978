#include <benchmark/benchmark.h>

#include "gpcp/conformal.hpp"
#include "gpcp/gp.hpp"
#include "gpcp/reml.hpp"
#include "gpcp/testbed.hpp"

namespace {

using namespace gpcp;

struct Problem {
  Dataset data;
  CovarianceSpec spec;
  Design queries;
};

Problem make_problem(Index n) {
  const TestFunction f = get_function("goldstein_price");
  const Design x = sample_uniform(f.domain, n, 1);
  Vector rho(2);
  rho << 0.8, 0.8;
  return {Dataset(x, f.evaluate(x)), CovarianceSpec(1.0, rho, 2), sample_uniform(f.domain, 64, 2)};
}

void BM_Fit(benchmark::State& state) {
  const Problem pb = make_problem(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(FittedGP(pb.spec, pb.data));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fit)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_VirtualLoo(benchmark::State& state) {
  const Problem pb = make_problem(state.range(0));
  for (auto _ : state) {
    const FittedGP model(pb.spec, pb.data);
    benchmark::DoNotOptimize(model.loo_at_training().data());
  }
}
BENCHMARK(BM_VirtualLoo)->RangeMultiplier(2)->Range(16, 128);

void BM_BruteForceLoo(benchmark::State& state) {
  const Problem pb = make_problem(state.range(0));
  for (auto _ : state) {
    for (Index i = 0; i < pb.data.size(); ++i) {
      const FittedGP refit(pb.spec, pb.data.without(i));
      benchmark::DoNotOptimize(refit.kriging(pb.data.points().row(i).transpose()));
    }
  }
}
BENCHMARK(BM_BruteForceLoo)->RangeMultiplier(2)->Range(16, 128);

void BM_BatchKriging(benchmark::State& state) {
  const Problem pb = make_problem(state.range(0));
  const FittedGP model(pb.spec, pb.data);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.kriging_batch(pb.queries));
  }
  state.SetItemsProcessed(state.iterations() * pb.queries.rows());
}
BENCHMARK(BM_BatchKriging)->Arg(40)->Arg(160);

void BM_JackknifePlusGpBounds(benchmark::State& state) {
  const Problem pb = make_problem(state.range(0));
  const FittedGP model(pb.spec, pb.data);
  const KrigingPrediction at = model.kriging(pb.queries.row(0).transpose());
  for (auto _ : state) {
    benchmark::DoNotOptimize(jplus_gp_bounds(model, {}, at).at(0.9));
  }
}
BENCHMARK(BM_JackknifePlusGpBounds)->Arg(40)->Arg(160);

void BM_FullConformalSet(benchmark::State& state) {
  const Problem pb = make_problem(state.range(0));
  const FittedGP model(pb.spec, pb.data);
  const Vector x = pb.queries.row(0).transpose();
  const KrigingPrediction at = model.kriging(x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fcp_gp_set(model, {}, x, at).at(0.9));
  }
}
BENCHMARK(BM_FullConformalSet)->Arg(40)->Arg(160);

void BM_Reml(benchmark::State& state) {
  const Problem pb = make_problem(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reml_fit(pb.data, 2));
  }
}
BENCHMARK(BM_Reml)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

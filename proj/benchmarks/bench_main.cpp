#include "omegarepair/impair.hpp"
#include "omegarepair/mask.hpp"
#include "omegarepair/oracle.hpp"
#include "omegarepair/product.hpp"
#include "omegarepair/repair.hpp"

#include <benchmark/benchmark.h>

using namespace omegarepair;

namespace {

GeneratorConfig sized(int n) {
  GeneratorConfig c;
  c.max_kripke_states = n;
  c.max_rm_states = n;
  c.max_nba_states = n;
  c.max_product_vertices = 4 * n * n * n * 2;
  c.max_strategies = std::size_t(1) << 30;
  c.finite_repair_percent = 0;
  return c;
}

void BM_BuildProduct(benchmark::State& st) {
  auto inst = random_instance(11, sized(static_cast<int>(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(build_product(inst.kripke, inst.rm, inst.nba));
}
BENCHMARK(BM_BuildProduct)->Arg(2)->Arg(3)->Arg(4)->Arg(5);

void BM_RepairThreshold(benchmark::State& st, AggKind kind) {
  auto inst = random_instance(12, sized(static_cast<int>(st.range(0))));
  auto a = build_arena(build_product(inst.kripke, inst.rm, inst.nba));
  Aggregator agg = kind == AggKind::DSUM ? Aggregator::dsum(inst.lambda) : Aggregator{kind, std::nullopt};
  for (auto _ : st) benchmark::DoNotOptimize(solve_repair(a, agg).threshold);
}
BENCHMARK_CAPTURE(BM_RepairThreshold, dsum, AggKind::DSUM)->Arg(2)->Arg(3)->Arg(4);
BENCHMARK_CAPTURE(BM_RepairThreshold, mean, AggKind::MEAN)->Arg(2)->Arg(3)->Arg(4);
BENCHMARK_CAPTURE(BM_RepairThreshold, sup, AggKind::SUP)->Arg(2)->Arg(3)->Arg(4);
BENCHMARK_CAPTURE(BM_RepairThreshold, limsup, AggKind::LIMSUP)->Arg(2)->Arg(3)->Arg(4);

void BM_ImpairThreshold(benchmark::State& st, AggKind kind) {
  auto inst = random_instance(13, sized(static_cast<int>(st.range(0))));
  auto g = build_product(inst.kripke, inst.rm, inst.nba);
  Aggregator agg = kind == AggKind::DSUM ? Aggregator::dsum(inst.lambda) : Aggregator{kind, std::nullopt};
  for (auto _ : st) benchmark::DoNotOptimize(impair_threshold(g, agg));
}
BENCHMARK_CAPTURE(BM_ImpairThreshold, dsum, AggKind::DSUM)->Arg(3)->Arg(5);
BENCHMARK_CAPTURE(BM_ImpairThreshold, mean, AggKind::MEAN)->Arg(3)->Arg(5);

void BM_OracleInstance(benchmark::State& st) {
  std::uint64_t seed = 1;
  for (auto _ : st) benchmark::DoNotOptimize(run_oracle(seed++, 1));
}
BENCHMARK(BM_OracleInstance);

void BM_Complement(benchmark::State& st) {
  NBA a;
  a.alphabet = {"x", "y"};
  const int n = static_cast<int>(st.range(0));
  for (int i = 0; i < n; ++i) {
    a.states.push_back("s" + std::to_string(i));
    a.accepting.push_back(i == n - 1);
    a.edges.push_back({i, 0, (i + 1) % n});
    a.edges.push_back({i, 1, i});
  }
  a.initial = {0};
  canonicalize(a);
  for (auto _ : st) benchmark::DoNotOptimize(complement_nba(a));
}
BENCHMARK(BM_Complement)->Arg(2)->Arg(3)->Arg(4);

} // namespace

BENCHMARK_MAIN();

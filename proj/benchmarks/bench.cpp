#include <benchmark/benchmark.h>

#include "shimura/cdunif.hpp"
#include "shimura/equations.hpp"
#include "shimura/quatlat.hpp"
#include "shimura/quotients.hpp"

using namespace shimura;

static void BM_class_number(benchmark::State& st) {
  i64 d = -static_cast<i64>(st.range(0)) * 4 - 3;
  for (auto _ : st) benchmark::DoNotOptimize(class_number_uncached(d));
}
BENCHMARK(BM_class_number)->Arg(1000)->Arg(100000)->Arg(10000000);

static void BM_quotient_genus(benchmark::State& st) {
  auto W = al_subgroup::generated(2310, {2, 5, 7, 33});
  for (auto _ : st) benchmark::DoNotOptimize(quotient_genus(210, 11, W));
}
BENCHMARK(BM_quotient_genus);

static void BM_ideal_classes(benchmark::State& st) {
  i64 N = st.range(0);
  for (auto _ : st) {
    auto E = eichler_order_for(5, N);
    benchmark::DoNotOptimize(ideal_classes(E).ideals.size());
  }
}
BENCHMARK(BM_ideal_classes)->Arg(7)->Arg(11)->Arg(23)->Unit(benchmark::kMillisecond);

static void BM_base_graph(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(base_graph(210, 11, 7).G.num_vertices());
}
BENCHMARK(BM_base_graph)->Unit(benchmark::kMillisecond);

static void BM_kodaira(benchmark::State& st) {
  auto ctx = base_graph(210, 11, 7);
  auto W = al_subgroup::generated(2310, {2, 5, 7, 33});
  for (auto _ : st) benchmark::DoNotOptimize(kodaira_In(ctx, W));
}
BENCHMARK(BM_kodaira)->Unit(benchmark::kMicrosecond);

static void BM_enumerate(benchmark::State& st) {
  enumerate_options o;
  o.bound = st.range(0);
  for (auto _ : st) benchmark::DoNotOptimize(enumerate_all(o).records.size());
}
BENCHMARK(BM_enumerate)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);

static void BM_bielliptic_candidates(benchmark::State& st) {
  auto E1 = short_model({1, 0, 0, -34, 68});
  auto E2 = short_model({1, 1, 0, -2, 0});
  for (auto _ : st) benchmark::DoNotOptimize(bielliptic_candidates(E1, E2).size());
}
BENCHMARK(BM_bielliptic_candidates)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

// SPDX-License-Identifier: Apache-2.0
// Serial reference kernels against their OpenMP versions on a BA graph.
// Thread count follows OMP_NUM_THREADS.
#include <benchmark/benchmark.h>

#include <map>

#include "evograph/evogen.hpp"
#include "evograph/kernels.hpp"

using namespace evograph;

namespace {

struct Data {
  NormalizedAdjacency L;
  Matrix x;
  Vector src, dst;
  Matrix z;
  std::vector<double> pre, alpha;
};

const Data& data(std::size_t nodes) {
  static std::map<std::size_t, Data> cache;
  auto it = cache.find(nodes);
  if (it != cache.end()) return it->second;
  RngStream rng(1, "bench");
  const auto g = ba_final(BaConfig{nodes / 10, 5, nodes - nodes / 10, SeedGraph::ba}, rng);
  Data d;
  d.L = normalize(g);
  d.x = Matrix(static_cast<Eigen::Index>(g.n), 16);
  for (auto& v : d.x.reshaped()) v = rng.normal();
  d.src = Vector(static_cast<Eigen::Index>(g.n));
  d.dst = Vector(static_cast<Eigen::Index>(g.n));
  for (auto& v : d.src) v = rng.normal();
  for (auto& v : d.dst) v = rng.normal();
  d.z = d.x;
  kernels::serial::gat_attention(d.L.adj, d.src, d.dst, 0.2, d.pre, d.alpha);
  return cache.emplace(nodes, std::move(d)).first->second;
}

template <bool Parallel>
void BM_propagate(benchmark::State& st) {
  const auto& d = data(static_cast<std::size_t>(st.range(0)));
  Matrix out;
  for (auto _ : st) {
    if constexpr (Parallel) kernels::omp::propagate(d.L, d.x, out);
    else kernels::serial::propagate(d.L, d.x, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_propagate_transpose(benchmark::State& st) {
  const auto& d = data(static_cast<std::size_t>(st.range(0)));
  Matrix out;
  for (auto _ : st) {
    if constexpr (Parallel) kernels::omp::propagate_transpose(d.L, d.x, out);
    else kernels::serial::propagate_transpose(d.L, d.x, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_gat_attention(benchmark::State& st) {
  const auto& d = data(static_cast<std::size_t>(st.range(0)));
  std::vector<double> pre, alpha;
  for (auto _ : st) {
    if constexpr (Parallel) kernels::omp::gat_attention(d.L.adj, d.src, d.dst, 0.2, pre, alpha);
    else kernels::serial::gat_attention(d.L.adj, d.src, d.dst, 0.2, pre, alpha);
    benchmark::DoNotOptimize(alpha.data());
  }
}

template <bool Parallel>
void BM_gat_aggregate(benchmark::State& st) {
  const auto& d = data(static_cast<std::size_t>(st.range(0)));
  Matrix out;
  for (auto _ : st) {
    if constexpr (Parallel) kernels::omp::gat_aggregate(d.L.adj, d.alpha, d.z, out);
    else kernels::serial::gat_aggregate(d.L.adj, d.alpha, d.z, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_distance_sums(benchmark::State& st) {
  const auto& d = data(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    auto s = Parallel ? kernels::omp::distance_sums(d.L.adj) : kernels::serial::distance_sums(d.L.adj);
    benchmark::DoNotOptimize(s.data());
  }
}

}  // namespace

BENCHMARK(BM_propagate<false>)->Name("propagate/serial")->Arg(2000)->Arg(20000);
BENCHMARK(BM_propagate<true>)->Name("propagate/omp")->Arg(2000)->Arg(20000);
BENCHMARK(BM_propagate_transpose<false>)->Name("propagate_transpose/serial")->Arg(2000)->Arg(20000);
BENCHMARK(BM_propagate_transpose<true>)->Name("propagate_transpose/omp")->Arg(2000)->Arg(20000);
BENCHMARK(BM_gat_attention<false>)->Name("gat_attention/serial")->Arg(2000)->Arg(20000);
BENCHMARK(BM_gat_attention<true>)->Name("gat_attention/omp")->Arg(2000)->Arg(20000);
BENCHMARK(BM_gat_aggregate<false>)->Name("gat_aggregate/serial")->Arg(2000)->Arg(20000);
BENCHMARK(BM_gat_aggregate<true>)->Name("gat_aggregate/omp")->Arg(2000)->Arg(20000);
BENCHMARK(BM_distance_sums<false>)->Name("distance_sums/serial")->Arg(1200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_distance_sums<true>)->Name("distance_sums/omp")->Arg(1200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include "chase/sssp_bench.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <random>
#include <stdexcept>

namespace chase {

LayeredDag make_bench_dag(std::size_t layer_count, std::size_t layer_width, std::uint64_t seed) {
  if (layer_count < 1 || layer_width < 1) throw std::invalid_argument("bench sizes must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::vector<std::size_t> sizes{1};
  sizes.insert(sizes.end(), layer_count, layer_width);
  std::vector<DagEdge> edges;
  edges.reserve(layer_width + (layer_count - 1) * layer_width * layer_width);
  for (std::size_t j = 0; j < layer_width; ++j) {
    edges.push_back({0, static_cast<std::uint32_t>(1 + j), weight(rng)});
  }
  for (std::size_t l = 1; l < layer_count; ++l) {
    const std::size_t src0 = 1 + (l - 1) * layer_width;
    const std::size_t dst0 = 1 + l * layer_width;
    for (std::size_t a = 0; a < layer_width; ++a) {
      for (std::size_t b = 0; b < layer_width; ++b) {
        edges.push_back({static_cast<std::uint32_t>(src0 + a), static_cast<std::uint32_t>(dst0 + b), weight(rng)});
      }
    }
  }
  return LayeredDag::from_edges(std::move(sizes), std::move(edges));
}

std::size_t layers_for_edges(std::size_t edges, std::size_t layer_width) {
  if (layer_width < 1) throw std::invalid_argument("layer width must be positive");
  if (edges <= layer_width) return 1;
  const std::size_t per_gap = layer_width * layer_width;
  return 1 + (edges - layer_width + per_gap - 1) / per_gap;
}

namespace {

double last_layer_min(const LayeredDag& dag, const SsspResult& r) {
  const std::size_t last = dag.layer_count() - 1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t v = dag.layer_begin(last); v < dag.layer_end(last); ++v) best = std::min(best, r.dist[v]);
  return best;
}

template <typename Solve>
double time_trial(Solve&& solve, double min_seconds, double& cost_out) {
  using clock = std::chrono::steady_clock;
  std::size_t reps = 0;
  const auto start = clock::now();
  double elapsed = 0.0;
  do {
    cost_out = solve();
    ++reps;
    elapsed = std::chrono::duration<double>(clock::now() - start).count();
  } while (elapsed < min_seconds);
  return elapsed / static_cast<double>(reps);
}

}  // namespace

std::vector<BenchRow> bench_sssp(std::size_t layer_count, std::size_t layer_width, int trials, std::uint64_t seed,
                                 double min_trial_seconds) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  const LayeredDag dag = make_bench_dag(layer_count, layer_width, seed);
  BenchRow analytic{dag.edge_count(), "analytic", std::numeric_limits<double>::infinity(), 0.0};
  BenchRow dfs{dag.edge_count(), "dfs", std::numeric_limits<double>::infinity(), 0.0};
  for (int t = 0; t < trials; ++t) {
    analytic.seconds = std::min(
        analytic.seconds,
        time_trial([&] { return last_layer_min(dag, sssp_analytic_order(dag)); }, min_trial_seconds,
                   analytic.best_cost));
    dfs.seconds = std::min(
        dfs.seconds,
        time_trial([&] { return last_layer_min(dag, sssp_dfs_order(dag)); }, min_trial_seconds, dfs.best_cost));
  }
  return {analytic, dfs};
}

}  // namespace chase

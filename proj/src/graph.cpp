#include "chase/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "chase/error.hpp"

namespace chase {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<Vec3> view_sphere(const Vec3& target, double r_d, int azimuth_count, double elevation) {
  if (azimuth_count < 1) throw std::invalid_argument("azimuth_count must be >= 1");
  if (!(r_d > 0.0)) throw std::invalid_argument("r_d must be positive");
  if (!(elevation >= 0.0 && elevation < 0.5 * M_PI)) throw std::invalid_argument("elevation must lie in [0, pi/2)");
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(azimuth_count));
  const double ce = std::cos(elevation);
  const double se = std::sin(elevation);
  for (int k = 0; k < azimuth_count; ++k) {
    const double a = 2.0 * M_PI * k / azimuth_count;
    out.push_back(target + r_d * Vec3(ce * std::cos(a), ce * std::sin(a), se));
  }
  return out;
}

LayeredDag LayeredDag::from_edges(std::vector<std::size_t> layer_sizes, std::vector<DagEdge> edges,
                                  std::vector<DagVertex> vertices) {
  if (layer_sizes.empty() || layer_sizes[0] != 1) throw std::invalid_argument("layer 0 must hold only the root");
  LayeredDag dag;
  dag.layer_sizes_ = std::move(layer_sizes);
  dag.layer_offset_.assign(1, 0);
  for (auto n : dag.layer_sizes_) dag.layer_offset_.push_back(dag.layer_offset_.back() + n);
  const std::size_t nv = dag.vertex_count();
  if (nv > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("too many vertices");
  if (!vertices.empty() && vertices.size() != nv) throw std::invalid_argument("vertex payload size mismatch");

  for (const auto& e : edges) {
    if (e.from >= nv || e.to >= nv) throw std::invalid_argument("edge endpoint out of range");
    if (dag.layer_of(e.to) != dag.layer_of(e.from) + 1) {
      throw std::invalid_argument("edges must join consecutive layers");
    }
  }
  // Counting sort by source keeps the per-source order of the input.
  dag.edge_offset_.assign(nv + 1, 0);
  for (const auto& e : edges) ++dag.edge_offset_[e.from + 1];
  for (std::size_t v = 0; v < nv; ++v) dag.edge_offset_[v + 1] += dag.edge_offset_[v];
  dag.edges_.resize(edges.size());
  std::vector<std::size_t> cursor(dag.edge_offset_.begin(), dag.edge_offset_.end() - 1);
  for (const auto& e : edges) dag.edges_[cursor[e.from]++] = e;
  dag.vertices_ = std::move(vertices);
  return dag;
}

std::size_t LayeredDag::layer_of(std::uint32_t vertex) const {
  auto it = std::upper_bound(layer_offset_.begin(), layer_offset_.end(), static_cast<std::size_t>(vertex));
  return static_cast<std::size_t>(it - layer_offset_.begin()) - 1;
}

LayeredDag build_dag(const Vec3& root, const std::vector<ViewLayer>& layers, double r_max, double lambda) {
  if (layers.empty()) throw std::invalid_argument("build_dag needs at least one layer");
  if (!(r_max > 0.0)) throw std::invalid_argument("r_max must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");

  std::vector<std::size_t> sizes{1};
  std::vector<DagVertex> vertices{DagVertex{root, 0, 0.0}};
  std::vector<DagEdge> edges;
  std::size_t prev_begin = 0;
  std::size_t prev_end = 1;

  for (std::size_t li = 0; li < layers.size(); ++li) {
    const auto& layer = layers[li];
    if (layer.costs.size() != layer.candidates.size()) {
      throw std::invalid_argument("view layer cost/candidate size mismatch");
    }
    const std::size_t begin = vertices.size();
    for (std::size_t c = 0; c < layer.candidates.size(); ++c) {
      if (!layer.costs[c]) continue;  // occluded
      const Vec3& head = layer.candidates[c];
      const double detect = *layer.costs[c];
      const auto id = static_cast<std::uint32_t>(vertices.size());
      bool reachable = false;
      for (std::size_t u = prev_begin; u < prev_end; ++u) {
        const double step = (vertices[u].position - head).norm();
        if (step <= r_max) {
          edges.push_back({static_cast<std::uint32_t>(u), id, step + lambda * detect});
          reachable = true;
        }
      }
      if (reachable) vertices.push_back({head, c, detect});
    }
    if (vertices.size() == begin) {
      throw InfeasiblePlan("no reachable viewpoint in layer " + std::to_string(li + 1), li + 1);
    }
    sizes.push_back(vertices.size() - begin);
    prev_begin = begin;
    prev_end = vertices.size();
  }
  return LayeredDag::from_edges(std::move(sizes), std::move(edges), std::move(vertices));
}

std::size_t topological_index(std::span<const std::size_t> layer_sizes, std::size_t layer, std::size_t j) {
  if (layer >= layer_sizes.size()) throw std::out_of_range("layer index out of range");
  if (j < 1 || j > layer_sizes[layer]) throw std::out_of_range("vertex index out of range");
  if (layer == 0) return 1;
  std::size_t offset = 0;
  for (std::size_t k = 0; k < layer; ++k) offset += layer_sizes[k];
  return offset + j;
}

namespace {

SsspResult relax_in_order(const LayeredDag& dag, std::span<const std::uint32_t> order) {
  SsspResult r{std::vector<double>(dag.vertex_count(), kInf), std::vector<std::int64_t>(dag.vertex_count(), -1)};
  if (dag.vertex_count() == 0) return r;
  r.dist[0] = 0.0;
  for (std::uint32_t v : order) {
    const double dv = r.dist[v];
    if (dv == kInf) continue;
    for (const auto& e : dag.out_edges(v)) {
      const double cand = dv + e.weight;
      if (cand < r.dist[e.to]) {
        r.dist[e.to] = cand;
        r.pred[e.to] = v;
      }
    }
  }
  return r;
}

}  // namespace

SsspResult sssp_analytic_order(const LayeredDag& dag) {
  SsspResult r{std::vector<double>(dag.vertex_count(), kInf), std::vector<std::int64_t>(dag.vertex_count(), -1)};
  if (dag.vertex_count() == 0) return r;
  r.dist[0] = 0.0;
  const auto nv = static_cast<std::uint32_t>(dag.vertex_count());
  for (std::uint32_t v = 0; v < nv; ++v) {
    const double dv = r.dist[v];
    if (dv == kInf) continue;
    for (const auto& e : dag.out_edges(v)) {
      const double cand = dv + e.weight;
      if (cand < r.dist[e.to]) {
        r.dist[e.to] = cand;
        r.pred[e.to] = v;
      }
    }
  }
  return r;
}

std::vector<std::uint32_t> dfs_topological_order(const LayeredDag& dag) {
  const auto nv = static_cast<std::uint32_t>(dag.vertex_count());
  std::vector<std::uint8_t> state(nv, 0);  // 0 new, 1 on stack, 2 done
  std::vector<std::uint32_t> post;
  post.reserve(nv);
  // (vertex, next out-edge offset)
  std::vector<std::pair<std::uint32_t, std::size_t>> stack;
  for (std::uint32_t s = 0; s < nv; ++s) {
    if (state[s] != 0) continue;
    stack.emplace_back(s, 0);
    state[s] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto out = dag.out_edges(v);
      if (next < out.size()) {
        const std::uint32_t w = out[next++].to;
        if (state[w] == 0) {
          state[w] = 1;
          stack.emplace_back(w, 0);
        } else if (state[w] == 1) {
          throw std::logic_error("cycle in layered DAG");
        }
      } else {
        state[v] = 2;
        post.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::reverse(post.begin(), post.end());
  return post;
}

SsspResult sssp_dfs_order(const LayeredDag& dag) {
  const auto order = dfs_topological_order(dag);
  return relax_in_order(dag, order);
}

ViewpointPath shortest_viewpoint_path(const LayeredDag& dag) {
  if (dag.layer_count() < 2) throw std::invalid_argument("DAG has no layer beyond the root");
  const SsspResult sp = sssp_analytic_order(dag);
  const std::size_t last = dag.layer_count() - 1;
  std::int64_t best = -1;
  for (std::size_t v = dag.layer_begin(last); v < dag.layer_end(last); ++v) {
    if (sp.dist[v] == kInf) continue;
    if (best < 0 || sp.dist[v] < sp.dist[static_cast<std::size_t>(best)]) best = static_cast<std::int64_t>(v);
  }
  if (best < 0) throw InfeasiblePlan("last layer unreachable from the root", last);

  ViewpointPath path;
  path.total_cost = sp.dist[static_cast<std::size_t>(best)];
  for (std::int64_t v = best; v > 0; v = sp.pred[static_cast<std::size_t>(v)]) {
    path.vertices.push_back(static_cast<std::uint32_t>(v));
  }
  std::reverse(path.vertices.begin(), path.vertices.end());

  if (!dag.vertices().empty()) {
    Vec3 prev = dag.vertices()[0].position;
    for (auto v : path.vertices) {
      const auto& vx = dag.vertices()[v];
      path.points.push_back(vx.position);
      path.distance_cost += (vx.position - prev).norm();
      path.detect_cost += vx.detect_cost;
      prev = vx.position;
    }
  }
  return path;
}

}  // namespace chase

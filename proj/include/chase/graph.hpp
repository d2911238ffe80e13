#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "chase/geom.hpp"

namespace chase {

// `azimuth_count` points at distance r_d from `target` on the ring of the
// given elevation (radians above the horizontal plane), starting at azimuth 0
// (+x) and proceeding counter-clockwise.
std::vector<Vec3> view_sphere(const Vec3& target, double r_d, int azimuth_count, double elevation);

// Candidate viewpoints for one prediction step. A missing cost marks an
// occluded candidate, which never becomes a DAG vertex.
struct ViewLayer {
  int step = 0;
  Vec3 target = Vec3::Zero();
  std::vector<Vec3> candidates;
  std::vector<std::optional<double>> costs;
};

struct DagVertex {
  Vec3 position = Vec3::Zero();
  std::size_t candidate = 0;  // index into the source ViewLayer
  double detect_cost = 0.0;
};

struct DagEdge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  double weight = 0.0;
};

// Layered DAG with the root alone in layer 0. Vertex ids are 0-based and
// numbered layer by layer, so id + 1 is the analytic topological index.
// Edges are stored grouped by source vertex.
class LayeredDag {
 public:
  LayeredDag() = default;

  // Builds from explicit layer sizes and edges between consecutive layers
  // (vertex ids as above). Throws std::invalid_argument if an edge skips a
  // layer, points backwards, or layer_sizes[0] != 1.
  static LayeredDag from_edges(std::vector<std::size_t> layer_sizes, std::vector<DagEdge> edges,
                               std::vector<DagVertex> vertices = {});

  std::size_t layer_count() const { return layer_sizes_.size(); }
  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  std::size_t vertex_count() const { return layer_offset_.back(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::size_t layer_begin(std::size_t layer) const { return layer_offset_[layer]; }
  std::size_t layer_end(std::size_t layer) const { return layer_offset_[layer + 1]; }
  std::size_t layer_of(std::uint32_t vertex) const;

  std::span<const DagEdge> out_edges(std::uint32_t vertex) const {
    return {edges_.data() + edge_offset_[vertex], edges_.data() + edge_offset_[vertex + 1]};
  }
  const std::vector<DagEdge>& edges() const { return edges_; }

  // Empty unless built by build_dag or given explicitly.
  const std::vector<DagVertex>& vertices() const { return vertices_; }

 private:
  std::vector<std::size_t> layer_sizes_;
  std::vector<std::size_t> layer_offset_{0};
  std::vector<std::size_t> edge_offset_;
  std::vector<DagEdge> edges_;
  std::vector<DagVertex> vertices_;
};

// Wires consecutive layers where the step length is at most r_max, with edge
// weight |step| + lambda * detectability cost of the head. Layers are pruned
// front to back to the vertices reachable from the root. Throws
// InfeasiblePlan naming the first layer that ends up empty.
LayeredDag build_dag(const Vec3& root, const std::vector<ViewLayer>& layers, double r_max, double lambda);

// 1-based index of vertex j (1-based) of layer i: 1 for the root, otherwise
// the sizes of all earlier layers plus j. Throws std::out_of_range.
std::size_t topological_index(std::span<const std::size_t> layer_sizes, std::size_t layer, std::size_t j);

struct ViewpointPath {
  std::vector<Vec3> points;             // one per step 1..N
  std::vector<std::uint32_t> vertices;  // DAG vertex ids, root excluded
  double total_cost = 0.0;
  double distance_cost = 0.0;  // sum of step lengths from the root
  double detect_cost = 0.0;    // sum of detectability costs (without lambda)
};

// Single relaxation pass in vertex-id order, then the cheapest vertex of the
// last layer (earliest id on ties) is backtracked. Requires layer_count() >= 2.
ViewpointPath shortest_viewpoint_path(const LayeredDag& dag);

// Shortest distance from the root to every vertex, relaxing in vertex-id order.
struct SsspResult {
  std::vector<double> dist;
  std::vector<std::int64_t> pred;  // -1 for the root and unreachable vertices
};
SsspResult sssp_analytic_order(const LayeredDag& dag);

// Same relaxation after a generic iterative DFS topological sort that does
// not use the layer structure.
SsspResult sssp_dfs_order(const LayeredDag& dag);
std::vector<std::uint32_t> dfs_topological_order(const LayeredDag& dag);

}  // namespace chase

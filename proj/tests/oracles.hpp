#pragma once

// Reference implementations used only by tests. They take the direct,
// slow route on purpose and share no code with the library beyond its
// public data types.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "chase/graph.hpp"
#include "chase/render.hpp"
#include "chase/traj.hpp"

namespace oracle {

// ---------------------------------------------------------------- graphs

struct PathResult {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> vertices;  // root excluded
};

// Enumerates every root-to-last-layer path from the raw edge list.
inline PathResult enumerate_paths(const chase::LayeredDag& dag) {
  std::size_t total = 0;
  for (auto s : dag.layer_sizes()) total += s;
  const std::size_t last_begin = total - dag.layer_sizes().back();
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(total);
  for (const auto& e : dag.edges()) adj[e.from].push_back({e.to, e.weight});

  PathResult best;
  std::vector<std::uint32_t> stack;
  std::function<void(std::uint32_t, double)> walk = [&](std::uint32_t v, double cost) {
    if (v >= last_begin) {
      if (cost < best.cost) best = {cost, stack};
      return;
    }
    for (const auto& [to, w] : adj[v]) {
      stack.push_back(to);
      walk(to, cost + w);
      stack.pop_back();
    }
  };
  walk(0, 0.0);
  return best;
}

// Random layered DAG: root plus `layers` layers of 1..max_width vertices.
// Every vertex of layer i+1 gets at least one parent in layer i; other edges
// appear with probability `density`. Weights are drawn from a small integer
// grid when `ties` is set, so equal-cost paths are common.
inline chase::LayeredDag random_layered_dag(std::mt19937_64& rng, std::size_t layers, std::size_t max_width,
                                            double density, bool ties) {
  std::uniform_int_distribution<std::size_t> width(1, max_width);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> small(0, 4);
  std::vector<std::size_t> sizes{1};
  for (std::size_t i = 0; i < layers; ++i) sizes.push_back(width(rng));
  std::vector<std::size_t> offset{0};
  for (auto s : sizes) offset.push_back(offset.back() + s);

  std::vector<chase::DagEdge> edges;
  auto weight = [&] { return ties ? static_cast<double>(small(rng)) * 0.5 : unit(rng) * 10.0; };
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    for (std::size_t b = 0; b < sizes[i + 1]; ++b) {
      std::uniform_int_distribution<std::size_t> pick(0, sizes[i] - 1);
      const std::size_t forced = pick(rng);
      for (std::size_t a = 0; a < sizes[i]; ++a) {
        if (a == forced || unit(rng) < density) {
          edges.push_back({static_cast<std::uint32_t>(offset[i] + a), static_cast<std::uint32_t>(offset[i + 1] + b),
                           weight()});
        }
      }
    }
  }
  std::shuffle(edges.begin(), edges.end(), rng);
  return chase::LayeredDag::from_edges(sizes, edges);
}

// ---------------------------------------------------------------- metric

struct MetricParams {
  int bins_per_channel = 8;
  int hist_bins = 32;
  double eps = 1e-6;
  double eps_den = 1e-9;
  double d_c = 10.0;
  double w_max = 5.0;
};

struct MetricResult {
  double ratio_bin_centres = 0.0;
  double ratio_per_pixel = 0.0;
};

// Variance ratio by direct pixel enumeration: colour densities by pairwise
// quantised-colour comparison, then weighted moments taken pixel by pixel,
// either at the pixel's histogram bin centre or at its exact h.
inline MetricResult brute_force_metric(const chase::LabeledImage& img, const MetricParams& p) {
  using chase::PixelLabel;
  const int q = 256 / p.bins_per_channel;
  auto same_bin = [&](const chase::ColorRGB& a, const chase::ColorRGB& b) {
    return a.r / q == b.r / q && a.g / q == b.g / q && a.b / q == b.b / q;
  };
  std::vector<std::size_t> actor;
  std::vector<std::size_t> background;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (img.label(i) == PixelLabel::kActor) actor.push_back(i);
    if (img.label(i) == PixelLabel::kBackground) background.push_back(i);
  }
  auto density = [&](const std::vector<std::size_t>& set, const chase::ColorRGB& c) {
    std::size_t n = 0;
    for (auto j : set) n += same_bin(img.color(j), c) ? 1 : 0;
    return static_cast<double>(n) / static_cast<double>(set.size());
  };

  double cu = 0.0;
  double cv = 0.0;
  for (auto i : actor) {
    cu += img.pixel_at(i).u;
    cv += img.pixel_at(i).v;
  }
  cu /= static_cast<double>(actor.size());
  cv /= static_cast<double>(actor.size());

  const double lo = std::log(p.eps);
  const double width = -2.0 * lo / p.hist_bins;
  auto centre_of = [&](double h) {
    int k = static_cast<int>(std::floor((h - lo) / width));
    k = std::clamp(k, 0, p.hist_bins - 1);
    return lo + (k + 0.5) * width;
  };

  struct Sample {
    double h;
    double w;
  };
  auto collect = [&](const std::vector<std::size_t>& set, bool weighted) {
    std::vector<Sample> out;
    for (auto i : set) {
      const auto c = img.color(i);
      const double h = std::log(std::max(density(actor, c), p.eps) / std::max(density(background, c), p.eps));
      double w = 1.0;
      if (weighted) {
        const double d = std::hypot(img.pixel_at(i).u - cu, img.pixel_at(i).v - cv);
        w = d <= p.d_c ? p.w_max * (1.0 - d / p.d_c) + d / p.d_c : 1.0;
      }
      out.push_back({h, w});
    }
    return out;
  };
  const auto sa = collect(actor, false);
  const auto sb = collect(background, true);

  auto ratio = [&](bool centres) {
    auto value = [&](const Sample& s) { return centres ? centre_of(s.h) : s.h; };
    auto mean = [&](const std::vector<Sample>& v) {
      double sw = 0.0;
      double m = 0.0;
      for (const auto& s : v) {
        sw += s.w;
        m += s.w * value(s);
      }
      return m / sw;
    };
    auto spread = [&](const std::vector<Sample>& v, double about) {
      double sw = 0.0;
      double m = 0.0;
      for (const auto& s : v) {
        sw += s.w;
        m += s.w * (value(s) - about) * (value(s) - about);
      }
      return m / sw;
    };
    const double ma = mean(sa);
    const double mb = mean(sb);
    const double mm = 0.5 * (ma + mb);
    const double mix = 0.5 * (spread(sa, mm) + spread(sb, mm));
    return mix / (spread(sa, ma) + spread(sb, mb) + p.eps_den);
  };
  return {ratio(true), ratio(false)};
}

// ---------------------------------------------------------------- splines

// Jerk energy of a polynomial segment sum_k c_k s^k over [0, T], integrated
// numerically with 8-point Gauss-Legendre (exact for degree <= 15).
inline double jerk_energy_quadrature(const Eigen::VectorXd& c, double T) {
  static const double x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                              0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
  static const double w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                              0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  double sum = 0.0;
  for (int q = 0; q < 8; ++q) {
    const double s = 0.5 * T * (x[q] + 1.0);
    double j = 0.0;
    for (int k = 3; k < c.size(); ++k) j += c[k] * k * (k - 1) * (k - 2) * std::pow(s, k - 3);
    sum += w[q] * j * j;
  }
  return 0.5 * T * sum;
}

// Jerk energy plus rho-weighted waypoint misses of a trajectory, evaluated
// through the trajectory itself rather than the QP matrices.
inline double spline_cost(const chase::SplineTrajectory& traj, const std::vector<chase::Vec3>& waypoints,
                          double rho) {
  double cost = 0.0;
  for (int i = 0; i < traj.segments(); ++i) {
    const double T = traj.times()[static_cast<std::size_t>(i) + 1] - traj.times()[static_cast<std::size_t>(i)];
    for (int a = 0; a < 3; ++a) cost += jerk_energy_quadrature(traj.segment(i).row(a).transpose(), T);
  }
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const chase::Vec3 miss = traj.eval_segment(static_cast<int>(i),
                                                traj.times()[i + 1] - traj.times()[i]) - waypoints[i];
    cost += rho * miss.squaredNorm();
  }
  return cost;
}

// Orthonormal basis of the null space of A.
inline Eigen::MatrixXd null_space(const Eigen::MatrixXd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double tol = 1e-10 * (s.size() ? s(0) : 1.0);
  int rank = 0;
  while (rank < s.size() && s(rank) > tol) ++rank;
  return svd.matrixV().rightCols(A.cols() - rank);
}

// Central finite-difference gradient of f at x.
template <typename F>
Eigen::VectorXd finite_difference_gradient(F&& f, const Eigen::VectorXd& x, double step) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[i] += step;
    xm[i] -= step;
    g[i] = (f(xp) - f(xm)) / (2.0 * step);
  }
  return g;
}

}  // namespace oracle

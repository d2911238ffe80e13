#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "chase/geom.hpp"

namespace chase {

struct InitialState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
};

using AxisColumns = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// Equality-constrained QP over polynomial coefficients. Each axis owns an
// independent problem
//   min 0.5 x'Hx + g'x + c   s.t.  A x = b
// with the same H and A; only g, b and c differ between axes. Per axis the
// unknowns are ordered segment by segment, coefficient k = 0..K within a
// segment, in local time s = t - t_{i-1}.
struct QpProblem {
  int order = 5;                 // K
  std::vector<double> times;     // t_0..t_N
  std::vector<Vec3> waypoints;   // x_{c,1}..x_{c,N}
  double rho = 100.0;

  Eigen::MatrixXd hessian;       // n x n
  AxisColumns linear;            // n x 3
  Eigen::MatrixXd constraints;   // m x n
  AxisColumns rhs;               // m x 3
  Eigen::Vector3d constant = Eigen::Vector3d::Zero();

  int segments() const { return static_cast<int>(times.size()) - 1; }
  int vars_per_axis() const { return static_cast<int>(hessian.rows()); }
  int constraints_per_axis() const { return static_cast<int>(constraints.rows()); }

  // Stacked form over [x; y; z] coefficients: block-diagonal H and A.
  Eigen::MatrixXd stacked_hessian() const;
  Eigen::VectorXd stacked_linear() const;
  Eigen::MatrixXd stacked_constraints() const;
  Eigen::VectorXd stacked_rhs() const;

  double objective(const Eigen::VectorXd& stacked) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& stacked) const;
};

// Jerk energy Gram matrix of one polynomial segment of duration T:
// G(k, l) = integral_0^T d3(s^k) d3(s^l) ds.
Eigen::MatrixXd jerk_gram(int order, double duration);

// Objective: jerk energy over [t_0, t_N] plus rho * squared waypoint misses at
// t_1..t_N. Constraints: initial position/velocity/acceleration at t_0 and
// C0/C1/C2 continuity at interior knots. Throws std::invalid_argument on
// K < 5, rho <= 0, non-increasing times or a waypoint count != N.
QpProblem build_qp(const std::vector<Vec3>& waypoints, const std::vector<double>& times, const InitialState& init,
                   int order = 5, double rho = 100.0);

class SplineTrajectory {
 public:
  SplineTrajectory() = default;
  // segment_coeffs[i] is 3 x (K+1): row = axis, column = power of local time.
  SplineTrajectory(std::vector<double> times, std::vector<Eigen::MatrixXd> segment_coeffs);

  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  int segments() const { return static_cast<int>(coeffs_.size()); }
  int order() const { return static_cast<int>(coeffs_.front().cols()) - 1; }
  const std::vector<double>& times() const { return times_; }
  const Eigen::MatrixXd& segment(int i) const { return coeffs_[static_cast<std::size_t>(i)]; }
  bool empty() const { return coeffs_.empty(); }

  // Active segment for t; t_N belongs to the last segment.
  int segment_at(double t) const;

  // Derivative of the given order (0..K) at global time t. Throws
  // std::out_of_range outside [t_0, t_N] (1e-9 slack).
  Vec3 eval(double t, int derivative = 0) const;
  // Same, on a chosen segment at local time s (no domain check).
  Vec3 eval_segment(int segment, double s, int derivative = 0) const;

  // Stacked coefficient vector in QpProblem order.
  Eigen::VectorXd stacked() const;

 private:
  std::vector<double> times_;
  std::vector<Eigen::MatrixXd> coeffs_;
};

inline Vec3 eval_spline(const SplineTrajectory& traj, double t, int derivative = 0) {
  return traj.eval(t, derivative);
}

enum class SolveMode { kPerAxis, kJoint };

struct SplineSolution {
  SplineTrajectory trajectory;
  double objective = 0.0;
  double kkt_residual = 0.0;  // relative, worst over solved systems
};

// Direct solve of the KKT system [H A'; A 0][x; nu] = [-g; b]. Throws
// SingularSystem if the system is rank deficient or the relative residual
// exceeds 1e-8.
SplineSolution solve_spline(const QpProblem& problem, SolveMode mode = SolveMode::kPerAxis);

SplineTrajectory spline_from_stacked(const QpProblem& problem, const Eigen::VectorXd& stacked);

// Heading toward the target in the horizontal plane. Within 1e-6 m of
// directly overhead the previous yaw is held (0 if there is none).
double yaw_profile(const Vec3& position, const Vec3& target_center, std::optional<double> previous = std::nullopt);

// Shifts `angle` by a multiple of 2*pi to lie within pi of `reference`.
double unwrap_near(double angle, double reference);

}  // namespace chase

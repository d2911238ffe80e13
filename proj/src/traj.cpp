#include "chase/traj.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/LU>

#include "chase/error.hpp"

namespace chase {

namespace {

constexpr double kKktTol = 1e-8;

// d^r/ds^r of s^k, as a coefficient times s^(k-r).
double falling(int k, int r) {
  double f = 1.0;
  for (int i = 0; i < r; ++i) f *= (k - i);
  return f;
}

// Row vector mapping coefficients to the r-th derivative at local time s.
Eigen::RowVectorXd basis_row(int order, double s, int r) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(order + 1);
  for (int k = r; k <= order; ++k) row(k) = falling(k, r) * std::pow(s, k - r);
  return row;
}

Eigen::MatrixXd block_diag3(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(3 * m.rows(), 3 * m.cols());
  for (int a = 0; a < 3; ++a) out.block(a * m.rows(), a * m.cols(), m.rows(), m.cols()) = m;
  return out;
}

Eigen::VectorXd stack3(const AxisColumns& cols) {
  Eigen::VectorXd out(3 * cols.rows());
  for (int a = 0; a < 3; ++a) out.segment(a * cols.rows(), cols.rows()) = cols.col(a);
  return out;
}

struct KktResult {
  Eigen::MatrixXd primal;  // n x cols
  double residual = 0.0;
};

KktResult solve_kkt(const Eigen::MatrixXd& h, const Eigen::MatrixXd& a, const Eigen::MatrixXd& neg_g,
                    const Eigen::MatrixXd& b) {
  const Eigen::Index n = h.rows();
  const Eigen::Index m = a.rows();
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + m, n + m);
  kkt.topLeftCorner(n, n) = h;
  kkt.topRightCorner(n, m) = a.transpose();
  kkt.bottomLeftCorner(m, n) = a;
  Eigen::MatrixXd rhs(n + m, neg_g.cols());
  rhs.topRows(n) = neg_g;
  rhs.bottomRows(m) = b;

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (lu.rank() < kkt.rows()) {
    throw SingularSystem("spline KKT system is rank deficient (rank " + std::to_string(lu.rank()) + " of " +
                         std::to_string(kkt.rows()) + ")");
  }
  const Eigen::MatrixXd z = lu.solve(rhs);
  double residual = 0.0;
  for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
    const double scale = kkt.norm() * z.col(c).norm() + rhs.col(c).norm();
    const double r = (kkt * z.col(c) - rhs.col(c)).norm();
    residual = std::max(residual, scale > 0.0 ? r / scale : r);
  }
  if (!(residual < kKktTol)) {
    throw SingularSystem("spline KKT residual " + std::to_string(residual) + " above tolerance");
  }
  return {z.topRows(n), residual};
}

}  // namespace

Eigen::MatrixXd jerk_gram(int order, double duration) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(order + 1, order + 1);
  for (int k = 3; k <= order; ++k) {
    for (int l = 3; l <= order; ++l) {
      const int p = k + l - 5;
      g(k, l) = falling(k, 3) * falling(l, 3) * std::pow(duration, p) / p;
    }
  }
  return g;
}

QpProblem build_qp(const std::vector<Vec3>& waypoints, const std::vector<double>& times, const InitialState& init,
                   int order, double rho) {
  if (order < 5) throw std::invalid_argument("polynomial order K must be >= 5");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (times.size() < 2) throw std::invalid_argument("need at least one segment");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("knot times must be strictly increasing");
  }
  const int segs = static_cast<int>(times.size()) - 1;
  if (static_cast<int>(waypoints.size()) != segs) throw std::invalid_argument("need one waypoint per segment");

  const int per_seg = order + 1;
  const int n = segs * per_seg;
  const int m = 3 + 3 * (segs - 1);

  QpProblem qp;
  qp.order = order;
  qp.times = times;
  qp.waypoints = waypoints;
  qp.rho = rho;
  qp.hessian = Eigen::MatrixXd::Zero(n, n);
  qp.linear = AxisColumns::Zero(n, 3);
  qp.constraints = Eigen::MatrixXd::Zero(m, n);
  qp.rhs = AxisColumns::Zero(m, 3);

  for (int i = 0; i < segs; ++i) {
    const double dur = times[static_cast<std::size_t>(i) + 1] - times[static_cast<std::size_t>(i)];
    const int off = i * per_seg;
    qp.hessian.block(off, off, per_seg, per_seg) += 2.0 * jerk_gram(order, dur);
    // Soft waypoint at the end of segment i.
    const Eigen::RowVectorXd b = basis_row(order, dur, 0);
    qp.hessian.block(off, off, per_seg, per_seg) += 2.0 * rho * b.transpose() * b;
    const Vec3& w = waypoints[static_cast<std::size_t>(i)];
    for (int a = 0; a < 3; ++a) {
      qp.linear.block(off, a, per_seg, 1) += -2.0 * rho * w[a] * b.transpose();
      qp.constant[a] += rho * w[a] * w[a];
    }
  }

  // Initial state on segment 0 at s = 0.
  for (int r = 0; r < 3; ++r) {
    qp.constraints.block(r, 0, 1, per_seg) = basis_row(order, 0.0, r);
  }
  qp.rhs.row(0) = init.position.transpose();
  qp.rhs.row(1) = init.velocity.transpose();
  qp.rhs.row(2) = init.acceleration.transpose();

  // C0..C2 continuity at interior knots.
  for (int i = 0; i + 1 < segs; ++i) {
    const double dur = times[static_cast<std::size_t>(i) + 1] - times[static_cast<std::size_t>(i)];
    for (int r = 0; r < 3; ++r) {
      const int row = 3 + 3 * i + r;
      qp.constraints.block(row, i * per_seg, 1, per_seg) = basis_row(order, dur, r);
      qp.constraints.block(row, (i + 1) * per_seg, 1, per_seg) = -basis_row(order, 0.0, r);
    }
  }
  return qp;
}

Eigen::MatrixXd QpProblem::stacked_hessian() const { return block_diag3(hessian); }
Eigen::VectorXd QpProblem::stacked_linear() const { return stack3(linear); }
Eigen::MatrixXd QpProblem::stacked_constraints() const { return block_diag3(constraints); }
Eigen::VectorXd QpProblem::stacked_rhs() const { return stack3(rhs); }

double QpProblem::objective(const Eigen::VectorXd& x) const {
  const int n = vars_per_axis();
  double total = 0.0;
  for (int a = 0; a < 3; ++a) {
    const auto xa = x.segment(a * n, n);
    total += 0.5 * xa.dot(hessian * xa) + linear.col(a).dot(xa) + constant[a];
  }
  return total;
}

Eigen::VectorXd QpProblem::gradient(const Eigen::VectorXd& x) const {
  const int n = vars_per_axis();
  Eigen::VectorXd g(3 * n);
  for (int a = 0; a < 3; ++a) g.segment(a * n, n) = hessian * x.segment(a * n, n) + linear.col(a);
  return g;
}

SplineTrajectory::SplineTrajectory(std::vector<double> times, std::vector<Eigen::MatrixXd> segment_coeffs)
    : times_(std::move(times)), coeffs_(std::move(segment_coeffs)) {
  if (coeffs_.empty() || times_.size() != coeffs_.size() + 1) {
    throw std::invalid_argument("spline needs N segments and N+1 knot times");
  }
  for (const auto& c : coeffs_) {
    if (c.rows() != 3 || c.cols() != coeffs_.front().cols()) throw std::invalid_argument("bad segment coefficients");
  }
}

int SplineTrajectory::segment_at(double t) const {
  const auto it = std::upper_bound(times_.begin() + 1, times_.end() - 1, t);
  return static_cast<int>(it - (times_.begin() + 1));
}

Vec3 SplineTrajectory::eval_segment(int segment, double s, int derivative) const {
  const auto& c = coeffs_[static_cast<std::size_t>(segment)];
  const int order = static_cast<int>(c.cols()) - 1;
  Vec3 out = Vec3::Zero();
  if (derivative > order) return out;
  // Horner on the differentiated coefficients.
  for (int k = order; k >= derivative; --k) out = out * s + falling(k, derivative) * c.col(k);
  return out;
}

Vec3 SplineTrajectory::eval(double t, int derivative) const {
  if (coeffs_.empty()) throw std::out_of_range("empty spline");
  if (derivative < 0) throw std::invalid_argument("negative derivative order");
  constexpr double kSlack = 1e-9;
  if (t < times_.front() - kSlack || t > times_.back() + kSlack) {
    throw std::out_of_range("time " + std::to_string(t) + " outside spline domain");
  }
  const int seg = segment_at(t);
  return eval_segment(seg, t - times_[static_cast<std::size_t>(seg)], derivative);
}

Eigen::VectorXd SplineTrajectory::stacked() const {
  const int per_seg = order() + 1;
  const int n = segments() * per_seg;
  Eigen::VectorXd x(3 * n);
  for (int a = 0; a < 3; ++a) {
    for (int i = 0; i < segments(); ++i) {
      x.segment(a * n + i * per_seg, per_seg) = coeffs_[static_cast<std::size_t>(i)].row(a).transpose();
    }
  }
  return x;
}

SplineTrajectory spline_from_stacked(const QpProblem& problem, const Eigen::VectorXd& x) {
  const int per_seg = problem.order + 1;
  const int n = problem.vars_per_axis();
  std::vector<Eigen::MatrixXd> segs;
  for (int i = 0; i < problem.segments(); ++i) {
    Eigen::MatrixXd c(3, per_seg);
    for (int a = 0; a < 3; ++a) c.row(a) = x.segment(a * n + i * per_seg, per_seg).transpose();
    segs.push_back(std::move(c));
  }
  return SplineTrajectory(problem.times, std::move(segs));
}

SplineSolution solve_spline(const QpProblem& problem, SolveMode mode) {
  Eigen::VectorXd x;
  double residual = 0.0;
  if (mode == SolveMode::kJoint) {
    const auto r = solve_kkt(problem.stacked_hessian(), problem.stacked_constraints(), -problem.stacked_linear(),
                             problem.stacked_rhs());
    x = r.primal.col(0);
    residual = r.residual;
  } else {
    // One factorisation, three right-hand sides.
    const auto r = solve_kkt(problem.hessian, problem.constraints, -problem.linear, problem.rhs);
    const int n = problem.vars_per_axis();
    x.resize(3 * n);
    for (int a = 0; a < 3; ++a) x.segment(a * n, n) = r.primal.col(a);
    residual = r.residual;
  }
  return {spline_from_stacked(problem, x), problem.objective(x), residual};
}

double yaw_profile(const Vec3& position, const Vec3& target_center, std::optional<double> previous) {
  const double dx = target_center.x() - position.x();
  const double dy = target_center.y() - position.y();
  if (std::hypot(dx, dy) <= 1e-6) return previous.value_or(0.0);
  const double yaw = std::atan2(dy, dx);
  return previous ? unwrap_near(yaw, *previous) : yaw;
}

double unwrap_near(double angle, double reference) {
  const double two_pi = 2.0 * M_PI;
  return angle + two_pi * std::round((reference - angle) / two_pi);
}

}  // namespace chase

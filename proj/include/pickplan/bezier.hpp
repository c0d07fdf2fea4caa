#pragma once

#include <vector>

#include "pickplan/geometry.hpp"

namespace pickplan {

// Exact for n <= 30.
double binomial(int n, int k);
double bernstein(int i, int n, double tau);

struct CurveState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  Vec3 jerk = Vec3::Zero();
};

// Control points of the k-th derivative, divided by scale^k so they bound the
// physical-time derivative.
std::vector<Vec3> derivative_control_points(const std::vector<Vec3>& cps, int k, double scale);

// (n+1-k) x (n+1) map from control points to k-th tau-derivative control points.
Eigen::MatrixXd derivative_operator(int n, int k);

// Gram matrix of the degree-m Bernstein basis on [0,1].
Eigen::MatrixXd bernstein_gram(int m);

// Hessian H of the squared-jerk integral over a segment of the given duration:
// integral of |x'''(t)|^2 dt = c^T H c for one coordinate.
Eigen::MatrixXd jerk_hessian(int n, double duration);

Vec3 de_casteljau(const std::vector<Vec3>& cps, double tau);

class BezierSegment {
 public:
  BezierSegment() = default;
  BezierSegment(std::vector<Vec3> control_points, double t0, double t1);

  int degree() const { return static_cast<int>(cps_.size()) - 1; }
  const std::vector<Vec3>& control_points() const { return cps_; }
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  double duration() const { return t1_ - t0_; }

  // Throws OutOfDomain outside [t0, t1] (1e-9 s slack, clamped).
  CurveState eval(double t) const;
  Vec3 position(double t) const;

 private:
  double tau_of(double t) const;

  std::vector<Vec3> cps_;
  double t0_ = 0.0;
  double t1_ = 1.0;
};

class PiecewiseBezier {
 public:
  PiecewiseBezier() = default;
  explicit PiecewiseBezier(std::vector<BezierSegment> segments);

  const std::vector<BezierSegment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  double t_begin() const;
  double t_end() const;

  // Segment containing t; a joint time belongs to the later segment.
  std::size_t segment_index(double t) const;
  CurveState eval(double t) const;
  Vec3 position(double t) const { return eval(t).position; }

  void append(const BezierSegment& segment);
  void append(const PiecewiseBezier& other);

  // Largest position/velocity/acceleration mismatch over all joints.
  double continuity_error() const;

 private:
  std::vector<BezierSegment> segments_;
};

// Control points of the degree-n curve interpolating n+1 samples taken at
// tau_j = j/n. Throws SingularSystem if the collocation matrix is singular.
std::vector<Vec3> fit_bezier(const std::vector<Vec3>& samples, int degree);

}  // namespace pickplan

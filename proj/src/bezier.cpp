#include "pickplan/bezier.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pickplan/error.hpp"

namespace pickplan {

namespace {

constexpr int kMaxBinomial = 30;
constexpr double kDomainSlack = 1e-9;

const std::array<std::array<double, kMaxBinomial + 1>, kMaxBinomial + 1>& pascal() {
  static const auto table = [] {
    std::array<std::array<double, kMaxBinomial + 1>, kMaxBinomial + 1> t{};
    for (int n = 0; n <= kMaxBinomial; ++n) {
      t[n][0] = 1.0;
      for (int k = 1; k <= n; ++k) t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0.0);
    }
    return t;
  }();
  return table;
}

}  // namespace

double binomial(int n, int k) {
  if (n < 0 || n > kMaxBinomial) throw PlanError(ErrorCode::DimensionMismatch, "binomial order out of range");
  if (k < 0 || k > n) return 0.0;
  return pascal()[n][k];
}

double bernstein(int i, int n, double tau) {
  if (i < 0 || i > n) return 0.0;
  return binomial(n, i) * std::pow(tau, i) * std::pow(1.0 - tau, n - i);
}

std::vector<Vec3> derivative_control_points(const std::vector<Vec3>& cps, int k, double scale) {
  const int n = static_cast<int>(cps.size()) - 1;
  if (k < 0 || k > n) throw PlanError(ErrorCode::DimensionMismatch, "derivative order exceeds degree");
  std::vector<Vec3> d = cps;
  for (int j = 1; j <= k; ++j) {
    const double factor = static_cast<double>(n - j + 1) / scale;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) d[i] = factor * (d[i + 1] - d[i]);
    d.pop_back();
  }
  return d;
}

Eigen::MatrixXd derivative_operator(int n, int k) {
  Eigen::MatrixXd op = Eigen::MatrixXd::Identity(n + 1, n + 1);
  for (int j = 1; j <= k; ++j) {
    const int rows = n + 1 - j;
    Eigen::MatrixXd step = Eigen::MatrixXd::Zero(rows, rows + 1);
    for (int i = 0; i < rows; ++i) {
      step(i, i) = -(n - j + 1);
      step(i, i + 1) = n - j + 1;
    }
    op = step * op;
  }
  return op;
}

Eigen::MatrixXd bernstein_gram(int m) {
  Eigen::MatrixXd g(m + 1, m + 1);
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j)
      g(i, j) = binomial(m, i) * binomial(m, j) / ((2 * m + 1) * binomial(2 * m, i + j));
  return g;
}

Eigen::MatrixXd jerk_hessian(int n, double duration) {
  if (n < 3) return Eigen::MatrixXd::Zero(n + 1, n + 1);
  const Eigen::MatrixXd d3 = derivative_operator(n, 3);
  const Eigen::MatrixXd h = d3.transpose() * bernstein_gram(n - 3) * d3 / std::pow(duration, 5);
  return 0.5 * (h + h.transpose());
}

Vec3 de_casteljau(const std::vector<Vec3>& cps, double tau) {
  std::vector<Vec3> work = cps;
  for (std::size_t level = work.size(); level > 1; --level) {
    for (std::size_t i = 0; i + 1 < level; ++i) work[i] = (1.0 - tau) * work[i] + tau * work[i + 1];
  }
  return work[0];
}

BezierSegment::BezierSegment(std::vector<Vec3> control_points, double t0, double t1)
    : cps_(std::move(control_points)), t0_(t0), t1_(t1) {
  if (cps_.size() < 2) throw PlanError(ErrorCode::DimensionMismatch, "Bezier segment needs degree >= 1");
  if (!(t1 > t0)) throw PlanError(ErrorCode::DimensionMismatch, "Bezier segment needs t1 > t0");
}

double BezierSegment::tau_of(double t) const {
  if (t < t0_ - kDomainSlack || t > t1_ + kDomainSlack || !std::isfinite(t)) {
    throw PlanError(ErrorCode::OutOfDomain, "time outside the Bezier segment");
  }
  return std::clamp((t - t0_) / (t1_ - t0_), 0.0, 1.0);
}

CurveState BezierSegment::eval(double t) const {
  const double tau = tau_of(t);
  const double s = duration();
  CurveState st;
  st.position = de_casteljau(cps_, tau);
  const int n = degree();
  if (n >= 1) st.velocity = de_casteljau(derivative_control_points(cps_, 1, s), tau);
  if (n >= 2) st.acceleration = de_casteljau(derivative_control_points(cps_, 2, s), tau);
  if (n >= 3) st.jerk = de_casteljau(derivative_control_points(cps_, 3, s), tau);
  return st;
}

Vec3 BezierSegment::position(double t) const { return de_casteljau(cps_, tau_of(t)); }

PiecewiseBezier::PiecewiseBezier(std::vector<BezierSegment> segments) {
  for (const auto& s : segments) append(s);
}

double PiecewiseBezier::t_begin() const {
  if (segments_.empty()) throw PlanError(ErrorCode::OutOfDomain, "empty trajectory");
  return segments_.front().t0();
}

double PiecewiseBezier::t_end() const {
  if (segments_.empty()) throw PlanError(ErrorCode::OutOfDomain, "empty trajectory");
  return segments_.back().t1();
}

std::size_t PiecewiseBezier::segment_index(double t) const {
  if (segments_.empty() || t < t_begin() - kDomainSlack || t > t_end() + kDomainSlack || !std::isfinite(t)) {
    throw PlanError(ErrorCode::OutOfDomain, "time outside the trajectory");
  }
  std::size_t lo = 0;
  std::size_t hi = segments_.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (segments_[mid].t0() <= t) lo = mid; else hi = mid - 1;
  }
  return lo;
}

CurveState PiecewiseBezier::eval(double t) const { return segments_[segment_index(t)].eval(t); }

void PiecewiseBezier::append(const BezierSegment& segment) {
  if (!segments_.empty() && std::abs(segments_.back().t1() - segment.t0()) > 1e-9) {
    throw PlanError(ErrorCode::DimensionMismatch, "Bezier segments must abut in time");
  }
  segments_.push_back(segment);
}

void PiecewiseBezier::append(const PiecewiseBezier& other) {
  for (const auto& s : other.segments()) append(s);
}

double PiecewiseBezier::continuity_error() const {
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < segments_.size(); ++k) {
    const CurveState a = segments_[k].eval(segments_[k].t1());
    const CurveState b = segments_[k + 1].eval(segments_[k + 1].t0());
    worst = std::max({worst, (a.position - b.position).cwiseAbs().maxCoeff(),
                      (a.velocity - b.velocity).cwiseAbs().maxCoeff(),
                      (a.acceleration - b.acceleration).cwiseAbs().maxCoeff()});
  }
  return worst;
}

std::vector<Vec3> fit_bezier(const std::vector<Vec3>& samples, int degree) {
  if (degree < 1 || static_cast<int>(samples.size()) != degree + 1) {
    throw PlanError(ErrorCode::DimensionMismatch, "fit_bezier needs exactly degree+1 samples");
  }
  const int n = degree;
  Eigen::MatrixXd m(n + 1, n + 1);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) m(j, i) = bernstein(i, n, static_cast<double>(j) / n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) throw PlanError(ErrorCode::SingularSystem, "Bernstein collocation matrix is singular");
  Eigen::MatrixXd rhs(n + 1, 3);
  for (int j = 0; j <= n; ++j) rhs.row(j) = samples[j].transpose();
  const Eigen::MatrixXd sol = lu.solve(rhs);
  std::vector<Vec3> cps(n + 1);
  for (int i = 0; i <= n; ++i) cps[i] = sol.row(i).transpose();
  return cps;
}

}  // namespace pickplan

#include "pickplan/quad_trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "pickplan/error.hpp"
#include "pickplan/qp.hpp"

namespace pickplan {

namespace {

struct AxisQp {
  QpProblem problem;
  std::vector<int> axes;
};

class RowSink {
 public:
  explicit RowSink(int n) : n_(n) {}
  Eigen::RowVectorXd& add(double rhs) {
    rows_.emplace_back(Eigen::RowVectorXd::Zero(n_));
    rhs_.push_back(rhs);
    return rows_.back();
  }
  void into(Eigen::MatrixXd& a, Eigen::VectorXd& b) const {
    a.resize(static_cast<Eigen::Index>(rows_.size()), n_);
    b.resize(static_cast<Eigen::Index>(rows_.size()));
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      a.row(r) = rows_[r];
      b[r] = rhs_[r];
    }
  }

 private:
  int n_;
  std::vector<Eigen::RowVectorXd> rows_;
  std::vector<double> rhs_;
};

AxisQp build_leg_qp(const QuadLeg& leg, const std::vector<double>& durations, const std::vector<int>& axes,
                    int degree) {
  const int k_count = static_cast<int>(durations.size());
  const int d = static_cast<int>(axes.size());
  const int m = degree + 1;
  const int n_vars = k_count * d * m;
  auto idx = [&](int k, int a, int i) { return (k * d + a) * m + i; };

  AxisQp out;
  out.axes = axes;
  QpProblem& p = out.problem;
  p.Q = Eigen::MatrixXd::Zero(n_vars, n_vars);
  p.q = Eigen::VectorXd::Zero(n_vars);
  for (int k = 0; k < k_count; ++k) {
    const Eigen::MatrixXd h = jerk_hessian(degree, durations[k]);
    for (int a = 0; a < d; ++a) p.Q.block(idx(k, a, 0), idx(k, a, 0), m, m) = h;
  }

  std::vector<Eigen::MatrixXd> ops;
  for (int o = 0; o <= 4; ++o) ops.push_back(derivative_operator(degree, o));

  RowSink eq(n_vars);
  for (int a = 0; a < d; ++a) {
    const int ax = axes[a];
    for (int o = 0; o <= 2; ++o) {
      const double s0 = std::pow(durations.front(), o);
      const double s1 = std::pow(durations.back(), o);
      auto& r0 = eq.add(o == 0 ? leg.p_start[ax] : 0.0);
      r0.segment(idx(0, a, 0), m) = ops[o].row(0) / s0;
      auto& r1 = eq.add(o == 0 ? leg.p_goal[ax] : 0.0);
      r1.segment(idx(k_count - 1, a, 0), m) = ops[o].row(ops[o].rows() - 1) / s1;
      for (int k = 0; k + 1 < k_count; ++k) {
        auto& r = eq.add(0.0);
        r.segment(idx(k, a, 0), m) = ops[o].row(ops[o].rows() - 1) / std::pow(durations[k], o);
        r.segment(idx(k + 1, a, 0), m) -= ops[o].row(0) / std::pow(durations[k + 1], o);
      }
    }
  }
  eq.into(p.A_eq, p.b_eq);

  RowSink ie(n_vars);
  for (int k = 0; k < k_count; ++k) {
    const HalfspacePolytope& cell = leg.corridor.cells[k];
    for (int r = 0; r < cell.rows(); ++r) {
      const Eigen::RowVector3d normal = cell.A().row(r);
      double off_axis = 0.0;
      for (int ax = 0; ax < 3; ++ax)
        if (std::find(axes.begin(), axes.end(), ax) == axes.end()) off_axis += std::abs(normal[ax]);
      if (off_axis > 1e-12) continue;
      for (int i = 0; i < m; ++i) {
        auto& row = ie.add(cell.b()[r]);
        for (int a = 0; a < d; ++a) row[idx(k, a, i)] = normal[axes[a]];
      }
    }
    const DerivativeBounds& bd = leg.bounds[k];
    const double lim[5] = {0.0, bd.v, bd.a, bd.j, bd.s};
    for (int o = 1; o <= 4; ++o) {
      if (!std::isfinite(lim[o]) || o > degree) continue;
      const double scale = std::pow(durations[k], o);
      for (int a = 0; a < d; ++a)
        for (int i = 0; i < ops[o].rows(); ++i) {
          auto& up = ie.add(lim[o]);
          up.segment(idx(k, a, 0), m) = ops[o].row(i) / scale;
          auto& lo = ie.add(lim[o]);
          lo.segment(idx(k, a, 0), m) = -ops[o].row(i) / scale;
        }
    }
  }
  ie.into(p.A_ie, p.b_ie);
  return out;
}

}  // namespace

PiecewiseBezier generate_quad_trajectory(const QuadLeg& leg, const QuadOptions& options, QuadSolveInfo* info) {
  const Corridor& cor = leg.corridor;
  cor.validate();
  const std::size_t k_count = cor.size();
  if (leg.bounds.size() != k_count || (!leg.fixed_duration.empty() && leg.fixed_duration.size() != k_count)) {
    throw PlanError(ErrorCode::DimensionMismatch, "per-cell bounds do not match the corridor", Stage::QuadTrajectory);
  }
  if (!polytope_contains(cor.cells.front(), leg.p_start, 1e-9) || !polytope_contains(cor.cells.back(), leg.p_goal, 1e-9)) {
    throw PlanError(ErrorCode::QpInfeasible, "leg endpoints lie outside their corridor cells", Stage::QuadTrajectory);
  }
  bool separable = true;
  for (const auto& c : cor.cells) separable = separable && c.axis_aligned();
  const std::vector<std::vector<int>> groups = separable ? std::vector<std::vector<int>>{{0}, {1}, {2}}
                                                         : std::vector<std::vector<int>>{{0, 1, 2}};

  std::vector<double> durations = cor.durations;
  QuadSolveInfo local;
  local.axis_separable = separable;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    std::vector<std::vector<Vec3>> cps(k_count, std::vector<Vec3>(options.degree + 1, Vec3::Zero()));
    bool ok = true;
    local.qp_iterations = 0;
    local.kkt_max = 0.0;
    local.variables = 0;
    for (const auto& axes : groups) {
      const AxisQp qp = build_leg_qp(leg, durations, axes, options.degree);
      const QpSolution sol = solve_qp(qp.problem);
      local.qp_iterations += sol.iterations;
      local.variables += qp.problem.num_vars();
      if (sol.status != QpStatus::Success) {
        ok = false;
        break;
      }
      local.kkt_max = std::max(local.kkt_max, sol.kkt.max());
      const int d = static_cast<int>(axes.size());
      const int m = options.degree + 1;
      for (std::size_t k = 0; k < k_count; ++k)
        for (int a = 0; a < d; ++a)
          for (int i = 0; i < m; ++i) cps[k][i][axes[a]] = sol.x[(static_cast<int>(k) * d + a) * m + i];
    }
    if (ok) {
      PiecewiseBezier curve;
      double t = leg.t0;
      for (std::size_t k = 0; k < k_count; ++k) {
        curve.append(BezierSegment(cps[k], t, t + durations[k]));
        t += durations[k];
      }
      local.retries = attempt;
      local.durations = durations;
      if (info) *info = local;
      return curve;
    }
    for (std::size_t k = 0; k < k_count; ++k)
      if (leg.fixed_duration.empty() || !leg.fixed_duration[k]) durations[k] *= options.retry_scale;
  }
  throw PlanError(ErrorCode::QpInfeasible, "quad trajectory QP infeasible after duration retries",
                  Stage::QuadTrajectory);
}

PiecewiseBezier generate_quad_trajectory(const Corridor& corridor, const Vec3& p_start, const Vec3& p_goal,
                                         const QuadLimits& limits, const QuadOptions& options) {
  limits.validate();
  QuadLeg leg;
  leg.corridor = corridor;
  DerivativeBounds b;
  b.v = limits.v_max;
  b.a = limits.a_max;
  leg.bounds.assign(corridor.size(), b);
  leg.p_start = p_start;
  leg.p_goal = p_goal;
  return generate_quad_trajectory(leg, options);
}

PiecewiseBezier hold_segment(const Vec3& p, double t0, double duration, int degree) {
  return PiecewiseBezier({BezierSegment(std::vector<Vec3>(degree + 1, p), t0, t0 + duration)});
}

DerivativeBounds manipulation_bounds(const Vec3& p_top, double half_width, double v_E_max, double a_E_max,
                                     const QuadLimits& quad) {
  // Horizontal tilt offset of the arm is at most sqrt(2) L |a_xy| / g per unit of acceleration.
  const double lever = std::sqrt(2.0) * p_top.norm();
  DerivativeBounds b;
  b.v = std::min(quad.v_max, 0.5 * v_E_max);
  b.a = std::min(quad.a_max, 0.5 * half_width * kGravity / (lever + 0.5 * half_width));
  b.j = 0.25 * v_E_max * kGravity / lever;
  b.s = 0.4 * a_E_max * kGravity / lever;
  return b;
}

}  // namespace pickplan

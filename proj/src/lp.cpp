#include "pickplan/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "pickplan/error.hpp"

namespace pickplan {

namespace {

constexpr double kCostTol = 1e-11;
constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;

struct Tableau {
  int rows = 0;
  int cols = 0;
  Eigen::MatrixXd t;       // rows x cols
  Eigen::VectorXd rhs;     // rows
  std::vector<int> basis;  // rows
  int pivots = 0;

  void pivot(int r, int e) {
    const double p = t(r, e);
    t.row(r) /= p;
    rhs(r) /= p;
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      const double f = t(i, e);
      if (f == 0.0) continue;
      t.row(i) -= f * t.row(r);
      rhs(i) -= f * rhs(r);
    }
    basis[r] = e;
    ++pivots;
  }
};

enum class PhaseResult { Optimal, Unbounded };

// Minimizes cost.x over the tableau; columns with allowed[j]=false never enter.
PhaseResult run_phase(Tableau& tab, const Eigen::VectorXd& cost, const std::vector<bool>& allowed, int max_pivots) {
  std::vector<bool> is_basic(tab.cols, false);
  while (tab.pivots < max_pivots) {
    std::fill(is_basic.begin(), is_basic.end(), false);
    Eigen::VectorXd cb(tab.rows);
    for (int r = 0; r < tab.rows; ++r) {
      cb(r) = cost(tab.basis[r]);
      is_basic[tab.basis[r]] = true;
    }
    const Eigen::RowVectorXd reduced = cost.transpose() - cb.transpose() * tab.t;
    int enter = -1;
    for (int j = 0; j < tab.cols; ++j) {
      if (!allowed[j] || is_basic[j]) continue;
      if (reduced(j) < -kCostTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return PhaseResult::Optimal;
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < tab.rows; ++r) {
      const double a = tab.t(r, enter);
      if (a <= kPivotTol) continue;
      const double ratio = tab.rhs(r) / a;
      if (ratio < best_ratio - 1e-15 ||
          (std::abs(ratio - best_ratio) <= 1e-15 && leave >= 0 && tab.basis[r] < tab.basis[leave])) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave < 0) return PhaseResult::Unbounded;
    tab.pivot(leave, enter);
  }
  throw PlanError(ErrorCode::NoConvergence, "LP pivot limit reached");
}

}  // namespace

LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(a.rows());
  if (a.cols() != n || b.size() != m) {
    throw PlanError(ErrorCode::DimensionMismatch, "solve_lp: inconsistent dimensions");
  }
  LpResult res;
  Tableau tab;
  tab.rows = n;
  tab.cols = m + n;
  tab.t = Eigen::MatrixXd::Zero(n, m + n);
  tab.rhs.resize(n);
  tab.basis.resize(n);
  Eigen::VectorXd sign(n);
  for (int k = 0; k < n; ++k) {
    sign(k) = c(k) < 0.0 ? -1.0 : 1.0;
    tab.t.row(k).head(m) = sign(k) * a.col(k).transpose();
    tab.t(k, m + k) = 1.0;
    tab.rhs(k) = sign(k) * c(k);
    tab.basis[k] = m + k;
  }
  const int max_pivots = 50 * (n + m) + 1000;

  Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(m + n);
  cost1.tail(n).setOnes();
  std::vector<bool> allowed(m + n, true);
  run_phase(tab, cost1, allowed, max_pivots);
  double art = 0.0;
  for (int r = 0; r < n; ++r) {
    if (tab.basis[r] >= m) art += tab.rhs(r);
  }
  const double cscale = 1.0 + c.cwiseAbs().maxCoeff();
  if (art > kFeasTol * cscale) {
    res.status = LpStatus::Unbounded;
    res.pivots = tab.pivots;
    return res;
  }
  for (int r = 0; r < n; ++r) {
    if (tab.basis[r] < m) continue;
    for (int j = 0; j < m; ++j) {
      if (std::abs(tab.t(r, j)) > kPivotTol) {
        tab.pivot(r, j);
        break;
      }
    }
  }
  for (int j = m; j < m + n; ++j) allowed[j] = false;
  Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(m + n);
  cost2.head(m) = b;
  if (run_phase(tab, cost2, allowed, max_pivots) == PhaseResult::Unbounded) {
    res.status = LpStatus::Infeasible;
    res.pivots = tab.pivots;
    return res;
  }

  // Primal solution = simplex multipliers of the final basis.
  Eigen::MatrixXd basis_mat(n, n);
  Eigen::VectorXd cb(n);
  for (int r = 0; r < n; ++r) {
    const int j = tab.basis[r];
    if (j < m) {
      basis_mat.col(r) = sign.cwiseProduct(a.row(j).transpose());
      cb(r) = b(j);
    } else {
      basis_mat.col(r) = Eigen::VectorXd::Unit(n, j - m);
      cb(r) = 0.0;
    }
  }
  const Eigen::VectorXd pi = basis_mat.transpose().fullPivLu().solve(cb);
  res.x = sign.cwiseProduct(pi);
  res.value = c.dot(res.x);
  res.status = LpStatus::Optimal;
  res.pivots = tab.pivots;
  return res;
}

ChebyshevBall chebyshev_center(const HalfspacePolytope& poly, double radius_cap) {
  const int m = poly.rows();
  Eigen::MatrixXd a(m + 1, 4);
  Eigen::VectorXd b(m + 1);
  a.topLeftCorner(m, 3) = poly.A();
  a.topRightCorner(m, 1).setOnes();
  b.head(m) = poly.b();
  a.row(m) << 0.0, 0.0, 0.0, 1.0;
  b(m) = radius_cap;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
  c(3) = 1.0;
  const LpResult lp = solve_lp(c, a, b);
  if (lp.status != LpStatus::Optimal) {
    throw PlanError(ErrorCode::EmptyIntersection, "Chebyshev LP did not reach an optimum");
  }
  ChebyshevBall ball;
  ball.center = lp.x.head<3>();
  ball.radius = lp.x(3);
  return ball;
}

}  // namespace pickplan

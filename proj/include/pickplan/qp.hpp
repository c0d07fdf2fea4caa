#pragma once

#include <Eigen/Dense>

namespace pickplan {

// min 0.5 x'Qx + q'x  s.t.  A_eq x = b_eq,  A_ie x <= b_ie
struct QpProblem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd q;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_ie;
  Eigen::VectorXd b_ie;

  // Sizes all constraint blocks for n variables with no rows.
  static QpProblem with_size(int n);
  int num_vars() const { return static_cast<int>(q.size()); }
  // Throws DimensionMismatch on inconsistent sizes or asymmetric Q.
  void validate() const;
};

enum class QpStatus { Success, Infeasible, MaxIterations, NumericalFailure };

const char* to_string(QpStatus s);

struct KktResiduals {
  double stationarity = 0.0;
  double primal_eq = 0.0;
  double primal_ie = 0.0;
  double complementarity = 0.0;
  double dual = 0.0;
  double max() const;
};

struct QpSolution {
  QpStatus status = QpStatus::NumericalFailure;
  Eigen::VectorXd x;
  Eigen::VectorXd mu_ie;  // >= 0
  Eigen::VectorXd nu_eq;
  double objective = 0.0;
  int iterations = 0;
  KktResiduals kkt;
};

double qp_objective(const QpProblem& p, const Eigen::VectorXd& x);
KktResiduals kkt_residuals(const QpProblem& p, const Eigen::VectorXd& x, const Eigen::VectorXd& mu_ie,
                           const Eigen::VectorXd& nu_eq);

inline constexpr double kQpTolerance = 1e-6;

// Success requires every KKT residual below kQpTolerance, relative to the
// largest entry of Q and q when those exceed one.
QpSolution solve_qp(const QpProblem& p);

}  // namespace pickplan

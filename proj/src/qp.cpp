#include "pickplan/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pickplan/error.hpp"

namespace pickplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kViolationTol = 1e-10;
constexpr double kRegularization = 1e-10;

struct Givens {
  double c;
  double s;
};

// Rotation mapping (a, b) to (hypot(a, b), 0).
Givens make_givens(double a, double b) {
  const double h = std::hypot(a, b);
  if (h == 0.0) return {1.0, 0.0};
  return {a / h, b / h};
}

// Dual active-set method on min 0.5 y'Hy + g'y s.t. C y <= d, rows of C unit norm.
// J'N = R is maintained with J = L^-T Q for H = LL'.
class DualActiveSet {
 public:
  DualActiveSet(const Eigen::MatrixXd& h, const Eigen::VectorXd& g, const Eigen::MatrixXd& c,
                const Eigen::VectorXd& d)
      : H_(h), g_(g), C_(c), d_(d), n_(static_cast<int>(g.size())), m_(static_cast<int>(d.size())) {}

  QpStatus run(int max_iterations) {
    Eigen::LLT<Eigen::MatrixXd> llt(H_);
    if (llt.info() != Eigen::Success) return QpStatus::NumericalFailure;
    y_ = llt.solve(-g_);
    const Eigen::MatrixXd l = llt.matrixL();
    J_ = l.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n_, n_));
    R_ = Eigen::MatrixXd::Zero(n_, n_);
    active_.clear();
    u_.clear();
    std::vector<bool> is_active(m_, false);

    while (true) {
      int p = -1;
      double worst = kViolationTol;
      for (int i = 0; i < m_; ++i) {
        if (is_active[i]) continue;
        const double v = C_.row(i).dot(y_) - d_[i];
        if (v > worst) {
          worst = v;
          p = i;
        }
      }
      if (p < 0) return QpStatus::Success;

      const Eigen::VectorXd np = -C_.row(p).transpose();
      std::vector<double> u_plus = u_;
      u_plus.push_back(0.0);
      while (true) {
        if (++iterations_ > max_iterations) return QpStatus::Infeasible;
        const int q = static_cast<int>(active_.size());
        const Eigen::VectorXd dv = J_.transpose() * np;
        const Eigen::VectorXd z = J_.rightCols(n_ - q) * dv.tail(n_ - q);
        Eigen::VectorXd r = Eigen::VectorXd::Zero(q);
        if (q > 0) r = R_.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(dv.head(q));

        double t1 = kInf;
        int k = -1;
        for (int j = 0; j < q; ++j) {
          if (r[j] > 1e-14) {
            const double ratio = u_plus[j] / r[j];
            if (ratio < t1) {
              t1 = ratio;
              k = j;
            }
          }
        }
        const double s_p = np.dot(y_) + d_[p];
        const double znp = z.dot(np);
        const double t2 = (z.squaredNorm() <= 1e-28 || znp <= 0.0) ? kInf : -s_p / znp;

        if (t1 == kInf && t2 == kInf) return QpStatus::Infeasible;
        if (t2 == kInf) {
          for (int j = 0; j < q; ++j) u_plus[j] -= t1 * r[j];
          u_plus[q] += t1;
          drop(k, u_plus, is_active);
          continue;
        }
        const double t = std::min(t1, t2);
        y_ += t * z;
        for (int j = 0; j < q; ++j) u_plus[j] -= t * r[j];
        u_plus[q] += t;
        if (t2 <= t1) {
          add(dv, p);
          is_active[p] = true;
          u_ = u_plus;
          break;
        }
        drop(k, u_plus, is_active);
      }
    }
  }

  const Eigen::VectorXd& y() const { return y_; }
  Eigen::VectorXd multipliers() const {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(m_);
    for (std::size_t j = 0; j < active_.size(); ++j) mu[active_[j]] = std::max(0.0, u_[j]);
    return mu;
  }
  int iterations() const { return iterations_; }

 private:
  void add(Eigen::VectorXd dv, int p) {
    const int q = static_cast<int>(active_.size());
    for (int j = n_ - 1; j > q; --j) {
      const Givens gr = make_givens(dv[j - 1], dv[j]);
      dv[j - 1] = gr.c * dv[j - 1] + gr.s * dv[j];
      dv[j] = 0.0;
      rotate_columns(j - 1, j, gr);
    }
    R_.col(q).head(q + 1) = dv.head(q + 1);
    active_.push_back(p);
  }

  void drop(int k, std::vector<double>& u_plus, std::vector<bool>& is_active) {
    const int q = static_cast<int>(active_.size());
    is_active[active_[k]] = false;
    active_.erase(active_.begin() + k);
    u_plus.erase(u_plus.begin() + k);
    for (int j = k; j < q - 1; ++j) R_.col(j) = R_.col(j + 1);
    R_.col(q - 1).setZero();
    for (int i = k; i < q - 1; ++i) {
      const Givens gr = make_givens(R_(i, i), R_(i + 1, i));
      for (int col = i; col < q - 1; ++col) {
        const double a = R_(i, col), b = R_(i + 1, col);
        R_(i, col) = gr.c * a + gr.s * b;
        R_(i + 1, col) = -gr.s * a + gr.c * b;
      }
      rotate_columns(i, i + 1, gr);
    }
  }

  void rotate_columns(int a, int b, const Givens& gr) {
    const Eigen::VectorXd ca = J_.col(a);
    J_.col(a) = gr.c * ca + gr.s * J_.col(b);
    J_.col(b) = -gr.s * ca + gr.c * J_.col(b);
  }

  const Eigen::MatrixXd& H_;
  const Eigen::VectorXd& g_;
  const Eigen::MatrixXd& C_;
  const Eigen::VectorXd& d_;
  int n_;
  int m_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd J_;
  Eigen::MatrixXd R_;
  std::vector<int> active_;
  std::vector<double> u_;
  int iterations_ = 0;
};

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Success: return "Success";
    case QpStatus::Infeasible: return "Infeasible";
    case QpStatus::MaxIterations: return "MaxIterations";
    case QpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

QpProblem QpProblem::with_size(int n) {
  QpProblem p;
  p.Q = Eigen::MatrixXd::Zero(n, n);
  p.q = Eigen::VectorXd::Zero(n);
  p.A_eq.resize(0, n);
  p.b_eq.resize(0);
  p.A_ie.resize(0, n);
  p.b_ie.resize(0);
  return p;
}

void QpProblem::validate() const {
  const auto n = q.size();
  if (Q.rows() != n || Q.cols() != n || A_eq.cols() != n || A_ie.cols() != n || A_eq.rows() != b_eq.size() ||
      A_ie.rows() != b_ie.size()) {
    throw PlanError(ErrorCode::DimensionMismatch, "QP blocks have inconsistent sizes");
  }
  if (n > 0 && (Q - Q.transpose()).cwiseAbs().maxCoeff() >= 1e-9 * std::max(1.0, Q.cwiseAbs().maxCoeff())) {
    throw PlanError(ErrorCode::DimensionMismatch, "QP Hessian is not symmetric");
  }
}

double KktResiduals::max() const { return std::max({stationarity, primal_eq, primal_ie, complementarity, dual}); }

double qp_objective(const QpProblem& p, const Eigen::VectorXd& x) { return 0.5 * x.dot(p.Q * x) + p.q.dot(x); }

KktResiduals kkt_residuals(const QpProblem& p, const Eigen::VectorXd& x, const Eigen::VectorXd& mu_ie,
                           const Eigen::VectorXd& nu_eq) {
  KktResiduals r;
  r.stationarity = inf_norm(p.Q * x + p.q + p.A_ie.transpose() * mu_ie + p.A_eq.transpose() * nu_eq);
  r.primal_eq = inf_norm(p.A_eq * x - p.b_eq);
  if (p.b_ie.size() > 0) {
    const Eigen::VectorXd slack = p.A_ie * x - p.b_ie;
    r.primal_ie = std::max(0.0, slack.maxCoeff());
    r.complementarity = inf_norm(mu_ie.cwiseProduct(slack));
    r.dual = std::max(0.0, -mu_ie.minCoeff());
  }
  return r;
}

QpSolution solve_qp(const QpProblem& p) {
  p.validate();
  const int n = p.num_vars();
  const int me = static_cast<int>(p.b_eq.size());
  const int mi = static_cast<int>(p.b_ie.size());
  QpSolution sol;
  sol.x = Eigen::VectorXd::Zero(n);
  sol.mu_ie = Eigen::VectorXd::Zero(mi);
  sol.nu_eq = Eigen::VectorXd::Zero(me);

  // Equality elimination: x = x_p + Z y with Z spanning null(A_eq).
  Eigen::VectorXd x_p = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(n, n);
  if (me > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(p.A_eq.transpose());
    qr.setThreshold(1e-12);
    const int rank = static_cast<int>(qr.rank());
    const Eigen::MatrixXd qfull = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    z = qfull.rightCols(n - rank);
    x_p = p.A_eq.completeOrthogonalDecomposition().solve(p.b_eq);
    if (inf_norm(p.A_eq * x_p - p.b_eq) > 1e-9 * (1.0 + inf_norm(p.b_eq))) {
      sol.status = QpStatus::Infeasible;
      sol.x = x_p;
      return sol;
    }
  }
  const int nr = static_cast<int>(z.cols());

  Eigen::MatrixXd h = z.transpose() * p.Q * z;
  Eigen::VectorXd g = z.transpose() * (p.Q * x_p + p.q);
  double sigma = nr > 0 ? h.diagonal().cwiseAbs().mean() : 1.0;
  if (!(sigma > 1e-300)) sigma = 1.0;
  h /= sigma;
  g /= sigma;
  h = 0.5 * (h + h.transpose());

  Eigen::MatrixXd c = p.A_ie * z;
  Eigen::VectorXd d = p.b_ie - p.A_ie * x_p;
  std::vector<int> kept;
  std::vector<double> norms;
  for (int i = 0; i < mi; ++i) {
    const double rn = c.row(i).norm();
    const double scale = std::max(1.0, p.A_ie.row(i).norm());
    if (rn <= 1e-12 * scale) {
      if (d[i] < -1e-9 * scale) {
        sol.status = QpStatus::Infeasible;
        sol.x = x_p;
        return sol;
      }
      continue;
    }
    kept.push_back(i);
    norms.push_back(rn);
  }
  Eigen::MatrixXd cn(kept.size(), nr);
  Eigen::VectorXd dn(kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) {
    cn.row(j) = c.row(kept[j]) / norms[j];
    dn[j] = d[kept[j]] / norms[j];
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(nr);
  Eigen::VectorXd mu_kept = Eigen::VectorXd::Zero(kept.size());
  if (nr > 0) {
    Eigen::LLT<Eigen::MatrixXd> probe(h);
    if (probe.info() != Eigen::Success) h += kRegularization * Eigen::MatrixXd::Identity(nr, nr);
    DualActiveSet solver(h, g, cn, dn);
    const QpStatus st = solver.run(10 * (n + me + mi));
    sol.iterations = solver.iterations();
    if (st != QpStatus::Success) {
      sol.status = st;
      sol.x = x_p + z * solver.y();
      return sol;
    }
    y = solver.y();
    mu_kept = solver.multipliers();
  }
  sol.x = x_p + z * y;
  for (std::size_t j = 0; j < kept.size(); ++j) sol.mu_ie[kept[j]] = sigma * mu_kept[j] / norms[j];
  if (me > 0) {
    const Eigen::VectorXd rhs = -(p.Q * sol.x + p.q + p.A_ie.transpose() * sol.mu_ie);
    sol.nu_eq = p.A_eq.transpose().completeOrthogonalDecomposition().solve(rhs);
  }
  sol.objective = qp_objective(p, sol.x);
  sol.kkt = kkt_residuals(p, sol.x, sol.mu_ie, sol.nu_eq);

  double scale = 1.0;
  if (n > 0) scale = std::max({1.0, p.Q.cwiseAbs().maxCoeff(), inf_norm(p.q)});
  const KktResiduals& k = sol.kkt;
  const bool ok = k.stationarity < kQpTolerance * scale && k.primal_eq < kQpTolerance &&
                  k.primal_ie < kQpTolerance && k.complementarity < kQpTolerance * scale && k.dual == 0.0;
  sol.status = ok ? QpStatus::Success : QpStatus::NumericalFailure;
  return sol;
}

}  // namespace pickplan

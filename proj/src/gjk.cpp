#include "pickplan/gjk.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace pickplan {

namespace {

struct Simplex {
  std::array<Vec3, 4> pts;
  int size = 0;
};

// Closest point to the origin on the hull of the simplex. Every subset whose
// affine minimizer has nonnegative barycentric weights is a candidate; the
// global minimizer is the candidate with the smallest norm. On return the
// simplex is reduced to that subset.
Vec3 closest_on_simplex(Simplex& s, bool& contains_origin) {
  contains_origin = false;
  const int n = s.size;
  double best_norm = std::numeric_limits<double>::infinity();
  Vec3 best = s.pts[0];
  int best_mask = 1;
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::array<int, 4> idx{};
    int m = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) idx[m++] = i;
    }
    const Vec3& p0 = s.pts[idx[0]];
    Vec3 x = p0;
    bool valid = true;
    if (m > 1) {
      Eigen::Matrix<double, 3, Eigen::Dynamic> e(3, m - 1);
      for (int j = 1; j < m; ++j) e.col(j - 1) = s.pts[idx[j]] - p0;
      const Eigen::MatrixXd g = e.transpose() * e;
      const Eigen::VectorXd rhs = -e.transpose() * p0;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
      lu.setThreshold(1e-12);
      if (lu.rank() < m - 1) continue;
      const Eigen::VectorXd mu = lu.solve(rhs);
      const double lambda0 = 1.0 - mu.sum();
      if (lambda0 < 0.0 || (mu.array() < 0.0).any()) valid = false;
      x = p0 + e * mu;
    }
    if (!valid) continue;
    const double nx = x.squaredNorm();
    if (nx < best_norm) {
      best_norm = nx;
      best = x;
      best_mask = mask;
      if (m == 4) contains_origin = true;
    }
  }
  if (contains_origin && best_mask != 15) contains_origin = false;
  Simplex reduced;
  for (int i = 0; i < n; ++i) {
    if (best_mask & (1 << i)) reduced.pts[reduced.size++] = s.pts[i];
  }
  s = reduced;
  return best;
}

bool lex_less(const ConvexPolyhedronV& a, const ConvexPolyhedronV& b) {
  const std::size_t n = std::min(a.vertices.size(), b.vertices.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) {
      if (a.vertices[i](k) != b.vertices[i](k)) return a.vertices[i](k) < b.vertices[i](k);
    }
  }
  return a.vertices.size() < b.vertices.size();
}

GjkResult gjk_ordered(const ConvexPolyhedronV& pa, const ConvexPolyhedronV& pb) {
  GjkResult res;
  Simplex s;
  Vec3 v = pa.vertices[0] - pb.vertices[0];
  s.pts[0] = v;
  s.size = 1;
  for (int it = 0; it < kGjkMaxIterations; ++it) {
    res.iterations = it + 1;
    const double vv = v.squaredNorm();
    if (vv <= kGjkTolerance * kGjkTolerance) {
      res.intersects = true;
      res.distance = 0.0;
      return res;
    }
    const Vec3 w = pa.support(-v) - pb.support(v);
    // Support progress: |v|^2 - v.w bounds |v| - dist from above by |v|.
    if (vv - v.dot(w) <= kGjkTolerance * vv) {
      res.intersects = false;
      res.distance = std::sqrt(vv);
      return res;
    }
    bool duplicate = false;
    for (int i = 0; i < s.size; ++i) {
      if (s.pts[i] == w) duplicate = true;
    }
    if (duplicate) {
      res.intersects = false;
      res.distance = std::sqrt(vv);
      return res;
    }
    s.pts[s.size++] = w;
    bool inside = false;
    const Vec3 next = closest_on_simplex(s, inside);
    if (inside) {
      res.intersects = true;
      res.distance = 0.0;
      return res;
    }
    // |v| is nonincreasing in exact arithmetic; a stall means support ties are
    // cycling the simplex around the closest point.
    if (next.squaredNorm() >= vv * (1.0 - 1e-12)) {
      res.intersects = false;
      res.distance = std::sqrt(std::min(vv, next.squaredNorm()));
      return res;
    }
    v = next;
  }
  res.intersects = true;
  res.distance = 0.0;
  return res;
}

}  // namespace

GjkResult gjk_query(const ConvexPolyhedronV& pa, const ConvexPolyhedronV& pb) {
  // A canonical argument order makes the result bitwise symmetric.
  if (lex_less(pb, pa)) return gjk_ordered(pb, pa);
  return gjk_ordered(pa, pb);
}

}  // namespace pickplan

#pragma once

#include "pickplan/geometry.hpp"

namespace pickplan {

struct GjkResult {
  bool intersects = false;
  double distance = 0.0;
  int iterations = 0;
};

inline constexpr double kGjkTolerance = 1e-9;
inline constexpr int kGjkMaxIterations = 128;

// Distance between the convex hulls of two vertex sets. Hitting the iteration
// cap reports intersects=true.
GjkResult gjk_query(const ConvexPolyhedronV& pa, const ConvexPolyhedronV& pb);

}  // namespace pickplan

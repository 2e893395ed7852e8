#pragma once

// Independent test oracles. Everything here stays deliberately dumb: dense
// boundary sampling and closed forms only, no reuse of the library's
// projection or fitting paths.

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "core/geometry.hpp"

namespace oracles {

// Shared unit-circle table so a million-vertex polygon scan stays cheap
// across many ellipses.
class BoundaryTable {
 public:
  explicit BoundaryTable(std::size_t vertices) : cos_(vertices), sin_(vertices) {
    for (std::size_t i = 0; i < vertices; ++i) {
      const double phi =
          2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(vertices);
      cos_[i] = std::cos(phi);
      sin_[i] = std::sin(phi);
    }
  }

  // Minimum distance from p to a polygonal sampling of the ellipse boundary.
  double min_distance(const pipegpr::geometry::Ellipse& e,
                      pipegpr::geometry::Point2 p) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cos_.size(); ++i) {
      const double dx = e.center_x + e.a * cos_[i] - p.x;
      const double dy = e.center_y + e.b * sin_[i] - p.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) best = d2;
    }
    return std::sqrt(best);
  }

  std::size_t size() const { return cos_.size(); }

 private:
  std::vector<double> cos_;
  std::vector<double> sin_;
};

// Exact distance from (x, 0) to a circle of radius r centered at (cx, depth).
inline double circle_signature_depth(double x, double cx, double depth, double r) {
  return std::hypot(x - cx, depth) - r;
}

// Points exactly on an ellipse at uniform parameter angles.
inline std::vector<pipegpr::geometry::Point2> on_ellipse(
    const pipegpr::geometry::Ellipse& e, int count, double phase = 0.0) {
  std::vector<pipegpr::geometry::Point2> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double phi = phase + 2.0 * std::numbers::pi * i / count;
    pts.push_back({e.center_x + e.a * std::cos(phi), e.center_y + e.b * std::sin(phi)});
  }
  return pts;
}

// Normality residual: |cos| of the angle between the projection direction
// and the boundary tangent at the nearest point, both normalized.
inline double normality_residual(const pipegpr::geometry::Ellipse& e,
                                 pipegpr::geometry::Point2 p,
                                 pipegpr::geometry::Point2 q) {
  // Tangent from the implicit gradient (2x/a^2, 2y/b^2) rotated 90 degrees.
  const double gx = (q.x - e.center_x) / (e.a * e.a);
  const double gy = (q.y - e.center_y) / (e.b * e.b);
  double tx = -gy, ty = gx;
  const double tn = std::hypot(tx, ty);
  tx /= tn;
  ty /= tn;
  double dx = p.x - q.x, dy = p.y - q.y;
  const double dn = std::hypot(dx, dy);
  dx /= dn;
  dy /= dn;
  return std::abs(tx * dx + ty * dy);
}

}  // namespace oracles

#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace pipegpr::geometry {

namespace {

// Nearest boundary point in the closed first quadrant for semi-axes (a, b)
// and a query (u, v) relative to the center, u >= 0 and v >= 0.
//
// The nearest point satisfies x = a^2 u / (t + a^2), y = b^2 v / (t + b^2)
// for the Lagrange parameter t. With s = t + min(a,b)^2 the boundary
// condition becomes
//
//   G(s) = (ws / s)^2 + (wl / (s + delta))^2 - 1 = 0,
//
// where ws carries the smaller semi-axis and delta = |a^2 - b^2|. G is
// strictly decreasing on (0, inf), so a bracketed Newton iteration cannot
// escape, including for interior queries and eccentricities of a/b = 50
// and beyond. Queries on the major axis need the classical off-axis branch
// and are handled in closed form.
Point2 nearest_in_quadrant(double a, double b, double u, double v) {
  const bool on_x_axis = v <= 1e-15 * b;
  const bool on_y_axis = u <= 1e-15 * a;

  if (on_x_axis && on_y_axis) {
    return (a <= b) ? Point2{a, 0.0} : Point2{0.0, b};
  }
  if (on_x_axis) {
    if (a > b) {
      const double xcrit = (a * a - b * b) / a;
      if (u < xcrit) {
        const double x = a * a * u / (a * a - b * b);
        const double y = b * std::sqrt(std::max(0.0, 1.0 - (x / a) * (x / a)));
        return {x, y};
      }
    }
    return {a, 0.0};
  }
  if (on_y_axis) {
    if (b > a) {
      const double ycrit = (b * b - a * a) / b;
      if (v < ycrit) {
        const double y = b * b * v / (b * b - a * a);
        const double x = a * std::sqrt(std::max(0.0, 1.0 - (y / b) * (y / b)));
        return {x, y};
      }
    }
    return {0.0, b};
  }

  const bool y_axis_smaller = b <= a;
  const double ws = y_axis_smaller ? b * v : a * u;
  const double wl = y_axis_smaller ? a * u : b * v;
  const double delta = std::abs(a * a - b * b);

  const auto value = [&](double s) {
    const double t1 = ws / s;
    const double t2 = wl / (s + delta);
    return t1 * t1 + t2 * t2 - 1.0;
  };

  // G(lo) >= 0 and G(hi) <= 0 by construction.
  double lo = ws;
  double hi = ws + std::hypot(ws, wl);
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double g = value(s);
    if (g > 0.0) {
      lo = s;
    } else {
      hi = s;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * s) break;
    const double t1 = ws / s;
    const double t2 = wl / (s + delta);
    const double dg = -2.0 * (t1 * t1 / s + t2 * t2 / (s + delta));
    double next = s - g / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= std::numeric_limits<double>::epsilon() * s) {
      s = next;
      break;
    }
    s = next;
  }

  if (y_axis_smaller) {
    return {a * a * u / (s + delta), b * b * v / s};
  }
  return {a * a * u / s, b * b * v / (s + delta)};
}

}  // namespace

double conic_value(const ConicCoeffs& c, double x, double y) {
  return c.A * x * x + c.B * x * y + c.C * y * y + c.D * x + c.E * y + c.F;
}

Ellipse conic_to_ellipse(const ConicCoeffs& c) {
  const double scale = std::max({std::abs(c.A), std::abs(c.B), std::abs(c.C),
                                 std::abs(c.D), std::abs(c.E), std::abs(c.F)});
  if (scale == 0.0) throw DegenerateConic("all conic coefficients are zero");
  if (std::abs(c.B) > 1e-9 * scale)
    throw DegenerateConic("conic is not axis-aligned (B != 0)");
  if (c.A * c.C <= 0.0) throw DegenerateConic("A*C <= 0, conic is not an ellipse");

  const double x0 = -c.D / (2.0 * c.A);
  const double y0 = -c.E / (2.0 * c.C);
  const double s = c.D * c.D / (4.0 * c.A) + c.E * c.E / (4.0 * c.C) - c.F;
  const double aa = s / c.A;
  const double bb = s / c.C;
  if (!(aa > 0.0) || !(bb > 0.0))
    throw DegenerateConic("conic has no real ellipse solution");
  return {x0, y0, std::sqrt(aa), std::sqrt(bb)};
}

ConicCoeffs ellipse_to_conic(const Ellipse& e) {
  // (b^2, 0, a^2, -2 b^2 x0, -2 a^2 y0, a^2 y0^2 + b^2 x0^2 - a^2 b^2),
  // divided by 2ab so that 4AC = 1.
  const double k = 2.0 * e.a * e.b;
  const double a2 = e.a * e.a;
  const double b2 = e.b * e.b;
  ConicCoeffs c;
  c.A = b2 / k;
  c.B = 0.0;
  c.C = a2 / k;
  c.D = -2.0 * b2 * e.center_x / k;
  c.E = -2.0 * a2 * e.center_y / k;
  c.F = (a2 * e.center_y * e.center_y + b2 * e.center_x * e.center_x - a2 * b2) / k;
  return c;
}

Point2 nearest_boundary_point(const Ellipse& e, Point2 p) {
  const double dx = p.x - e.center_x;
  const double dy = p.y - e.center_y;
  const Point2 q = nearest_in_quadrant(e.a, e.b, std::abs(dx), std::abs(dy));
  const double sx = dx < 0.0 ? -1.0 : 1.0;
  const double sy = dy < 0.0 ? -1.0 : 1.0;
  return {e.center_x + sx * q.x, e.center_y + sy * q.y};
}

double boundary_distance(const Ellipse& e, Point2 p) {
  const Point2 q = nearest_boundary_point(e, p);
  return std::hypot(p.x - q.x, p.y - q.y);
}

ProjectionResult project_point(const Ellipse& e, Point2 p) {
  const double nx = (p.x - e.center_x) / e.a;
  const double ny = (p.y - e.center_y) / e.b;
  if (nx * nx + ny * ny <= 1.0 + 1e-12)
    throw PointInsideEllipse("projection query is inside or on the ellipse");

  const Point2 q = nearest_boundary_point(e, p);
  ProjectionResult result;
  result.nearest = q;
  result.distance = std::hypot(p.x - q.x, p.y - q.y);
  result.angle_from_vertical = std::atan2(p.x - q.x, q.y - p.y);
  return result;
}

Point2 rotate_signature_point(double x, double y, double cumulative_angle) {
  if (!(std::abs(cumulative_angle) < 3.14159265358979323846 / 2.0))
    throw InvalidAngle("cumulative rotation angle must satisfy |angle| < pi/2");
  return {x - y * std::sin(cumulative_angle), y * std::cos(cumulative_angle)};
}

}  // namespace pipegpr::geometry

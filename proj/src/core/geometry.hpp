#pragma once

namespace pipegpr::geometry {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Axis-aligned ellipse in scan coordinates: x runs along the survey line,
// y is depth below the surface, positive downward. A buried pipe cross
// section always satisfies center_y > b.
struct Ellipse {
  double center_x = 0.0;
  double center_y = 0.0;
  double a = 0.0;  // horizontal semi-axis, meters
  double b = 0.0;  // vertical semi-axis, meters
};

// General conic A x^2 + B xy + C y^2 + D x + E y + F = 0.
struct ConicCoeffs {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
  double E = 0.0;
  double F = 0.0;
};

struct ProjectionResult {
  Point2 nearest;
  double distance = 0.0;
  // Signed angle between the downward vertical through the query point and
  // the ray toward the nearest boundary point; positive when the nearest
  // point lies toward decreasing x.
  double angle_from_vertical = 0.0;
};

// Algebraic distance of (x, y) to the conic.
double conic_value(const ConicCoeffs& c, double x, double y);

// Throws DegenerateConic unless the conic is an axis-aligned real ellipse
// (B = 0, A*C > 0, positive squared semi-axes).
Ellipse conic_to_ellipse(const ConicCoeffs& c);

// Conic coefficients of an ellipse, scaled so that 4AC = 1.
ConicCoeffs ellipse_to_conic(const Ellipse& e);

// Nearest point on the ellipse boundary for a query anywhere in the plane
// (interior or exterior); used for geometric residuals.
Point2 nearest_boundary_point(const Ellipse& e, Point2 p);

// Euclidean distance from p to the ellipse boundary, any position.
double boundary_distance(const Ellipse& e, Point2 p);

// Shortest-distance projection of a point strictly outside the ellipse.
// Throws PointInsideEllipse when p is inside or on the boundary.
ProjectionResult project_point(const Ellipse& e, Point2 p);

// Rotates the raw signature point (x, y) about its surface pivot (x, 0) by
// the cumulative angle. Throws InvalidAngle when |angle| >= pi/2, which
// would put the point at or above the surface.
Point2 rotate_signature_point(double x, double y, double cumulative_angle);

}  // namespace pipegpr::geometry

#pragma once

#include <span>

#include "core/geometry.hpp"

namespace pipegpr::fitting {

struct FitResult {
  geometry::ConicCoeffs conic;  // B = 0, 4AC = 1
  geometry::Ellipse ellipse;
  double algebraic_residual = 0.0;  // sum of squared algebraic distances
  double geometric_rms = 0.0;       // RMS point-to-boundary distance, meters
};

// Circular-pipe signature model (y + r)^2 = (x - x0)^2 + y0^2.
struct HyperbolaFit {
  double apex_x = 0.0;           // x0, meters
  double depth_to_center = 0.0;  // y0, meters
  double radius = 0.0;           // r, meters
  double residual = 0.0;         // sum of squared depth residuals, m^2
};

// Constrained algebraic ellipse fit: minimizes the sum of squared algebraic
// distances subject to B = 0 and 4AC = 1. Input coordinates are centered
// and scaled to unit RMS before solving, then the conic is mapped back.
// Throws DegenerateInput (n < 6, collinear, < 3 distinct x) or FitFailed
// (no real-ellipse solution).
FitResult fit_ellipse(std::span<const geometry::Point2> points);

// Cross-section fit used by the iterative inversion. The constrained
// algebraic fit of the rotated cloud seeds the solve (together with the
// warm start and the cloud's circumcircle); each seed is then refined by
// Levenberg-Marquardt on the signature residuals y_i - dist((x_i, 0), E)
// of the raw extracted points, and the ellipse explaining the measured
// signature best wins. The bare cloud objective cannot be used for this:
// a shallow arc is consistent with a continuum of ellipses, and its
// algebraic optimum under noise degenerates into a sliver threading the
// points. Residuals in the returned FitResult are reported on the cloud.
FitResult fit_cross_section(std::span<const geometry::Point2> signature,
                            std::span<const geometry::Point2> cloud,
                            const geometry::Ellipse* warm_start = nullptr);

// RMS of the signature residuals y_i - dist((x_i, 0), E) over raw
// extracted points: how well an ellipse explains the measured depths.
double signature_rms(const geometry::Ellipse& ellipse,
                     std::span<const geometry::Point2> signature);

double algebraic_distance_sum(const geometry::ConicCoeffs& conic,
                              std::span<const geometry::Point2> points);

double geometric_rms(const geometry::Ellipse& ellipse,
                     std::span<const geometry::Point2> points);

// Levenberg-Marquardt fit of the circular model over (x0, y0, r); the
// baseline the elliptical inversion is compared against.
HyperbolaFit fit_hyperbola_baseline(std::span<const geometry::Point2> points);

}  // namespace pipegpr::fitting

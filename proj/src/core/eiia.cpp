#include "core/eiia.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "core/errors.hpp"

namespace pipegpr::eiia {

SignaturePointSet make_signature_point_set(std::vector<geometry::Point2> points) {
  for (size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].y > 0.0))
      throw DegenerateInput("signature points must have y > 0");
    if (i > 0 && !(points[i].x > points[i - 1].x))
      throw DegenerateInput("signature point x coordinates must be strictly increasing");
  }
  SignaturePointSet set;
  set.cumulative_angles.assign(points.size(), 0.0);
  set.points = std::move(points);
  return set;
}

namespace {

void validate(const SignaturePointSet& pts, const EiiaConfig& cfg) {
  if (pts.points.size() < 6)
    throw DegenerateInput("EIIA needs at least 6 signature points");
  if (pts.points.size() != pts.cumulative_angles.size())
    throw DegenerateInput("signature point/angle size mismatch");
  for (size_t i = 0; i < pts.points.size(); ++i) {
    if (!(pts.points[i].y > 0.0))
      throw DegenerateInput("signature points must have y > 0");
    if (i > 0 && !(pts.points[i].x > pts.points[i - 1].x))
      throw DegenerateInput("signature point x coordinates must be strictly increasing");
    if (!(std::abs(pts.cumulative_angles[i]) < std::numbers::pi / 2.0))
      throw DegenerateInput("cumulative angles must satisfy |angle| < pi/2");
  }
  if (cfg.max_iterations < 1) throw DegenerateInput("max_iterations must be >= 1");
  if (!(cfg.geometric_rms_threshold > 0.0) || !(cfg.stability_epsilon > 0.0))
    throw DegenerateInput("EIIA thresholds must be positive");
}

}  // namespace

PipeEstimate run_eiia(const SignaturePointSet& pts, const EiiaConfig& cfg) {
  validate(pts, cfg);

  const size_t n = pts.points.size();
  std::vector<double> angles = pts.cumulative_angles;
  std::vector<geometry::Point2> current(n);

  PipeEstimate est;
  fitting::FitResult best_fit;
  double best_rms = std::numeric_limits<double>::infinity();
  geometry::Ellipse previous_ellipse;
  double prev_rms = 0.0;

  for (int k = 1; k <= cfg.max_iterations; ++k) {
    for (size_t i = 0; i < n; ++i) {
      current[i] = geometry::rotate_signature_point(pts.points[i].x,
                                                    pts.points[i].y, angles[i]);
    }

    const fitting::FitResult fit = fitting::fit_cross_section(
        pts.points, current, k > 1 ? &previous_ellipse : nullptr);
    previous_ellipse = fit.ellipse;
    const double sig_rms = fitting::signature_rms(fit.ellipse, pts.points);
    est.residual_history.push_back(
        {fit.algebraic_residual, fit.geometric_rms, sig_rms});
    est.iterations_used = k;

    if (sig_rms < best_rms) {
      best_rms = sig_rms;
      best_fit = fit;
      est.best_iteration = k;
    }
    if (k > 1 && sig_rms > prev_rms) est.residual_nonmonotone = true;
    prev_rms = sig_rms;
    if (k == cfg.max_iterations) break;

    // New cumulative angle: absolute direction of the shortest distance
    // from the surface pivot to the freshly fitted ellipse.
    double movement = 0.0;
    for (size_t i = 0; i < n; ++i) {
      angles[i] = geometry::project_point(fit.ellipse, {pts.points[i].x, 0.0})
                      .angle_from_vertical;
      const geometry::Point2 next = geometry::rotate_signature_point(
          pts.points[i].x, pts.points[i].y, angles[i]);
      movement = std::max(movement, std::hypot(next.x - current[i].x,
                                               next.y - current[i].y));
    }

    // A smooth arc fits some (far too large) ellipse to a tiny residual at
    // the very first iteration, so a bare residual threshold would end the
    // inversion before it starts. The residual stops therefore fire only
    // once the update has stopped relocating the points.
    const bool stable = movement < cfg.stability_epsilon;
    const bool on_target = fit.geometric_rms <= cfg.geometric_rms_threshold &&
                           movement < 10.0 * cfg.stability_epsilon;
    if (stable || on_target) break;
  }

  est.ellipse = best_fit.ellipse;

  // Invert the original points onto the chosen cross section: rotate each
  // about its pivot into the shortest-distance direction of the returned
  // ellipse. At the fixed point these land on the boundary.
  est.inverted_points.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double angle =
        geometry::project_point(est.ellipse, {pts.points[i].x, 0.0})
            .angle_from_vertical;
    est.inverted_points[i] = geometry::rotate_signature_point(
        pts.points[i].x, pts.points[i].y, angle);
  }
  est.final_geometric_rms = fitting::geometric_rms(est.ellipse, est.inverted_points);

  const AngleRadius ar = derive_angle_and_radius(best_fit.ellipse);
  est.alpha = ar.alpha;
  est.radius = ar.radius;
  est.alpha_clamped = ar.clamped;
  return est;
}

AngleRadius derive_angle_and_radius(const geometry::Ellipse& e) {
  if (e.a >= e.b) return {std::asin(e.b / e.a), e.b, false};
  return {std::numbers::pi / 2.0, e.b, true};
}

double normalize_bearing_180(double degrees) {
  double m = std::fmod(degrees, 180.0);
  if (m < 0.0) m += 180.0;
  return m;
}

double line_angle_distance(double a_deg, double b_deg) {
  const double d = std::abs(normalize_bearing_180(a_deg) - normalize_bearing_180(b_deg));
  return std::min(d, 180.0 - d);
}

BearingChoice disambiguate_bearing(double detecting_bearing_deg, double alpha_rad,
                                   double map_bearing_deg) {
  const double alpha_deg = alpha_rad * 180.0 / std::numbers::pi;
  BearingChoice choice;
  choice.candidates[0] = normalize_bearing_180(detecting_bearing_deg + alpha_deg);
  choice.candidates[1] = normalize_bearing_180(detecting_bearing_deg - alpha_deg);

  const double d0 = line_angle_distance(choice.candidates[0], map_bearing_deg);
  const double d1 = line_angle_distance(choice.candidates[1], map_bearing_deg);
  const bool distinct =
      line_angle_distance(choice.candidates[0], choice.candidates[1]) > 1e-12;
  if (std::abs(d0 - d1) < 1e-12) {
    choice.chosen = choice.candidates[0];
    choice.tie = distinct;
  } else {
    choice.chosen = d0 < d1 ? choice.candidates[0] : choice.candidates[1];
  }
  return choice;
}

}  // namespace pipegpr::eiia

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "core/fitting.hpp"

namespace pipegpr::eiia {

// Downward-opening points extracted from a B-scan, in meters, together
// with the per-point cumulative rotation angle about the surface pivot
// (x_i, 0). x is strictly increasing and every y is positive.
struct SignaturePointSet {
  std::vector<geometry::Point2> points;
  std::vector<double> cumulative_angles;  // radians, |angle| < pi/2
};

// Validates invariants and initializes all cumulative angles to zero.
// Throws DegenerateInput on violation.
SignaturePointSet make_signature_point_set(std::vector<geometry::Point2> points);

struct EiiaConfig {
  int max_iterations = 10;
  double geometric_rms_threshold = 0.03;  // meters
  double stability_epsilon = 1e-4;        // meters
};

struct IterationRecord {
  double algebraic_residual = 0.0;
  double geometric_rms = 0.0;  // cloud-to-ellipse RMS, meters
  double signature_rms = 0.0;  // measured-depth explanation RMS, meters
};

struct PipeEstimate {
  geometry::Ellipse ellipse;
  double alpha = 0.0;   // obliquity between pipe and detecting direction, radians
  double radius = 0.0;  // = ellipse.b, meters
  std::optional<std::array<double, 2>> candidate_bearings;  // degrees in [0, 180)
  std::optional<double> chosen_bearing;                     // degrees in [0, 180)
  bool bearing_tie = false;
  bool alpha_clamped = false;         // fitted a < b, alpha forced to pi/2
  bool residual_nonmonotone = false;  // geometric rms increased between iterations
  int iterations_used = 0;
  int best_iteration = 0;  // 1-based index into residual_history
  std::vector<IterationRecord> residual_history;
  // Original points rotated onto the returned cross section (the inverted
  // signature), and their RMS distance to its boundary.
  std::vector<geometry::Point2> inverted_points;
  double final_geometric_rms = 0.0;  // meters
};

// Alternates cross-section fitting with per-point rotation about the
// surface pivots until the iteration cap, the RMS threshold, or stability
// is reached; returns the iterate whose ellipse explains the measured
// signature best (smallest recorded signature RMS). Bearing fields are
// left unset. FitFailed from the ellipse fit propagates; hitting the
// iteration cap is a legal stop, not an error.
PipeEstimate run_eiia(const SignaturePointSet& pts, const EiiaConfig& cfg = {});

struct AngleRadius {
  double alpha = 0.0;   // radians
  double radius = 0.0;  // meters
  bool clamped = false;
};

// alpha = arcsin(b/a) and radius = b; when fit noise yields a < b the
// obliquity clamps to pi/2 with the flag set.
AngleRadius derive_angle_and_radius(const geometry::Ellipse& e);

struct BearingChoice {
  double chosen = 0.0;  // degrees in [0, 180)
  std::array<double, 2> candidates{0.0, 0.0};
  bool tie = false;
};

// Picks between detecting_bearing +/- alpha (mod 180) the candidate closer
// to the map bearing; exact ties go to the first candidate with the flag
// set.
BearingChoice disambiguate_bearing(double detecting_bearing_deg, double alpha_rad,
                                   double map_bearing_deg);

// Reduce an undirected line bearing to [0, 180) degrees.
double normalize_bearing_180(double degrees);

// Undirected angular distance between two line bearings, in [0, 90].
double line_angle_distance(double a_deg, double b_deg);

}  // namespace pipegpr::eiia

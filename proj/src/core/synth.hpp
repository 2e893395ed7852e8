#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "core/bscan.hpp"

namespace pipegpr::synth {

struct PipeScene {
  double radius = 0.3;            // meters
  double depth_to_center = 1.5;   // meters below the surface
  double obliquity = std::numbers::pi / 2.0;  // radians in (0, pi/2]
  double apex_x = 1.0;            // scan coordinate directly above the pipe
  double scan_length = 2.0;       // meters
  double noise_salt_fraction = 0.0;
  int signature_thickness = 3;    // samples
};

// Throws DegenerateInput on invariant violation.
void validate(const PipeScene& scene);

struct GridParams {
  double trace_spacing = 0.01;    // meters per trace
  double sample_interval = 0.1;   // nanoseconds per sample
  double relative_permittivity = 9.0;
  int rows = 600;
  int cols = 0;  // 0 derives cols from scan_length / trace_spacing + 1
};

// Elliptical cross section cut by the scan plane: vertical semi-axis equals
// the pipe radius, horizontal semi-axis r / sin(obliquity).
geometry::Ellipse cross_section_of(const PipeScene& scene);

// Recorded depth below surface position x: the shortest distance from
// (x, 0) to the cross-section ellipse.
double signature_depth(const PipeScene& scene, double x);

struct RenderResult {
  bscan::BScanGrid grid;
  bscan::BinaryImage mask;                  // exact pre-noise foreground
  std::vector<geometry::Point2> signature;  // analytic (x, d(x)) per trace
};

// Rasterizes the analytic signature into an amplitude grid, one vertical
// band of `signature_thickness` samples per trace, plus optional salt
// noise. Identical inputs and seed produce bit-identical output. Throws
// SceneOutOfGrid when the apex row falls outside the grid.
RenderResult render(const PipeScene& scene, const GridParams& params,
                    std::uint64_t seed);

}  // namespace pipegpr::synth

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "core/eiia.hpp"

namespace pipegpr::bscan {

struct BScanGrid {
  int rows = 0;  // time samples, row 0 at the surface
  int cols = 0;  // traces along the survey line
  std::vector<float> amplitudes;  // row-major
  double trace_spacing = 0.0;     // meters per trace
  double sample_interval = 0.0;   // nanoseconds per sample
  double relative_permittivity = 1.0;
  std::string ground_truth;  // optional truth sidecar path

  float at(int r, int c) const {
    return amplitudes[static_cast<size_t>(r) * cols + c];
  }
  float& at(int r, int c) {
    return amplitudes[static_cast<size_t>(r) * cols + c];
  }
};

// Throws FormatError when grid invariants are violated.
void validate(const BScanGrid& grid);

struct BinaryImage {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> mask;  // row-major, nonzero = foreground

  bool at(int r, int c) const {
    return mask[static_cast<size_t>(r) * cols + c] != 0;
  }
  void set(int r, int c, bool v) {
    mask[static_cast<size_t>(r) * cols + c] = v ? 1 : 0;
  }
};

// Two-way travel time to depth: (0.2998 m/ns / sqrt(eps_r)) * row * dt / 2.
// Fractional rows are accepted (column mid-rows land between samples).
double depth_of_sample(double row, const BScanGrid& grid);
double meters_per_sample(const BScanGrid& grid);

struct PreprocessConfig {
  double threshold_k = 2.0;
  int min_component_area = 8;  // pixels, 8-connected
};

// Per-row median removal, global |amplitude| thresholding at mean + k*std,
// then removal of small 8-connected components.
BinaryImage preprocess(const BScanGrid& grid, const PreprocessConfig& cfg = {});

struct Cluster {
  struct Segment {
    int column = 0;
    int top = 0;     // row index, shallow end
    int bottom = 0;  // row index, deep end
  };
  std::vector<Segment> segments;  // contiguous ascending columns
  int apex_column = 0;

  int apex_top() const;
};

struct ClusterConfig {
  int min_width = 15;  // columns; chains must be strictly wider
  int tolerance = 2;   // rows of tolerated local profile violation
};

// Links per-column vertical runs into chains and keeps the chains whose
// top-row profile opens downward: it falls to a single minimal plateau and
// rises again on both sides by more than the tolerance. Returned shallowest
// apex first.
std::vector<Cluster> find_downward_opening_clusters(const BinaryImage& img,
                                                    const ClusterConfig& cfg = {});

struct ExtractConfig {
  double spacing = 0.02;  // meters between selected columns
  int count = 30;
};

struct Extraction {
  eiia::SignaturePointSet points;
  double apex_x = 0.0;          // meters
  double actual_spacing = 0.0;  // spacing after rounding to whole columns
  std::vector<std::string> flags;
};

// Picks the apex column plus alternating left/right columns at the rounded
// spacing and converts segment mid-rows to (x, depth) pairs. Throws
// ClusterTooNarrow when fewer than 6 points are available; flags a short
// extraction when fewer than the requested count fit.
Extraction extract_point_set(const Cluster& cluster, const BScanGrid& grid,
                             const ExtractConfig& cfg = {});

}  // namespace pipegpr::bscan

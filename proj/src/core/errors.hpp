#pragma once

#include <stdexcept>

namespace pipegpr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Conic cannot be converted to an axis-aligned real ellipse.
struct DegenerateConic : Error {
  using Error::Error;
};

// Projection query lies inside or on the ellipse boundary.
struct PointInsideEllipse : Error {
  using Error::Error;
};

// Rotation angle would move a signature point above the surface.
struct InvalidAngle : Error {
  using Error::Error;
};

// The constrained fit has no real-ellipse solution, or an iterative fit
// failed to converge.
struct FitFailed : Error {
  using Error::Error;
};

// Input violates an operation precondition (too few points, collinear, ...).
struct DegenerateInput : Error {
  using Error::Error;
};

// Cluster cannot supply the minimum number of extraction columns.
struct ClusterTooNarrow : Error {
  using Error::Error;
};

// Synthetic scene does not fit into the requested grid.
struct SceneOutOfGrid : Error {
  using Error::Error;
};

// Map revision addressed a segment id that does not exist.
struct UnknownSegment : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct FormatError : Error {
  using Error::Error;
};

}  // namespace pipegpr

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/eiia.hpp"

namespace pipegpr::pipemap {

// Plan coordinates are a local Cartesian frame in meters, x east, y north.
struct Segment {
  std::string id;
  geometry::Point2 start;
  geometry::Point2 end;
  std::optional<double> radius;  // meters
};

struct PipeMap {
  std::vector<Segment> segments;
};

// Throws FormatError for duplicate ids or zero-length segments.
void validate(const PipeMap& map);

struct SurveyLine {
  geometry::Point2 position;
  double detecting_bearing = 0.0;  // degrees in [0, 360), north = 0
};

// Undirected bearing of the segment in [0, 180) degrees.
double segment_bearing(const Segment& s);

struct NearestBearing {
  std::string segment_id;
  double bearing = 0.0;  // degrees in [0, 180)
  bool tie = false;
};

// Segment minimizing point-to-segment distance; distance ties go to the
// smaller id with the flag set. Throws DegenerateInput on an empty map.
NearestBearing map_bearing_near(const PipeMap& map, geometry::Point2 position);

// Returns a new map with the identified segment rigidly rotated about the
// point nearest the survey position so its bearing matches the estimate's
// chosen bearing; length is preserved and the radius field updated. The
// input map is never modified. Throws UnknownSegment / DegenerateInput
// (estimate without a chosen bearing).
PipeMap revise(const PipeMap& map, const std::string& segment_id,
               const eiia::PipeEstimate& estimate, const SurveyLine& survey);

}  // namespace pipegpr::pipemap

#include "core/pipemap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "core/errors.hpp"

namespace pipegpr::pipemap {

namespace {

geometry::Point2 closest_point_on_segment(const Segment& s, geometry::Point2 p) {
  const double dx = s.end.x - s.start.x;
  const double dy = s.end.y - s.start.y;
  const double len2 = dx * dx + dy * dy;
  double t = ((p.x - s.start.x) * dx + (p.y - s.start.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return {s.start.x + t * dx, s.start.y + t * dy};
}

double point_segment_distance(const Segment& s, geometry::Point2 p) {
  const geometry::Point2 q = closest_point_on_segment(s, p);
  return std::hypot(p.x - q.x, p.y - q.y);
}

}  // namespace

void validate(const PipeMap& map) {
  std::set<std::string> ids;
  for (const auto& s : map.segments) {
    if (!ids.insert(s.id).second)
      throw FormatError("duplicate segment id: " + s.id);
    if (s.start.x == s.end.x && s.start.y == s.end.y)
      throw FormatError("segment endpoints must be distinct: " + s.id);
    if (s.radius && !(*s.radius > 0.0))
      throw FormatError("segment radius must be positive: " + s.id);
  }
}

double segment_bearing(const Segment& s) {
  const double dx = s.end.x - s.start.x;
  const double dy = s.end.y - s.start.y;
  return eiia::normalize_bearing_180(std::atan2(dx, dy) * 180.0 / std::numbers::pi);
}

NearestBearing map_bearing_near(const PipeMap& map, geometry::Point2 position) {
  if (map.segments.empty()) throw DegenerateInput("pipeline map has no segments");

  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : map.segments)
    best = std::min(best, point_segment_distance(s, position));

  const Segment* winner = nullptr;
  int within_tie = 0;
  for (const auto& s : map.segments) {
    if (point_segment_distance(s, position) <= best + 1e-12) {
      ++within_tie;
      if (!winner || s.id < winner->id) winner = &s;
    }
  }
  return {winner->id, segment_bearing(*winner), within_tie > 1};
}

PipeMap revise(const PipeMap& map, const std::string& segment_id,
               const eiia::PipeEstimate& estimate, const SurveyLine& survey) {
  if (!estimate.chosen_bearing)
    throw DegenerateInput("estimate has no chosen bearing; run disambiguation first");

  PipeMap out = map;
  Segment* target = nullptr;
  for (auto& s : out.segments) {
    if (s.id == segment_id) {
      target = &s;
      break;
    }
  }
  if (!target) throw UnknownSegment("no segment with id: " + segment_id);

  const double current = segment_bearing(*target);
  double delta = std::fmod(*estimate.chosen_bearing - current, 180.0);
  if (delta > 90.0) delta -= 180.0;
  if (delta <= -90.0) delta += 180.0;
  // Angles this small are indistinguishable from the no-op revision; skip
  // the rotation entirely so repeated revision is bit-stable.
  if (std::abs(delta) < 1e-12) delta = 0.0;

  if (delta != 0.0) {
    const geometry::Point2 pivot = closest_point_on_segment(*target, survey.position);
    // Bearings grow clockwise in the east/north frame, so adding delta to
    // the bearing means rotating the plane by -delta.
    const double phi = -delta * std::numbers::pi / 180.0;
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    const auto rotate = [&](geometry::Point2 p) -> geometry::Point2 {
      const double rx = p.x - pivot.x;
      const double ry = p.y - pivot.y;
      return {pivot.x + cp * rx - sp * ry, pivot.y + sp * rx + cp * ry};
    };
    target->start = rotate(target->start);
    target->end = rotate(target->end);
  }
  target->radius = estimate.radius;
  return out;
}

}  // namespace pipegpr::pipemap

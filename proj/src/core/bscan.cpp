#include "core/bscan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"

namespace pipegpr::bscan {

namespace {

constexpr double kSpeedOfLightMPerNs = 0.2998;

struct Run {
  int col = 0;
  int top = 0;
  int bottom = 0;
};

struct Dsu {
  std::vector<int> parent;

  explicit Dsu(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  int find(int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }
};

void remove_small_components(BinaryImage& img, int min_area) {
  if (min_area <= 1) return;
  const int rows = img.rows;
  const int cols = img.cols;
  std::vector<std::uint8_t> visited(img.mask.size(), 0);
  std::vector<int> stack;
  std::vector<int> component;

  for (int start = 0; start < rows * cols; ++start) {
    if (!img.mask[start] || visited[start]) continue;
    stack.assign(1, start);
    component.clear();
    visited[start] = 1;
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      component.push_back(idx);
      const int r = idx / cols;
      const int c = idx % cols;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
          const int nidx = rr * cols + cc;
          if (img.mask[nidx] && !visited[nidx]) {
            visited[nidx] = 1;
            stack.push_back(nidx);
          }
        }
      }
    }
    if (static_cast<int>(component.size()) < min_area) {
      for (const int idx : component) img.mask[idx] = 0;
    }
  }
}

bool opens_downward(const std::vector<Cluster::Segment>& segments, int tolerance,
                    int* apex_index) {
  const size_t n = segments.size();
  int min_top = segments[0].top;
  for (const auto& s : segments) min_top = std::min(min_top, s.top);

  // Minimal plateau: first contiguous stretch at the minimal top row.
  size_t lo = 0;
  while (segments[lo].top != min_top) ++lo;
  size_t hi = lo;
  while (hi + 1 < n && segments[hi + 1].top == min_top) ++hi;
  *apex_index = static_cast<int>((lo + hi) / 2);

  // Outward from the plateau the profile must deepen, dipping back toward
  // the surface by at most `tolerance` rows.
  int run_max = min_top;
  int side_max = min_top;
  for (size_t i = lo; i-- > 0;) {
    if (segments[i].top < run_max - tolerance) return false;
    run_max = std::max(run_max, segments[i].top);
    side_max = std::max(side_max, segments[i].top);
  }
  if (side_max - min_top <= tolerance) return false;  // flat on the left

  run_max = min_top;
  side_max = min_top;
  for (size_t i = hi + 1; i < n; ++i) {
    if (segments[i].top < run_max - tolerance) return false;
    run_max = std::max(run_max, segments[i].top);
    side_max = std::max(side_max, segments[i].top);
  }
  return side_max - min_top > tolerance;
}

}  // namespace

void validate(const BScanGrid& grid) {
  if (grid.rows < 2 || grid.cols < 2)
    throw FormatError("B-scan grid needs at least 2 rows and 2 columns");
  if (grid.amplitudes.size() != static_cast<size_t>(grid.rows) * grid.cols)
    throw FormatError("B-scan amplitude buffer does not match the grid shape");
  if (!(grid.trace_spacing > 0.0)) throw FormatError("trace spacing must be positive");
  if (!(grid.sample_interval > 0.0)) throw FormatError("sample interval must be positive");
  if (!(grid.relative_permittivity >= 1.0))
    throw FormatError("relative permittivity must be >= 1");
}

double depth_of_sample(double row, const BScanGrid& grid) {
  const double velocity = kSpeedOfLightMPerNs / std::sqrt(grid.relative_permittivity);
  return velocity * (row * grid.sample_interval) / 2.0;
}

double meters_per_sample(const BScanGrid& grid) { return depth_of_sample(1.0, grid); }

BinaryImage preprocess(const BScanGrid& grid, const PreprocessConfig& cfg) {
  validate(grid);
  const int rows = grid.rows;
  const int cols = grid.cols;
  const size_t n = static_cast<size_t>(rows) * cols;

  // Background removal: subtract the median of each row across traces. The
  // median, unlike the row mean, is immune to the signature itself: rows
  // crossing the flat apex region carry up to ~20% foreground, and a mean
  // shift that large lifts the whole background row above the global
  // threshold.
  std::vector<double> work(n);
  std::vector<double> row_values(cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) row_values[c] = grid.at(r, c);
    const auto mid = row_values.begin() + cols / 2;
    std::nth_element(row_values.begin(), mid, row_values.end());
    double median = *mid;
    if (cols % 2 == 0) {
      const double upper = median;
      const auto lower = std::max_element(row_values.begin(), mid);
      median = 0.5 * (*lower + upper);
    }
    for (int c = 0; c < cols; ++c)
      work[static_cast<size_t>(r) * cols + c] = grid.at(r, c) - median;
  }

  double mean_abs = 0.0;
  for (const double v : work) mean_abs += std::abs(v);
  mean_abs /= static_cast<double>(n);
  double var = 0.0;
  for (const double v : work) {
    const double d = std::abs(v) - mean_abs;
    var += d * d;
  }
  const double threshold = mean_abs + cfg.threshold_k * std::sqrt(var / static_cast<double>(n));

  BinaryImage img{rows, cols, std::vector<std::uint8_t>(n, 0)};
  for (size_t i = 0; i < n; ++i) img.mask[i] = std::abs(work[i]) > threshold ? 1 : 0;

  remove_small_components(img, cfg.min_component_area);
  return img;
}

int Cluster::apex_top() const {
  for (const auto& s : segments) {
    if (s.column == apex_column) return s.top;
  }
  return 0;
}

std::vector<Cluster> find_downward_opening_clusters(const BinaryImage& img,
                                                    const ClusterConfig& cfg) {
  const int rows = img.rows;
  const int cols = img.cols;

  std::vector<Run> runs;
  std::vector<std::vector<int>> by_col(cols);
  for (int c = 0; c < cols; ++c) {
    int r = 0;
    while (r < rows) {
      if (!img.at(r, c)) {
        ++r;
        continue;
      }
      const int top = r;
      while (r < rows && img.at(r, c)) ++r;
      by_col[c].push_back(static_cast<int>(runs.size()));
      runs.push_back({c, top, r - 1});
    }
  }
  if (runs.empty()) return {};

  Dsu dsu(runs.size());
  for (int c = 1; c < cols; ++c) {
    for (const int i : by_col[c - 1]) {
      for (const int j : by_col[c]) {
        if (runs[i].top <= runs[j].bottom && runs[j].top <= runs[i].bottom)
          dsu.unite(i, j);
      }
    }
  }

  std::vector<std::vector<int>> groups(runs.size());
  for (size_t i = 0; i < runs.size(); ++i) groups[dsu.find(static_cast<int>(i))].push_back(static_cast<int>(i));

  std::vector<Cluster> clusters;
  for (const auto& group : groups) {
    if (group.empty()) continue;

    // One segment per column: the shallowest run of the chain in that column.
    int cmin = cols, cmax = -1;
    for (const int i : group) {
      cmin = std::min(cmin, runs[i].col);
      cmax = std::max(cmax, runs[i].col);
    }
    std::vector<int> pick(cmax - cmin + 1, -1);
    for (const int i : group) {
      int& slot = pick[runs[i].col - cmin];
      if (slot < 0 || runs[i].top < runs[slot].top) slot = i;
    }

    Cluster cluster;
    for (int c = cmin; c <= cmax; ++c) {
      const int i = pick[c - cmin];
      if (i < 0) continue;  // connectivity keeps column spans contiguous
      cluster.segments.push_back({runs[i].col, runs[i].top, runs[i].bottom});
    }
    if (static_cast<int>(cluster.segments.size()) <= cfg.min_width) continue;

    int apex_index = 0;
    if (!opens_downward(cluster.segments, cfg.tolerance, &apex_index)) continue;
    cluster.apex_column = cluster.segments[apex_index].column;
    clusters.push_back(std::move(cluster));
  }

  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    const int ta = a.apex_top();
    const int tb = b.apex_top();
    if (ta != tb) return ta < tb;
    return a.apex_column < b.apex_column;
  });
  return clusters;
}

Extraction extract_point_set(const Cluster& cluster, const BScanGrid& grid,
                             const ExtractConfig& cfg) {
  validate(grid);
  if (cluster.segments.empty()) throw DegenerateInput("cluster has no segments");
  if (cfg.count < 1) throw DegenerateInput("extraction count must be >= 1");
  if (!(cfg.spacing > 0.0)) throw DegenerateInput("extraction spacing must be positive");

  const int step = std::max(1, static_cast<int>(std::lround(cfg.spacing / grid.trace_spacing)));
  const int base = cluster.segments.front().column;
  const int width = static_cast<int>(cluster.segments.size());

  const auto segment_at = [&](int col) -> const Cluster::Segment* {
    const int idx = col - base;
    if (idx < 0 || idx >= width) return nullptr;
    return &cluster.segments[idx];
  };

  std::vector<const Cluster::Segment*> chosen;
  chosen.push_back(segment_at(cluster.apex_column));
  if (!chosen.front()) throw DegenerateInput("apex column is outside the cluster");
  for (int j = 1; static_cast<int>(chosen.size()) < cfg.count; ++j) {
    const Cluster::Segment* left = segment_at(cluster.apex_column - j * step);
    const Cluster::Segment* right = segment_at(cluster.apex_column + j * step);
    if (!left && !right) break;
    if (left) chosen.push_back(left);
    if (right && static_cast<int>(chosen.size()) < cfg.count) chosen.push_back(right);
  }

  Extraction out;
  out.apex_x = cluster.apex_column * grid.trace_spacing;
  out.actual_spacing = step * grid.trace_spacing;
  if (static_cast<int>(chosen.size()) < cfg.count) out.flags.push_back("short_extraction");
  if (chosen.size() < 6)
    throw ClusterTooNarrow("cluster supplies fewer than 6 extraction columns");

  std::vector<geometry::Point2> pts;
  pts.reserve(chosen.size());
  for (const auto* seg : chosen) {
    const double mid_row = (seg->top + seg->bottom) / 2.0;
    pts.push_back({seg->column * grid.trace_spacing, depth_of_sample(mid_row, grid)});
  }
  std::sort(pts.begin(), pts.end(),
            [](const geometry::Point2& a, const geometry::Point2& b) { return a.x < b.x; });

  out.points = eiia::make_signature_point_set(std::move(pts));
  return out;
}

}  // namespace pipegpr::bscan

#include "core/synth.hpp"

#include <cmath>
#include <random>

#include "core/errors.hpp"

namespace pipegpr::synth {

namespace {

// Uniform double in [0, 1) built from the raw engine output; keeps the
// rendered noise pattern identical across standard library implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void validate(const PipeScene& scene) {
  if (!(scene.radius > 0.0)) throw DegenerateInput("pipe radius must be positive");
  if (!(scene.obliquity > 0.0 && scene.obliquity <= std::numbers::pi / 2.0))
    throw DegenerateInput("obliquity must lie in (0, pi/2]");
  if (!(scene.depth_to_center > scene.radius))
    throw DegenerateInput("pipe must lie fully below the surface");
  if (!(scene.scan_length > 0.0)) throw DegenerateInput("scan length must be positive");
  if (!(scene.noise_salt_fraction >= 0.0 && scene.noise_salt_fraction <= 1.0))
    throw DegenerateInput("salt fraction must lie in [0, 1]");
  if (scene.signature_thickness < 1)
    throw DegenerateInput("signature thickness must be >= 1 sample");
}

geometry::Ellipse cross_section_of(const PipeScene& scene) {
  return {scene.apex_x, scene.depth_to_center,
          scene.radius / std::sin(scene.obliquity), scene.radius};
}

double signature_depth(const PipeScene& scene, double x) {
  return geometry::project_point(cross_section_of(scene), {x, 0.0}).distance;
}

RenderResult render(const PipeScene& scene, const GridParams& params,
                    std::uint64_t seed) {
  validate(scene);
  if (params.rows < 2) throw DegenerateInput("grid needs at least 2 rows");
  if (!(params.trace_spacing > 0.0) || !(params.sample_interval > 0.0) ||
      !(params.relative_permittivity >= 1.0))
    throw DegenerateInput("invalid grid parameters");

  const int cols = params.cols > 0
                       ? params.cols
                       : static_cast<int>(std::lround(scene.scan_length /
                                                      params.trace_spacing)) + 1;
  if (cols < 2) throw DegenerateInput("grid needs at least 2 columns");

  RenderResult out;
  out.grid.rows = params.rows;
  out.grid.cols = cols;
  out.grid.amplitudes.assign(static_cast<size_t>(params.rows) * cols, 0.0f);
  out.grid.trace_spacing = params.trace_spacing;
  out.grid.sample_interval = params.sample_interval;
  out.grid.relative_permittivity = params.relative_permittivity;
  out.mask = {params.rows, cols,
              std::vector<std::uint8_t>(static_cast<size_t>(params.rows) * cols, 0)};

  const double mps = bscan::meters_per_sample(out.grid);
  const long apex_row =
      std::lround((scene.depth_to_center - scene.radius) / mps);
  if (apex_row >= params.rows)
    throw SceneOutOfGrid("apex row falls below the bottom of the grid");

  out.signature.reserve(cols);
  for (int c = 0; c < cols; ++c) {
    const double x = c * params.trace_spacing;
    const double depth = signature_depth(scene, x);
    out.signature.push_back({x, depth});

    const long center = std::lround(depth / mps);
    const long start = center - (scene.signature_thickness - 1) / 2;
    for (int t = 0; t < scene.signature_thickness; ++t) {
      const long r = start + t;
      if (r < 0 || r >= params.rows) continue;
      out.grid.at(static_cast<int>(r), c) = 1.0f;
      out.mask.set(static_cast<int>(r), c, true);
    }
  }

  if (scene.noise_salt_fraction > 0.0) {
    std::mt19937_64 rng(seed);
    for (float& amplitude : out.grid.amplitudes) {
      if (unit_uniform(rng) < scene.noise_salt_fraction) amplitude = 1.0f;
    }
  }
  return out;
}

}  // namespace pipegpr::synth

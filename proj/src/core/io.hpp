#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "core/bscan.hpp"
#include "core/pipemap.hpp"
#include "core/synth.hpp"

namespace pipegpr::io {

// B-scan data is either raw 32-bit little-endian floats in row-major order
// (rows = samples) or a CSV grid, chosen by the ".csv" extension. The JSON
// sidecar is mandatory: {"traces", "samples", "trace_spacing_m",
// "sample_interval_ns", "relative_permittivity"} plus an optional
// "ground_truth" reference.
bscan::BScanGrid load_grid(const std::filesystem::path& data_path,
                           const std::filesystem::path& sidecar_path);
void save_grid(const bscan::BScanGrid& grid, const std::filesystem::path& data_path,
               const std::filesystem::path& sidecar_path);

// Foreground masks share the raw f32 layout with 0/1 values.
bscan::BinaryImage load_mask(const std::filesystem::path& path, int rows, int cols);
void save_mask(const bscan::BinaryImage& mask, const std::filesystem::path& path);

// {"points": [[x_m, y_m], ...], "apex_x_m": ..., "actual_spacing_m": ...,
//  "flags": [...]}
std::string extraction_to_json(const bscan::Extraction& extraction);
bscan::Extraction extraction_from_json(const std::string& text);
bscan::Extraction load_extraction(const std::filesystem::path& path);
void save_extraction(const bscan::Extraction& extraction,
                     const std::filesystem::path& path);

// {"segments": [{"id", "start": [x, y], "end": [x, y], "radius_m": f|null}]}
pipemap::PipeMap load_map(const std::filesystem::path& path);
void save_map(const pipemap::PipeMap& map, const std::filesystem::path& path);

struct SceneFiles {
  std::filesystem::path data;     // bscan.f32
  std::filesystem::path sidecar;  // bscan.json
  std::filesystem::path truth;    // truth.json
  std::filesystem::path mask;     // mask.f32
};

// Renders a scene and writes the B-scan file pair plus the ground-truth
// sidecar {"scene", "signature", "mask_file", "seed"} and the exact
// pre-noise mask.
SceneFiles write_scene(const synth::PipeScene& scene, const synth::GridParams& params,
                       std::uint64_t seed, const std::filesystem::path& out_dir);

struct SceneTruth {
  synth::PipeScene scene;
  std::vector<geometry::Point2> signature;
  std::filesystem::path mask_file;  // resolved against the sidecar location
  std::uint64_t seed = 0;
};

SceneTruth load_truth(const std::filesystem::path& path);

}  // namespace pipegpr::io

#include "core/io.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "raw f32 grid I/O assumes a little-endian host");

namespace pipegpr::io {

namespace {

using nlohmann::json;

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

double require_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw FormatError(where + ": missing or non-numeric \"" + key + "\"");
  return j[key].get<double>();
}

std::vector<float> load_f32(const std::filesystem::path& path, size_t expected) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + path.string());
  const auto size = static_cast<size_t>(in.tellg());
  if (size != expected * sizeof(float))
    throw FormatError(path.string() + ": size does not match the sidecar shape");
  std::vector<float> data(expected);
  in.seekg(0);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(size));
  if (!in) throw IoError("failed reading " + path.string());
  return data;
}

std::vector<float> load_csv(const std::filesystem::path& path, int rows, int cols) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<float> data;
  data.reserve(static_cast<size_t>(rows) * cols);
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        data.push_back(std::stof(cell));
      } catch (const std::exception&) {
        throw FormatError(path.string() + ": non-numeric CSV cell");
      }
      ++col;
    }
    if (col != cols)
      throw FormatError(path.string() + ": CSV row width does not match the sidecar");
    ++row;
  }
  if (row != rows)
    throw FormatError(path.string() + ": CSV row count does not match the sidecar");
  return data;
}

}  // namespace

bscan::BScanGrid load_grid(const std::filesystem::path& data_path,
                           const std::filesystem::path& sidecar_path) {
  const json meta = parse_file(sidecar_path);
  bscan::BScanGrid grid;
  const std::string where = sidecar_path.string();
  grid.cols = static_cast<int>(require_number(meta, "traces", where));
  grid.rows = static_cast<int>(require_number(meta, "samples", where));
  grid.trace_spacing = require_number(meta, "trace_spacing_m", where);
  grid.sample_interval = require_number(meta, "sample_interval_ns", where);
  grid.relative_permittivity = require_number(meta, "relative_permittivity", where);
  if (meta.contains("ground_truth") && meta["ground_truth"].is_string())
    grid.ground_truth = meta["ground_truth"].get<std::string>();

  if (grid.rows < 2 || grid.cols < 2)
    throw FormatError(where + ": grid must be at least 2x2");

  const size_t n = static_cast<size_t>(grid.rows) * grid.cols;
  grid.amplitudes = data_path.extension() == ".csv"
                        ? load_csv(data_path, grid.rows, grid.cols)
                        : load_f32(data_path, n);
  bscan::validate(grid);
  return grid;
}

void save_grid(const bscan::BScanGrid& grid, const std::filesystem::path& data_path,
               const std::filesystem::path& sidecar_path) {
  bscan::validate(grid);
  std::ofstream out(data_path, std::ios::binary);
  if (!out) throw IoError("cannot open " + data_path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(grid.amplitudes.data()),
            static_cast<std::streamsize>(grid.amplitudes.size() * sizeof(float)));
  if (!out) throw IoError("failed writing " + data_path.string());

  json meta;
  meta["traces"] = grid.cols;
  meta["samples"] = grid.rows;
  meta["trace_spacing_m"] = grid.trace_spacing;
  meta["sample_interval_ns"] = grid.sample_interval;
  meta["relative_permittivity"] = grid.relative_permittivity;
  if (!grid.ground_truth.empty()) meta["ground_truth"] = grid.ground_truth;
  write_text(sidecar_path, meta.dump(2) + "\n");
}

bscan::BinaryImage load_mask(const std::filesystem::path& path, int rows, int cols) {
  const std::vector<float> data = load_f32(path, static_cast<size_t>(rows) * cols);
  bscan::BinaryImage img{rows, cols, std::vector<std::uint8_t>(data.size(), 0)};
  for (size_t i = 0; i < data.size(); ++i) img.mask[i] = data[i] != 0.0f ? 1 : 0;
  return img;
}

void save_mask(const bscan::BinaryImage& mask, const std::filesystem::path& path) {
  std::vector<float> data(mask.mask.size());
  for (size_t i = 0; i < data.size(); ++i) data[i] = mask.mask[i] ? 1.0f : 0.0f;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
  if (!out) throw IoError("failed writing " + path.string());
}

std::string extraction_to_json(const bscan::Extraction& extraction) {
  json j;
  j["points"] = json::array();
  for (const auto& p : extraction.points.points)
    j["points"].push_back(json::array({p.x, p.y}));
  j["apex_x_m"] = extraction.apex_x;
  j["actual_spacing_m"] = extraction.actual_spacing;
  j["flags"] = extraction.flags;
  return j.dump(2) + "\n";
}

bscan::Extraction extraction_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("extraction JSON: ") + e.what());
  }
  if (!j.contains("points") || !j["points"].is_array())
    throw FormatError("extraction JSON: missing \"points\" array");

  bscan::Extraction out;
  std::vector<geometry::Point2> pts;
  for (const auto& item : j["points"]) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number() ||
        !item[1].is_number())
      throw FormatError("extraction JSON: points must be [x, y] pairs");
    pts.push_back({item[0].get<double>(), item[1].get<double>()});
  }
  out.points = eiia::make_signature_point_set(std::move(pts));
  if (j.contains("apex_x_m")) out.apex_x = j["apex_x_m"].get<double>();
  if (j.contains("actual_spacing_m"))
    out.actual_spacing = j["actual_spacing_m"].get<double>();
  if (j.contains("flags"))
    out.flags = j["flags"].get<std::vector<std::string>>();
  return out;
}

bscan::Extraction load_extraction(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return extraction_from_json(ss.str());
}

void save_extraction(const bscan::Extraction& extraction,
                     const std::filesystem::path& path) {
  write_text(path, extraction_to_json(extraction));
}

pipemap::PipeMap load_map(const std::filesystem::path& path) {
  const json j = parse_file(path);
  if (!j.contains("segments") || !j["segments"].is_array())
    throw FormatError(path.string() + ": missing \"segments\" array");

  pipemap::PipeMap map;
  for (const auto& item : j["segments"]) {
    pipemap::Segment s;
    if (!item.contains("id") || !item["id"].is_string())
      throw FormatError(path.string() + ": segment without string \"id\"");
    s.id = item["id"].get<std::string>();
    for (const char* key : {"start", "end"}) {
      if (!item.contains(key) || !item[key].is_array() || item[key].size() != 2)
        throw FormatError(path.string() + ": segment \"" + key + "\" must be [x, y]");
    }
    s.start = {item["start"][0].get<double>(), item["start"][1].get<double>()};
    s.end = {item["end"][0].get<double>(), item["end"][1].get<double>()};
    if (item.contains("radius_m") && !item["radius_m"].is_null())
      s.radius = item["radius_m"].get<double>();
    map.segments.push_back(std::move(s));
  }
  pipemap::validate(map);
  return map;
}

void save_map(const pipemap::PipeMap& map, const std::filesystem::path& path) {
  json j;
  j["segments"] = json::array();
  for (const auto& s : map.segments) {
    json seg;
    seg["id"] = s.id;
    seg["start"] = json::array({s.start.x, s.start.y});
    seg["end"] = json::array({s.end.x, s.end.y});
    seg["radius_m"] = s.radius ? json(*s.radius) : json(nullptr);
    j["segments"].push_back(std::move(seg));
  }
  write_text(path, j.dump(2) + "\n");
}

SceneFiles write_scene(const synth::PipeScene& scene, const synth::GridParams& params,
                       std::uint64_t seed, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  SceneFiles files;
  files.data = out_dir / "bscan.f32";
  files.sidecar = out_dir / "bscan.json";
  files.truth = out_dir / "truth.json";
  files.mask = out_dir / "mask.f32";

  synth::RenderResult rendered = synth::render(scene, params, seed);
  rendered.grid.ground_truth = "truth.json";
  save_grid(rendered.grid, files.data, files.sidecar);
  save_mask(rendered.mask, files.mask);

  json truth;
  truth["scene"] = {{"radius_m", scene.radius},
                    {"depth_to_center_m", scene.depth_to_center},
                    {"obliquity_rad", scene.obliquity},
                    {"apex_x_m", scene.apex_x},
                    {"scan_length_m", scene.scan_length},
                    {"noise_salt_fraction", scene.noise_salt_fraction},
                    {"signature_thickness", scene.signature_thickness}};
  truth["signature"] = json::array();
  for (const auto& p : rendered.signature)
    truth["signature"].push_back(json::array({p.x, p.y}));
  truth["mask_file"] = "mask.f32";
  truth["seed"] = seed;
  write_text(files.truth, truth.dump(2) + "\n");
  return files;
}

SceneTruth load_truth(const std::filesystem::path& path) {
  const json j = parse_file(path);
  const std::string where = path.string();
  if (!j.contains("scene") || !j["scene"].is_object())
    throw FormatError(where + ": missing \"scene\" object");
  const json& s = j["scene"];

  SceneTruth truth;
  truth.scene.radius = require_number(s, "radius_m", where);
  truth.scene.depth_to_center = require_number(s, "depth_to_center_m", where);
  truth.scene.obliquity = require_number(s, "obliquity_rad", where);
  truth.scene.apex_x = require_number(s, "apex_x_m", where);
  truth.scene.scan_length = require_number(s, "scan_length_m", where);
  truth.scene.noise_salt_fraction = require_number(s, "noise_salt_fraction", where);
  truth.scene.signature_thickness =
      static_cast<int>(require_number(s, "signature_thickness", where));

  if (j.contains("signature")) {
    for (const auto& item : j["signature"])
      truth.signature.push_back({item[0].get<double>(), item[1].get<double>()});
  }
  if (j.contains("mask_file") && j["mask_file"].is_string())
    truth.mask_file = path.parent_path() / j["mask_file"].get<std::string>();
  if (j.contains("seed")) truth.seed = j["seed"].get<std::uint64_t>();
  return truth;
}

}  // namespace pipegpr::io

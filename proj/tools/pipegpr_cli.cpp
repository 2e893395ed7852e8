// pipegpr command line: synthesize B-scans, extract downward-opening
// signatures, invert them to pipe cross sections, and revise pipeline maps.
// Links the shared library through its C API only.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <pipegpr/pipegpr.h>

namespace {

using nlohmann::json;

constexpr int kExitError = 1;
constexpr int kExitNoCluster = 2;

[[noreturn]] void fail(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  std::exit(kExitError);
}

void check(pgpr_status status, const std::string& what) {
  if (status != PGPR_OK) {
    fail(what + ": " + pgpr_status_name(status) + " (" + pgpr_last_error() + ")");
  }
}

// Deleter-style wrappers so early exits cannot leak handles.
template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  explicit Handle(T* p) : ptr(p) {}
  ~Handle() { reset(); }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
  Handle& operator=(Handle&& other) noexcept {
    if (this != &other) {
      reset();
      ptr = other.ptr;
      other.ptr = nullptr;
    }
    return *this;
  }
  void reset() {
    if (ptr) Free(ptr);
    ptr = nullptr;
  }
  T** out() {
    reset();
    return &ptr;
  }
  T* get() const { return ptr; }
  explicit operator bool() const { return ptr != nullptr; }
};

using GridHandle = Handle<pgpr_grid, pgpr_grid_free>;
using ExtractionHandle = Handle<pgpr_extraction, pgpr_extraction_free>;
using PointsHandle = Handle<pgpr_points, pgpr_points_free>;
using EstimateHandle = Handle<pgpr_estimate, pgpr_estimate_free>;
using MapHandle = Handle<pgpr_map, pgpr_map_free>;

std::string sidecar_for(const std::string& data_path) {
  std::filesystem::path p(data_path);
  p.replace_extension(".json");
  return p.string();
}

struct SceneArgs {
  double radius = 0.3;
  double depth = 1.5;
  double alpha_deg = 90.0;
  double apex_x = 1.0;
  double scan_length = 2.0;
  double noise = 0.0;
  int thickness = 3;
};

struct GridArgs {
  double trace_spacing = 0.01;
  double sample_interval = 0.1;
  double epsr = 9.0;
  int rows = 600;
  int cols = 0;
};

struct ExtractArgs {
  double threshold_k = 2.0;
  int min_area = 8;
  int min_width = 15;
  int tolerance = 2;
  double spacing = 0.02;
  int count = 30;
};

struct EiiaArgs {
  int max_iterations = 10;
  double rms_threshold = 0.03;
  double stability_eps = 1e-4;
};

void add_scene_options(CLI::App* cmd, SceneArgs& s) {
  cmd->add_option("--radius", s.radius, "pipe radius, m")->capture_default_str();
  cmd->add_option("--depth", s.depth, "depth to pipe center, m")->capture_default_str();
  cmd->add_option("--alpha-deg", s.alpha_deg,
                  "obliquity between pipe and detecting direction, degrees in (0, 90]")
      ->capture_default_str();
  cmd->add_option("--apex-x", s.apex_x, "scan coordinate above the pipe, m")
      ->capture_default_str();
  cmd->add_option("--scan-length", s.scan_length, "survey line length, m")
      ->capture_default_str();
  cmd->add_option("--noise", s.noise, "salt-noise pixel fraction in [0, 1]")
      ->capture_default_str();
  cmd->add_option("--thickness", s.thickness, "signature thickness, samples")
      ->capture_default_str();
}

void add_grid_options(CLI::App* cmd, GridArgs& g) {
  cmd->add_option("--trace-spacing", g.trace_spacing, "meters per trace")
      ->capture_default_str();
  cmd->add_option("--sample-interval", g.sample_interval, "nanoseconds per sample")
      ->capture_default_str();
  cmd->add_option("--epsr", g.epsr, "relative permittivity")->capture_default_str();
  cmd->add_option("--rows", g.rows, "time samples")->capture_default_str();
  cmd->add_option("--cols", g.cols, "traces (0 derives from scan length)")
      ->capture_default_str();
}

void add_extract_options(CLI::App* cmd, ExtractArgs& e) {
  cmd->add_option("--threshold-k", e.threshold_k, "binarization threshold factor")
      ->capture_default_str();
  cmd->add_option("--min-area", e.min_area, "despeckle minimum component area, px")
      ->capture_default_str();
  cmd->add_option("--min-width", e.min_width, "minimum cluster width, columns")
      ->capture_default_str();
  cmd->add_option("--tolerance", e.tolerance, "opening-profile tolerance, rows")
      ->capture_default_str();
  cmd->add_option("--spacing", e.spacing, "extraction column spacing, m")
      ->capture_default_str();
  cmd->add_option("--count", e.count, "points to extract per cluster")
      ->capture_default_str();
}

void add_eiia_options(CLI::App* cmd, EiiaArgs& e) {
  cmd->add_option("-k,--max-iterations", e.max_iterations, "iteration cap K")
      ->capture_default_str();
  cmd->add_option("--rms-threshold", e.rms_threshold, "geometric RMS stop, m")
      ->capture_default_str();
  cmd->add_option("--stability-eps", e.stability_eps, "stability stop, m")
      ->capture_default_str();
}

pgpr_scene to_scene(const SceneArgs& s) {
  if (!(s.alpha_deg > 0.0 && s.alpha_deg <= 90.0))
    fail("--alpha-deg must lie in (0, 90]");
  pgpr_scene scene{};
  pgpr_scene_defaults(&scene);
  scene.radius_m = s.radius;
  scene.depth_to_center_m = s.depth;
  scene.obliquity_rad = s.alpha_deg * std::numbers::pi / 180.0;
  scene.apex_x_m = s.apex_x;
  scene.scan_length_m = s.scan_length;
  scene.noise_salt_fraction = s.noise;
  scene.signature_thickness = s.thickness;
  return scene;
}

pgpr_grid_params to_grid_params(const GridArgs& g) {
  pgpr_grid_params params{};
  pgpr_grid_params_defaults(&params);
  params.trace_spacing_m = g.trace_spacing;
  params.sample_interval_ns = g.sample_interval;
  params.relative_permittivity = g.epsr;
  params.rows = g.rows;
  params.cols = g.cols;
  return params;
}

pgpr_extract_config to_extract_config(const ExtractArgs& e) {
  pgpr_extract_config cfg{};
  pgpr_extract_config_defaults(&cfg);
  cfg.threshold_k = e.threshold_k;
  cfg.min_component_area = e.min_area;
  cfg.min_cluster_width = e.min_width;
  cfg.cluster_tolerance = e.tolerance;
  cfg.column_spacing_m = e.spacing;
  cfg.point_count = e.count;
  return cfg;
}

pgpr_eiia_config to_eiia_config(const EiiaArgs& e) {
  pgpr_eiia_config cfg{};
  pgpr_eiia_config_defaults(&cfg);
  cfg.max_iterations = e.max_iterations;
  cfg.geometric_rms_threshold_m = e.rms_threshold;
  cfg.stability_epsilon_m = e.stability_eps;
  return cfg;
}

json scene_json(const SceneArgs& s) {
  return {{"radius_m", s.radius},
          {"depth_to_center_m", s.depth},
          {"alpha_deg", s.alpha_deg},
          {"apex_x_m", s.apex_x},
          {"scan_length_m", s.scan_length},
          {"noise_salt_fraction", s.noise},
          {"signature_thickness", s.thickness}};
}

json grid_json(const GridArgs& g) {
  return {{"trace_spacing_m", g.trace_spacing},
          {"sample_interval_ns", g.sample_interval},
          {"relative_permittivity", g.epsr},
          {"rows", g.rows},
          {"cols", g.cols}};
}

json extract_json(const ExtractArgs& e) {
  return {{"threshold_k", e.threshold_k}, {"min_component_area", e.min_area},
          {"min_cluster_width", e.min_width}, {"cluster_tolerance_rows", e.tolerance},
          {"column_spacing_m", e.spacing}, {"point_count", e.count}};
}

json eiia_json(const EiiaArgs& e) {
  return {{"max_iterations", e.max_iterations},
          {"geometric_rms_threshold_m", e.rms_threshold},
          {"stability_epsilon_m", e.stability_eps}};
}

json points_json(const pgpr_points* points) {
  json arr = json::array();
  const size_t n = pgpr_points_count(points);
  for (size_t i = 0; i < n; ++i) {
    double x = 0, y = 0;
    check(pgpr_points_get(points, i, &x, &y), "reading point");
    arr.push_back(json::array({x, y}));
  }
  return arr;
}

std::vector<std::string> points_flags(const pgpr_points* points) {
  std::vector<std::string> flags;
  for (size_t i = 0; i < pgpr_points_flag_count(points); ++i)
    flags.emplace_back(pgpr_points_flag(points, i));
  return flags;
}

json ellipse_json(const pgpr_ellipse& e) {
  return {{"center_x_m", e.center_x},
          {"center_y_m", e.center_y},
          {"semi_axis_horizontal_m", e.semi_axis_x},
          {"semi_axis_vertical_m", e.semi_axis_y}};
}

// Estimate as JSON, including plot-ready boundary samples.
json estimate_json(const pgpr_estimate* est) {
  json j;
  pgpr_ellipse e{};
  check(pgpr_estimate_ellipse(est, &e), "reading estimate ellipse");
  j["ellipse"] = ellipse_json(e);

  double alpha = 0, radius = 0;
  int32_t clamped = 0;
  check(pgpr_estimate_angle_radius(est, &alpha, &radius, &clamped),
        "reading estimate angle");
  j["alpha_rad"] = alpha;
  j["alpha_deg"] = alpha * 180.0 / std::numbers::pi;
  j["radius_m"] = radius;

  j["iterations_used"] = pgpr_estimate_iterations(est);
  j["best_iteration"] = pgpr_estimate_best_iteration(est);
  double final_rms = 0;
  check(pgpr_estimate_final_rms(est, &final_rms), "reading final rms");
  j["final_geometric_rms_m"] = final_rms;

  json history = json::array();
  for (size_t i = 0; i < pgpr_estimate_history_size(est); ++i) {
    double alg = 0, rms = 0, sig = 0;
    check(pgpr_estimate_history(est, i, &alg, &rms, &sig), "reading history");
    history.push_back({{"algebraic_residual", alg},
                       {"geometric_rms_m", rms},
                       {"signature_rms_m", sig}});
  }
  j["residual_history"] = history;

  json inverted = json::array();
  for (size_t i = 0; i < pgpr_estimate_inverted_count(est); ++i) {
    double x = 0, y = 0;
    check(pgpr_estimate_inverted_point(est, i, &x, &y), "reading inverted point");
    inverted.push_back(json::array({x, y}));
  }
  j["inverted_points"] = inverted;

  json boundary = json::array();
  for (int i = 0; i < 100; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / 100;
    boundary.push_back(json::array(
        {e.center_x + e.semi_axis_x * std::cos(phi),
         e.center_y + e.semi_axis_y * std::sin(phi)}));
  }
  j["ellipse_points"] = boundary;

  int32_t alpha_clamped = 0, nonmonotone = 0, bearing_tie = 0;
  check(pgpr_estimate_flags(est, &alpha_clamped, &nonmonotone, &bearing_tie),
        "reading estimate flags");
  json flags = json::array();
  if (alpha_clamped) flags.push_back("alpha_clamped");
  if (nonmonotone) flags.push_back("residual_nonmonotone");
  if (bearing_tie) flags.push_back("bearing_tie");
  j["flags"] = flags;

  double c0 = 0, c1 = 0, chosen = 0;
  int32_t tie = 0;
  if (pgpr_estimate_bearings(est, &c0, &c1, &chosen, &tie) == PGPR_OK) {
    j["candidate_bearings_deg"] = json::array({c0, c1});
    j["chosen_bearing_deg"] = chosen;
  }
  return j;
}

void write_output(const json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) fail("cannot open " + out_path + " for writing");
  out << text;
}

/* ---------------- subcommands ---------------- */

int cmd_synth(const SceneArgs& s, const GridArgs& g, std::uint64_t seed,
              const std::string& out_dir) {
  const pgpr_scene scene = to_scene(s);
  const pgpr_grid_params params = to_grid_params(g);
  check(pgpr_scene_write(&scene, &params, seed, out_dir.c_str()), "writing scene");
  std::cerr << "wrote " << out_dir << "/{bscan.f32, bscan.json, truth.json, mask.f32}\n";
  return 0;
}

int cmd_extract(const std::string& bscan_path, std::string sidecar_path,
                const ExtractArgs& e, int cluster_index, const std::string& out_path) {
  if (sidecar_path.empty()) sidecar_path = sidecar_for(bscan_path);
  GridHandle grid;
  check(pgpr_grid_load(bscan_path.c_str(), sidecar_path.c_str(), grid.out()),
        "loading B-scan");

  const pgpr_extract_config cfg = to_extract_config(e);
  ExtractionHandle extraction;
  check(pgpr_extract(grid.get(), &cfg, extraction.out()), "extracting clusters");

  const size_t count = pgpr_extraction_count(extraction.get());
  if (count == 0) {
    std::cerr << "no downward-opening cluster found\n";
    return kExitNoCluster;
  }
  if (cluster_index < 0 || static_cast<size_t>(cluster_index) >= count)
    fail("cluster index out of range (found " + std::to_string(count) + ")");

  PointsHandle points;
  check(pgpr_extraction_points(extraction.get(), cluster_index, points.out()),
        "selecting cluster");

  double apex = 0, spacing = 0;
  check(pgpr_points_apex(points.get(), &apex), "reading apex");
  check(pgpr_points_spacing(points.get(), &spacing), "reading spacing");
  json j;
  j["points"] = points_json(points.get());
  j["apex_x_m"] = apex;
  j["actual_spacing_m"] = spacing;
  j["flags"] = points_flags(points.get());
  write_output(j, out_path);
  return 0;
}

int cmd_invert(const std::string& points_path, const EiiaArgs& eiia_args,
               std::optional<double> detecting_bearing, const std::string& map_path,
               const std::string& out_path) {
  PointsHandle points;
  check(pgpr_points_load(points_path.c_str(), points.out()), "loading points");

  const pgpr_eiia_config cfg = to_eiia_config(eiia_args);
  EstimateHandle estimate;
  check(pgpr_eiia_run(points.get(), &cfg, estimate.out()), "running inversion");

  if (detecting_bearing && !map_path.empty()) {
    MapHandle map;
    check(pgpr_map_load(map_path.c_str(), map.out()), "loading map");
    double x = 0, y = 0;  // undisclosed survey position: use the apex column
    check(pgpr_points_apex(points.get(), &x), "reading apex");
    char id[128];
    double map_bearing = 0;
    int32_t tie = 0;
    check(pgpr_map_bearing_near(map.get(), x, y, id, sizeof id, &map_bearing, &tie),
          "finding map bearing");
    check(pgpr_estimate_resolve_bearing(estimate.get(), *detecting_bearing, map_bearing),
          "resolving bearing");
  }

  write_output(estimate_json(estimate.get()), out_path);
  return 0;
}

int cmd_run(const std::string& bscan_path, std::string sidecar_path,
            const ExtractArgs& extract_args, const EiiaArgs& eiia_args,
            const std::string& map_path, std::optional<double> survey_x,
            std::optional<double> survey_y, std::optional<double> detecting_bearing,
            bool revise, const std::string& out_map_path,
            const std::string& report_path, bool timings) {
  const auto t0 = std::chrono::steady_clock::now();
  if (sidecar_path.empty()) sidecar_path = sidecar_for(bscan_path);

  json report;
  report["inputs"] = {{"bscan", bscan_path}, {"sidecar", sidecar_path}};
  if (!map_path.empty()) report["inputs"]["map"] = map_path;
  report["config"] = {{"extract", extract_json(extract_args)},
                      {"eiia", eiia_json(eiia_args)}};
  json report_flags = json::array();

  GridHandle grid;
  check(pgpr_grid_load(bscan_path.c_str(), sidecar_path.c_str(), grid.out()),
        "loading B-scan");

  const pgpr_extract_config extract_cfg = to_extract_config(extract_args);
  ExtractionHandle extraction;
  check(pgpr_extract(grid.get(), &extract_cfg, extraction.out()), "extracting clusters");

  MapHandle map;
  if (!map_path.empty())
    check(pgpr_map_load(map_path.c_str(), map.out()), "loading map");

  const size_t cluster_count = pgpr_extraction_count(extraction.get());
  json clusters = json::array();
  const pgpr_eiia_config eiia_cfg = to_eiia_config(eiia_args);

  for (size_t i = 0; i < cluster_count; ++i) {
    PointsHandle points;
    check(pgpr_extraction_points(extraction.get(), i, points.out()), "reading cluster");

    json cluster;
    double apex = 0, spacing = 0;
    check(pgpr_points_apex(points.get(), &apex), "reading apex");
    check(pgpr_points_spacing(points.get(), &spacing), "reading spacing");
    cluster["apex_x_m"] = apex;
    cluster["actual_spacing_m"] = spacing;
    cluster["points"] = points_json(points.get());
    cluster["point_flags"] = points_flags(points.get());

    EstimateHandle estimate;
    check(pgpr_eiia_run(points.get(), &eiia_cfg, estimate.out()), "running inversion");

    if (map && detecting_bearing) {
      const double sx = survey_x.value_or(apex);
      const double sy = survey_y.value_or(0.0);
      char id[128];
      double map_bearing = 0;
      int32_t tie = 0;
      check(pgpr_map_bearing_near(map.get(), sx, sy, id, sizeof id, &map_bearing, &tie),
            "finding map bearing");
      cluster["map_segment"] = id;
      cluster["map_bearing_deg"] = map_bearing;
      check(pgpr_estimate_resolve_bearing(estimate.get(), *detecting_bearing,
                                          map_bearing),
            "resolving bearing");

      if (revise) {
        double chosen = 0, radius = 0;
        check(pgpr_estimate_bearings(estimate.get(), nullptr, nullptr, &chosen, nullptr),
              "reading chosen bearing");
        check(pgpr_estimate_angle_radius(estimate.get(), nullptr, &radius, nullptr),
              "reading radius");
        MapHandle revised;
        check(pgpr_map_revise(map.get(), id, chosen, radius, sx, sy, revised.out()),
              "revising map");
        if (out_map_path.empty()) fail("--out-map is required with --revise");
        check(pgpr_map_save(revised.get(), out_map_path.c_str()), "saving revised map");
        cluster["revised_map"] = out_map_path;
      }
    }

    cluster["estimate"] = estimate_json(estimate.get());
    clusters.push_back(std::move(cluster));
  }

  report["clusters"] = clusters;
  if (cluster_count == 0) report_flags.push_back("no_cluster");
  report["flags"] = report_flags;
  if (timings) {
    const auto t1 = std::chrono::steady_clock::now();
    report["timings_ms"] = {
        {"total", std::chrono::duration<double, std::milli>(t1 - t0).count()}};
  }
  write_output(report, report_path);
  return cluster_count == 0 ? kExitNoCluster : 0;
}

int cmd_revise_map(const std::string& map_path, const std::string& estimate_path,
                   std::string segment_id, double survey_x, double survey_y,
                   const std::string& out_path) {
  MapHandle map;
  check(pgpr_map_load(map_path.c_str(), map.out()), "loading map");

  std::ifstream in(estimate_path);
  if (!in) fail("cannot open " + estimate_path);
  json est;
  try {
    in >> est;
  } catch (const json::parse_error& e) {
    fail(std::string("estimate JSON: ") + e.what());
  }
  if (!est.contains("chosen_bearing_deg"))
    fail("estimate has no chosen_bearing_deg; run invert with --map and "
         "--detecting-bearing first");
  const double chosen = est["chosen_bearing_deg"].get<double>();
  const double radius = est.value("radius_m", 0.0);

  if (segment_id.empty()) {
    char id[128];
    double bearing = 0;
    int32_t tie = 0;
    check(pgpr_map_bearing_near(map.get(), survey_x, survey_y, id, sizeof id, &bearing,
                                &tie),
          "finding nearest segment");
    segment_id = id;
  }

  MapHandle revised;
  check(pgpr_map_revise(map.get(), segment_id.c_str(), chosen, radius, survey_x,
                        survey_y, revised.out()),
        "revising map");
  if (out_path.empty()) fail("an output path is required (revision is never in place)");
  check(pgpr_map_save(revised.get(), out_path.c_str()), "saving revised map");
  std::cerr << "revised segment " << segment_id << " -> " << out_path << "\n";
  return 0;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    values.push_back(std::stod(item));
  }
  return values;
}

// Synthetic benchmark: renders each case, extracts the signature, and runs
// both the elliptical inversion and the circular baseline on the same
// points. Grid defaults are a desk-study protocol: 1 mm traces and 0.5 mm
// depth samples keep the thin band connected while leaving enough depth
// resolution for the inversion to be identifiable at a +/-2 m aperture.
int cmd_bench(const std::string& alphas_text, const std::string& radii_text,
              const std::string& depths_text, const std::string& seeds_text,
              double noise, int thickness, const std::string& out_path) {
  const std::vector<double> alphas = parse_list(alphas_text);
  const std::vector<double> radii = parse_list(radii_text);
  const std::vector<double> depths = parse_list(depths_text);
  const std::vector<double> seeds = parse_list(seeds_text);

  std::ostringstream csv;
  csv << "alpha_deg,radius_m,depth_m,noise,seed,eiia_radius_err,"
         "hyperbola_radius_err,alpha_err_deg,iterations\n";

  double eiia_sum = 0.0, hyp_sum = 0.0;
  int cases = 0;

  for (const double alpha_deg : alphas) {
    for (const double radius : radii) {
      for (const double depth : depths) {
        for (const double seed_value : seeds) {
          const auto seed = static_cast<std::uint64_t>(seed_value);

          SceneArgs scene_args;
          scene_args.radius = radius;
          scene_args.depth = depth;
          scene_args.alpha_deg = alpha_deg;
          scene_args.apex_x = 2.1;
          scene_args.scan_length = 4.2;
          scene_args.noise = noise;
          scene_args.thickness = thickness;
          const pgpr_scene scene = to_scene(scene_args);

          pgpr_grid_params params{};
          pgpr_grid_params_defaults(&params);
          params.trace_spacing_m = 0.001;
          params.sample_interval_ns = 2.0 * 5e-4 * std::sqrt(9.0) / 0.2998;
          params.rows = 5700;
          params.cols = 0;

          GridHandle grid;
          check(pgpr_scene_render(&scene, &params, seed, grid.out()), "rendering");

          pgpr_extract_config extract_cfg{};
          pgpr_extract_config_defaults(&extract_cfg);
          extract_cfg.point_count = 200;
          ExtractionHandle extraction;
          check(pgpr_extract(grid.get(), &extract_cfg, extraction.out()), "extracting");
          if (pgpr_extraction_count(extraction.get()) == 0)
            fail("bench case produced no cluster");

          PointsHandle points;
          check(pgpr_extraction_points(extraction.get(), 0, points.out()),
                "reading cluster");

          EstimateHandle estimate;
          check(pgpr_eiia_run(points.get(), nullptr, estimate.out()), "inverting");
          double alpha = 0, r_eiia = 0;
          check(pgpr_estimate_angle_radius(estimate.get(), &alpha, &r_eiia, nullptr),
                "reading estimate");

          const size_t n = pgpr_points_count(points.get());
          std::vector<double> xs(n), ys(n);
          for (size_t i = 0; i < n; ++i)
            check(pgpr_points_get(points.get(), i, &xs[i], &ys[i]), "reading point");
          double r_hyp = 0;
          check(pgpr_fit_hyperbola(xs.data(), ys.data(), n, nullptr, nullptr, &r_hyp,
                                   nullptr),
                "hyperbola baseline");

          const double eiia_err = std::abs(r_eiia - radius) / radius;
          const double hyp_err = std::abs(r_hyp - radius) / radius;
          const double alpha_err =
              std::abs(alpha * 180.0 / std::numbers::pi - alpha_deg);
          eiia_sum += eiia_err;
          hyp_sum += hyp_err;
          ++cases;

          csv << alpha_deg << "," << radius << "," << depth << "," << noise << ","
              << seed << "," << eiia_err << "," << hyp_err << "," << alpha_err << ","
              << pgpr_estimate_iterations(estimate.get()) << "\n";
        }
      }
    }
  }

  if (out_path.empty() || out_path == "-") {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) fail("cannot open " + out_path + " for writing");
    out << csv.str();
  }

  if (cases > 0) {
    std::cerr << "cases: " << cases
              << "  mean radius error: eiia " << 100.0 * eiia_sum / cases
              << "%  hyperbola " << 100.0 * hyp_sum / cases << "%\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"buried-pipe direction and radius estimation from GPR B-scans"};
  app.require_subcommand(1);

  // synth
  SceneArgs synth_scene;
  GridArgs synth_grid;
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "render a synthetic B-scan with ground truth");
  add_scene_options(synth, synth_scene);
  add_grid_options(synth, synth_grid);
  synth->add_option("--seed", synth_seed, "noise seed")->capture_default_str();
  synth->add_option("-o,--out-dir", synth_out, "output directory")->required();

  // extract
  std::string extract_bscan, extract_sidecar, extract_out;
  ExtractArgs extract_args;
  int extract_cluster = 0;
  auto* extract = app.add_subcommand("extract", "extract a downward-opening point set");
  extract->add_option("--bscan", extract_bscan, "B-scan data file (.f32 or .csv)")
      ->required();
  extract->add_option("--sidecar", extract_sidecar,
                      "JSON sidecar (default: data path with .json)");
  add_extract_options(extract, extract_args);
  extract->add_option("--cluster", extract_cluster, "cluster index, shallowest first")
      ->capture_default_str();
  extract->add_option("-o,--out", extract_out, "output JSON (default stdout)");

  // invert
  std::string invert_points, invert_map, invert_out;
  EiiaArgs invert_eiia;
  std::optional<double> invert_bearing;
  auto* invert = app.add_subcommand("invert", "invert a point set to a pipe estimate");
  invert->add_option("--points", invert_points, "extraction JSON")->required();
  add_eiia_options(invert, invert_eiia);
  invert->add_option("--detecting-bearing", invert_bearing,
                     "GPR detecting bearing, degrees");
  invert->add_option("--map", invert_map, "pipeline map for bearing disambiguation");
  invert->add_option("-o,--out", invert_out, "output JSON (default stdout)");

  // run
  std::string run_bscan, run_sidecar, run_map, run_out_map, run_report;
  ExtractArgs run_extract;
  EiiaArgs run_eiia_args;
  std::optional<double> run_survey_x, run_survey_y, run_bearing;
  bool run_revise = false, run_timings = false;
  auto* run = app.add_subcommand("run", "full pipeline: B-scan to pipe estimates");
  run->add_option("--bscan", run_bscan, "B-scan data file")->required();
  run->add_option("--sidecar", run_sidecar, "JSON sidecar (default: data path with .json)");
  add_extract_options(run, run_extract);
  add_eiia_options(run, run_eiia_args);
  run->add_option("--map", run_map, "pipeline map JSON");
  run->add_option("--survey-x", run_survey_x, "survey position x (plan), m");
  run->add_option("--survey-y", run_survey_y, "survey position y (plan), m");
  run->add_option("--detecting-bearing", run_bearing, "GPR detecting bearing, degrees");
  run->add_flag("--revise", run_revise, "write a revised map for the first cluster");
  run->add_option("--out-map", run_out_map, "revised map output path");
  run->add_option("--report", run_report, "report JSON path (default stdout)");
  run->add_flag("--timings", run_timings,
                "include wall-clock timings (breaks byte-determinism)");

  // revise-map
  std::string rm_map, rm_estimate, rm_segment, rm_out;
  double rm_x = 0.0, rm_y = 0.0;
  auto* revise_map = app.add_subcommand("revise-map", "apply an estimate to a map");
  revise_map->add_option("--map", rm_map, "pipeline map JSON")->required();
  revise_map->add_option("--estimate", rm_estimate, "estimate JSON from invert/run")
      ->required();
  revise_map->add_option("--segment", rm_segment,
                         "segment id (default: nearest to the survey position)");
  revise_map->add_option("--survey-x", rm_x, "survey position x, m")->required();
  revise_map->add_option("--survey-y", rm_y, "survey position y, m")->required();
  revise_map->add_option("-o,--out", rm_out, "revised map output path")->required();

  // bench
  std::string bench_alphas = "45,60,75,90";
  std::string bench_radii = "0.2,0.3,0.4";
  std::string bench_depths = "1.0,1.5,2.0";
  std::string bench_seeds = "1";
  double bench_noise = 0.005;
  int bench_thickness = 3;
  std::string bench_out;
  auto* bench = app.add_subcommand(
      "bench", "sweep synthetic cases: elliptical inversion vs circular baseline");
  bench->add_option("--alphas", bench_alphas, "obliquity list, degrees")
      ->capture_default_str();
  bench->add_option("--radii", bench_radii, "radius list, m")->capture_default_str();
  bench->add_option("--depths", bench_depths, "depth list, m")->capture_default_str();
  bench->add_option("--seeds", bench_seeds, "seed list")->capture_default_str();
  bench->add_option("--noise", bench_noise, "salt fraction")->capture_default_str();
  bench->add_option("--thickness", bench_thickness, "signature thickness, samples")
      ->capture_default_str();
  bench->add_option("-o,--out", bench_out, "CSV output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(synth_scene, synth_grid, synth_seed, synth_out);
    if (extract->parsed())
      return cmd_extract(extract_bscan, extract_sidecar, extract_args, extract_cluster,
                         extract_out);
    if (invert->parsed())
      return cmd_invert(invert_points, invert_eiia, invert_bearing, invert_map,
                        invert_out);
    if (run->parsed())
      return cmd_run(run_bscan, run_sidecar, run_extract, run_eiia_args, run_map,
                     run_survey_x, run_survey_y, run_bearing, run_revise, run_out_map,
                     run_report, run_timings);
    if (revise_map->parsed())
      return cmd_revise_map(rm_map, rm_estimate, rm_segment, rm_x, rm_y, rm_out);
    if (bench->parsed())
      return cmd_bench(bench_alphas, bench_radii, bench_depths, bench_seeds,
                       bench_noise, bench_thickness, bench_out);
  } catch (const std::exception& e) {
    fail(e.what());
  }
  return kExitError;
}

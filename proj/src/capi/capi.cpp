#include "pipegpr/pipegpr.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "core/bscan.hpp"
#include "core/eiia.hpp"
#include "core/errors.hpp"
#include "core/fitting.hpp"
#include "core/geometry.hpp"
#include "core/io.hpp"
#include "core/pipemap.hpp"
#include "core/synth.hpp"

using namespace pipegpr;

struct pgpr_grid {
  bscan::BScanGrid grid;
};

struct pgpr_points {
  bscan::Extraction extraction;
};

struct pgpr_extraction {
  std::vector<bscan::Extraction> clusters;
};

struct pgpr_estimate {
  eiia::PipeEstimate estimate;
};

struct pgpr_map {
  pipemap::PipeMap map;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

template <typename Fn>
pgpr_status guarded(Fn&& fn) {
  try {
    fn();
    return PGPR_OK;
  } catch (const DegenerateConic& e) {
    set_error(e.what());
    return PGPR_ERR_DEGENERATE_CONIC;
  } catch (const PointInsideEllipse& e) {
    set_error(e.what());
    return PGPR_ERR_POINT_INSIDE_ELLIPSE;
  } catch (const InvalidAngle& e) {
    set_error(e.what());
    return PGPR_ERR_INVALID_ANGLE;
  } catch (const FitFailed& e) {
    set_error(e.what());
    return PGPR_ERR_FIT_FAILED;
  } catch (const DegenerateInput& e) {
    set_error(e.what());
    return PGPR_ERR_DEGENERATE_INPUT;
  } catch (const ClusterTooNarrow& e) {
    set_error(e.what());
    return PGPR_ERR_CLUSTER_TOO_NARROW;
  } catch (const SceneOutOfGrid& e) {
    set_error(e.what());
    return PGPR_ERR_SCENE_OUT_OF_GRID;
  } catch (const UnknownSegment& e) {
    set_error(e.what());
    return PGPR_ERR_UNKNOWN_SEGMENT;
  } catch (const IoError& e) {
    set_error(e.what());
    return PGPR_ERR_IO;
  } catch (const FormatError& e) {
    set_error(e.what());
    return PGPR_ERR_FORMAT;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return PGPR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return PGPR_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return PGPR_ERR_INTERNAL;
  }
}

pgpr_status invalid_argument(const char* message) {
  set_error(message);
  return PGPR_ERR_INVALID_ARGUMENT;
}

geometry::Ellipse from_c(const pgpr_ellipse& e) {
  return {e.center_x, e.center_y, e.semi_axis_x, e.semi_axis_y};
}

pgpr_ellipse to_c(const geometry::Ellipse& e) {
  return {e.center_x, e.center_y, e.a, e.b};
}

geometry::ConicCoeffs from_c(const pgpr_conic& c) {
  return {c.a, c.b, c.c, c.d, c.e, c.f};
}

pgpr_conic to_c(const geometry::ConicCoeffs& c) {
  return {c.A, c.B, c.C, c.D, c.E, c.F};
}

std::vector<geometry::Point2> gather(const double* xs, const double* ys, size_t n) {
  std::vector<geometry::Point2> pts(n);
  for (size_t i = 0; i < n; ++i) pts[i] = {xs[i], ys[i]};
  return pts;
}

synth::PipeScene from_c(const pgpr_scene& s) {
  synth::PipeScene scene;
  scene.radius = s.radius_m;
  scene.depth_to_center = s.depth_to_center_m;
  scene.obliquity = s.obliquity_rad;
  scene.apex_x = s.apex_x_m;
  scene.scan_length = s.scan_length_m;
  scene.noise_salt_fraction = s.noise_salt_fraction;
  scene.signature_thickness = s.signature_thickness;
  return scene;
}

synth::GridParams from_c(const pgpr_grid_params& p) {
  synth::GridParams params;
  params.trace_spacing = p.trace_spacing_m;
  params.sample_interval = p.sample_interval_ns;
  params.relative_permittivity = p.relative_permittivity;
  params.rows = p.rows;
  params.cols = p.cols;
  return params;
}

pgpr_status copy_id(const std::string& id, char* buf, size_t buf_size) {
  if (!buf || buf_size == 0) return invalid_argument("id buffer is null or empty");
  if (id.size() + 1 > buf_size) {
    set_error("id buffer too small (" + std::to_string(id.size() + 1) +
              " bytes needed)");
    return PGPR_ERR_INVALID_ARGUMENT;
  }
  std::memcpy(buf, id.c_str(), id.size() + 1);
  return PGPR_OK;
}

}  // namespace

extern "C" {

const char* pgpr_status_name(pgpr_status status) {
  switch (status) {
    case PGPR_OK: return "ok";
    case PGPR_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case PGPR_ERR_DEGENERATE_CONIC: return "degenerate_conic";
    case PGPR_ERR_POINT_INSIDE_ELLIPSE: return "point_inside_ellipse";
    case PGPR_ERR_INVALID_ANGLE: return "invalid_angle";
    case PGPR_ERR_FIT_FAILED: return "fit_failed";
    case PGPR_ERR_DEGENERATE_INPUT: return "degenerate_input";
    case PGPR_ERR_CLUSTER_TOO_NARROW: return "cluster_too_narrow";
    case PGPR_ERR_SCENE_OUT_OF_GRID: return "scene_out_of_grid";
    case PGPR_ERR_UNKNOWN_SEGMENT: return "unknown_segment";
    case PGPR_ERR_IO: return "io_error";
    case PGPR_ERR_FORMAT: return "format_error";
    case PGPR_ERR_INTERNAL: return "internal_error";
  }
  return "unknown_status";
}

const char* pgpr_last_error(void) { return g_last_error.c_str(); }

/* ---------------- geometry ---------------- */

pgpr_status pgpr_conic_to_ellipse(const pgpr_conic* conic, pgpr_ellipse* out) {
  if (!conic || !out) return invalid_argument("conic and out must be non-null");
  return guarded([&] { *out = to_c(geometry::conic_to_ellipse(from_c(*conic))); });
}

pgpr_status pgpr_ellipse_to_conic(const pgpr_ellipse* ellipse, pgpr_conic* out) {
  if (!ellipse || !out) return invalid_argument("ellipse and out must be non-null");
  return guarded([&] { *out = to_c(geometry::ellipse_to_conic(from_c(*ellipse))); });
}

pgpr_status pgpr_project_point(const pgpr_ellipse* ellipse, double px, double py,
                               double* nearest_x, double* nearest_y, double* distance,
                               double* angle_from_vertical) {
  if (!ellipse) return invalid_argument("ellipse must be non-null");
  return guarded([&] {
    const auto r = geometry::project_point(from_c(*ellipse), {px, py});
    if (nearest_x) *nearest_x = r.nearest.x;
    if (nearest_y) *nearest_y = r.nearest.y;
    if (distance) *distance = r.distance;
    if (angle_from_vertical) *angle_from_vertical = r.angle_from_vertical;
  });
}

pgpr_status pgpr_rotate_signature_point(double x, double y, double cumulative_angle,
                                        double* out_x, double* out_y) {
  return guarded([&] {
    const auto p = geometry::rotate_signature_point(x, y, cumulative_angle);
    if (out_x) *out_x = p.x;
    if (out_y) *out_y = p.y;
  });
}

pgpr_status pgpr_depth_of_sample(double row, double sample_interval_ns,
                                 double relative_permittivity, double* out_depth_m) {
  if (!out_depth_m) return invalid_argument("out_depth_m must be non-null");
  return guarded([&] {
    bscan::BScanGrid grid;
    grid.rows = 2;
    grid.cols = 2;
    grid.amplitudes.assign(4, 0.0f);
    grid.trace_spacing = 1.0;
    grid.sample_interval = sample_interval_ns;
    grid.relative_permittivity = relative_permittivity;
    bscan::validate(grid);
    *out_depth_m = bscan::depth_of_sample(row, grid);
  });
}

/* ---------------- fitting ---------------- */

pgpr_status pgpr_fit_ellipse(const double* xs, const double* ys, size_t n,
                             pgpr_conic* out_conic, pgpr_ellipse* out_ellipse,
                             double* out_algebraic_residual,
                             double* out_geometric_rms) {
  if (!xs || !ys) return invalid_argument("xs and ys must be non-null");
  return guarded([&] {
    const auto pts = gather(xs, ys, n);
    const auto fit = fitting::fit_ellipse(pts);
    if (out_conic) *out_conic = to_c(fit.conic);
    if (out_ellipse) *out_ellipse = to_c(fit.ellipse);
    if (out_algebraic_residual) *out_algebraic_residual = fit.algebraic_residual;
    if (out_geometric_rms) *out_geometric_rms = fit.geometric_rms;
  });
}

pgpr_status pgpr_fit_hyperbola(const double* xs, const double* ys, size_t n,
                               double* out_apex_x, double* out_depth_to_center,
                               double* out_radius, double* out_residual) {
  if (!xs || !ys) return invalid_argument("xs and ys must be non-null");
  return guarded([&] {
    const auto pts = gather(xs, ys, n);
    const auto fit = fitting::fit_hyperbola_baseline(pts);
    if (out_apex_x) *out_apex_x = fit.apex_x;
    if (out_depth_to_center) *out_depth_to_center = fit.depth_to_center;
    if (out_radius) *out_radius = fit.radius;
    if (out_residual) *out_residual = fit.residual;
  });
}

pgpr_status pgpr_algebraic_distance_sum(const pgpr_conic* conic, const double* xs,
                                        const double* ys, size_t n, double* out) {
  if (!conic || !xs || !ys || !out)
    return invalid_argument("conic, xs, ys and out must be non-null");
  return guarded([&] {
    *out = fitting::algebraic_distance_sum(from_c(*conic), gather(xs, ys, n));
  });
}

pgpr_status pgpr_geometric_rms(const pgpr_ellipse* ellipse, const double* xs,
                               const double* ys, size_t n, double* out) {
  if (!ellipse || !xs || !ys || !out)
    return invalid_argument("ellipse, xs, ys and out must be non-null");
  return guarded([&] {
    *out = fitting::geometric_rms(from_c(*ellipse), gather(xs, ys, n));
  });
}

/* ---------------- grids ---------------- */

pgpr_status pgpr_grid_load(const char* data_path, const char* sidecar_path,
                           pgpr_grid** out) {
  if (!data_path || !sidecar_path || !out)
    return invalid_argument("paths and out must be non-null");
  return guarded([&] { *out = new pgpr_grid{io::load_grid(data_path, sidecar_path)}; });
}

pgpr_status pgpr_grid_save(const pgpr_grid* grid, const char* data_path,
                           const char* sidecar_path) {
  if (!grid || !data_path || !sidecar_path)
    return invalid_argument("grid and paths must be non-null");
  return guarded([&] { io::save_grid(grid->grid, data_path, sidecar_path); });
}

void pgpr_grid_free(pgpr_grid* grid) { delete grid; }

pgpr_status pgpr_grid_shape(const pgpr_grid* grid, int32_t* rows, int32_t* cols) {
  if (!grid) return invalid_argument("grid must be non-null");
  if (rows) *rows = grid->grid.rows;
  if (cols) *cols = grid->grid.cols;
  return PGPR_OK;
}

pgpr_status pgpr_grid_meta(const pgpr_grid* grid, double* trace_spacing_m,
                           double* sample_interval_ns, double* relative_permittivity) {
  if (!grid) return invalid_argument("grid must be non-null");
  if (trace_spacing_m) *trace_spacing_m = grid->grid.trace_spacing;
  if (sample_interval_ns) *sample_interval_ns = grid->grid.sample_interval;
  if (relative_permittivity) *relative_permittivity = grid->grid.relative_permittivity;
  return PGPR_OK;
}

pgpr_status pgpr_grid_amplitude(const pgpr_grid* grid, int32_t row, int32_t col,
                                float* out) {
  if (!grid || !out) return invalid_argument("grid and out must be non-null");
  if (row < 0 || row >= grid->grid.rows || col < 0 || col >= grid->grid.cols)
    return invalid_argument("cell index out of range");
  *out = grid->grid.at(row, col);
  return PGPR_OK;
}

/* ---------------- synthetic scenes ---------------- */

void pgpr_scene_defaults(pgpr_scene* scene) {
  if (!scene) return;
  const synth::PipeScene d;
  scene->radius_m = d.radius;
  scene->depth_to_center_m = d.depth_to_center;
  scene->obliquity_rad = d.obliquity;
  scene->apex_x_m = d.apex_x;
  scene->scan_length_m = d.scan_length;
  scene->noise_salt_fraction = d.noise_salt_fraction;
  scene->signature_thickness = d.signature_thickness;
}

void pgpr_grid_params_defaults(pgpr_grid_params* params) {
  if (!params) return;
  const synth::GridParams d;
  params->trace_spacing_m = d.trace_spacing;
  params->sample_interval_ns = d.sample_interval;
  params->relative_permittivity = d.relative_permittivity;
  params->rows = d.rows;
  params->cols = d.cols;
}

pgpr_status pgpr_scene_cross_section(const pgpr_scene* scene, pgpr_ellipse* out) {
  if (!scene || !out) return invalid_argument("scene and out must be non-null");
  return guarded([&] {
    const auto s = from_c(*scene);
    synth::validate(s);
    *out = to_c(synth::cross_section_of(s));
  });
}

pgpr_status pgpr_scene_signature_depth(const pgpr_scene* scene, double x,
                                       double* out_depth_m) {
  if (!scene || !out_depth_m)
    return invalid_argument("scene and out_depth_m must be non-null");
  return guarded([&] {
    const auto s = from_c(*scene);
    synth::validate(s);
    *out_depth_m = synth::signature_depth(s, x);
  });
}

pgpr_status pgpr_scene_render(const pgpr_scene* scene, const pgpr_grid_params* params,
                              uint64_t seed, pgpr_grid** out) {
  if (!scene || !params || !out)
    return invalid_argument("scene, params and out must be non-null");
  return guarded([&] {
    auto rendered = synth::render(from_c(*scene), from_c(*params), seed);
    *out = new pgpr_grid{std::move(rendered.grid)};
  });
}

pgpr_status pgpr_scene_write(const pgpr_scene* scene, const pgpr_grid_params* params,
                             uint64_t seed, const char* out_dir) {
  if (!scene || !params || !out_dir)
    return invalid_argument("scene, params and out_dir must be non-null");
  return guarded([&] { io::write_scene(from_c(*scene), from_c(*params), seed, out_dir); });
}

/* ---------------- signature point sets ---------------- */

pgpr_status pgpr_points_create(const double* xs, const double* ys, size_t n,
                               pgpr_points** out) {
  if (!xs || !ys || !out) return invalid_argument("xs, ys and out must be non-null");
  return guarded([&] {
    bscan::Extraction extraction;
    extraction.points = eiia::make_signature_point_set(gather(xs, ys, n));
    *out = new pgpr_points{std::move(extraction)};
  });
}

pgpr_status pgpr_points_load(const char* path, pgpr_points** out) {
  if (!path || !out) return invalid_argument("path and out must be non-null");
  return guarded([&] { *out = new pgpr_points{io::load_extraction(path)}; });
}

pgpr_status pgpr_points_save(const pgpr_points* points, const char* path) {
  if (!points || !path) return invalid_argument("points and path must be non-null");
  return guarded([&] { io::save_extraction(points->extraction, path); });
}

void pgpr_points_free(pgpr_points* points) { delete points; }

size_t pgpr_points_count(const pgpr_points* points) {
  return points ? points->extraction.points.points.size() : 0;
}

pgpr_status pgpr_points_get(const pgpr_points* points, size_t index, double* x,
                            double* y) {
  if (!points) return invalid_argument("points must be non-null");
  if (index >= points->extraction.points.points.size())
    return invalid_argument("point index out of range");
  const auto& p = points->extraction.points.points[index];
  if (x) *x = p.x;
  if (y) *y = p.y;
  return PGPR_OK;
}

pgpr_status pgpr_points_apex(const pgpr_points* points, double* apex_x_m) {
  if (!points || !apex_x_m)
    return invalid_argument("points and apex_x_m must be non-null");
  *apex_x_m = points->extraction.apex_x;
  return PGPR_OK;
}

pgpr_status pgpr_points_spacing(const pgpr_points* points, double* actual_spacing_m) {
  if (!points || !actual_spacing_m)
    return invalid_argument("points and actual_spacing_m must be non-null");
  *actual_spacing_m = points->extraction.actual_spacing;
  return PGPR_OK;
}

size_t pgpr_points_flag_count(const pgpr_points* points) {
  return points ? points->extraction.flags.size() : 0;
}

const char* pgpr_points_flag(const pgpr_points* points, size_t index) {
  if (!points || index >= points->extraction.flags.size()) return nullptr;
  return points->extraction.flags[index].c_str();
}

/* ---------------- extraction ---------------- */

void pgpr_extract_config_defaults(pgpr_extract_config* cfg) {
  if (!cfg) return;
  const bscan::PreprocessConfig pp;
  const bscan::ClusterConfig cc;
  const bscan::ExtractConfig ec;
  cfg->threshold_k = pp.threshold_k;
  cfg->min_component_area = pp.min_component_area;
  cfg->min_cluster_width = cc.min_width;
  cfg->cluster_tolerance = cc.tolerance;
  cfg->column_spacing_m = ec.spacing;
  cfg->point_count = ec.count;
}

pgpr_status pgpr_extract(const pgpr_grid* grid, const pgpr_extract_config* cfg,
                         pgpr_extraction** out) {
  if (!grid || !out) return invalid_argument("grid and out must be non-null");
  return guarded([&] {
    pgpr_extract_config defaults;
    pgpr_extract_config_defaults(&defaults);
    const pgpr_extract_config& c = cfg ? *cfg : defaults;

    const bscan::PreprocessConfig pp{c.threshold_k, c.min_component_area};
    const bscan::ClusterConfig cc{c.min_cluster_width, c.cluster_tolerance};
    const bscan::ExtractConfig ec{c.column_spacing_m, c.point_count};

    const auto binary = bscan::preprocess(grid->grid, pp);
    const auto clusters = bscan::find_downward_opening_clusters(binary, cc);

    auto result = std::make_unique<pgpr_extraction>();
    for (const auto& cluster : clusters) {
      try {
        result->clusters.push_back(bscan::extract_point_set(cluster, grid->grid, ec));
      } catch (const ClusterTooNarrow&) {
        // Narrow chains are dropped rather than failing the whole grid.
      }
    }
    *out = result.release();
  });
}

void pgpr_extraction_free(pgpr_extraction* extraction) { delete extraction; }

size_t pgpr_extraction_count(const pgpr_extraction* extraction) {
  return extraction ? extraction->clusters.size() : 0;
}

pgpr_status pgpr_extraction_points(const pgpr_extraction* extraction, size_t index,
                                   pgpr_points** out) {
  if (!extraction || !out)
    return invalid_argument("extraction and out must be non-null");
  if (index >= extraction->clusters.size())
    return invalid_argument("cluster index out of range");
  return guarded([&] { *out = new pgpr_points{extraction->clusters[index]}; });
}

/* ---------------- EIIA ---------------- */

void pgpr_eiia_config_defaults(pgpr_eiia_config* cfg) {
  if (!cfg) return;
  const eiia::EiiaConfig d;
  cfg->max_iterations = d.max_iterations;
  cfg->geometric_rms_threshold_m = d.geometric_rms_threshold;
  cfg->stability_epsilon_m = d.stability_epsilon;
}

pgpr_status pgpr_eiia_run(const pgpr_points* points, const pgpr_eiia_config* cfg,
                          pgpr_estimate** out) {
  if (!points || !out) return invalid_argument("points and out must be non-null");
  return guarded([&] {
    eiia::EiiaConfig config;
    if (cfg) {
      config.max_iterations = cfg->max_iterations;
      config.geometric_rms_threshold = cfg->geometric_rms_threshold_m;
      config.stability_epsilon = cfg->stability_epsilon_m;
    }
    *out = new pgpr_estimate{eiia::run_eiia(points->extraction.points, config)};
  });
}

void pgpr_estimate_free(pgpr_estimate* estimate) { delete estimate; }

pgpr_status pgpr_estimate_ellipse(const pgpr_estimate* estimate, pgpr_ellipse* out) {
  if (!estimate || !out) return invalid_argument("estimate and out must be non-null");
  *out = to_c(estimate->estimate.ellipse);
  return PGPR_OK;
}

pgpr_status pgpr_estimate_angle_radius(const pgpr_estimate* estimate, double* alpha_rad,
                                       double* radius_m, int32_t* alpha_clamped) {
  if (!estimate) return invalid_argument("estimate must be non-null");
  if (alpha_rad) *alpha_rad = estimate->estimate.alpha;
  if (radius_m) *radius_m = estimate->estimate.radius;
  if (alpha_clamped) *alpha_clamped = estimate->estimate.alpha_clamped ? 1 : 0;
  return PGPR_OK;
}

int32_t pgpr_estimate_iterations(const pgpr_estimate* estimate) {
  return estimate ? estimate->estimate.iterations_used : 0;
}

int32_t pgpr_estimate_best_iteration(const pgpr_estimate* estimate) {
  return estimate ? estimate->estimate.best_iteration : 0;
}

size_t pgpr_estimate_history_size(const pgpr_estimate* estimate) {
  return estimate ? estimate->estimate.residual_history.size() : 0;
}

pgpr_status pgpr_estimate_history(const pgpr_estimate* estimate, size_t index,
                                  double* algebraic_residual, double* geometric_rms_m,
                                  double* signature_rms_m) {
  if (!estimate) return invalid_argument("estimate must be non-null");
  if (index >= estimate->estimate.residual_history.size())
    return invalid_argument("history index out of range");
  const auto& rec = estimate->estimate.residual_history[index];
  if (algebraic_residual) *algebraic_residual = rec.algebraic_residual;
  if (geometric_rms_m) *geometric_rms_m = rec.geometric_rms;
  if (signature_rms_m) *signature_rms_m = rec.signature_rms;
  return PGPR_OK;
}

size_t pgpr_estimate_inverted_count(const pgpr_estimate* estimate) {
  return estimate ? estimate->estimate.inverted_points.size() : 0;
}

pgpr_status pgpr_estimate_inverted_point(const pgpr_estimate* estimate, size_t index,
                                         double* x, double* y) {
  if (!estimate) return invalid_argument("estimate must be non-null");
  if (index >= estimate->estimate.inverted_points.size())
    return invalid_argument("inverted point index out of range");
  if (x) *x = estimate->estimate.inverted_points[index].x;
  if (y) *y = estimate->estimate.inverted_points[index].y;
  return PGPR_OK;
}

pgpr_status pgpr_estimate_final_rms(const pgpr_estimate* estimate,
                                    double* geometric_rms_m) {
  if (!estimate || !geometric_rms_m)
    return invalid_argument("estimate and geometric_rms_m must be non-null");
  *geometric_rms_m = estimate->estimate.final_geometric_rms;
  return PGPR_OK;
}

pgpr_status pgpr_estimate_flags(const pgpr_estimate* estimate, int32_t* alpha_clamped,
                                int32_t* residual_nonmonotone, int32_t* bearing_tie) {
  if (!estimate) return invalid_argument("estimate must be non-null");
  if (alpha_clamped) *alpha_clamped = estimate->estimate.alpha_clamped ? 1 : 0;
  if (residual_nonmonotone)
    *residual_nonmonotone = estimate->estimate.residual_nonmonotone ? 1 : 0;
  if (bearing_tie) *bearing_tie = estimate->estimate.bearing_tie ? 1 : 0;
  return PGPR_OK;
}

pgpr_status pgpr_estimate_resolve_bearing(pgpr_estimate* estimate,
                                          double detecting_bearing_deg,
                                          double map_bearing_deg) {
  if (!estimate) return invalid_argument("estimate must be non-null");
  return guarded([&] {
    const auto choice = eiia::disambiguate_bearing(
        detecting_bearing_deg, estimate->estimate.alpha, map_bearing_deg);
    estimate->estimate.candidate_bearings = choice.candidates;
    estimate->estimate.chosen_bearing = choice.chosen;
    estimate->estimate.bearing_tie = choice.tie;
  });
}

pgpr_status pgpr_estimate_bearings(const pgpr_estimate* estimate,
                                   double* candidate0_deg, double* candidate1_deg,
                                   double* chosen_deg, int32_t* tie) {
  if (!estimate) return invalid_argument("estimate must be non-null");
  if (!estimate->estimate.chosen_bearing || !estimate->estimate.candidate_bearings)
    return invalid_argument("bearing not resolved; call pgpr_estimate_resolve_bearing");
  if (candidate0_deg) *candidate0_deg = (*estimate->estimate.candidate_bearings)[0];
  if (candidate1_deg) *candidate1_deg = (*estimate->estimate.candidate_bearings)[1];
  if (chosen_deg) *chosen_deg = *estimate->estimate.chosen_bearing;
  if (tie) *tie = estimate->estimate.bearing_tie ? 1 : 0;
  return PGPR_OK;
}

pgpr_status pgpr_derive_angle_radius(const pgpr_ellipse* ellipse, double* alpha_rad,
                                     double* radius_m, int32_t* alpha_clamped) {
  if (!ellipse) return invalid_argument("ellipse must be non-null");
  return guarded([&] {
    const auto ar = eiia::derive_angle_and_radius(from_c(*ellipse));
    if (alpha_rad) *alpha_rad = ar.alpha;
    if (radius_m) *radius_m = ar.radius;
    if (alpha_clamped) *alpha_clamped = ar.clamped ? 1 : 0;
  });
}

pgpr_status pgpr_disambiguate_bearing(double detecting_bearing_deg, double alpha_rad,
                                      double map_bearing_deg, double* candidate0_deg,
                                      double* candidate1_deg, double* chosen_deg,
                                      int32_t* tie) {
  return guarded([&] {
    const auto choice =
        eiia::disambiguate_bearing(detecting_bearing_deg, alpha_rad, map_bearing_deg);
    if (candidate0_deg) *candidate0_deg = choice.candidates[0];
    if (candidate1_deg) *candidate1_deg = choice.candidates[1];
    if (chosen_deg) *chosen_deg = choice.chosen;
    if (tie) *tie = choice.tie ? 1 : 0;
  });
}

/* ---------------- pipeline maps ---------------- */

pgpr_status pgpr_map_load(const char* path, pgpr_map** out) {
  if (!path || !out) return invalid_argument("path and out must be non-null");
  return guarded([&] { *out = new pgpr_map{io::load_map(path)}; });
}

pgpr_status pgpr_map_save(const pgpr_map* map, const char* path) {
  if (!map || !path) return invalid_argument("map and path must be non-null");
  return guarded([&] { io::save_map(map->map, path); });
}

void pgpr_map_free(pgpr_map* map) { delete map; }

size_t pgpr_map_segment_count(const pgpr_map* map) {
  return map ? map->map.segments.size() : 0;
}

pgpr_status pgpr_map_segment(const pgpr_map* map, size_t index, char* id_buf,
                             size_t id_buf_size, double* start_x, double* start_y,
                             double* end_x, double* end_y, double* radius_m) {
  if (!map) return invalid_argument("map must be non-null");
  if (index >= map->map.segments.size())
    return invalid_argument("segment index out of range");
  const auto& s = map->map.segments[index];
  if (id_buf) {
    const pgpr_status st = copy_id(s.id, id_buf, id_buf_size);
    if (st != PGPR_OK) return st;
  }
  if (start_x) *start_x = s.start.x;
  if (start_y) *start_y = s.start.y;
  if (end_x) *end_x = s.end.x;
  if (end_y) *end_y = s.end.y;
  if (radius_m)
    *radius_m = s.radius ? *s.radius : std::numeric_limits<double>::quiet_NaN();
  return PGPR_OK;
}

pgpr_status pgpr_map_bearing_near(const pgpr_map* map, double x, double y,
                                  char* id_buf, size_t id_buf_size,
                                  double* bearing_deg, int32_t* tie) {
  if (!map) return invalid_argument("map must be non-null");
  pipemap::NearestBearing nearest;
  const pgpr_status status =
      guarded([&] { nearest = pipemap::map_bearing_near(map->map, {x, y}); });
  if (status != PGPR_OK) return status;
  if (id_buf) {
    const pgpr_status copy_status = copy_id(nearest.segment_id, id_buf, id_buf_size);
    if (copy_status != PGPR_OK) return copy_status;
  }
  if (bearing_deg) *bearing_deg = nearest.bearing;
  if (tie) *tie = nearest.tie ? 1 : 0;
  return PGPR_OK;
}

pgpr_status pgpr_map_revise(const pgpr_map* map, const char* segment_id,
                            double chosen_bearing_deg, double radius_m,
                            double survey_x, double survey_y, pgpr_map** out) {
  if (!map || !segment_id || !out)
    return invalid_argument("map, segment_id and out must be non-null");
  return guarded([&] {
    eiia::PipeEstimate estimate;
    estimate.chosen_bearing = eiia::normalize_bearing_180(chosen_bearing_deg);
    estimate.radius = radius_m;
    const pipemap::SurveyLine survey{{survey_x, survey_y}, 0.0};
    *out = new pgpr_map{pipemap::revise(map->map, segment_id, estimate, survey)};
  });
}

}  // extern "C"

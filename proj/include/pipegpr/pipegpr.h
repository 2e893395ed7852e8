/*
 * pipegpr - buried-pipe direction and radius estimation from GPR B-scans.
 *
 * C API of the shared library. All functions return a pgpr_status; on any
 * failure pgpr_last_error() holds a thread-local message describing what
 * went wrong. Objects behind opaque handles are created and destroyed by
 * the matching *_free function and are immutable unless noted.
 */
#ifndef PIPEGPR_H
#define PIPEGPR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(PIPEGPR_BUILD)
#define PIPEGPR_API __declspec(dllexport)
#else
#define PIPEGPR_API __declspec(dllimport)
#endif
#else
#define PIPEGPR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pgpr_status {
  PGPR_OK = 0,
  PGPR_ERR_INVALID_ARGUMENT = 1,
  PGPR_ERR_DEGENERATE_CONIC = 2,
  PGPR_ERR_POINT_INSIDE_ELLIPSE = 3,
  PGPR_ERR_INVALID_ANGLE = 4,
  PGPR_ERR_FIT_FAILED = 5,
  PGPR_ERR_DEGENERATE_INPUT = 6,
  PGPR_ERR_CLUSTER_TOO_NARROW = 7,
  PGPR_ERR_SCENE_OUT_OF_GRID = 8,
  PGPR_ERR_UNKNOWN_SEGMENT = 9,
  PGPR_ERR_IO = 10,
  PGPR_ERR_FORMAT = 11,
  PGPR_ERR_INTERNAL = 12
} pgpr_status;

PIPEGPR_API const char* pgpr_status_name(pgpr_status status);

/* Message for the most recent failure on the calling thread. */
PIPEGPR_API const char* pgpr_last_error(void);

/* ---------------- geometry ---------------- */

/* Axis-aligned ellipse; y is depth below the surface, positive downward. */
typedef struct pgpr_ellipse {
  double center_x;
  double center_y;
  double semi_axis_x; /* horizontal semi-axis a, meters */
  double semi_axis_y; /* vertical semi-axis b, meters */
} pgpr_ellipse;

/* General conic a x^2 + b xy + c y^2 + d x + e y + f = 0. */
typedef struct pgpr_conic {
  double a, b, c, d, e, f;
} pgpr_conic;

PIPEGPR_API pgpr_status pgpr_conic_to_ellipse(const pgpr_conic* conic,
                                              pgpr_ellipse* out);
PIPEGPR_API pgpr_status pgpr_ellipse_to_conic(const pgpr_ellipse* ellipse,
                                              pgpr_conic* out);

/* Shortest-distance projection of (px, py) strictly outside the ellipse.
 * angle_from_vertical is signed, positive toward decreasing x. */
PIPEGPR_API pgpr_status pgpr_project_point(const pgpr_ellipse* ellipse, double px,
                                           double py, double* nearest_x,
                                           double* nearest_y, double* distance,
                                           double* angle_from_vertical);

/* Rotate a signature point about its surface pivot (x, 0). */
PIPEGPR_API pgpr_status pgpr_rotate_signature_point(double x, double y,
                                                    double cumulative_angle,
                                                    double* out_x, double* out_y);

/* Two-way travel time to depth conversion for one sample row. */
PIPEGPR_API pgpr_status pgpr_depth_of_sample(double row, double sample_interval_ns,
                                             double relative_permittivity,
                                             double* out_depth_m);

/* ---------------- fitting ---------------- */

/* Constrained algebraic ellipse fit (B = 0, 4AC = 1) over n points. Output
 * pointers may be NULL when the caller does not need them. */
PIPEGPR_API pgpr_status pgpr_fit_ellipse(const double* xs, const double* ys,
                                         size_t n, pgpr_conic* out_conic,
                                         pgpr_ellipse* out_ellipse,
                                         double* out_algebraic_residual,
                                         double* out_geometric_rms);

/* Circular-model baseline (y + r)^2 = (x - x0)^2 + y0^2. */
PIPEGPR_API pgpr_status pgpr_fit_hyperbola(const double* xs, const double* ys,
                                           size_t n, double* out_apex_x,
                                           double* out_depth_to_center,
                                           double* out_radius, double* out_residual);

PIPEGPR_API pgpr_status pgpr_algebraic_distance_sum(const pgpr_conic* conic,
                                                    const double* xs, const double* ys,
                                                    size_t n, double* out);
PIPEGPR_API pgpr_status pgpr_geometric_rms(const pgpr_ellipse* ellipse,
                                           const double* xs, const double* ys,
                                           size_t n, double* out);

/* ---------------- B-scan grids ---------------- */

typedef struct pgpr_grid pgpr_grid;

/* data_path: raw little-endian f32 (row-major) or CSV by ".csv" extension;
 * sidecar: mandatory JSON with traces/samples/trace_spacing_m/
 * sample_interval_ns/relative_permittivity. */
PIPEGPR_API pgpr_status pgpr_grid_load(const char* data_path, const char* sidecar_path,
                                       pgpr_grid** out);
PIPEGPR_API pgpr_status pgpr_grid_save(const pgpr_grid* grid, const char* data_path,
                                       const char* sidecar_path);
PIPEGPR_API void pgpr_grid_free(pgpr_grid* grid);
PIPEGPR_API pgpr_status pgpr_grid_shape(const pgpr_grid* grid, int32_t* rows,
                                        int32_t* cols);
PIPEGPR_API pgpr_status pgpr_grid_meta(const pgpr_grid* grid, double* trace_spacing_m,
                                       double* sample_interval_ns,
                                       double* relative_permittivity);
PIPEGPR_API pgpr_status pgpr_grid_amplitude(const pgpr_grid* grid, int32_t row,
                                            int32_t col, float* out);

/* ---------------- synthetic scenes ---------------- */

typedef struct pgpr_scene {
  double radius_m;
  double depth_to_center_m;
  double obliquity_rad; /* (0, pi/2] */
  double apex_x_m;
  double scan_length_m;
  double noise_salt_fraction; /* [0, 1] */
  int32_t signature_thickness; /* samples */
} pgpr_scene;

typedef struct pgpr_grid_params {
  double trace_spacing_m;
  double sample_interval_ns;
  double relative_permittivity;
  int32_t rows;
  int32_t cols; /* 0 derives cols from scan_length_m */
} pgpr_grid_params;

PIPEGPR_API void pgpr_scene_defaults(pgpr_scene* scene);
PIPEGPR_API void pgpr_grid_params_defaults(pgpr_grid_params* params);

PIPEGPR_API pgpr_status pgpr_scene_cross_section(const pgpr_scene* scene,
                                                 pgpr_ellipse* out);
PIPEGPR_API pgpr_status pgpr_scene_signature_depth(const pgpr_scene* scene, double x,
                                                   double* out_depth_m);
PIPEGPR_API pgpr_status pgpr_scene_render(const pgpr_scene* scene,
                                          const pgpr_grid_params* params,
                                          uint64_t seed, pgpr_grid** out);

/* Renders and writes bscan.f32, bscan.json, truth.json, mask.f32 under
 * out_dir; byte-identical for identical inputs and seed. */
PIPEGPR_API pgpr_status pgpr_scene_write(const pgpr_scene* scene,
                                         const pgpr_grid_params* params,
                                         uint64_t seed, const char* out_dir);

/* ---------------- signature point sets ---------------- */

typedef struct pgpr_points pgpr_points;

PIPEGPR_API pgpr_status pgpr_points_create(const double* xs, const double* ys,
                                           size_t n, pgpr_points** out);
PIPEGPR_API pgpr_status pgpr_points_load(const char* path, pgpr_points** out);
PIPEGPR_API pgpr_status pgpr_points_save(const pgpr_points* points, const char* path);
PIPEGPR_API void pgpr_points_free(pgpr_points* points);
PIPEGPR_API size_t pgpr_points_count(const pgpr_points* points);
PIPEGPR_API pgpr_status pgpr_points_get(const pgpr_points* points, size_t index,
                                        double* x, double* y);
PIPEGPR_API pgpr_status pgpr_points_apex(const pgpr_points* points, double* apex_x_m);
PIPEGPR_API pgpr_status pgpr_points_spacing(const pgpr_points* points,
                                            double* actual_spacing_m);
PIPEGPR_API size_t pgpr_points_flag_count(const pgpr_points* points);
PIPEGPR_API const char* pgpr_points_flag(const pgpr_points* points, size_t index);

/* ---------------- extraction ---------------- */

typedef struct pgpr_extract_config {
  double threshold_k;
  int32_t min_component_area;    /* pixels */
  int32_t min_cluster_width;     /* columns */
  int32_t cluster_tolerance;     /* rows */
  double column_spacing_m;
  int32_t point_count;
} pgpr_extract_config;

PIPEGPR_API void pgpr_extract_config_defaults(pgpr_extract_config* cfg);

typedef struct pgpr_extraction pgpr_extraction;

/* Preprocesses the grid, finds downward-opening clusters (shallowest apex
 * first) and extracts one point set per cluster. Zero clusters is a legal
 * outcome, not an error. */
PIPEGPR_API pgpr_status pgpr_extract(const pgpr_grid* grid,
                                     const pgpr_extract_config* cfg,
                                     pgpr_extraction** out);
PIPEGPR_API void pgpr_extraction_free(pgpr_extraction* extraction);
PIPEGPR_API size_t pgpr_extraction_count(const pgpr_extraction* extraction);
PIPEGPR_API pgpr_status pgpr_extraction_points(const pgpr_extraction* extraction,
                                               size_t index, pgpr_points** out);

/* ---------------- EIIA ---------------- */

typedef struct pgpr_eiia_config {
  int32_t max_iterations;
  double geometric_rms_threshold_m;
  double stability_epsilon_m;
} pgpr_eiia_config;

PIPEGPR_API void pgpr_eiia_config_defaults(pgpr_eiia_config* cfg);

typedef struct pgpr_estimate pgpr_estimate;

PIPEGPR_API pgpr_status pgpr_eiia_run(const pgpr_points* points,
                                      const pgpr_eiia_config* cfg,
                                      pgpr_estimate** out);
PIPEGPR_API void pgpr_estimate_free(pgpr_estimate* estimate);
PIPEGPR_API pgpr_status pgpr_estimate_ellipse(const pgpr_estimate* estimate,
                                              pgpr_ellipse* out);
PIPEGPR_API pgpr_status pgpr_estimate_angle_radius(const pgpr_estimate* estimate,
                                                   double* alpha_rad, double* radius_m,
                                                   int32_t* alpha_clamped);
PIPEGPR_API int32_t pgpr_estimate_iterations(const pgpr_estimate* estimate);
PIPEGPR_API int32_t pgpr_estimate_best_iteration(const pgpr_estimate* estimate);
PIPEGPR_API size_t pgpr_estimate_history_size(const pgpr_estimate* estimate);
PIPEGPR_API pgpr_status pgpr_estimate_history(const pgpr_estimate* estimate,
                                              size_t index,
                                              double* algebraic_residual,
                                              double* geometric_rms_m,
                                              double* signature_rms_m);
PIPEGPR_API size_t pgpr_estimate_inverted_count(const pgpr_estimate* estimate);
PIPEGPR_API pgpr_status pgpr_estimate_inverted_point(const pgpr_estimate* estimate,
                                                     size_t index, double* x,
                                                     double* y);

/* RMS distance of the inverted points to the returned ellipse. */
PIPEGPR_API pgpr_status pgpr_estimate_final_rms(const pgpr_estimate* estimate,
                                                double* geometric_rms_m);
PIPEGPR_API pgpr_status pgpr_estimate_flags(const pgpr_estimate* estimate,
                                            int32_t* alpha_clamped,
                                            int32_t* residual_nonmonotone,
                                            int32_t* bearing_tie);

/* Fills candidate bearings and the chosen one from the detecting direction
 * and a map bearing; mutates the estimate. */
PIPEGPR_API pgpr_status pgpr_estimate_resolve_bearing(pgpr_estimate* estimate,
                                                      double detecting_bearing_deg,
                                                      double map_bearing_deg);

/* Fails with PGPR_ERR_INVALID_ARGUMENT until a bearing was resolved. */
PIPEGPR_API pgpr_status pgpr_estimate_bearings(const pgpr_estimate* estimate,
                                               double* candidate0_deg,
                                               double* candidate1_deg,
                                               double* chosen_deg, int32_t* tie);

PIPEGPR_API pgpr_status pgpr_derive_angle_radius(const pgpr_ellipse* ellipse,
                                                 double* alpha_rad, double* radius_m,
                                                 int32_t* alpha_clamped);

PIPEGPR_API pgpr_status pgpr_disambiguate_bearing(double detecting_bearing_deg,
                                                  double alpha_rad,
                                                  double map_bearing_deg,
                                                  double* candidate0_deg,
                                                  double* candidate1_deg,
                                                  double* chosen_deg, int32_t* tie);

/* ---------------- pipeline maps ---------------- */

typedef struct pgpr_map pgpr_map;

PIPEGPR_API pgpr_status pgpr_map_load(const char* path, pgpr_map** out);
PIPEGPR_API pgpr_status pgpr_map_save(const pgpr_map* map, const char* path);
PIPEGPR_API void pgpr_map_free(pgpr_map* map);
PIPEGPR_API size_t pgpr_map_segment_count(const pgpr_map* map);

/* radius_m receives NaN when the segment has no recorded radius. */
PIPEGPR_API pgpr_status pgpr_map_segment(const pgpr_map* map, size_t index,
                                         char* id_buf, size_t id_buf_size,
                                         double* start_x, double* start_y,
                                         double* end_x, double* end_y,
                                         double* radius_m);

PIPEGPR_API pgpr_status pgpr_map_bearing_near(const pgpr_map* map, double x, double y,
                                              char* id_buf, size_t id_buf_size,
                                              double* bearing_deg, int32_t* tie);

/* Non-destructive revision: the segment pivots about its point nearest the
 * survey position onto the chosen bearing; length preserved, radius updated.
 * chosen_bearing_deg and radius_m come from a resolved estimate. */
PIPEGPR_API pgpr_status pgpr_map_revise(const pgpr_map* map, const char* segment_id,
                                        double chosen_bearing_deg, double radius_m,
                                        double survey_x, double survey_y,
                                        pgpr_map** out);

#ifdef __cplusplus
}
#endif

#endif /* PIPEGPR_H */

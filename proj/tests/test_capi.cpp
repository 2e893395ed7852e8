// Exercises the shared-library surface end to end: geometry and fitting
// calls, scene rendering, extraction, inversion, bearing resolution and map
// revision, plus the error-reporting contract.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <pipegpr/pipegpr.h>

namespace {

constexpr double kPi = std::numbers::pi;

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const char* name) : path(name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("conic and ellipse conversions through the C API") {
  const pgpr_conic conic{1.0, 0.0, 4.0, 0.0, -16.0, 12.0};
  pgpr_ellipse e{};
  REQUIRE(pgpr_conic_to_ellipse(&conic, &e) == PGPR_OK);
  CHECK(e.center_y == doctest::Approx(2.0));
  CHECK(e.semi_axis_x == doctest::Approx(2.0));
  CHECK(e.semi_axis_y == doctest::Approx(1.0));

  pgpr_conic back{};
  REQUIRE(pgpr_ellipse_to_conic(&e, &back) == PGPR_OK);
  CHECK(4.0 * back.a * back.c == doctest::Approx(1.0).epsilon(1e-12));

  const pgpr_conic hyperbola{1.0, 0.0, -1.0, 0.0, 0.0, -1.0};
  pgpr_ellipse unused{};
  CHECK(pgpr_conic_to_ellipse(&hyperbola, &unused) == PGPR_ERR_DEGENERATE_CONIC);
  CHECK(std::strlen(pgpr_last_error()) > 0);

  CHECK(pgpr_conic_to_ellipse(nullptr, &unused) == PGPR_ERR_INVALID_ARGUMENT);
}

TEST_CASE("projection and rotation through the C API") {
  const pgpr_ellipse e{0.0, 2.0, 1.0, 0.5};
  double qx = 0, qy = 0, dist = 0, angle = 0;
  REQUIRE(pgpr_project_point(&e, 0.0, 0.0, &qx, &qy, &dist, &angle) == PGPR_OK);
  CHECK(qy == doctest::Approx(1.5));
  CHECK(dist == doctest::Approx(1.5));
  CHECK(angle == doctest::Approx(0.0));

  CHECK(pgpr_project_point(&e, 0.0, 2.0, &qx, &qy, &dist, &angle) ==
        PGPR_ERR_POINT_INSIDE_ELLIPSE);

  double rx = 0, ry = 0;
  REQUIRE(pgpr_rotate_signature_point(0.0, 1.0, kPi / 6.0, &rx, &ry) == PGPR_OK);
  CHECK(rx == doctest::Approx(-0.5));
  CHECK(ry == doctest::Approx(std::sqrt(3.0) / 2.0));
  CHECK(pgpr_rotate_signature_point(0.0, 1.0, kPi, &rx, &ry) == PGPR_ERR_INVALID_ANGLE);

  double depth = 0;
  REQUIRE(pgpr_depth_of_sample(100.0, 0.2, 9.0, &depth) == PGPR_OK);
  CHECK(depth == doctest::Approx(0.999333).epsilon(1e-6));
}

TEST_CASE("ellipse and hyperbola fits through the C API") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 30; ++i) {
    const double phi = 2.0 * kPi * i / 30;
    xs.push_back(0.0 + 1.0 * std::cos(phi));
    ys.push_back(2.0 + 0.5 * std::sin(phi));
  }
  pgpr_conic conic{};
  pgpr_ellipse ellipse{};
  double alg = 0, rms = 0;
  REQUIRE(pgpr_fit_ellipse(xs.data(), ys.data(), xs.size(), &conic, &ellipse, &alg,
                           &rms) == PGPR_OK);
  CHECK(ellipse.semi_axis_x == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ellipse.semi_axis_y == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(alg < 1e-10);

  double sum = 0;
  REQUIRE(pgpr_algebraic_distance_sum(&conic, xs.data(), ys.data(), xs.size(), &sum) ==
          PGPR_OK);
  CHECK(sum == doctest::Approx(alg));
  REQUIRE(pgpr_geometric_rms(&ellipse, xs.data(), ys.data(), xs.size(), &rms) ==
          PGPR_OK);
  CHECK(rms < 1e-7);

  CHECK(pgpr_fit_ellipse(xs.data(), ys.data(), 5, &conic, &ellipse, &alg, &rms) ==
        PGPR_ERR_DEGENERATE_INPUT);

  std::vector<double> hx, hy;
  for (int i = 0; i < 30; ++i) {
    const double x = -0.29 + 0.02 * i;
    hx.push_back(x);
    hy.push_back(std::hypot(x, 1.5) - 0.3);
  }
  double x0 = 0, y0 = 0, r = 0, residual = 0;
  REQUIRE(pgpr_fit_hyperbola(hx.data(), hy.data(), hx.size(), &x0, &y0, &r,
                             &residual) == PGPR_OK);
  CHECK(x0 == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(y0 == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(r == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("scene to estimate pipeline through the C API") {
  pgpr_scene scene{};
  pgpr_scene_defaults(&scene);
  scene.radius_m = 0.3;
  scene.depth_to_center_m = 1.0;
  scene.obliquity_rad = 60.0 * kPi / 180.0;
  scene.apex_x_m = 1.6;
  scene.scan_length_m = 3.2;
  scene.signature_thickness = 201;

  pgpr_ellipse cross{};
  REQUIRE(pgpr_scene_cross_section(&scene, &cross) == PGPR_OK);
  CHECK(cross.semi_axis_y == doctest::Approx(0.3));
  CHECK(cross.semi_axis_x == doctest::Approx(0.3 / std::sin(scene.obliquity_rad)));

  double apex_depth = 0;
  REQUIRE(pgpr_scene_signature_depth(&scene, scene.apex_x_m, &apex_depth) == PGPR_OK);
  CHECK(apex_depth == doctest::Approx(0.7));

  // Survey geometry able to pin the cross section: a wide aperture and
  // sub-0.1mm depth sampling (one depth sample = 0.06 mm here).
  pgpr_grid_params params{};
  pgpr_grid_params_defaults(&params);
  params.sample_interval_ns = 2.0 * 6e-5 * 3.0 / 0.2998;
  params.rows = 32000;
  pgpr_grid* grid = nullptr;
  REQUIRE(pgpr_scene_render(&scene, &params, 7, &grid) == PGPR_OK);
  int32_t rows = 0, cols = 0;
  REQUIRE(pgpr_grid_shape(grid, &rows, &cols) == PGPR_OK);
  CHECK(rows == 32000);
  CHECK(cols == 321);

  pgpr_extract_config extract_cfg{};
  pgpr_extract_config_defaults(&extract_cfg);
  extract_cfg.point_count = 150;
  pgpr_extraction* extraction = nullptr;
  REQUIRE(pgpr_extract(grid, &extract_cfg, &extraction) == PGPR_OK);
  REQUIRE(pgpr_extraction_count(extraction) == 1);

  pgpr_points* points = nullptr;
  REQUIRE(pgpr_extraction_points(extraction, 0, &points) == PGPR_OK);
  CHECK(pgpr_points_count(points) == 150);
  double apex_x = 0;
  REQUIRE(pgpr_points_apex(points, &apex_x) == PGPR_OK);
  CHECK(apex_x == doctest::Approx(scene.apex_x_m).epsilon(0.02));

  pgpr_estimate* estimate = nullptr;
  REQUIRE(pgpr_eiia_run(points, nullptr, &estimate) == PGPR_OK);
  double alpha = 0, radius = 0;
  int32_t clamped = 0;
  REQUIRE(pgpr_estimate_angle_radius(estimate, &alpha, &radius, &clamped) == PGPR_OK);
  CHECK(std::abs(alpha - scene.obliquity_rad) * 180.0 / kPi < 2.0);
  CHECK(std::abs(radius - scene.radius_m) / scene.radius_m < 0.03);
  CHECK(pgpr_estimate_iterations(estimate) <= 10);
  CHECK(pgpr_estimate_history_size(estimate) ==
        static_cast<size_t>(pgpr_estimate_iterations(estimate)));
  CHECK(pgpr_estimate_inverted_count(estimate) == 150);
  double final_rms = 0;
  REQUIRE(pgpr_estimate_final_rms(estimate, &final_rms) == PGPR_OK);
  CHECK(final_rms < 0.03);

  // Bearing workflow: detecting direction 80 deg, stale map says 130 deg.
  double c0 = 0, c1 = 0, chosen = 0;
  int32_t tie = 0;
  CHECK(pgpr_estimate_bearings(estimate, &c0, &c1, &chosen, &tie) ==
        PGPR_ERR_INVALID_ARGUMENT);
  REQUIRE(pgpr_estimate_resolve_bearing(estimate, 80.0, 130.0) == PGPR_OK);
  REQUIRE(pgpr_estimate_bearings(estimate, &c0, &c1, &chosen, &tie) == PGPR_OK);
  CHECK(chosen == doctest::Approx(80.0 + alpha * 180.0 / kPi).epsilon(1e-6));

  pgpr_estimate_free(estimate);
  pgpr_points_free(points);
  pgpr_extraction_free(extraction);
  pgpr_grid_free(grid);
}

TEST_CASE("grid and points files through the C API") {
  TempDir dir("capi_io_tmp");
  pgpr_scene scene{};
  pgpr_scene_defaults(&scene);
  pgpr_grid_params params{};
  pgpr_grid_params_defaults(&params);

  REQUIRE(pgpr_scene_write(&scene, &params, 11, dir.path.c_str()) == PGPR_OK);
  CHECK(std::filesystem::exists(dir.path / "bscan.f32"));
  CHECK(std::filesystem::exists(dir.path / "bscan.json"));
  CHECK(std::filesystem::exists(dir.path / "truth.json"));
  CHECK(std::filesystem::exists(dir.path / "mask.f32"));

  pgpr_grid* grid = nullptr;
  REQUIRE(pgpr_grid_load((dir.path / "bscan.f32").c_str(),
                         (dir.path / "bscan.json").c_str(), &grid) == PGPR_OK);
  double spacing = 0;
  REQUIRE(pgpr_grid_meta(grid, &spacing, nullptr, nullptr) == PGPR_OK);
  CHECK(spacing == doctest::Approx(0.01));

  pgpr_grid* missing = nullptr;
  CHECK(pgpr_grid_load("no_such_file.f32", (dir.path / "bscan.json").c_str(),
                       &missing) == PGPR_ERR_IO);

  const std::vector<double> xs{0.0, 0.02, 0.04, 0.06, 0.08, 0.1};
  const std::vector<double> ys{1.2, 1.21, 1.23, 1.26, 1.3, 1.35};
  pgpr_points* points = nullptr;
  REQUIRE(pgpr_points_create(xs.data(), ys.data(), xs.size(), &points) == PGPR_OK);
  const auto points_path = dir.path / "points.json";
  REQUIRE(pgpr_points_save(points, points_path.c_str()) == PGPR_OK);

  pgpr_points* loaded = nullptr;
  REQUIRE(pgpr_points_load(points_path.c_str(), &loaded) == PGPR_OK);
  REQUIRE(pgpr_points_count(loaded) == xs.size());
  double x = 0, y = 0;
  REQUIRE(pgpr_points_get(loaded, 3, &x, &y) == PGPR_OK);
  CHECK(x == xs[3]);
  CHECK(y == ys[3]);

  pgpr_points_free(points);
  pgpr_points_free(loaded);
  pgpr_grid_free(grid);
}

TEST_CASE("map workflow through the C API") {
  TempDir dir("capi_map_tmp");
  const auto map_path = dir.path / "map.json";
  std::ofstream(map_path) << R"({"segments": [
    {"id": "p1", "start": [0, 0], "end": [10, 0], "radius_m": null},
    {"id": "p2", "start": [-5, 2], "end": [-5, 12], "radius_m": 0.2}
  ]})";

  pgpr_map* map = nullptr;
  REQUIRE(pgpr_map_load(map_path.c_str(), &map) == PGPR_OK);
  CHECK(pgpr_map_segment_count(map) == 2);

  char id[16];
  double bearing = 0;
  int32_t tie = 0;
  REQUIRE(pgpr_map_bearing_near(map, 5.0, 1.0, id, sizeof id, &bearing, &tie) ==
          PGPR_OK);
  CHECK(std::string(id) == "p1");
  CHECK(bearing == doctest::Approx(90.0));

  pgpr_map* revised = nullptr;
  REQUIRE(pgpr_map_revise(map, "p1", 100.0, 0.25, 4.0, 0.5, &revised) == PGPR_OK);
  double sx = 0, sy = 0, ex = 0, ey = 0, radius = 0;
  REQUIRE(pgpr_map_segment(revised, 0, id, sizeof id, &sx, &sy, &ex, &ey, &radius) ==
          PGPR_OK);
  CHECK(std::hypot(ex - sx, ey - sy) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(radius == 0.25);

  pgpr_map* missing = nullptr;
  CHECK(pgpr_map_revise(map, "zzz", 100.0, 0.25, 4.0, 0.5, &missing) ==
        PGPR_ERR_UNKNOWN_SEGMENT);

  const auto out_path = dir.path / "revised.json";
  REQUIRE(pgpr_map_save(revised, out_path.c_str()) == PGPR_OK);
  CHECK(std::filesystem::exists(out_path));

  pgpr_map_free(revised);
  pgpr_map_free(map);
}

TEST_CASE("status names") {
  CHECK(std::string(pgpr_status_name(PGPR_OK)) == "ok");
  CHECK(std::string(pgpr_status_name(PGPR_ERR_FIT_FAILED)) == "fit_failed");
  CHECK(std::string(pgpr_status_name(PGPR_ERR_FORMAT)) == "format_error");
}

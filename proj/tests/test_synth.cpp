#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "core/eiia.hpp"
#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/synth.hpp"
#include "oracles.hpp"

using namespace pipegpr;

TEST_CASE("cross_section_of geometry") {
  synth::PipeScene circle;
  circle.radius = 0.3;
  circle.obliquity = std::numbers::pi / 2.0;
  const auto c = synth::cross_section_of(circle);
  CHECK(c.a == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(c.b == doctest::Approx(0.3).epsilon(1e-12));

  synth::PipeScene oblique;
  oblique.radius = 0.5;
  oblique.depth_to_center = 2.0;
  oblique.obliquity = std::numbers::pi / 6.0;
  const auto e = synth::cross_section_of(oblique);
  CHECK(e.a == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.b == doctest::Approx(0.5).epsilon(1e-12));

  // derive_angle_and_radius inverts the construction exactly.
  const auto ar = eiia::derive_angle_and_radius(e);
  CHECK(ar.alpha == doctest::Approx(oblique.obliquity).epsilon(1e-12));
  CHECK(ar.radius == doctest::Approx(oblique.radius).epsilon(1e-12));
}

TEST_CASE("signature_depth at the apex and in the circular case") {
  synth::PipeScene scene;
  scene.radius = 0.3;
  scene.depth_to_center = 1.5;
  scene.obliquity = std::numbers::pi / 2.0;
  scene.apex_x = 1.0;

  CHECK(synth::signature_depth(scene, scene.apex_x) ==
        doctest::Approx(1.2).epsilon(1e-12));

  for (int i = 0; i < 100; ++i) {
    const double x = 0.02 * i;
    const double expected =
        oracles::circle_signature_depth(x, scene.apex_x, scene.depth_to_center,
                                        scene.radius);
    CHECK(std::abs(synth::signature_depth(scene, x) - expected) < 1e-9);
  }
}

TEST_CASE("signature_depth is symmetric and grows away from the apex") {
  synth::PipeScene scene;
  scene.radius = 0.4;
  scene.depth_to_center = 1.8;
  scene.obliquity = std::numbers::pi / 3.0;
  scene.apex_x = 1.0;

  double prev = synth::signature_depth(scene, scene.apex_x);
  for (int i = 1; i <= 80; ++i) {
    const double delta = 0.01 * i;
    const double right = synth::signature_depth(scene, scene.apex_x + delta);
    const double left = synth::signature_depth(scene, scene.apex_x - delta);
    CHECK(right == doctest::Approx(left).epsilon(1e-12));
    CHECK(right > prev);
    prev = right;
  }
}

TEST_CASE("render with thickness 1 paints one run per column") {
  synth::PipeScene scene;
  scene.signature_thickness = 1;
  const auto rendered = synth::render(scene, {}, 1);
  for (int c = 0; c < rendered.grid.cols; ++c) {
    int runs = 0;
    bool inside = false;
    for (int r = 0; r < rendered.grid.rows; ++r) {
      const bool fg = rendered.mask.at(r, c);
      if (fg && !inside) ++runs;
      inside = fg;
    }
    CHECK(runs == 1);
  }
}

TEST_CASE("render is deterministic for a fixed seed") {
  synth::PipeScene scene;
  scene.noise_salt_fraction = 0.01;
  const auto a = synth::render(scene, {}, 42);
  const auto b = synth::render(scene, {}, 42);
  CHECK(a.grid.amplitudes == b.grid.amplitudes);
  CHECK(a.mask.mask == b.mask.mask);

  const auto c = synth::render(scene, {}, 43);
  CHECK(a.grid.amplitudes != c.grid.amplitudes);
}

TEST_CASE("render rejects scenes below the grid") {
  synth::PipeScene scene;
  scene.depth_to_center = 5.0;  // apex at 4.7 m, grid reaches ~3 m
  CHECK_THROWS_AS(synth::render(scene, {}, 1), SceneOutOfGrid);
}

TEST_CASE("scene validation") {
  synth::PipeScene scene;
  scene.obliquity = 0.0;
  CHECK_THROWS_AS(synth::validate(scene), DegenerateInput);
  scene.obliquity = 2.0;  // > pi/2
  CHECK_THROWS_AS(synth::validate(scene), DegenerateInput);
  scene = {};
  scene.depth_to_center = 0.2;  // <= radius
  CHECK_THROWS_AS(synth::validate(scene), DegenerateInput);
  scene = {};
  scene.noise_salt_fraction = 1.5;
  CHECK_THROWS_AS(synth::validate(scene), DegenerateInput);
}

TEST_CASE("write_scene emits a loadable file set") {
  const auto dir = std::filesystem::path("synth_io_tmp");
  std::filesystem::remove_all(dir);

  synth::PipeScene scene;
  scene.radius = 0.3;
  scene.depth_to_center = 1.5;
  scene.obliquity = std::numbers::pi / 3.0;
  scene.noise_salt_fraction = 0.002;

  const auto files = io::write_scene(scene, {}, 7, dir);
  const auto grid = io::load_grid(files.data, files.sidecar);
  CHECK(grid.ground_truth == "truth.json");

  const auto truth = io::load_truth(files.truth);
  CHECK(truth.scene.radius == scene.radius);
  CHECK(truth.scene.obliquity == scene.obliquity);
  CHECK(truth.seed == 7);
  CHECK(truth.signature.size() == static_cast<size_t>(grid.cols));

  const auto mask = io::load_mask(truth.mask_file, grid.rows, grid.cols);
  const auto rendered = synth::render(scene, {}, 7);
  CHECK(mask.mask == rendered.mask.mask);
  CHECK(grid.amplitudes == rendered.grid.amplitudes);

  // Analytic signature in the sidecar matches the forward model.
  for (size_t i = 0; i < truth.signature.size(); ++i) {
    CHECK(truth.signature[i].y ==
          doctest::Approx(synth::signature_depth(scene, truth.signature[i].x))
              .epsilon(1e-12));
  }
  std::filesystem::remove_all(dir);
}

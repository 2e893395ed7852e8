#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/eiia.hpp"
#include "core/errors.hpp"
#include "oracles.hpp"

using namespace pipegpr;
using geometry::Ellipse;
using geometry::Point2;

namespace {

// Analytic forward model: the recorded depth at x is the shortest distance
// from the surface point (x, 0) to the cross-section ellipse.
eiia::SignaturePointSet forward_points(const Ellipse& cross, int count = 30,
                                       double spacing = 0.02) {
  std::vector<Point2> pts;
  const double start = cross.center_x - spacing * (count - 1) / 2.0;
  for (int i = 0; i < count; ++i) {
    const double x = start + spacing * i;
    pts.push_back({x, geometry::boundary_distance(cross, {x, 0.0})});
  }
  return eiia::make_signature_point_set(std::move(pts));
}

}  // namespace

TEST_CASE("run_eiia inverts an oblique elliptical cross section") {
  const Ellipse truth{0.0, 1.5, 0.6, 0.3};
  const auto est = eiia::run_eiia(forward_points(truth));

  CHECK(est.iterations_used <= 10);
  CHECK(std::abs(est.ellipse.a - truth.a) / truth.a < 0.02);
  CHECK(std::abs(est.ellipse.b - truth.b) / truth.b < 0.02);
  CHECK(std::abs(est.radius - truth.b) / truth.b < 0.02);
}

TEST_CASE("run_eiia inverts a circular cross section") {
  const Ellipse truth{0.0, 1.5, 0.3, 0.3};
  const auto est = eiia::run_eiia(forward_points(truth));
  const double ratio = est.ellipse.a / est.ellipse.b;
  CHECK(ratio > 0.97);
  CHECK(ratio < 1.03);
}

TEST_CASE("run_eiia oracle sweep recovers angle and radius") {
  for (const double alpha_deg : {45.0, 60.0, 75.0, 90.0}) {
    for (const double r : {0.2, 0.3, 0.4}) {
      for (const double depth : {1.0, 1.5, 2.0}) {
        const double alpha = alpha_deg * std::numbers::pi / 180.0;
        const Ellipse cross{0.0, depth, r / std::sin(alpha), r};
        const auto est = eiia::run_eiia(forward_points(cross));
        const double alpha_hat_deg = est.alpha * 180.0 / std::numbers::pi;
        INFO("alpha=", alpha_deg, " r=", r, " depth=", depth,
             " -> alpha_hat=", alpha_hat_deg, " r_hat=", est.radius);
        CHECK(std::abs(alpha_hat_deg - alpha_deg) <= 2.0);
        CHECK(std::abs(est.radius - r) / r <= 0.03);
        CHECK(est.iterations_used <= 10);
      }
    }
  }
}

TEST_CASE("run_eiia is at a fixed point on consistent data") {
  const Ellipse truth{0.0, 1.5, 0.5, 0.25};
  // Points whose rotation lands exactly on the ellipse: y is the pivot
  // distance and the cumulative angle the projection direction.
  eiia::SignaturePointSet pts;
  for (int i = 0; i < 20; ++i) {
    const double x = -0.19 + 0.02 * i;
    const auto proj = geometry::project_point(truth, {x, 0.0});
    pts.points.push_back({x, proj.distance});
    pts.cumulative_angles.push_back(proj.angle_from_vertical);
  }

  eiia::EiiaConfig cfg;
  cfg.geometric_rms_threshold = 1e-13;  // force a second iteration
  cfg.stability_epsilon = 1e-300;
  cfg.max_iterations = 3;
  const auto est = eiia::run_eiia(pts, cfg);
  REQUIRE(est.residual_history.size() >= 2);
  CHECK(est.residual_history[0].geometric_rms < 1e-9);
  CHECK(est.residual_history[1].geometric_rms <=
        est.residual_history[0].geometric_rms + 1e-12);
}

TEST_CASE("run_eiia returns the best recorded iterate") {
  const Ellipse truth{0.0, 1.8, 0.8, 0.25};
  const auto est = eiia::run_eiia(forward_points(truth));
  REQUIRE(!est.residual_history.empty());
  double min_rms = est.residual_history.front().geometric_rms;
  for (const auto& rec : est.residual_history) min_rms = std::min(min_rms, rec.geometric_rms);
  REQUIRE(est.best_iteration >= 1);
  CHECK(est.residual_history[est.best_iteration - 1].geometric_rms == min_rms);
}

TEST_CASE("run_eiia respects the iteration cap") {
  const Ellipse truth{0.0, 1.5, 0.6, 0.3};
  eiia::EiiaConfig cfg;
  cfg.max_iterations = 3;
  cfg.geometric_rms_threshold = 1e-13;
  cfg.stability_epsilon = 1e-300;
  const auto est = eiia::run_eiia(forward_points(truth), cfg);
  CHECK(est.iterations_used <= 3);
  CHECK(est.residual_history.size() == static_cast<size_t>(est.iterations_used));
}

TEST_CASE("run_eiia pivot distances are preserved in the inverted points") {
  const Ellipse truth{0.0, 1.5, 0.45, 0.3};
  const auto pts = forward_points(truth);
  const auto est = eiia::run_eiia(pts);
  REQUIRE(est.inverted_points.size() == pts.points.size());
  for (size_t i = 0; i < pts.points.size(); ++i) {
    const double d = std::hypot(est.inverted_points[i].x - pts.points[i].x,
                                est.inverted_points[i].y);
    CHECK(d == doctest::Approx(pts.points[i].y).epsilon(1e-12));
  }
}

TEST_CASE("run_eiia input validation") {
  eiia::SignaturePointSet empty;
  CHECK_THROWS_AS(eiia::run_eiia(empty), DegenerateInput);

  CHECK_THROWS_AS(
      eiia::make_signature_point_set({{0.0, 1.0}, {0.0, 1.1}}),  // duplicate x
      DegenerateInput);
  CHECK_THROWS_AS(
      eiia::make_signature_point_set({{0.0, 1.0}, {0.1, -0.5}}),  // y <= 0
      DegenerateInput);
}

TEST_CASE("derive_angle_and_radius") {
  const auto oblique = eiia::derive_angle_and_radius({0.0, 2.0, 1.0, 0.5});
  CHECK(oblique.alpha == doctest::Approx(std::numbers::pi / 6.0).epsilon(1e-12));
  CHECK(oblique.radius == 0.5);
  CHECK(!oblique.clamped);

  const auto circle = eiia::derive_angle_and_radius({0.0, 2.0, 0.3, 0.3});
  CHECK(circle.alpha == doctest::Approx(std::numbers::pi / 2.0));
  CHECK(circle.radius == 0.3);
  CHECK(!circle.clamped);

  const auto clamped = eiia::derive_angle_and_radius({0.0, 2.0, 0.29, 0.30});
  CHECK(clamped.alpha == doctest::Approx(std::numbers::pi / 2.0));
  CHECK(clamped.radius == 0.30);
  CHECK(clamped.clamped);
}

TEST_CASE("disambiguate_bearing") {
  const double deg60 = 60.0 * std::numbers::pi / 180.0;
  const auto pick = eiia::disambiguate_bearing(80.0, deg60, 130.0);
  CHECK(pick.candidates[0] == doctest::Approx(140.0));
  CHECK(pick.candidates[1] == doctest::Approx(20.0));
  CHECK(pick.chosen == doctest::Approx(140.0));
  CHECK(!pick.tie);

  const auto perp = eiia::disambiguate_bearing(30.0, std::numbers::pi / 2.0, 77.0);
  CHECK(perp.candidates[0] == doctest::Approx(120.0));
  CHECK(perp.candidates[1] == doctest::Approx(120.0));
  CHECK(perp.chosen == doctest::Approx(120.0));
  CHECK(!perp.tie);

  const double deg45 = 45.0 * std::numbers::pi / 180.0;
  const auto tie = eiia::disambiguate_bearing(0.0, deg45, 90.0);
  CHECK(tie.candidates[0] == doctest::Approx(45.0));
  CHECK(tie.candidates[1] == doctest::Approx(135.0));
  CHECK(tie.chosen == doctest::Approx(45.0));
  CHECK(tie.tie);
}

TEST_CASE("disambiguate_bearing treats map bearings modulo 180") {
  const double alpha = 0.4;
  for (double map = 0.0; map < 180.0; map += 17.0) {
    const auto a = eiia::disambiguate_bearing(72.0, alpha, map);
    const auto b = eiia::disambiguate_bearing(72.0, alpha, map + 180.0);
    CHECK(a.chosen == doctest::Approx(b.chosen));
  }
}

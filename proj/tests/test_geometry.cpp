#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "core/errors.hpp"
#include "core/geometry.hpp"
#include "oracles.hpp"

using namespace pipegpr;
using geometry::ConicCoeffs;
using geometry::Ellipse;
using geometry::Point2;

TEST_CASE("conic_to_ellipse recovers center and axes") {
  // Expansion of (x/2)^2 + (y - 2)^2 = 1 matched coefficient by coefficient.
  const Ellipse e = geometry::conic_to_ellipse({1.0, 0.0, 4.0, 0.0, -16.0, 12.0});
  CHECK(e.center_x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e.center_y == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e.a == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e.b == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("conic_to_ellipse unit circle") {
  const Ellipse e = geometry::conic_to_ellipse({1.0, 0.0, 1.0, 0.0, 0.0, -1.0});
  CHECK(e.center_x == doctest::Approx(0.0));
  CHECK(e.center_y == doctest::Approx(0.0));
  CHECK(e.a == doctest::Approx(1.0));
  CHECK(e.b == doctest::Approx(1.0));
}

TEST_CASE("conic_to_ellipse rejects degenerate conics") {
  CHECK_THROWS_AS(geometry::conic_to_ellipse({1.0, 0.0, -1.0, 0.0, 0.0, -1.0}),
                  DegenerateConic);
  CHECK_THROWS_AS(geometry::conic_to_ellipse({1.0, 0.0, 1.0, 0.0, 0.0, 1.0}),
                  DegenerateConic);
  CHECK_THROWS_AS(geometry::conic_to_ellipse({1.0, 0.5, 1.0, 0.0, 0.0, -1.0}),
                  DegenerateConic);
  CHECK_THROWS_AS(geometry::conic_to_ellipse({0.0, 0.0, 0.0, 0.0, 0.0, 0.0}),
                  DegenerateConic);
}

TEST_CASE("ellipse_to_conic matches the symbolic expansion") {
  const ConicCoeffs c = geometry::ellipse_to_conic({0.0, 2.0, 1.0, 0.5});
  // Proportional to (0.25, 0, 1, 0, -4, 3.75).
  const double k = c.C / 1.0;
  CHECK(c.A == doctest::Approx(0.25 * k).epsilon(1e-12));
  CHECK(c.B == 0.0);
  CHECK(c.D == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c.E == doctest::Approx(-4.0 * k).epsilon(1e-12));
  CHECK(c.F == doctest::Approx(3.75 * k).epsilon(1e-12));
  CHECK(4.0 * c.A * c.C == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ellipse_to_conic unit circle") {
  const ConicCoeffs c = geometry::ellipse_to_conic({0.0, 0.0, 1.0, 1.0});
  const double k = c.A;
  CHECK(c.C == doctest::Approx(k));
  CHECK(c.F == doctest::Approx(-k));
  CHECK(c.B == 0.0);
  CHECK(c.D == 0.0);
  CHECK(c.E == doctest::Approx(0.0));
}

TEST_CASE("conic/ellipse round-trip is stable") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  std::uniform_real_distribution<double> axis(0.1, 3.0);
  std::uniform_real_distribution<double> clearance(0.1, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double b = axis(rng);
    const Ellipse e{pos(rng), b + clearance(rng), axis(rng), b};
    const Ellipse back = geometry::conic_to_ellipse(geometry::ellipse_to_conic(e));
    CHECK(back.center_x == doctest::Approx(e.center_x).epsilon(1e-12));
    CHECK(back.center_y == doctest::Approx(e.center_y).epsilon(1e-12));
    CHECK(back.a == doctest::Approx(e.a).epsilon(1e-12));
    CHECK(back.b == doctest::Approx(e.b).epsilon(1e-12));
  }
}

TEST_CASE("project_point on the vertical axis of symmetry") {
  const auto r = geometry::project_point({0.0, 2.0, 1.0, 0.5}, {0.0, 0.0});
  CHECK(r.nearest.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.nearest.y == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(r.distance == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(r.angle_from_vertical == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("project_point radial on a circle") {
  const auto r = geometry::project_point({0.0, 3.0, 1.0, 1.0}, {4.0, 3.0});
  CHECK(r.nearest.x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.nearest.y == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.distance == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("project_point rejects interior and boundary queries") {
  const Ellipse e{0.0, 2.0, 1.0, 0.5};
  CHECK_THROWS_AS(geometry::project_point(e, {0.0, 2.0}), PointInsideEllipse);
  CHECK_THROWS_AS(geometry::project_point(e, {1.0, 2.0}), PointInsideEllipse);
  CHECK_THROWS_AS(geometry::project_point(e, {0.2, 2.1}), PointInsideEllipse);
}

TEST_CASE("projection angle sign follows the decreasing-x convention") {
  const Ellipse e{0.0, 2.0, 0.6, 0.3};
  // Query to the right of the center: nearest point lies left of it.
  const auto right = geometry::project_point(e, {1.0, 0.0});
  CHECK(right.angle_from_vertical > 0.0);
  const auto left = geometry::project_point(e, {-1.0, 0.0});
  CHECK(left.angle_from_vertical == doctest::Approx(-right.angle_from_vertical));
}

TEST_CASE("project_point matches the polygon oracle") {
  const oracles::BoundaryTable table(200000);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  int tested = 0;
  while (tested < 300) {
    const double b = 0.05 + 2.0 * unit(rng);
    const double ratio = 1.0 + 49.0 * unit(rng);  // a/b up to 50
    const Ellipse e{4.0 * unit(rng) - 2.0, 4.0 * unit(rng) - 2.0, b * ratio, b};
    const Point2 p{e.center_x + (unit(rng) - 0.5) * 8.0 * e.a,
                   e.center_y + (unit(rng) - 0.5) * 8.0 * e.a};
    const double nx = (p.x - e.center_x) / e.a;
    const double ny = (p.y - e.center_y) / e.b;
    if (nx * nx + ny * ny <= 1.1) continue;  // keep clearly external queries
    ++tested;

    const auto r = geometry::project_point(e, p);
    const double brute = table.min_distance(e, p);
    CHECK(r.distance <= brute + 1e-7);
    CHECK(std::abs(r.distance - brute) < 1e-5);

    // Nearest point satisfies the ellipse equation and the normal condition.
    const double level = std::pow((r.nearest.x - e.center_x) / e.a, 2) +
                         std::pow((r.nearest.y - e.center_y) / e.b, 2);
    CHECK(std::abs(level - 1.0) < 1e-9);
    CHECK(oracles::normality_residual(e, p, r.nearest) < 1e-7);
  }
}

TEST_CASE("boundary_distance handles interior queries") {
  const Ellipse e{0.0, 2.0, 1.0, 0.5};
  // Center: nearest boundary point is the minor-axis end.
  CHECK(geometry::boundary_distance(e, {0.0, 2.0}) == doctest::Approx(0.5).epsilon(1e-12));
  // On the major axis inside the evolute: off-axis nearest point.
  const oracles::BoundaryTable table(200000);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double b = 0.1 + unit(rng);
    const Ellipse el{unit(rng), 2.0 + unit(rng), b * (1.0 + 5.0 * unit(rng)), b};
    const Point2 p{el.center_x + (unit(rng) - 0.5) * 1.8 * el.a,
                   el.center_y + (unit(rng) - 0.5) * 1.8 * el.b};
    const double d = geometry::boundary_distance(el, p);
    CHECK(std::abs(d - table.min_distance(el, p)) < 1e-5);
  }
  // Interior points exactly on the major axis.
  CHECK(std::abs(geometry::boundary_distance(e, {0.3, 2.0}) -
                 table.min_distance(e, {0.3, 2.0})) < 1e-5);
  CHECK(std::abs(geometry::boundary_distance(e, {0.9, 2.0}) -
                 table.min_distance(e, {0.9, 2.0})) < 1e-5);
}

TEST_CASE("rotate_signature_point examples") {
  const Point2 same = geometry::rotate_signature_point(1.0, 1.5, 0.0);
  CHECK(same.x == 1.0);
  CHECK(same.y == 1.5);

  const Point2 r = geometry::rotate_signature_point(0.0, 1.0, std::numbers::pi / 6.0);
  CHECK(r.x == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(r.y == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("rotate_signature_point is an isometry about the pivot") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = 4.0 * unit(rng) - 2.0;
    const double y = 0.01 + 3.0 * unit(rng);
    const double angle = (unit(rng) - 0.5) * 0.99 * std::numbers::pi;
    const Point2 r = geometry::rotate_signature_point(x, y, angle);
    CHECK(std::hypot(r.x - x, r.y) == doctest::Approx(y).epsilon(1e-12));
  }
}

TEST_CASE("rotate_signature_point rejects angles at or beyond pi/2") {
  CHECK_THROWS_AS(geometry::rotate_signature_point(0.0, 1.0, std::numbers::pi / 2.0),
                  InvalidAngle);
  CHECK_THROWS_AS(geometry::rotate_signature_point(0.0, 1.0, -2.0), InvalidAngle);
}

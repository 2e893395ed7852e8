#include "core/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace pipegpr::fitting {

namespace {

struct Frame {
  double mx = 0.0;
  double my = 0.0;
  double scale = 1.0;
};

Frame normalize(std::span<const geometry::Point2> pts,
                std::vector<geometry::Point2>& out) {
  Frame f;
  for (const auto& p : pts) {
    f.mx += p.x;
    f.my += p.y;
  }
  const double n = static_cast<double>(pts.size());
  f.mx /= n;
  f.my /= n;
  double rms = 0.0;
  for (const auto& p : pts) {
    const double dx = p.x - f.mx;
    const double dy = p.y - f.my;
    rms += dx * dx + dy * dy;
  }
  rms = std::sqrt(rms / n);
  if (!(rms > 0.0)) throw DegenerateInput("all fit points coincide");
  f.scale = rms;
  out.resize(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    out[i] = {(pts[i].x - f.mx) / f.scale, (pts[i].y - f.my) / f.scale};
  }
  return f;
}

void check_preconditions(std::span<const geometry::Point2> pts) {
  if (pts.size() < 6) throw DegenerateInput("ellipse fit needs at least 6 points");

  std::vector<double> xs;
  xs.reserve(pts.size());
  for (const auto& p : pts) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  const size_t distinct = std::unique(xs.begin(), xs.end()) - xs.begin();
  if (distinct < 3) throw DegenerateInput("ellipse fit needs >= 3 distinct x values");

  // Collinearity: smallest eigenvalue of the centered 2x2 covariance.
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : pts) {
    const double dx = p.x - mx;
    const double dy = p.y - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  const double lmin = 0.5 * (tr - disc);
  const double lmax = 0.5 * (tr + disc);
  if (!(lmax > 0.0) || lmin <= 1e-12 * lmax)
    throw DegenerateInput("fit points are collinear");
}

}  // namespace

FitResult fit_ellipse(std::span<const geometry::Point2> points) {
  check_preconditions(points);

  std::vector<geometry::Point2> norm;
  const Frame frame = normalize(points, norm);

  // Scatter of the reduced design rows [x^2, y^2, x, y, 1]; B is pinned to
  // zero by the constraint and never enters the problem.
  Eigen::Matrix<double, 5, 5> scatter = Eigen::Matrix<double, 5, 5>::Zero();
  for (const auto& p : norm) {
    Eigen::Matrix<double, 5, 1> row;
    row << p.x * p.x, p.y * p.y, p.x, p.y, 1.0;
    scatter += row * row.transpose();
  }

  const Eigen::Matrix2d s11 = scatter.block<2, 2>(0, 0);
  const Eigen::Matrix<double, 2, 3> s12 = scatter.block<2, 3>(0, 2);
  const Eigen::Matrix3d s22 = scatter.block<3, 3>(2, 2);

  Eigen::FullPivLU<Eigen::Matrix3d> lu(s22);
  if (!lu.isInvertible()) throw FitFailed("rank-deficient scatter matrix");
  const Eigen::Matrix<double, 3, 2> tail = -lu.solve(s12.transpose());

  // Reduced pencil M w = lambda Q w with Q = [[0,2],[2,0]] encoding 4AC.
  const Eigen::Matrix2d m = s11 + s12 * tail;
  Eigen::Matrix2d g;
  g << 0.5 * m(1, 0), 0.5 * m(1, 1), 0.5 * m(0, 0), 0.5 * m(0, 1);

  const double tr = g.trace();
  const double det = g.determinant();
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  const double eigenvalues[2] = {0.5 * (tr - disc), 0.5 * (tr + disc)};

  bool found = false;
  double best_lambda = 0.0;
  geometry::ConicCoeffs best_conic;
  geometry::Ellipse best_ellipse;

  for (const double lambda : eigenvalues) {
    Eigen::Vector2d w(g(0, 1), lambda - g(0, 0));
    const Eigen::Vector2d alt(lambda - g(1, 1), g(1, 0));
    if (alt.norm() > w.norm()) w = alt;
    if (w.norm() == 0.0) w = Eigen::Vector2d(1.0, 1.0);

    const double cq = 4.0 * w(0) * w(1);
    if (!(cq > 0.0)) continue;
    w /= std::sqrt(cq);
    if (w(0) < 0.0) w = -w;
    const Eigen::Vector3d z = tail * w;

    // De-normalize: substitute x' = (x - mx)/s, y' = (y - my)/s.
    const double s = frame.scale;
    const double a = w(0) / (s * s);
    const double c = w(1) / (s * s);
    const double d = z(0) / s - 2.0 * w(0) * frame.mx / (s * s);
    const double e = z(1) / s - 2.0 * w(1) * frame.my / (s * s);
    const double f = w(0) * frame.mx * frame.mx / (s * s) +
                     w(1) * frame.my * frame.my / (s * s) -
                     z(0) * frame.mx / s - z(1) * frame.my / s + z(2);

    const double k = std::sqrt(4.0 * a * c);
    geometry::ConicCoeffs conic{a / k, 0.0, c / k, d / k, e / k, f / k};

    geometry::Ellipse ellipse;
    try {
      ellipse = geometry::conic_to_ellipse(conic);
    } catch (const DegenerateConic&) {
      continue;
    }

    // lambda equals the normalized-frame residual of this candidate.
    if (!found || lambda < best_lambda) {
      found = true;
      best_lambda = lambda;
      best_conic = conic;
      best_ellipse = ellipse;
    }
  }

  if (!found) throw FitFailed("constrained fit has no real-ellipse solution");

  FitResult result;
  result.conic = best_conic;
  result.ellipse = best_ellipse;
  result.algebraic_residual = algebraic_distance_sum(best_conic, points);
  result.geometric_rms = geometric_rms(best_ellipse, points);
  return result;
}

namespace {

// Levenberg-Marquardt over (x0, y0, log a, log b) on the signature
// residuals y_i - dist((x_i, 0), E). Stays put when the seed already has
// zero residual.
geometry::Ellipse refine_to_signature(std::span<const geometry::Point2> signature,
                                      const geometry::Ellipse& start) {
  Eigen::Vector4d q(start.center_x, start.center_y, std::log(start.a),
                    std::log(start.b));
  const auto ellipse_of = [](const Eigen::Vector4d& v) -> geometry::Ellipse {
    return {v(0), v(1), std::exp(v(2)), std::exp(v(3))};
  };
  const auto residual = [&](const geometry::Ellipse& e, size_t i) {
    return signature[i].y -
           geometry::boundary_distance(e, {signature[i].x, 0.0});
  };
  const auto cost_of = [&](const Eigen::Vector4d& v) {
    const geometry::Ellipse e = ellipse_of(v);
    double cost = 0.0;
    for (size_t i = 0; i < signature.size(); ++i) {
      const double r = residual(e, i);
      cost += r * r;
    }
    return cost;
  };

  double cost = cost_of(q);
  double mu = 1e-4;
  for (int iter = 0; iter < 100; ++iter) {
    const geometry::Ellipse e = ellipse_of(q);
    const double scale = std::max({std::abs(q(0)), std::abs(q(1)), e.a, e.b, 1e-3});

    Eigen::MatrixXd jac(signature.size(), 4);
    Eigen::VectorXd res(signature.size());
    for (size_t i = 0; i < signature.size(); ++i) res(i) = residual(e, i);
    for (int j = 0; j < 4; ++j) {
      const double hj = j < 2 ? 1e-6 * scale : 1e-6;
      Eigen::Vector4d plus = q, minus = q;
      plus(j) += hj;
      minus(j) -= hj;
      const geometry::Ellipse ep = ellipse_of(plus);
      const geometry::Ellipse em = ellipse_of(minus);
      for (size_t i = 0; i < signature.size(); ++i)
        jac(i, j) = (residual(ep, i) - residual(em, i)) / (2.0 * hj);
    }

    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const Eigen::Vector4d jte = jac.transpose() * res;
    if (jte.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + cost)) break;

    Eigen::Matrix4d damped = jtj;
    for (int j = 0; j < 4; ++j) damped(j, j) += mu * std::max(jtj(j, j), 1e-12);
    const Eigen::Vector4d step = damped.ldlt().solve(-jte);
    if (!step.allFinite()) break;

    const Eigen::Vector4d trial = q + step;
    if (std::abs(trial(2)) > 20.0 || std::abs(trial(3)) > 20.0) break;
    const double trial_cost = cost_of(trial);
    if (trial_cost < cost) {
      q = trial;
      const double improvement = cost - trial_cost;
      cost = trial_cost;
      mu = std::max(mu * 0.5, 1e-12);
      if (step.norm() <= 1e-12 * (1.0 + q.norm())) break;
      if (improvement <= 1e-16 * (1.0 + cost)) break;
    } else {
      mu *= 4.0;
      if (mu > 1e10) break;
    }
  }
  return ellipse_of(q);
}

// Circle through the arc's two endpoints and its shallowest point; a sane
// large-ellipse seed for a downward-opening arc.
bool arc_circumcircle(std::span<const geometry::Point2> points,
                      geometry::Ellipse* out) {
  size_t apex = 0;
  for (size_t i = 1; i < points.size(); ++i)
    if (points[i].y < points[apex].y) apex = i;
  const geometry::Point2 a = points.front();
  const geometry::Point2 b = points[apex];
  const geometry::Point2 c = points.back();

  const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  if (std::abs(d) < 1e-12) return false;
  const double a2 = a.x * a.x + a.y * a.y;
  const double b2 = b.x * b.x + b.y * b.y;
  const double c2 = c.x * c.x + c.y * c.y;
  const double ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
  const double uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
  const double r = std::hypot(a.x - ux, a.y - uy);
  if (!(r > 0.0) || !std::isfinite(r)) return false;
  *out = {ux, uy, r, r};
  return true;
}

}  // namespace

double signature_rms(const geometry::Ellipse& ellipse,
                     std::span<const geometry::Point2> signature) {
  if (signature.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : signature) {
    const double r = p.y - geometry::boundary_distance(ellipse, {p.x, 0.0});
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(signature.size()));
}

FitResult fit_cross_section(std::span<const geometry::Point2> signature,
                            std::span<const geometry::Point2> cloud,
                            const geometry::Ellipse* warm_start) {
  std::vector<geometry::Ellipse> seeds;
  std::string algebraic_failure = "no usable cross-section seed";
  try {
    seeds.push_back(fit_ellipse(cloud).ellipse);
  } catch (const FitFailed& e) {
    algebraic_failure = e.what();
  }
  if (warm_start) seeds.push_back(*warm_start);
  geometry::Ellipse circum;
  if (arc_circumcircle(cloud, &circum)) seeds.push_back(circum);
  if (seeds.empty()) throw FitFailed(algebraic_failure);

  bool found = false;
  geometry::Ellipse best;
  double best_rms = 0.0;
  for (const auto& seed : seeds) {
    if (!(seed.a > 0.0) || !(seed.b > 0.0)) continue;
    const geometry::Ellipse refined = refine_to_signature(signature, seed);
    if (!(refined.a > 0.0) || !(refined.b > 0.0) || !std::isfinite(refined.a) ||
        !std::isfinite(refined.b))
      continue;
    const double rms = signature_rms(refined, signature);
    if (!found || rms < best_rms) {
      found = true;
      best = refined;
      best_rms = rms;
    }
  }
  if (!found) throw FitFailed("signature refinement produced no valid ellipse");

  FitResult result;
  result.ellipse = best;
  result.conic = geometry::ellipse_to_conic(best);
  result.algebraic_residual = algebraic_distance_sum(result.conic, cloud);
  result.geometric_rms = geometric_rms(best, cloud);
  return result;
}

double algebraic_distance_sum(const geometry::ConicCoeffs& conic,
                              std::span<const geometry::Point2> points) {
  double sum = 0.0;
  for (const auto& p : points) {
    const double v = geometry::conic_value(conic, p.x, p.y);
    sum += v * v;
  }
  return sum;
}

double geometric_rms(const geometry::Ellipse& ellipse,
                     std::span<const geometry::Point2> points) {
  if (points.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : points) {
    const double d = geometry::boundary_distance(ellipse, p);
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(points.size()));
}

HyperbolaFit fit_hyperbola_baseline(std::span<const geometry::Point2> points) {
  const size_t n = points.size();
  if (n < 5) throw DegenerateInput("hyperbola fit needs at least 5 points");
  for (const auto& p : points) {
    if (!(p.y > 0.0)) throw DegenerateInput("hyperbola fit needs y > 0");
  }

  size_t apex = 0;
  for (size_t i = 1; i < n; ++i) {
    if (points[i].y < points[apex].y) apex = i;
  }

  constexpr double kInitialRadius = 0.1;
  Eigen::Vector3d params(points[apex].x, points[apex].y + kInitialRadius,
                         kInitialRadius);

  const auto cost_of = [&](const Eigen::Vector3d& q) {
    double cost = 0.0;
    for (const auto& p : points) {
      const double r = std::hypot(p.x - q(0), q(1));
      const double e = r - q(2) - p.y;
      cost += e * e;
    }
    return cost;
  };

  double cost = cost_of(params);
  double mu = 1e-3;
  bool converged = false;

  for (int iter = 0; iter < 200 && !converged; ++iter) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jte = Eigen::Vector3d::Zero();
    for (const auto& p : points) {
      const double r = std::hypot(p.x - params(0), params(1));
      const double e = r - params(2) - p.y;
      const Eigen::Vector3d jac(-(p.x - params(0)) / r, params(1) / r, -1.0);
      jtj += jac * jac.transpose();
      jte += jac * e;
    }
    if (jte.lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + cost)) {
      converged = true;
      break;
    }

    Eigen::Matrix3d damped = jtj;
    for (int i = 0; i < 3; ++i)
      damped(i, i) += mu * std::max(jtj(i, i), 1e-12);
    const Eigen::Vector3d step = damped.ldlt().solve(-jte);
    if (!step.allFinite()) throw FitFailed("hyperbola fit produced a non-finite step");

    const Eigen::Vector3d trial = params + step;
    const double trial_cost = trial(1) > 0.0 ? cost_of(trial)
                                             : std::numeric_limits<double>::infinity();
    if (trial_cost < cost) {
      const double improvement = cost - trial_cost;
      params = trial;
      cost = trial_cost;
      mu = std::max(mu * 0.5, 1e-12);
      if (step.norm() <= 1e-12 * (1.0 + params.norm())) converged = true;
      if (improvement <= 1e-11 * (1.0 + cost)) converged = true;
    } else {
      mu *= 4.0;
      // The damping only explodes once the iterate is pinned against a
      // stationary point; that is convergence, not failure.
      if (mu > 1e12) {
        converged = true;
        break;
      }
    }
  }

  if (!converged) throw FitFailed("hyperbola fit did not converge within 200 iterations");
  if (!(params(1) > params(2) && params(2) > 0.0))
    throw FitFailed("hyperbola fit violates y0 > r > 0");

  HyperbolaFit fit;
  fit.apex_x = params(0);
  fit.depth_to_center = params(1);
  fit.radius = params(2);
  fit.residual = cost;
  return fit;
}

}  // namespace pipegpr::fitting

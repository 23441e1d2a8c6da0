#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "patchflow/diagnostics.hpp"
#include "patchflow/field_ops.hpp"
#include "patchflow/geometry.hpp"
#include "patchflow/projection.hpp"

using namespace patchflow;

namespace {

ScalarField disk(const Grid2D& g, double r, double value, Point2 c = {}) {
  return ScalarField::from_function(g, [&](double x, double y) {
    return (x - c.x) * (x - c.x) + (y - c.y) * (y - c.y) <= r * r ? value : 0.0;
  });
}

// A few random overlapping blobs with values in [0, 1.6].
ScalarField random_blobs(const Grid2D& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-0.4, 0.4), rad(0.05, 0.25), val(0.2, 1.6);
  ScalarField f(g);
  const int n = 1 + static_cast<int>(rng() % 3);
  for (int b = 0; b < n; ++b) {
    const Point2 c{pos(rng), pos(rng)};
    const double r = rad(rng), v = val(rng);
    const ScalarField d = disk(g, r, v, c);
    for (std::size_t k = 0; k < f.size(); ++k) f.values[k] = std::max(f.values[k], d.values[k]);
  }
  return f;
}

}  // namespace

TEST_CASE("c_transform trivial cases") {
  const Grid2D g = Grid2D::centered_box(32, 1.0);
  const ScalarField z = c_transform(ScalarField(g), 0.1);
  CHECK(lp_norm(z, Norm::linf) == 0.0);
  const ScalarField k = c_transform(ScalarField(g, 2.5), 0.1);
  for (double v : k.values) CHECK(v == 2.5);
  CHECK_THROWS_AS(c_transform(ScalarField(g, NAN), 0.1), Error);
}

TEST_CASE("c_transform of a quadratic section matches brute force and the closed form") {
  const double tau = 0.5;
  const Grid2D g = Grid2D::centered_box(64, 1.0);
  const auto p = ScalarField::from_function(g, [&](double x, double) { return x * x / (2 * tau); });
  const ScalarField ct = c_transform(p, tau);
  const ScalarField bf = brute_force_c_transform(p, tau);
  double err = 0.0;
  for (std::size_t k = 0; k < ct.size(); ++k) err = std::max(err, std::fabs(ct.values[k] - bf.values[k]));
  CHECK(err <= 1e-12);
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x(i);
    if (std::fabs(x) > 0.5) continue;
    CHECK(std::fabs(ct.at(i, 7) - x * x / (4 * tau)) <= g.h * g.h / (4 * tau) + 1e-15);
  }
}

TEST_CASE("c_transform is below p and below every sampled cost") {
  const Grid2D g = Grid2D::centered_box(16, 1.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScalarField p(g);
  for (double& v : p.values) v = u(rng);
  const double tau = 0.05;
  const ScalarField ct = c_transform(p, tau);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      CHECK(ct.at(i, j) <= p.at(i, j));
      for (int q = 0; q < g.ny; ++q)
        for (int r = 0; r < g.nx; ++r) {
          const double dx = g.wrap_dx(g.x(i) - g.x(r)), dy = g.wrap_dy(g.y(j) - g.y(q));
          CHECK(ct.at(i, j) <= p.at(r, q) + (dx * dx + dy * dy) / (2 * tau) + 1e-14);
        }
    }
}

TEST_CASE("pushforward_density") {
  const Grid2D g = Grid2D::centered_box(32, 1.0);
  std::mt19937_64 rng(8);
  const ScalarField mu = random_blobs(g, rng);
  const ScalarField same = pushforward_density(mu, ScalarField(g, 0.3), 0.01);
  CHECK(same.values == mu.values);

  // Single-cell splat along a linear potential: displacement -tau * (gx, gy).
  const double tau = 0.01, gx = 0.9, gy = -2.2;
  ScalarField point(g);
  point.at(10, 20) = 3.0;
  const auto lin = ScalarField::from_function(g, [&](double x, double y) { return gx * x + gy * y; });
  const ScalarField out = pushforward_density(point, lin, tau);
  const double u = -tau * gx / g.h, w = -tau * gy / g.h;  // in cells: u in (-1, 0), w in (0, 1)
  const double fx = u - std::floor(u), fy = w - std::floor(w);
  const int i0 = 10 + static_cast<int>(std::floor(u)), j0 = 20 + static_cast<int>(std::floor(w));
  CHECK(out.at(i0, j0) == doctest::Approx(3.0 * (1 - fx) * (1 - fy)));
  CHECK(out.at(i0 + 1, j0) == doctest::Approx(3.0 * fx * (1 - fy)));
  CHECK(out.at(i0, j0 + 1) == doctest::Approx(3.0 * (1 - fx) * fy));
  CHECK(out.at(i0 + 1, j0 + 1) == doctest::Approx(3.0 * fx * fy));

  for (int trial = 0; trial < 10; ++trial) {
    const ScalarField m = random_blobs(g, rng);
    ScalarField pot(g);
    std::uniform_real_distribution<double> v(0.0, 0.01);
    for (double& x : pot.values) x = v(rng);
    const ScalarField o = pushforward_density(m, pot, 0.05);
    CHECK(std::fabs(integrate(o) - integrate(m)) <= 1e-12 * integrate(m));
  }

  const auto steep = ScalarField::from_function(g, [](double x, double) { return 1e4 * x; });
  CHECK_THROWS_AS(pushforward_density(point, steep, 0.01), Error);
}

TEST_CASE("dual_objective trivial values") {
  const Grid2D g = Grid2D::centered_box(32, 1.0);
  std::mt19937_64 rng(9);
  const ScalarField mu = random_blobs(g, rng);
  CHECK(dual_objective(ScalarField(g), mu, 0.01) == 0.0);
  const double K = 0.7;
  const double expected = K * integrate(mu) - K * g.length_x() * g.length_y();
  CHECK(dual_objective(ScalarField(g, K), mu, 0.01) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("dual_objective is locally maximal at the single-excess-cell maximizer") {
  // mu has mass m_c at one cell; the exact maximizer is p = h^2/(2 tau) at that
  // cell and 0 elsewhere, with value (m_c - h^2) h^2 / (2 tau).
  const Grid2D g = Grid2D::centered_box(16, 1.0);
  const double tau = 0.05, h2 = g.h * g.h;
  ScalarField mu(g);
  mu.at(8, 8) = 2.5;
  ScalarField star(g);
  star.at(8, 8) = h2 / (2 * tau);
  const double best = dual_objective(star, mu, tau);
  CHECK(best == doctest::Approx((2.5 * h2 - h2) * h2 / (2 * tau)).epsilon(1e-12));
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    ScalarField q = star;
    for (double& v : q.values) v = std::max(0.0, v + 0.2 * h2 / (2 * tau) * u(rng));
    CHECK(dual_objective(q, mu, tau) <= best + 1e-15);
  }
}

TEST_CASE("project leaves feasible input untouched") {
  const Grid2D g = Grid2D::centered_box(32, 1.0);
  std::mt19937_64 rng(12);
  ScalarField mu = random_blobs(g, rng);
  for (double& v : mu.values) v = std::min(v, 1.0);
  const ProjectionResult r = project(mu, ProjectionConfig{});
  CHECK(r.rho_next.values == mu.values);
  CHECK(lp_norm(r.pressure, Norm::linf) == 0.0);
  CHECK(r.iterations == 0);
}

TEST_CASE("project of a scaled disk is the mass-equivalent disk") {
  const Grid2D g = Grid2D::centered_box(128, 1.0);
  const ProjectionResult r = project(disk(g, 0.2, 1.2), ProjectionConfig{});
  CHECK(std::fabs(support_radius(r.rho_next, {}, 0.5) - 0.2 * std::sqrt(1.2)) <= g.h);
  CHECK(max_value(r.rho_next) <= 1.0);
}

TEST_CASE("project invariants on random instances") {
  const Grid2D g = Grid2D::centered_box(32, 1.0);
  std::mt19937_64 rng(13);
  ProjectionConfig cfg;
  cfg.tau = 1.0 / 64;
  for (int trial = 0; trial < 200; ++trial) {
    const ScalarField mu = random_blobs(g, rng);
    const ProjectionResult r = project(mu, cfg);
    const double m = integrate(mu);
    CHECK(std::fabs(integrate(r.rho_next) - m) <= cfg.tol_mass * m);
    CHECK(max_value(r.rho_next) <= 1.0 + cfg.tol_constraint);
    CHECK(min_value(r.rho_next) >= 0.0);
    CHECK(min_value(r.pressure) >= 0.0);
    double compl_ = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k)
      compl_ = std::max(compl_, r.pressure.values[k] * (1 - r.rho_next.values[k]));
    CHECK(compl_ <= cfg.tol_orth);
    for (std::size_t k = 1; k < r.trace.size(); ++k)
      CHECK(r.trace[k].dual_objective >= r.trace[k - 1].dual_objective - 1e-15);
  }
}

TEST_CASE("project is monotone for nested inputs") {
  const Grid2D g = Grid2D::centered_box(32, 1.0);
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ProjectionConfig cfg;
  cfg.tau = 1.0 / 64;
  for (int trial = 0; trial < 30; ++trial) {
    ScalarField rho2 = random_blobs(g, rng);
    for (double& v : rho2.values) v = std::min(v, 1.0);
    ScalarField rho1 = rho2;
    for (double& v : rho1.values) v *= u(rng) < 0.3 ? 0.0 : 1.0;
    const double lambda = 1.0 + 0.5 * u(rng);
    ScalarField mu1(g), mu2(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      mu1.values[k] = rho1.values[k] * (1.0 + lambda * u(rng) * cfg.tau * 20);
      mu2.values[k] = rho2.values[k] * (1.0 + lambda * cfg.tau * 20);
    }
    const ProjectionResult a = project(mu1, cfg), b = project(mu2, cfg);
    double overshoot = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
      overshoot += std::max(0.0, a.rho_next.values[k] - b.rho_next.values[k]) * g.cell_area();
    CHECK(overshoot <= 1e-6 * integrate(mu1));
  }
}

TEST_CASE("project pressures are fixed points of the c-transform at simulation scale") {
  const Grid2D g = Grid2D::centered_box(128, 1.0);
  ProjectionConfig cfg;
  const ScalarField mu = ScalarField::from_function(g, [&](double x, double y) {
    return x * x + y * y < 0.09 ? 1.0 + 1.5 * cfg.tau : 0.0;
  });
  const ProjectionResult r = project(mu, cfg);
  REQUIRE(max_value(r.pressure) > 0.0);
  const ScalarField once = c_transform(r.pressure, cfg.tau);
  const ScalarField twice = c_transform(once, cfg.tau);
  for (std::size_t k = 0; k < twice.size(); ++k) {
    CHECK(std::fabs(once.values[k] - r.pressure.values[k]) <= 1e-10);
    CHECK(std::fabs(twice.values[k] - r.pressure.values[k]) <= 1e-10);
  }
}

TEST_CASE("project matches the 1-D oracle on y-constant data") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 5; ++trial) {
    const int nx = 256;
    const double h = 1.0 / nx;
    const std::vector<double> mu = random_profile(rng(), nx);
    double mass = 0.0;
    for (double v : mu) mass += v;
    if (mass == 0.0) continue;
    const std::vector<double> ref = oracle_project_1d(mu, h);
    const ProjectionResult r = project(extrude_profile(mu, h), ProjectionConfig{});
    double l1 = 0.0;
    for (int i = 0; i < nx; ++i) l1 += std::fabs(r.rho_next.at(i, 3) - ref[i]) * h;
    CHECK(l1 <= 1e-3);
  }
}

TEST_CASE("project errors") {
  const Grid2D g = Grid2D::centered_box(16, 1.0);
  try {
    project(ScalarField(g, 1.5), ProjectionConfig{});
    FAIL("expected infeasible mass");
  } catch (const ProjectionError& e) {
    CHECK(e.kind() == ProjectionErrorKind::infeasible_mass);
  }
  ScalarField neg(g);
  neg.values[0] = -1;
  CHECK_THROWS_AS(project(neg, ProjectionConfig{}), ProjectionError);
  ProjectionConfig bad;
  bad.tol_mass = 0.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ProjectionConfig{};
  bad.max_iterations = 0;
  CHECK_THROWS_AS(bad.validate(), Error);

  ProjectionConfig one;
  one.max_iterations = 1;
  one.tau = 1.0 / 64;
  const Grid2D gg = Grid2D::centered_box(32, 1.0);
  try {
    project(disk(gg, 0.3, 1.8), one);
    FAIL("expected non-convergence");
  } catch (const ProjectionError& e) {
    CHECK(e.kind() == ProjectionErrorKind::not_converged);
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("variational inequality") {
  const Grid2D g = Grid2D::centered_box(64, 1.0);
  ProjectionConfig cfg;
  const ScalarField rho_prev = disk(g, 0.2, 1.0);
  const ScalarField n_prev(g, 1.5);
  ScalarField mu(g);
  for (std::size_t k = 0; k < mu.size(); ++k) mu.values[k] = rho_prev.values[k] * (1 + cfg.tau * n_prev.values[k]);
  const ProjectionResult r = project(mu, cfg);

  const VariationalCheck zero = check_variational_inequality(r, mu, rho_prev, n_prev, cfg.tau, ScalarField(g));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);

  const VariationalCheck self = check_variational_inequality(r, mu, rho_prev, n_prev, cfg.tau, r.pressure);
  const double grad2 = dirichlet_form(r.pressure, r.pressure);
  CHECK(self.lhs == doctest::Approx(grad2));
  CHECK(self.lhs <= self.rhs + 1e-3 * grad2);

  ScalarField small = rho_prev;
  for (double& v : small.values) v *= 0.5;
  const ProjectionResult inactive = project(small, cfg);
  ScalarField xi(g, 0.0);
  const VariationalCheck idle = check_variational_inequality(inactive, small, small, n_prev, cfg.tau, xi);
  CHECK(idle.lhs == 0.0);
  CHECK(idle.rhs >= 0.0);

  CHECK_THROWS_AS(check_variational_inequality(r, mu, rho_prev, n_prev, cfg.tau, ScalarField(g, 1.0)), Error);
  ScalarField negative(g);
  negative.values[0] = -1;
  CHECK_THROWS_AS(check_variational_inequality(r, mu, rho_prev, n_prev, cfg.tau, negative), Error);
}

TEST_CASE("projection trace CSV") {
  const Grid2D g = Grid2D::centered_box(32, 1.0);
  const ProjectionResult r = project(disk(g, 0.2, 1.3), ProjectionConfig{});
  std::ostringstream out;
  write_projection_trace(r, out);
  const std::string s = out.str();
  CHECK(s.rfind("iteration,dual_objective,residual\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(r.trace.size()) + 1);
}

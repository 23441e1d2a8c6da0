#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "patchflow/diagnostics.hpp"
#include "patchflow/field_ops.hpp"

using namespace patchflow;

namespace {

RunConfig small_config(double n0) {
  RunConfig c;
  c.grid = Grid2D::centered_box(64, 1.0);
  c.tau = 1.0 / 128;
  c.T = 0.25;
  c.initial_density.radius = 0.2;
  c.initial_nutrient.value = n0;
  c.nutrient.far_field = n0 > 0 ? n0 : 1.0;
  if (n0 == 0.0) c.nutrient.boundary_guard_tol = 1.0;
  c.nutrient.D = 1e-3;
  return c;
}

double l1_line(const std::vector<double>& a, const std::vector<double>& b, double h) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::fabs(a[k] - b[k]) * h;
  return s;
}

std::vector<double> indicator(int n, double h, double lo, double hi, double value) {
  std::vector<double> v(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double a = std::max(lo, i * h), b = std::min(hi, (i + 1) * h);
    if (b > a) v[i] = value * (b - a) / h;
  }
  return v;
}

}  // namespace

TEST_CASE("InvariantReport semantics and CSV") {
  InvariantReport r;
  r.add("a", 1.0, 1.0, 0.0, CheckKind::upper, "x");
  r.add("b", 1.1, 1.0, 0.05, CheckKind::upper, "x");
  r.add("c", 0.97, 1.0, 0.05, CheckKind::equality, "x");
  r.add("d", 5.0, 0.0, 0.0, CheckKind::info, "x");
  CHECK(r.find("a")->pass);
  CHECK_FALSE(r.find("b")->pass);
  CHECK(r.find("c")->pass);
  CHECK(r.find("d")->pass);
  CHECK_FALSE(r.all_pass());
  std::ostringstream out;
  r.write_csv(out);
  const std::string s = out.str();
  CHECK(s.rfind("name,measured,bound,tolerance,pass,anchor\n", 0) == 0);
  CHECK(s.find("b,1.1000000000000001,1,0.050000000000000003,fail,x\n") != std::string::npos);
  CHECK(s.find(",info,") != std::string::npos);
}

TEST_CASE("check_run on a run without nutrient") {
  const RunConfig c = small_config(0.0);
  const InvariantReport r = check_run(run(c), c);
  CHECK(r.all_pass());
  CHECK(r.find("mass_bound")->measured == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("check_run on a reference run passes and is deterministic") {
  const RunConfig c = small_config(1.5);
  const Trajectory t = run(c);
  const InvariantReport a = check_run(t, c), b = check_run(t, c);
  for (const auto& e : a.entries) {
    INFO(e.name << " measured " << e.measured << " bound " << e.bound);
    CHECK(e.pass);
  }
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t k = 0; k < a.entries.size(); ++k) CHECK(a.entries[k].measured == b.entries[k].measured);
}

TEST_CASE("check_run flags a coarse time step") {
  RunConfig c = small_config(1.5);
  c.tau = 0.5;
  c.T = 0.5;
  const InvariantReport r = check_run(run(c), c);
  CHECK_FALSE(r.all_pass());
  CHECK_FALSE(r.find("nutrient_lower_bound")->pass);
}

TEST_CASE("isotonic_regression") {
  const auto out = isotonic_regression({1, 3, 2, 4}, {1, 1, 1, 1});
  CHECK(out == std::vector<double>{1, 2.5, 2.5, 4});
  const auto w = isotonic_regression({5, 1}, {1, 3});
  CHECK(w[0] == doctest::Approx(2.0));
  CHECK(w[1] == doctest::Approx(2.0));
}

TEST_CASE("oracle_project_1d examples") {
  const int n = 1024;
  const double h = 4.0 / n;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> feasible(n, 0.0);
  for (int i = 300; i < 700; ++i) feasible[i] = u(rng);
  CHECK(l1_line(oracle_project_1d(feasible, h), feasible, h) <= 1e-6);

  // Data on [2, 3): 1.5 spreads to [1.75, 3.25); 2 on [2, 2.5) to [1.75, 2.75).
  CHECK(l1_line(oracle_project_1d(indicator(n, h, 2.0, 3.0, 1.5), h), indicator(n, h, 1.75, 3.25, 1.0), h) <= 1e-9);
  CHECK(l1_line(oracle_project_1d(indicator(n, h, 2.0, 2.5, 2.0), h), indicator(n, h, 1.75, 2.75, 1.0), h) <= 1e-9);
  CHECK_THROWS_AS(oracle_project_1d(std::vector<double>(8, 0.0), h), Error);
}

TEST_CASE("oracle_project_1d is feasible and mass preserving") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::vector<double> mu = random_profile(seed, 512);
    const double h = 1.0 / 512;
    double m0 = 0.0;
    for (double v : mu) m0 += v * h;
    if (m0 == 0.0) continue;
    const std::vector<double> out = oracle_project_1d(mu, h);
    double m1 = 0.0;
    for (double v : out) {
      CHECK(v <= 1.0 + 1e-9);
      m1 += v * h;
    }
    CHECK(std::fabs(m1 - m0) <= 1e-10 * m0);
  }
}

TEST_CASE("oracle suite is reproducible") {
  const OracleSuiteResult a = run_oracle_suite(42, 3), b = run_oracle_suite(42, 3);
  CHECK(a.pass);
  CHECK(a.worst_projection_l1 == b.worst_projection_l1);
  CHECK(a.worst_c_transform == b.worst_c_transform);
  CHECK_FALSE(run_oracle_suite(42, 3, 1.01).pass);
  CHECK(run_oracle_suite(1, 0).pass);
}

TEST_CASE("convergence reports against the run itself are zero") {
  const RunConfig c = small_config(1.5);
  const Trajectory t = run(c);
  const auto rows = h1_convergence_report({{0.0, &t}}, t);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].grad_diff_sq == 0.0);
  CHECK(rows[0].p_diff_sq == 0.0);
  CHECK(rows[0].grad_p_sq > 0.0);
  const auto hd = hausdorff_convergence_report({{0.0, &t}}, t, {c.T}, c.projection.tol_orth);
  REQUIRE(hd.size() == 1);
  CHECK(hd[0].value <= c.grid.h / 2);

  std::ostringstream a, b;
  write_h1_csv(rows, a);
  write_hausdorff_csv(hd, b);
  CHECK(a.str().rfind("D,t,grad_p_sq,grad_diff_sq,p_diff_sq\n", 0) == 0);
  CHECK(b.str().rfind("D,t,value\n", 0) == 0);
}

TEST_CASE("h1 accumulators are algebraically consistent") {
  RunConfig c = small_config(1.5);
  const Trajectory ref = run(c);
  c.nutrient.D = 4e-3;
  const Trajectory other = run(c);
  const auto rows = h1_convergence_report({{4e-3, &other}}, ref);
  const ConvergenceRow& r = rows[0];
  CHECK(r.grad_diff_sq >= 0.0);
  CHECK(std::fabs(r.grad_diff_sq - (r.grad_p_sq - 2 * r.cross + r.grad_ref_sq)) <= 1e-10);
}

TEST_CASE("weak-form residuals vanish without density") {
  RunConfig c = small_config(1.3);
  c.initial_density.center = {0.5 * c.grid.h, 0.5 * c.grid.h};
  c.initial_density.radius = 0.1 * c.grid.h;
  const Trajectory t = run(c);
  REQUIRE(integrate(t.states.front().rho) == 0.0);
  TestFunction psi;
  psi.T = t.states.back().t;
  const WeakFormResidual r = weak_form_residual(t, c, psi);
  CHECK(std::fabs(r.r_rho) <= 1e-10);
  CHECK(std::fabs(r.r_n) <= 1e-10);
}

TEST_CASE("weak-form residual matches an independent quadrature on one step") {
  RunConfig c = small_config(1.5);
  c.T = c.tau;
  const Trajectory t = run(c);
  REQUIRE(t.states.size() == 2);
  TestFunction psi;
  psi.T = 0.05;
  psi.half_width = 0.5;
  const WeakFormResidual r = weak_form_residual(t, c, psi);

  // Gauss-Legendre in time, explicit face sums in space.
  const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
  const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                        0.2369268850561891};
  const double tau = c.tau, w = M_PI / (2 * psi.T);
  double th = 0.0, dth = 0.0;
  for (int q = 0; q < 5; ++q) {
    const double s = 0.5 * tau * (gx[q] + 1);
    th += 0.5 * tau * gw[q] * std::cos(w * s);
    dth += 0.5 * tau * gw[q] * (-w * std::sin(w * s));
  }
  const Grid2D& g = c.grid;
  auto phi = [&](int i, int j) {
    auto one = [&](double s) {
      const double u = s / psi.half_width;
      return std::fabs(u) >= 1 ? 0.0 : std::pow(std::cos(0.5 * M_PI * u), 4);
    };
    return one(g.x(i)) * one(g.y(j));
  };
  const SimState& a = t.states[0];
  const SimState& b = t.states[1];
  double grad_p = 0, grad_n = 0, growth = 0, absorb = 0, rho1 = 0, n1 = 0, rho0 = 0, n0 = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int ip = g.wrap_x(i + 1), jp = g.wrap_y(j + 1);
      const double dpx = phi(ip, j) - phi(i, j), dpy = phi(i, jp) - phi(i, j);
      grad_p += dpx * (b.p.at(ip, j) - b.p.at(i, j)) + dpy * (b.p.at(i, jp) - b.p.at(i, j));
      grad_n += dpx * (b.n.at(ip, j) - b.n.at(i, j)) + dpy * (b.n.at(i, jp) - b.n.at(i, j));
      const double h2 = g.h * g.h, f = phi(i, j);
      growth += h2 * f * a.n.at(i, j) * a.rho.at(i, j);
      absorb += h2 * f * a.n.at(i, j) * b.rho.at(i, j);
      rho1 += h2 * f * b.rho.at(i, j);
      n1 += h2 * f * b.n.at(i, j);
      rho0 += h2 * f * a.rho.at(i, j);
      n0 += h2 * f * a.n.at(i, j);
    }
  const double r_rho = th * (grad_p - growth) - dth * rho1 - rho0;
  const double r_n = th * (c.nutrient.D * grad_n + absorb) - dth * n1 - n0;
  CHECK(std::fabs(r.r_rho - r_rho) <= 1e-12);
  CHECK(std::fabs(r.r_n - r_n) <= 1e-12);
}

TEST_CASE("weak-form test function must stay inside the box") {
  const RunConfig c = small_config(1.0);
  const Trajectory t = run(c);
  TestFunction psi;
  psi.half_width = 0.99;
  CHECK_THROWS_AS(weak_form_residual(t, c, psi), Error);
}

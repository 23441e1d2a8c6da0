#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "patchflow/field_ops.hpp"
#include "patchflow/snapshot.hpp"

using namespace patchflow;

namespace {

ScalarField random_field(const Grid2D& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g);
  for (double& v : f.values) v = u(rng);
  return f;
}

}  // namespace

TEST_CASE("grid invariants are enforced") {
  CHECK_THROWS_AS(Grid2D(4, 16, 0.1), Error);
  CHECK_THROWS_AS(Grid2D(16, 16, 0.0), Error);
  const Grid2D g = Grid2D::centered_box(128, 1.0);
  CHECK(g.h == doctest::Approx(1.0 / 64));
  CHECK(g.x(64) == 0.0);
  CHECK(g.y(64) == 0.0);
  CHECK(g.length_x() == doctest::Approx(2.0));
}

TEST_CASE("integrate") {
  const Grid2D g(64, 64, 1.0 / 32);
  CHECK(integrate(ScalarField(g)) == 0.0);
  CHECK(integrate(ScalarField(g, 1.0)) == doctest::Approx(4.0).epsilon(1e-15));

  const Grid2D box = Grid2D::centered_box(256, 1.0);
  const auto disk = ScalarField::from_function(box, [](double x, double y) { return x * x + y * y <= 0.0625 ? 1.0 : 0.0; });
  CHECK(std::fabs(integrate(disk) - M_PI * 0.0625) <= 0.025);
}

TEST_CASE("lp_norm against constants and direct re-summation") {
  const Grid2D g = Grid2D::centered_box(64, 1.0);
  CHECK(lp_norm(ScalarField(g), Norm::l1) == 0.0);
  CHECK(lp_norm(ScalarField(g), Norm::linf) == 0.0);
  const ScalarField c(g, 3.0);
  CHECK(lp_norm(c, Norm::l1) == doctest::Approx(3.0 * 4.0).epsilon(1e-14));
  CHECK(lp_norm(c, Norm::l2) == doctest::Approx(3.0 * 2.0).epsilon(1e-14));
  CHECK(lp_norm(c, Norm::linf) == 3.0);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const ScalarField f = random_field(g, rng);
    long double s1 = 0, s2 = 0, smax = 0;
    for (double v : f.values) {
      s1 += std::fabs(v);
      s2 += static_cast<long double>(v) * v;
      smax = std::max<long double>(smax, std::fabs(v));
    }
    const double h2 = g.h * g.h;
    CHECK(lp_norm(f, Norm::l1) == doctest::Approx(static_cast<double>(s1 * h2)).epsilon(1e-12));
    CHECK(lp_norm(f, Norm::l2) == doctest::Approx(std::sqrt(static_cast<double>(s2 * h2))).epsilon(1e-12));
    CHECK(lp_norm(f, Norm::linf) == static_cast<double>(smax));
  }
}

TEST_CASE("integrate is additive and lp_norm satisfies the triangle inequality") {
  const Grid2D g = Grid2D::centered_box(32, 1.0);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const ScalarField a = random_field(g, rng), b = random_field(g, rng);
    const double lhs = integrate(a + b), rhs = integrate(a) + integrate(b);
    CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(rhs)));
    for (Norm p : {Norm::l1, Norm::l2, Norm::linf})
      CHECK(lp_norm(a + b, p) <= (lp_norm(a, p) + lp_norm(b, p)) * (1 + 1e-12));
  }
}

TEST_CASE("gradient") {
  const Grid2D g = Grid2D::centered_box(128, 1.0);
  auto [cx, cy] = gradient(ScalarField(g, 2.5));
  CHECK(lp_norm(cx, Norm::linf) == 0.0);
  CHECK(lp_norm(cy, Norm::linf) == 0.0);

  const auto s = ScalarField::from_function(g, [](double x, double) { return std::sin(M_PI * x); });
  auto [sx, sy] = gradient(s);
  double err = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) err = std::max(err, std::fabs(sx.at(i, j) - M_PI * std::cos(M_PI * g.x(i))));
  CHECK(err < 5e-3);
  CHECK(lp_norm(sy, Norm::linf) < 1e-12);

  const auto lin = ScalarField::from_function(g, [](double x, double) { return x; });
  auto [lx, ly] = gradient(lin);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) CHECK(lx.at(i, j) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("total_variation") {
  const Grid2D g = Grid2D::centered_box(128, 1.0);
  CHECK(total_variation(ScalarField(g, 0.7)) == 0.0);
  const double side = 0.5;
  const auto sq = ScalarField::from_function(
      g, [&](double x, double y) { return std::fabs(x) < side / 2 && std::fabs(y) < side / 2 ? 1.0 : 0.0; });
  CHECK(std::fabs(total_variation(sq) - 4 * side) <= 4 * g.h);
  const auto half = ScalarField::from_function(g, [](double x, double) { return x > 0 ? 1.0 : 0.0; });
  CHECK(total_variation(half) == doctest::Approx(2 * g.length_y()));
}

TEST_CASE("laplacian and dirichlet_form agree") {
  const Grid2D g = Grid2D::centered_box(32, 1.0);
  std::mt19937_64 rng(3);
  const ScalarField f = random_field(g, rng), q = random_field(g, rng);
  const double a = dirichlet_form(f, q);
  const double b = -integrate(f * laplacian(q));
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
  CHECK(dirichlet_form(f, q) == doctest::Approx(dirichlet_form(q, f)).epsilon(1e-14));
}

TEST_CASE("snapshot round trip is bitwise for random fields") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> n(8, 40);
  for (int trial = 0; trial < 100; ++trial) {
    const Grid2D g = Grid2D::centered_box(n(rng), 1.0 + trial * 0.01);
    const ScalarField f = random_field(g, rng);
    std::stringstream buf;
    write_snapshot(f, FieldRole::pressure, 0.125 * trial, buf);
    CHECK(buf.str().size() == kSnapshotHeaderBytes + 8 * f.size());
    const Snapshot s = read_snapshot(buf);
    REQUIRE(s.field.size() == f.size());
    CHECK(std::memcmp(s.field.values.data(), f.values.data(), 8 * f.size()) == 0);
    CHECK(s.role == FieldRole::pressure);
    CHECK(s.t == 0.125 * trial);
    CHECK(s.field.grid.nx == g.nx);
    CHECK(s.field.grid.h == g.h);
  }
}

TEST_CASE("snapshot header layout") {
  const Grid2D g(8, 9, 0.5);
  std::stringstream buf;
  write_snapshot(ScalarField(g, 1.0), FieldRole::nutrient, 2.0, buf);
  const std::string s = buf.str();
  CHECK(s.substr(0, 4) == "TPF1");
  std::uint32_t nx, ny;
  double h, t;
  std::memcpy(&nx, s.data() + 4, 4);
  std::memcpy(&ny, s.data() + 8, 4);
  std::memcpy(&h, s.data() + 12, 8);
  std::memcpy(&t, s.data() + 20, 8);
  CHECK(nx == 8);
  CHECK(ny == 9);
  CHECK(h == 0.5);
  CHECK(t == 2.0);
  CHECK(static_cast<int>(s[28]) == 1);
}

TEST_CASE("snapshot errors are distinct") {
  const Grid2D g(8, 8, 0.25);
  std::stringstream good;
  write_snapshot(ScalarField(g, 1.0), FieldRole::density, 0.0, good);
  const std::string bytes = good.str();

  auto kind_of = [](const std::string& data) {
    std::stringstream in(data);
    try {
      read_snapshot(in);
    } catch (const SnapshotError& e) {
      return e.kind();
    }
    FAIL("expected a snapshot error");
    return SnapshotErrorKind::io;
  };

  std::string bad = bytes;
  bad.replace(0, 4, "XXXX");
  CHECK(kind_of(bad) == SnapshotErrorKind::bad_magic);
  CHECK(kind_of(bytes.substr(0, bytes.size() - 8)) == SnapshotErrorKind::truncated);
  CHECK(kind_of(bytes.substr(0, 10)) == SnapshotErrorKind::truncated);

  std::string nan = bytes;
  const double q = std::numeric_limits<double>::quiet_NaN();
  std::memcpy(nan.data() + kSnapshotHeaderBytes + 16, &q, 8);
  CHECK(kind_of(nan) == SnapshotErrorKind::non_finite);

  ScalarField f(g, 0.0);
  f.values[3] = q;
  std::stringstream out;
  CHECK_THROWS_AS(write_snapshot(f, FieldRole::density, 0.0, out), SnapshotError);
}

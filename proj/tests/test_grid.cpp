#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "qsw/grid.hpp"
#include "qsw/io.hpp"

using namespace qsw;

namespace {

ShapeSpec rect2d(double lx = 1.0, double ly = 1.0) {
  ShapeSpec s;
  s.tag = ShapeTag::rectangle;
  s.dim = 2;
  s.lengths = {lx, ly, 1.0};
  return s;
}

ShapeSpec ball3d(double r = 0.5) {
  ShapeSpec s;
  s.tag = ShapeTag::ball;
  s.dim = 3;
  s.radius = r;
  return s;
}

ShapeSpec annulus2d(double ri = 0.25, double ro = 0.5) {
  ShapeSpec s;
  s.tag = ShapeTag::annulus;
  s.dim = 2;
  s.r_inner = ri;
  s.r_outer = ro;
  return s;
}

Field random_field(const DomainGrid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Field v(g.n_interior());
  for (int i = 0; i < v.size(); ++i) v[i] = unif(rng);
  return v;
}

// Euler characteristic of the interior complex: nodes - edges + square faces.
int euler_characteristic_2d(const DomainGrid& g) {
  REQUIRE(g.dim == 2);
  int V = g.n_interior(), E = 0, F = 0;
  for (int i = 0; i < g.n_interior(); ++i) {
    for (int d = 0; d < 2; ++d)
      if (g.neighbors(i, 2 * d + 1) >= 0) ++E;
    const auto c = g.node_coords(g.node_of_interior[i]);
    bool square = true;
    for (int dx = 0; dx <= 1 && square; ++dx)
      for (int dy = 0; dy <= 1 && square; ++dy) {
        if (c[0] + dx >= g.shape[0] || c[1] + dy >= g.shape[1]) square = false;
        else square = g.interior_of_node[g.node_index(c[0] + dx, c[1] + dy, 0)] >= 0;
      }
    if (square) ++F;
  }
  return V - E + F;
}

}  // namespace

TEST_CASE("unit square at 9 nodes per axis has 49 interior nodes") {
  const auto g = build_domain(rect2d(), 9);
  CHECK(g.n_interior() == 49);
  CHECK(g.h == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("ball mask is reflection symmetric in every axis") {
  for (int res : {9, 12}) {
    const auto g = build_domain(ball3d(), res);
    for (int d = 0; d < 3; ++d) CHECK_NOTHROW(g.reflection_map(d));
  }
}

TEST_CASE("euler characteristic: disk 1, annulus 0") {
  ShapeSpec disk = ball3d(0.5);
  disk.dim = 2;
  CHECK(euler_characteristic_2d(build_domain(disk, 41)) == 1);
  CHECK(euler_characteristic_2d(build_domain(annulus2d(), 41)) == 0);
}

TEST_CASE("degenerate inputs are rejected") {
  CHECK_THROWS_AS(build_domain(rect2d(), 4), std::invalid_argument);
  auto bad = annulus2d(0.5, 0.25);
  CHECK_THROWS_AS(build_domain(bad, 16), std::invalid_argument);
  auto tiny = ball3d(0.5);
  CHECK_THROWS_AS(build_domain(tiny, 7), std::invalid_argument);
}

TEST_CASE("stencil on the zero field and on a quadratic") {
  const auto g = build_domain(rect2d(), 9);
  CHECK(laplacian_apply(g, Field::Zero(g.n_interior())).norm() == 0.0);

  // v(x, y) = x (1 - x): second difference exact away from the y-faces,
  // and 2 + v/h^2 on the rows adjacent to them (ghost zeros)
  Field v(g.n_interior());
  for (int i = 0; i < g.n_interior(); ++i) {
    const double x = g.interior_pos(i)[0];
    v[i] = x * (1.0 - x);
  }
  const Field Av = laplacian_apply(g, v);
  for (int i = 0; i < g.n_interior(); ++i) {
    const bool y_edge =
        g.neighbors(i, 2) < 0 || g.neighbors(i, 3) < 0;
    const double expected = y_edge ? 2.0 + v[i] / (g.h * g.h) : 2.0;
    CHECK(Av[i] == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("stencil is symmetric and local") {
  const auto g = build_domain(ball3d(), 10);
  for (unsigned s = 0; s < 5; ++s) {
    const Field v = random_field(g, 100 + s), w = random_field(g, 200 + s);
    const double a = laplacian_apply(g, v).dot(w);
    const double b = v.dot(laplacian_apply(g, w));
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
  // single spike: exactly 2N+1 nonzeros when all neighbors are interior
  Field spike = Field::Zero(g.n_interior());
  int center_idx = 0;
  for (int i = 0; i < g.n_interior(); ++i)
    if ((g.interior_pos(i) - g.center).norm() <
        (g.interior_pos(center_idx) - g.center).norm())
      center_idx = i;
  spike[center_idx] = 1.0;
  CHECK((laplacian_apply(g, spike).array() != 0.0).count() == 7);
}

TEST_CASE("summation by parts: grad_norm_sq equals the quadratic form") {
  for (auto spec : {rect2d(), annulus2d()}) {
    const auto g = build_domain(spec, 17);
    for (unsigned s = 0; s < 10; ++s) {
      const Field v = random_field(g, s);
      const double a = grad_norm_sq(g, v);
      const double b = v.dot(laplacian_apply(g, v)) * g.cell_volume();
      CHECK(a == doctest::Approx(b).epsilon(1e-10));
    }
  }
}

TEST_CASE("quadrature of the unit field approximates the area") {
  const auto g = build_domain(rect2d(), 33);
  const double area = integrate(g, Field::Ones(g.n_interior()));
  CHECK(std::abs(area - 1.0) <= 2.5 * g.h);
  CHECK(grad_norm_sq(g, Field::Zero(g.n_interior())) == 0.0);
}

TEST_CASE("discrete Poincare bound") {
  for (auto spec : {rect2d(), annulus2d()}) {
    const auto g = build_domain(spec, 15);
    const double lam = poincare_lower_bound(g);
    CHECK(lam > 0.0);
    for (unsigned s = 0; s < 5; ++s) {
      const Field v = random_field(g, 300 + s);
      CHECK(grad_norm_sq(g, v) >=
            lam * g.cell_volume() * v.squaredNorm() * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("laplacian commutes with reflections on symmetric masks") {
  const auto g = build_domain(ball3d(), 11);
  const Field v = random_field(g, 7);
  for (int d = 0; d < 3; ++d) {
    const Field a = laplacian_apply(g, reflect(g, v, d));
    const Field b = reflect(g, laplacian_apply(g, v), d);
    CHECK((a - b).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("barycenter of symmetric data sits at the center") {
  const auto g = build_domain(ball3d(), 11);
  Field v(g.n_interior());
  for (int i = 0; i < g.n_interior(); ++i)
    v[i] = std::exp(-10.0 * (g.interior_pos(i) - g.center).squaredNorm());
  const Eigen::Vector3d b = barycenter(g, v);
  CHECK((b - g.center).norm() <= 1e-12);
  CHECK(grad_second_moment(g, v, b) > 0.0);
}

TEST_CASE("moment of a delta recovers the node position") {
  const auto g = build_domain(rect2d(), 9);
  Field v = Field::Zero(g.n_interior());
  v[12] = 1.0;
  const Eigen::Vector3d m = moment(g, v);
  const Eigen::Vector3d expected = g.cell_volume() * g.interior_pos(12);
  CHECK((m - expected).norm() <= 1e-15);
}

TEST_CASE("interpolation reproduces a linear function inside the mask") {
  const auto g = build_domain(rect2d(), 17);
  Field v(g.n_interior());
  for (int i = 0; i < g.n_interior(); ++i) {
    const auto x = g.interior_pos(i);
    v[i] = 0.25 + 0.5 * x[0] + 0.125 * x[1];
  }
  for (double xs : {0.31, 0.5, 0.63}) {
    const Eigen::Vector3d x(xs, 0.47, 0.0);
    CHECK(interpolate(g, v, x) ==
          doctest::Approx(0.25 + 0.5 * x[0] + 0.125 * x[1]).epsilon(1e-12));
  }
  CHECK(interpolate(g, v, {5.0, 5.0, 0.0}) == 0.0);
}

TEST_CASE("contains_ball and distance_to_domain") {
  const auto g = build_domain(annulus2d(), 33);
  const double rho = 0.375;  // mid ring
  CHECK(g.contains_ball({g.center[0] + rho, g.center[1], 0.0}, 0.08));
  CHECK_FALSE(g.contains_ball(g.center, 0.1));  // hole
  CHECK(distance_to_domain(g, {g.center[0] + rho, g.center[1], 0.0}) == 0.0);
  CHECK(distance_to_domain(g, g.center) >= 0.2 - g.h);
}

TEST_CASE("conjugate gradient solves the stencil system") {
  const auto g = build_domain(ball3d(), 9);
  const Field rhs = random_field(g, 42);
  const Field x = laplacian_solve(g, rhs, 1e-12);
  CHECK((laplacian_apply(g, x) - rhs).norm() <= 1e-9 * rhs.norm());
}

TEST_CASE("field dump round trip") {
  const auto g = build_domain(annulus2d(), 17);
  const Field v = random_field(g, 5);
  const std::string path = "/tmp/qsw_test_field_dump.field";
  write_field(path, g, v);
  const auto loaded = read_field(path);
  CHECK(loaded.grid.n_interior() == g.n_interior());
  CHECK((loaded.values - v).lpNorm<Eigen::Infinity>() == 0.0);
  std::filesystem::remove(path);
}

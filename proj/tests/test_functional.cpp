#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qsw/functional.hpp"

using namespace qsw;

namespace {

Field random_field(const DomainGrid& g, unsigned seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-scale, scale);
  Field v(g.n_interior());
  for (int i = 0; i < v.size(); ++i) v[i] = unif(rng);
  return v;
}

// Tiny grid with a single interior node, assembled by hand; build_domain
// rejects degenerate grids, but the closed-formula oracles want one.
DomainGrid single_node_grid(int dim, double h) {
  DomainGrid g;
  g.dim = dim;
  g.shape = {3, 3, dim == 3 ? 3 : 1};
  g.h = h;
  g.origin = Eigen::Vector3d::Zero();
  g.spec.tag = ShapeTag::rectangle;
  g.spec.dim = dim;
  g.resolution = 3;
  const int total = g.total_nodes();
  g.mask.assign(total, 0);
  g.interior_of_node.assign(total, -1);
  const int center = g.node_index(1, 1, dim == 3 ? 1 : 0);
  g.mask[center] = 1;
  g.interior_of_node[center] = 0;
  g.node_of_interior = {center};
  g.neighbors.resize(1, 2 * dim);
  g.neighbors.setConstant(-1);
  g.center = g.node_pos(center);
  return g;
}

ShapeSpec ball3d(double r = 0.5) {
  ShapeSpec s;
  s.tag = ShapeTag::ball;
  s.dim = 3;
  s.radius = r;
  return s;
}

ShapeSpec rect3d() {
  ShapeSpec s;
  s.tag = ShapeTag::rectangle;
  s.dim = 3;
  return s;
}

double dir_derivative(const DomainGrid& g, const ExponentParams& prm,
                      const Field& v, const Field& w, double eps,
                      bool positive = false) {
  auto E = [&](const Field& u) {
    return positive ? energy_positive_part(g, u, prm) : energy(g, u, prm);
  };
  return (E(v + eps * w) - E(v - eps * w)) / (2.0 * eps);
}

}  // namespace

TEST_CASE("exponent parameter validation") {
  const auto prm = ExponentParams::make(6.0, 3);
  CHECK(prm.crit == doctest::Approx(12.0));
  CHECK(prm.two_star() == doctest::Approx(6.0));
  CHECK_FALSE(prm.outside_paper_hypotheses);
  CHECK_THROWS_AS(ExponentParams::make(4.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(ExponentParams::make(12.5, 3), std::invalid_argument);
  CHECK_THROWS_AS(ExponentParams::make(6.0, 2), std::invalid_argument);
  const auto flat = ExponentParams::make(6.0, 2, 12.0);
  CHECK(flat.outside_paper_hypotheses);
  CHECK(flat.crit == 12.0);
  CHECK(prm.at(11.0).p == 11.0);
  CHECK(prm.critical().p == doctest::Approx(12.0));
}

TEST_CASE("energy and gradient vanish on the zero field") {
  const auto g = build_domain(ball3d(), 9);
  const auto prm = ExponentParams::make(6.0, 3);
  const Field z = Field::Zero(g.n_interior());
  CHECK(energy(g, z, prm) == 0.0);
  CHECK(gradient(g, z, prm).norm() == 0.0);
  CHECK(nehari_residual(g, z, prm) == 0.0);
}

TEST_CASE("single interior node: closed formulas") {
  for (int dim : {2, 3}) {
    const double h = 0.2, c = 1.3, p = 6.0;
    const auto g = single_node_grid(dim, h);
    const auto prm = ExponentParams::make(p, 3);  // formulas only use p
    Field v(1);
    v[0] = c;
    const double hN = std::pow(h, dim);
    const double fc = f_of(c).f;
    const double expected =
        0.5 * (2.0 * dim * c * c / (h * h)) * hN - hN * std::pow(fc, p) / p;
    CHECK(energy(g, v, prm) == doctest::Approx(expected).epsilon(1e-14));

    const auto s = f_of(c);
    const double grad_expected =
        2.0 * dim * c / (h * h) - std::pow(fc, p - 2) * s.f * s.fp;
    CHECK(gradient(g, v, prm)[0] ==
          doctest::Approx(grad_expected).epsilon(1e-14));
  }
}

TEST_CASE("finite-difference gradient check") {
  const auto grids = {build_domain(rect3d(), 9), build_domain(ball3d(), 12)};
  for (const auto& g : grids) {
    for (double p : {6.0, 10.0}) {
      const auto prm = ExponentParams::make(p, 3);
      for (unsigned s = 0; s < 3; ++s) {
        const Field v = random_field(g, 10 * s + 1);
        const Field w = random_field(g, 10 * s + 2);
        const double fd = dir_derivative(g, prm, v, w, 1e-5);
        const double an = gradient(g, v, prm).dot(w) * g.cell_volume();
        CHECK(fd == doctest::Approx(an).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("energy decreases along the negative gradient") {
  const auto g = build_domain(ball3d(), 10);
  const auto prm = ExponentParams::make(6.0, 3);
  const Field v = random_field(g, 3);
  const Field d = gradient(g, v, prm);
  const double e0 = energy(g, v, prm);
  CHECK(energy(g, v - 1e-6 * d, prm) < e0);
}

TEST_CASE("hessian at zero is the stencil") {
  const auto g = build_domain(ball3d(), 9);
  const auto prm = ExponentParams::make(6.0, 3);
  const Field z = Field::Zero(g.n_interior());
  const Field w = random_field(g, 11);
  CHECK((hessian_apply(g, z, w, prm) - laplacian_apply(g, w))
            .lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("hessian is symmetric and matches differentiated gradients") {
  const auto g = build_domain(ball3d(), 9);
  for (double p : {6.0, 10.0}) {
    const auto prm = ExponentParams::make(p, 3);
    const Field v = random_field(g, 21);
    const Field w = random_field(g, 22);
    const Field u = random_field(g, 23);
    const double a = hessian_apply(g, v, w, prm).dot(u);
    const double b = hessian_apply(g, v, u, prm).dot(w);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));

    const double eps = 1e-5;
    const Field fd = (gradient(g, v + eps * w, prm) -
                      gradient(g, v - eps * w, prm)) /
                     (2.0 * eps);
    const Field an = hessian_apply(g, v, w, prm);
    CHECK((fd - an).norm() <= 1e-5 * std::max(1.0, an.norm()));
  }
}

TEST_CASE("positive-part functional") {
  const auto g = build_domain(ball3d(), 9);
  const auto prm = ExponentParams::make(6.0, 3);

  Field neg = -random_field(g, 31).cwiseAbs();
  CHECK(energy_positive_part(g, neg, prm) ==
        doctest::Approx(0.5 * grad_norm_sq(g, neg)).epsilon(1e-14));
  CHECK((gradient_positive_part(g, neg, prm) - laplacian_apply(g, neg))
            .lpNorm<Eigen::Infinity>() == 0.0);

  Field pos = random_field(g, 32).cwiseAbs();
  CHECK(energy_positive_part(g, pos, prm) ==
        doctest::Approx(energy(g, pos, prm)).epsilon(1e-14));
  CHECK((gradient_positive_part(g, pos, prm) - gradient(g, pos, prm))
            .lpNorm<Eigen::Infinity>() == 0.0);

  const Field mixed = random_field(g, 33);
  const Field w = random_field(g, 34);
  const double fd = dir_derivative(g, prm, mixed, w, 1e-5, true);
  const double an =
      gradient_positive_part(g, mixed, prm).dot(w) * g.cell_volume();
  CHECK(fd == doctest::Approx(an).epsilon(1e-6));
}

TEST_CASE("nodewise two-sided bound on evaluated fields") {
  const auto g = build_domain(ball3d(), 9);
  for (unsigned s = 0; s < 5; ++s) {
    const Field v = random_field(g, 40 + s, 3.0);
    const TransformField tf = transform_field(v);
    for (int i = 0; i < v.size(); ++i) {
      const double fv = tf.f[i], lhs = tf.f[i] * tf.fp[i] * v[i];
      CHECK(lhs >= fv * fv / 2.0 - 1e-12);
      CHECK(lhs <= fv * fv + 1e-12);
    }
  }
}

TEST_CASE("nehari residual is positive for tiny multiples") {
  const auto g = build_domain(ball3d(), 9);
  const auto prm = ExponentParams::make(6.0, 3);
  for (unsigned s = 0; s < 5; ++s) {
    const Field v = random_field(g, 50 + s);
    CHECK(nehari_residual(g, Field(1e-4 * v), prm) > 0.0);
  }
}

TEST_CASE("pohozaev balance") {
  const auto g = build_domain(ball3d(), 10);
  const auto prm = ExponentParams::make(6.0, 3);

  const Field z = Field::Zero(g.n_interior());
  CHECK(pohozaev_residual(g, z, prm).residual == 0.0);

  // quadratic terms scale exactly by lambda^2
  const Field v = random_field(g, 61);
  const auto b1 = pohozaev_residual(g, v, prm);
  const auto b2 = pohozaev_residual(g, Field(2.0 * v), prm);
  CHECK(b2.dirichlet_term == doctest::Approx(4.0 * b1.dirichlet_term).epsilon(1e-13));
  CHECK(b2.boundary_flux == doctest::Approx(4.0 * b1.boundary_flux).epsilon(1e-13));

  ShapeSpec ann;
  ann.tag = ShapeTag::annulus;
  ann.dim = 3;
  ann.r_inner = 0.2;
  ann.r_outer = 0.5;
  const auto ga = build_domain(ann, 12);
  CHECK_THROWS_AS(
      pohozaev_residual(ga, Field::Zero(ga.n_interior()), prm),
      std::invalid_argument);
}

// Development probe: ground-state behavior across grids and exponents.
// Not registered with ctest.
#include <chrono>
#include <cstdio>

#include "qsw/experiments.hpp"

using namespace qsw;
using Clock = std::chrono::steady_clock;

static double secs(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main(int argc, char** argv) {
  const int res = argc > 1 ? std::atoi(argv[1]) : 12;
  const double p = argc > 2 ? std::atof(argv[2]) : 6.0;
  const char* shape = argc > 3 ? argv[3] : "ball";

  ShapeSpec spec;
  spec.dim = 3;
  if (std::string(shape) == "ball") {
    spec.tag = ShapeTag::ball;
    spec.radius = (argc > 4 ? std::atof(argv[4]) : 0.5);
  } else {
    spec.tag = ShapeTag::annulus;
    spec.r_inner = 0.2;
    spec.r_outer = 0.5;
  }
  const auto g = build_domain(spec, res);
  std::printf("grid: %s res=%d interior=%d h=%.4f\n", shape, res,
              g.n_interior(), g.h);

  const auto prm = ExponentParams::make(p, 3);
  SolveOptions opts; opts.verbose = true;

  auto t0 = Clock::now();
  Field init;
  if (spec.tag == ShapeTag::ball) {
    init = Field::Ones(g.n_interior());
  } else {
    Eigen::Vector3d y = g.center;
    y[0] += 0.5 * (spec.r_inner + spec.r_outer);
    init = make_bump_seed(g, prm, y, 0.4 * (spec.r_outer - spec.r_inner));
  }
  std::printf("seed built in %.2f s\n", secs(t0));

  t0 = Clock::now();
  const auto rep = ground_state(g, prm, init, opts);
  std::printf(
      "p=%.4f: converged=%d iters=%d energy=%.10f grad=%.3e res=%.3e\n"
      "  sup=%.4f width=%.4f asym=%.2e bary=(%.4f %.4f %.4f) pos=%d  [%.2f s]\n",
      p, rep.converged, rep.iterations, rep.energy, rep.grad_norm,
      rep.nehari_residual, rep.sup_norm, rep.width,
      reflection_asymmetry(g, rep.field), rep.barycenter[0], rep.barycenter[1],
      rep.barycenter[2], rep.positive, secs(t0));

  t0 = Clock::now();
  SpectraOptions so;
  const auto morse = morse_index(g, rep.field, prm, 6, so);
  std::printf("morse: index=%d dense=%d eig=[", morse.index, morse.used_dense);
  for (double e : morse.eigenvalues) std::printf("%.4f ", e);
  std::printf("] [%.2f s]\n", secs(t0));
  return 0;
}

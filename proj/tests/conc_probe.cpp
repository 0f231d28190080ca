// Development probe: concentration trends per radius/resolution. Not a ctest
// target.
#include <cstdio>

#include "qsw/experiments.hpp"

using namespace qsw;

int main(int argc, char** argv) {
  const int res = argc > 1 ? std::atoi(argv[1]) : 24;
  const double radius = argc > 2 ? std::atof(argv[2]) : 0.5;

  ShapeSpec spec;
  spec.tag = ShapeTag::ball;
  spec.dim = 3;
  spec.radius = radius;
  const auto g = build_domain(spec, res);
  const auto base = ExponentParams::make(6.0, 3);

  std::vector<double> ps;
  for (double f : {0.90, 0.95, 0.98}) ps.push_back(f * base.crit);

  SolveOptions opts;
  const auto out = concentration_probe(g, base, ps, opts);
  std::printf("radius %.3f res %d h=%.4f 3h=%.4f interior=%d\n", radius, res,
              g.h, 3 * g.h, g.n_interior());
  for (const auto& r : out.records)
    std::printf(
        "p=%6.3f m_p=%12.6f width=%8.5f sup=%9.4f |poho|=%10.3e conv=%d "
        "floor=%d\n",
        r.p, r.m_p, r.width, r.sup_norm, r.pohozaev_abs, r.converged,
        r.under_resolved);
  std::printf("S_disc=%.6f PS threshold=%.6f\n", out.sobolev_constant,
              out.ps_threshold);
  return 0;
}

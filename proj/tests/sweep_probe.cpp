// Development probe: level-sweep trends per ball radius. Not a ctest target.
#include <cstdio>

#include "qsw/experiments.hpp"

using namespace qsw;

int main(int argc, char** argv) {
  const int res = argc > 1 ? std::atoi(argv[1]) : 16;
  const double radius = argc > 2 ? std::atof(argv[2]) : 0.5;

  ShapeSpec spec;
  spec.tag = ShapeTag::ball;
  spec.dim = 3;
  spec.radius = radius;
  const auto g = build_domain(spec, res);
  const auto base = ExponentParams::make(6.0, 3);

  std::vector<double> ps;
  for (double f : {0.90, 0.95, 0.98, 0.99}) ps.push_back(f * base.crit);

  SolveOptions opts;
  const auto res_sweep = level_sweep(g, base, ps, opts);
  std::printf("radius %.2f res %d (h=%.4f, interior %d)\n", radius, res, g.h,
              g.n_interior());
  for (const auto& r : res_sweep.records)
    std::printf(
        "p=%6.3f m_p=%12.6f t*=%8.5f |t*-1|=%.4f i*=%12.6f gap=%10.3e "
        "w=%7.4f sup=%8.3f |g|=%8.4f conv=%d\n",
        r.p, r.m_p, r.t_star, std::abs(r.t_star - 1.0), r.i_star,
        std::abs(r.m_p - r.i_star), r.width, r.sup_norm, r.norm_h1,
        r.converged);
  std::printf("m*_proj=%.6f m*_extrap=%.6f book_min=%.6f\n",
              res_sweep.m_star_projected, res_sweep.m_star_extrapolated,
              res_sweep.m_star_bookkeeping_min);
  return 0;
}

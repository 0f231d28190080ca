#include "qsw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qsw {

int cat_of(ShapeTag tag) {
  switch (tag) {
    case ShapeTag::rectangle:
    case ShapeTag::ball: return 1;
    case ShapeTag::annulus:
    case ShapeTag::rectangle_with_hole: return 2;
  }
  return 1;
}

int poincare1_of(ShapeTag tag) { return cat_of(tag); }

SweepResult level_sweep(const DomainGrid& g, const ExponentParams& base,
                        const std::vector<double>& p_list,
                        const SolveOptions& opts) {
  if (p_list.empty())
    throw std::invalid_argument("level_sweep: empty exponent list");
  for (std::size_t i = 0; i + 1 < p_list.size(); ++i)
    if (!(p_list[i] < p_list[i + 1]))
      throw std::invalid_argument("level_sweep: p list must increase");

  SweepResult res;
  res.all_converged = true;
  const ExponentParams crit = base.critical();
  // cold start per exponent: a warm start would make the relative gradient
  // target unreachably tight
  const Field seed = Field::Ones(g.n_interior());

  for (double p : p_list) {
    const ExponentParams prm = base.at(p);
    const auto rep = ground_state(g, prm, seed, opts);
    SweepRecord rec;
    rec.p = p;
    rec.m_p = rep.energy;
    rec.width = rep.width;
    rec.sup_norm = rep.sup_norm;
    rec.norm_h1 = rep.norm_h1;
    rec.grad_norm = rep.grad_norm;
    rec.nehari_residual = rep.nehari_residual;
    rec.barycenter = rep.barycenter;
    rec.converged = rep.converged;
    if (!rep.converged) res.all_converged = false;

    const auto proj = project(g, rep.field, crit);
    rec.t_star = proj.t;
    rec.i_star = energy(g, Field(proj.t * rep.field), crit);
    res.records.push_back(rec);

    seed = rep.field;  // warm start for the next exponent
  }

  res.m_star_projected = res.records.back().i_star;
  res.m_star_bookkeeping_min = res.records.front().i_star;
  for (const auto& r : res.records)
    res.m_star_bookkeeping_min = std::min(res.m_star_bookkeeping_min, r.i_star);

  if (res.records.size() >= 2) {
    const auto& a = res.records[res.records.size() - 2];
    const auto& b = res.records.back();
    const double slope = (b.m_p - a.m_p) / (b.p - a.p);
    res.m_star_extrapolated = b.m_p + slope * (base.crit - b.p);
  } else {
    res.m_star_extrapolated = res.records.back().m_p;
  }
  return res;
}

namespace {

double ring_radius(const DomainGrid& g) {
  switch (g.spec.tag) {
    case ShapeTag::annulus:
      return 0.5 * (g.spec.r_inner + g.spec.r_outer);
    case ShapeTag::rectangle_with_hole: {
      const double outer =
          0.5 * g.spec.lengths.head(g.dim).minCoeff();
      return 0.5 * (g.spec.hole_radius + outer);
    }
    default:
      throw std::invalid_argument("ring seeds need an annular shape");
  }
}

Eigen::Vector3d ring_point(const DomainGrid& g, double angle) {
  const double rho = ring_radius(g);
  Eigen::Vector3d y = g.center;
  y[0] += rho * std::cos(angle);
  y[1] += rho * std::sin(angle);
  return y;
}

// Ground level from a small ring multistart (annular) or a centered bump.
double ground_level(const DomainGrid& g, const ExponentParams& prm,
                    double bump_r, const SolveOptions& opts,
                    Field* minimizer = nullptr) {
  std::vector<Field> seeds;
  const bool annular = g.spec.tag == ShapeTag::annulus ||
                       g.spec.tag == ShapeTag::rectangle_with_hole;
  const int n = annular ? 4 : 1;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d y =
        annular ? ring_point(g, 2.0 * M_PI * i / n) : g.center;
    seeds.push_back(make_bump_seed(g, prm, y, bump_r));
  }
  const auto reps = multistart_deflate(g, prm, seeds, opts.dedupe_radius, opts);
  if (reps.empty())
    throw std::runtime_error("ground_level: no converged solution");
  if (minimizer) *minimizer = reps.front().field;
  return reps.front().energy;
}

}  // namespace

BarycenterCensusResult barycenter_census(const DomainGrid& g,
                                         const ExponentParams& prm,
                                         int n_starts, double eps_fraction,
                                         double r, std::uint64_t seed,
                                         const SolveOptions& opts) {
  if (g.spec.tag != ShapeTag::annulus &&
      g.spec.tag != ShapeTag::rectangle_with_hole)
    throw std::invalid_argument("barycenter_census: annular shapes only");
  if (n_starts < 1) throw std::invalid_argument("barycenter_census: n_starts");

  BarycenterCensusResult res;
  res.r = r;
  res.m_p = ground_level(g, prm, r, opts);
  res.epsilon = eps_fraction * res.m_p;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int i = 0; i < n_starts; ++i) {
    const double angle = 2.0 * M_PI * unif(rng);
    const Field bump = make_bump_seed(g, prm, ring_point(g, angle), r);
    // smooth sign-free perturbation: preconditioned white noise, magnitude
    // up to 10% of the bump in H1
    Field noise(g.n_interior());
    for (int j = 0; j < noise.size(); ++j) noise[j] = 2.0 * unif(rng) - 1.0;
    Field smooth = laplacian_solve(g, noise, 1e-8);
    const double target = 0.1 * unif(rng) * std::sqrt(grad_norm_sq(g, bump));
    const double ns = std::sqrt(grad_norm_sq(g, smooth));
    if (ns > 0.0) smooth *= target / ns;
    const Field v = bump + smooth;

    BarycenterSample s;
    const auto proj = project(g, v, prm);
    s.t = proj.t;
    const Field w = proj.t * v;
    s.energy = energy(g, w, prm);
    s.beta = barycenter(g, w);
    s.low_energy = s.energy < res.m_p + res.epsilon;
    s.inside = distance_to_domain(g, s.beta) <= r;
    ++res.n_generated;
    if (s.low_energy) {
      ++res.n_low_energy;
      if (s.inside) ++res.n_inside;
    }
    res.samples.push_back(s);
  }
  res.conclusive = res.n_low_energy > 0;
  res.fraction_inside =
      res.conclusive ? double(res.n_inside) / res.n_low_energy : 0.0;
  return res;
}

Field conformal_rescale(const DomainGrid& g, const Field& v, double R) {
  const double amp = std::pow(R, 0.5 * (g.dim - 2));
  Field out(g.n_interior());
  for (int i = 0; i < out.size(); ++i) {
    const Eigen::Vector3d x =
        g.center + R * (g.interior_pos(i) - g.center);
    out[i] = amp * interpolate(g, v, x);
  }
  return out;
}

double sobolev_constant(const DomainGrid& g, double two_star) {
  Field v(g.n_interior());
  double scale = 0.0;
  for (int i = 0; i < v.size(); ++i)
    scale = std::max(scale, (g.interior_pos(i) - g.center).norm());
  for (int i = 0; i < v.size(); ++i) {
    const double d = (g.interior_pos(i) - g.center).norm() / scale;
    v[i] = std::cos(0.5 * M_PI * std::min(1.0, d));
  }

  auto lp_norm = [&](const Field& w) {
    double acc = 0.0;
    for (int i = 0; i < w.size(); ++i) acc += std::pow(std::abs(w[i]), two_star);
    return std::pow(g.cell_volume() * acc, 1.0 / two_star);
  };

  v /= lp_norm(v);
  double quotient = grad_norm_sq(g, v);
  for (int it = 0; it < 400; ++it) {
    Field rhs(v.size());
    for (int i = 0; i < v.size(); ++i)
      rhs[i] = std::pow(std::abs(v[i]), two_star - 2.0) * v[i];
    Field w = laplacian_solve(g, rhs, 1e-10);
    w /= lp_norm(w);
    const double q = grad_norm_sq(g, w);
    v = w;
    if (std::abs(q - quotient) <= 1e-10 * std::max(1.0, q)) {
      quotient = q;
      break;
    }
    quotient = q;
  }
  return quotient;
}

ConcentrationResult concentration_probe(const DomainGrid& g,
                                        const ExponentParams& base,
                                        const std::vector<double>& p_list,
                                        const SolveOptions& opts) {
  if (g.spec.tag != ShapeTag::rectangle && g.spec.tag != ShapeTag::ball)
    throw std::invalid_argument("concentration_probe: star-shaped grids only");
  if (p_list.empty())
    throw std::invalid_argument("concentration_probe: empty exponent list");

  ConcentrationResult res;
  Field seed = Field::Ones(g.n_interior());
  bool first = true;
  for (double p : p_list) {
    const ExponentParams prm = base.at(p);
    auto rep = ground_state(g, prm, seed, opts);
    ConcentrationRecord rec;
    rec.p = p;
    rec.m_p = rep.energy;
    rec.width = rep.width;
    rec.sup_norm = rep.sup_norm;
    rec.converged = rep.converged;
    rec.pohozaev_abs = std::abs(pohozaev_residual(g, rep.field, prm).residual);
    rec.under_resolved = rep.width < 3.0 * g.h;
    if (first && rec.under_resolved) res.under_resolved_at_start = true;
    first = false;
    res.records.push_back(rec);

    // squeeze the current profile as the next initializer
    seed = conformal_rescale(g, rep.field, 1.15);
    if (!(grad_norm_sq(g, seed) > 1e-20)) seed = rep.field;
  }

  if (g.dim >= 3) {
    res.sobolev_constant = sobolev_constant(g, base.two_star());
    res.ps_threshold =
        std::pow(res.sobolev_constant / 2.0, 0.5 * g.dim) / g.dim;
  }
  return res;
}

std::vector<Eigen::Vector3d> census_seed_centers(const DomainGrid& g,
                                                 int n_seeds, double bump_r) {
  std::vector<Eigen::Vector3d> centers;
  if (g.spec.tag == ShapeTag::annulus ||
      g.spec.tag == ShapeTag::rectangle_with_hole) {
    for (int i = 0; i < n_seeds; ++i)
      centers.push_back(ring_point(g, 2.0 * M_PI * i / n_seeds));
  } else {
    const double room =
        g.spec.tag == ShapeTag::ball
            ? std::max(0.0, g.spec.radius - bump_r)
            : std::max(0.0, 0.5 * g.spec.lengths.head(g.dim).minCoeff() - bump_r);
    const double delta = 0.5 * room;
    centers.push_back(g.center);
    for (int d = 0; d < g.dim && static_cast<int>(centers.size()) < n_seeds; ++d)
      for (int s : {1, -1}) {
        if (static_cast<int>(centers.size()) >= n_seeds) break;
        Eigen::Vector3d y = g.center;
        y[d] += s * delta;
        centers.push_back(y);
      }
  }
  return centers;
}

CensusResult multiplicity_census(const DomainGrid& g, const ExponentParams& prm,
                                 int n_seeds, double bump_r,
                                 const SolveOptions& opts,
                                 const SpectraOptions& sopts) {
  CensusResult res;
  res.expected_cat = cat_of(g.spec.tag);
  res.expected_morse_count = 2 * poincare1_of(g.spec.tag) - 1;
  res.bump_radius = bump_r;

  std::vector<Field> seeds;
  for (const auto& y : census_seed_centers(g, n_seeds, bump_r))
    seeds.push_back(make_bump_seed(g, prm, y, bump_r));

  const auto reps = multistart_deflate(g, prm, seeds, opts.dedupe_radius, opts);
  for (const auto& r : reps) {
    CensusEntry e;
    e.report = r;
    e.morse = morse_index(g, r.field, prm, 6, sopts);
    e.report.morse_index = e.morse.index;
    if (e.report.positive) ++res.found_positive;
    res.solutions.push_back(std::move(e));
  }
  return res;
}

}  // namespace qsw

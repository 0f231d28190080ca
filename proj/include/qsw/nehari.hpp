#pragma once

// Nehari-manifold machinery: the 1-D projection multiplier t_p(v), manifold
// minimization by preconditioned descent with the projection retraction,
// bump seeds built from the radial ball ground state, and multistart with
// clustering and optional penalty deflation.

#include <functional>
#include <vector>

#include "qsw/functional.hpp"

namespace qsw {

struct NehariProjection {
  double t = 1.0;
  int iterations = 0;
  double t_lo = 1.0, t_hi = 1.0;
  double residual = 0.0;  ///< nehari residual at t*v
};

struct SolveOptions {
  double gtol_rel = 1e-8;   ///< gradient target relative to the first iterate
  double gtol_abs = 0.0;
  int max_iter = 2000;
  bool positivity = true;   ///< minimize the positive-part functional
  double project_tol = 1e-12;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 50;
  double dedupe_radius = 0.05;
  double deflation_rho = 1.0;
  int deflation_rounds = 0;
  int threads = 1;
  bool verbose = false;  ///< per-iteration trace on stderr
};

struct CriticalPointReport {
  Field field;
  double p = 0.0, crit = 0.0;
  int dim = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double nehari_residual = 0.0;
  double norm_h1 = 0.0;
  double sup_norm = 0.0;
  double width = 0.0;
  Eigen::Vector3d barycenter = Eigen::Vector3d::Zero();
  bool positive = false;
  bool converged = false;
  bool outside_paper_hypotheses = false;
  int iterations = 0;
  int morse_index = -1;  ///< -1 = not computed
  std::vector<double> deflation_distances;
};

/// Unique t > 0 with t*v on the Nehari set: solves
/// t^2 ||v||^2 = \int |f(tv)|^{p-2} f(tv) f'(tv) tv by bracketing from t = 1
/// and safeguarded Newton. With `positive`, the positive-part constraint is
/// used (v^+ must be nontrivial). Monotonicity of the scalar equation's
/// right side over the bracket samples is checked as it is the uniqueness
/// argument.
NehariProjection project(const DomainGrid& g, const Field& v,
                         const ExponentParams& prm, bool positive = false,
                         double tol = 1e-12);

/// I_p(t_p(v) v): the reduced (scale-invariant) energy.
double reduced_energy(const DomainGrid& g, const Field& v,
                      const ExponentParams& prm, bool positive = false);

/// Minimize I_p over the Nehari manifold from `init` (nonzero). Descent
/// direction is the inverse-stencil-preconditioned gradient; the retraction
/// is the Nehari projection; Armijo backtracking on the reduced energy with
/// a gradient-norm fallback once energy differences reach roundoff.
CriticalPointReport ground_state(const DomainGrid& g, const ExponentParams& prm,
                                 const Field& init, const SolveOptions& opts);

/// Radial ground state on the ball of radius r, translated to `center` and
/// zero-extended; the profile is solved once per (p, r, resolution) and
/// cached. Requires B_r(center) inside the mask.
Field make_bump_seed(const DomainGrid& g, const ExponentParams& prm,
                     const Eigen::Vector3d& center, double r);

/// Relative H1 distance used by the dedupe step.
double relative_distance(const DomainGrid& g, const Field& a, const Field& b);

/// Run ground_state from every seed, cluster converged results by relative
/// distance, optionally re-run with penalty deflation against the found set,
/// and return distinct representatives sorted by energy.
std::vector<CriticalPointReport> multistart_deflate(
    const DomainGrid& g, const ExponentParams& prm,
    const std::vector<Field>& seeds, double dedupe_radius,
    const SolveOptions& opts);

namespace detail {

/// Scalar core of the projection: root of phi on (0, inf) where phi is
/// positive left of the root and negative right of it; phi/dphi supplied as
/// callables. Exposed for oracle tests against brute-force scans.
NehariProjection solve_projection(const std::function<double(double)>& phi,
                                  const std::function<double(double)>& dphi,
                                  double scale_sq, double tol);

}  // namespace detail

}  // namespace qsw

#pragma once

// The transformed energy I_p(v) = 1/2 \int |grad v|^2 - 1/p \int |f(v)|^p and
// its first and second variations on masked grids, together with the
// positive-part variant and the Pohozaev balance used as a solution-quality
// diagnostic.

#include "qsw/grid.hpp"
#include "qsw/transform.hpp"

namespace qsw {

struct ExponentParams {
  double p = 6.0;
  int dim = 3;
  double crit = 12.0;  ///< 4N/(N-2) for N >= 3; a configured cap for N = 2
  bool outside_paper_hypotheses = false;  ///< set in the 2-D exploration mode

  double two_star() const { return crit / 2.0; }

  /// N >= 3: crit = 4N/(N-2). N = 2: the exponent scale degenerates and a
  /// user cap stands in for it; results are flagged.
  static ExponentParams make(double p, int dim, double cap_for_2d = 0.0);
  ExponentParams at(double q) const;  ///< same setup, exponent q
  ExponentParams critical() const { return at(crit); }
};

/// f, f', f'' sampled nodewise (warm-started Newton down the vector).
struct TransformField {
  Field f, fp, fpp;
};
TransformField transform_field(const Field& v);

/// |f|^{p-2} f f'  — the nonlinearity of the transformed equation.
Field nonlinearity(const TransformField& tf, double p);

/// (p-1)|f|^{p-2} f'^2 + |f|^{p-2} f f''  — its derivative.
Field nonlinearity_derivative(const TransformField& tf, double p);

double energy(const DomainGrid& g, const Field& v, const ExponentParams& prm);
Field gradient(const DomainGrid& g, const Field& v, const ExponentParams& prm);
double nehari_residual(const DomainGrid& g, const Field& v,
                       const ExponentParams& prm);
Field hessian_apply(const DomainGrid& g, const Field& v, const Field& w,
                    const ExponentParams& prm);

/// Variant with f(v) replaced by f(v^+); critical points are nonnegative.
double energy_positive_part(const DomainGrid& g, const Field& v,
                            const ExponentParams& prm);
Field gradient_positive_part(const DomainGrid& g, const Field& v,
                             const ExponentParams& prm);

/// Discrete L2 norm of the gradient field, sqrt(h^N) ||gradient||_2.
double gradient_norm(const DomainGrid& g, const Field& grad);

struct PohozaevBalance {
  double dirichlet_term = 0.0;   // (N-2)/2 ||v||^2
  double boundary_flux = 0.0;    // 1/2 \oint |dv/dn|^2 (x - center) . n
  double potential_term = 0.0;   // N/p \int |f(v)|^p
  double residual = 0.0;         // dirichlet + flux - potential
};

/// Pohozaev balance about the grid center. Star-shaped masks only
/// (rectangle, ball); annular shapes are rejected.
PohozaevBalance pohozaev_residual(const DomainGrid& g, const Field& v,
                                  const ExponentParams& prm);

}  // namespace qsw

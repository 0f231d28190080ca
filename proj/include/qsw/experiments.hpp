#pragma once

// Paper-level numerical studies: the ground-level sweep p -> crit, the
// projection-onto-critical-manifold diagnostic, barycenter localization on
// annular domains, the concentration probe on star-shaped domains, and the
// multiplicity census against the topological lower bounds.

#include <cstdint>

#include "qsw/nehari.hpp"
#include "qsw/spectra.hpp"

namespace qsw {

/// Category and first Poincare coefficient per supported shape (constants;
/// homology is out of scope).
int cat_of(ShapeTag tag);
int poincare1_of(ShapeTag tag);

struct SweepRecord {
  double p = 0.0;
  double m_p = 0.0;       ///< ground level at p
  double t_star = 0.0;    ///< multiplier projecting g_p onto the critical manifold
  double i_star = 0.0;    ///< critical energy of the projected ground state
  double width = 0.0;
  double sup_norm = 0.0;
  double norm_h1 = 0.0;
  double grad_norm = 0.0;
  double nehari_residual = 0.0;
  Eigen::Vector3d barycenter = Eigen::Vector3d::Zero();
  bool converged = false;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  double m_star_extrapolated = 0.0;   ///< linear extrapolation of m_p to crit
  double m_star_projected = 0.0;      ///< I_*(t_* g_p) at the last p
  double m_star_bookkeeping_min = 0.0;  ///< smallest I_* seen on any projection
  bool all_converged = false;
};

/// Ground state per p (increasing list, warm-started) plus the two critical
/// level estimates.
SweepResult level_sweep(const DomainGrid& g, const ExponentParams& base,
                        const std::vector<double>& p_list,
                        const SolveOptions& opts);

struct BarycenterSample {
  double energy = 0.0;
  double t = 0.0;
  Eigen::Vector3d beta = Eigen::Vector3d::Zero();
  bool low_energy = false;
  bool inside = false;  ///< d(beta, Omega) <= r
};

struct BarycenterCensusResult {
  double m_p = 0.0;
  double epsilon = 0.0;
  double r = 0.0;
  int n_generated = 0;
  int n_low_energy = 0;
  int n_inside = 0;         ///< among the low-energy ones
  double fraction_inside = 0.0;
  bool conclusive = false;  ///< false when nothing passed the energy filter
  std::vector<BarycenterSample> samples;
};

/// Perturbed ring bumps projected onto the Nehari set, filtered to
/// I_p < m_p + eps_fraction * m_p; reports the fraction with barycenter
/// within distance r of the domain. Annular shapes.
BarycenterCensusResult barycenter_census(const DomainGrid& g,
                                         const ExponentParams& prm,
                                         int n_starts, double eps_fraction,
                                         double r, std::uint64_t seed,
                                         const SolveOptions& opts);

struct ConcentrationRecord {
  double p = 0.0;
  double m_p = 0.0;
  double width = 0.0;
  double sup_norm = 0.0;
  double pohozaev_abs = 0.0;
  bool converged = false;
  bool under_resolved = false;  ///< width below ~3h
};

struct ConcentrationResult {
  std::vector<ConcentrationRecord> records;
  double sobolev_constant = 0.0;  ///< discrete S from projected power iteration
  double ps_threshold = 0.0;      ///< (1/N)(S/2)^{N/2}
  bool under_resolved_at_start = false;
};

/// Ground states along an increasing p list on a star-shaped grid; width,
/// sup norm, and Pohozaev imbalance per p (N >= 3).
ConcentrationResult concentration_probe(const DomainGrid& g,
                                        const ExponentParams& base,
                                        const std::vector<double>& p_list,
                                        const SolveOptions& opts);

/// R^{(N-2)/2} v(center + R (x - center)) sampled back onto the grid; the
/// norm-preserving squeeze used as a concentration-aware initializer.
Field conformal_rescale(const DomainGrid& g, const Field& v, double R);

/// Discrete Sobolev quotient min ||v||^2 / |v|_{2*}^2 by inverse power
/// iteration (N >= 3 grids).
double sobolev_constant(const DomainGrid& g, double two_star);

struct CensusEntry {
  CriticalPointReport report;
  MorseReport morse;
};

struct CensusResult {
  std::vector<CensusEntry> solutions;  ///< distinct, ascending energy
  int expected_cat = 0;
  int expected_morse_count = 0;  ///< 2 P_1 - 1
  int found_positive = 0;
  double bump_radius = 0.0;
};

/// Multistart census with shape-aware seed layout: a ring of bumps on
/// annular shapes, center plus axis offsets on star-shaped ones.
CensusResult multiplicity_census(const DomainGrid& g, const ExponentParams& prm,
                                 int n_seeds, double bump_r,
                                 const SolveOptions& opts,
                                 const SpectraOptions& sopts = {});

/// Seed centers used by the census layout (exposed for tests and reports).
std::vector<Eigen::Vector3d> census_seed_centers(const DomainGrid& g,
                                                 int n_seeds, double bump_r);

}  // namespace qsw

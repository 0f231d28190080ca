#pragma once

// Numerical Morse indices from the generalized eigenproblem H w = mu A w,
// where H is the Hessian of the energy at a critical point and A the
// Dirichlet stencil. The mu are the eigenvalues of the H1-preconditioned
// Hessian I - A^{-1}K, matching the identity-minus-compact splitting of the
// second variation.

#include <vector>

#include "qsw/functional.hpp"

namespace qsw {

struct MorseReport {
  int index = 0;                    ///< eigenvalues below -degeneracy_tol
  std::vector<double> eigenvalues;  ///< k smallest, ascending
  std::vector<double> residuals;    ///< ||Hw - mu Aw|| / (||Hw|| + |mu| ||Aw||)
  int k = 0;
  double gap = 0.0;                 ///< distance of the smallest |mu| from 0
  int near_degenerate = 0;          ///< eigenvalues inside (-tol, tol)
  double degeneracy_tol = 0.0;
  bool warning_nonconverged = false;
  bool used_dense = true;
};

struct SpectraOptions {
  int dense_threshold = 8000;  ///< interior-node cutoff for the dense path
  double degeneracy_tol = 1e-7;
  int lanczos_steps = 0;  ///< 0 = automatic
};

/// k smallest eigenvalues of the preconditioned Hessian at v. Dense
/// generalized eigensolve up to `dense_threshold` interior nodes, A-metric
/// Lanczos with full reorthogonalization above.
MorseReport morse_index(const DomainGrid& g, const Field& v,
                        const ExponentParams& prm, int k,
                        const SpectraOptions& opts = {});

/// Apply K_p(v) to the lowest `n_modes` Laplacian eigenvectors (a discrete
/// weakly-null sequence) and report ||K w_n||_{A^{-1}} / ||w_n||_A per mode.
/// On a fixed grid the profile decays as the mode number grows.
std::vector<double> compactness_probe(const DomainGrid& g, const Field& v,
                                      const ExponentParams& prm, int n_modes);

/// Lowest `k` Dirichlet stencil eigenpairs (ascending), dense.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> laplacian_modes(const DomainGrid& g,
                                                            int k);

}  // namespace qsw

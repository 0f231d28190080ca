#include "qsw/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace qsw {

namespace {

Eigen::SparseMatrix<double> stencil_matrix(const DomainGrid& g) {
  const int n = g.n_interior();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * (2 * g.dim + 1));
  const double inv_h2 = 1.0 / (g.h * g.h);
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(i, i, 2.0 * g.dim * inv_h2);
    for (int d = 0; d < 2 * g.dim; ++d) {
      const int j = g.neighbors(i, d);
      if (j >= 0) trip.emplace_back(i, j, -inv_h2);
    }
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

Eigen::MatrixXd dense_stencil(const DomainGrid& g) {
  return Eigen::MatrixXd(stencil_matrix(g));
}

// Potential coefficient of the Hessian: H = A - diag(c).
Field hessian_potential(const Field& v, const ExponentParams& prm) {
  return nonlinearity_derivative(transform_field(v), prm.p);
}

struct EigPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// A-metric Lanczos with full reorthogonalization for T = A^{-1} H; returns
// the k smallest Ritz pairs (extreme for this pencil, so plain Lanczos
// reaches them).
EigPairs lanczos_smallest(const Eigen::SparseMatrix<double>& A,
                          const Eigen::SparseMatrix<double>& H, int k,
                          int steps) {
  const int n = static_cast<int>(A.rows());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("lanczos: stencil factorization failed");

  const int m = std::min(n, steps);
  Eigen::MatrixXd Q(n, m);
  Eigen::VectorXd alpha(m), beta(m);

  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  // deterministic pseudo-random start
  for (int i = 0; i < n; ++i) q[i] = std::sin(1.0 + 0.7 * i) + 1e-3;
  q /= std::sqrt(q.dot(A * q));

  int built = 0;
  for (int j = 0; j < m; ++j) {
    Q.col(j) = q;
    ++built;
    Eigen::VectorXd u = solver.solve(H * q);
    alpha[j] = q.dot(H * q);
    // full reorthogonalization in the A inner product, twice
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd Au = A * u;
      for (int i = 0; i <= j; ++i) u -= Q.col(i).dot(Au) * Q.col(i);
    }
    const double b = std::sqrt(std::max(0.0, u.dot(A * u)));
    beta[j] = b;
    if (b < 1e-13 || j + 1 == m) break;
    q = u / b;
  }

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(built, built);
  for (int j = 0; j < built; ++j) {
    T(j, j) = alpha[j];
    if (j + 1 < built) T(j, j + 1) = T(j + 1, j) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  EigPairs out;
  const int kk = std::min(k, built);
  out.values = es.eigenvalues().head(kk);
  out.vectors = Q.leftCols(built) * es.eigenvectors().leftCols(kk);
  return out;
}

}  // namespace

MorseReport morse_index(const DomainGrid& g, const Field& v,
                        const ExponentParams& prm, int k,
                        const SpectraOptions& opts) {
  if (k < 3) throw std::invalid_argument("morse_index: k must be >= 3");
  const int n = g.n_interior();
  k = std::min(k, n);

  MorseReport rep;
  rep.k = k;

  const Field grad = gradient(g, v, prm);
  const double vscale = std::max(1.0, std::sqrt(grad_norm_sq(g, v)));
  rep.warning_nonconverged = gradient_norm(g, grad) > 1e-5 * vscale;

  const Field c = hessian_potential(v, prm);
  EigPairs pairs;
  if (n <= opts.dense_threshold) {
    Eigen::MatrixXd A = dense_stencil(g);
    Eigen::MatrixXd H = A;
    H.diagonal() -= c;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(H, A);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("morse_index: dense eigensolve failed");
    pairs.values = es.eigenvalues().head(k);
    pairs.vectors = es.eigenvectors().leftCols(k);
    rep.used_dense = true;
  } else {
    Eigen::SparseMatrix<double> A = stencil_matrix(g);
    Eigen::SparseMatrix<double> H = A;
    for (int i = 0; i < n; ++i) H.coeffRef(i, i) -= c[i];
    const int steps = opts.lanczos_steps > 0 ? opts.lanczos_steps
                                             : std::max(80, 8 * k);
    pairs = lanczos_smallest(A, H, k, steps);
    rep.used_dense = false;
  }

  // residual check ||Hw - mu Aw|| against the pair scale
  {
    Eigen::SparseMatrix<double> A = stencil_matrix(g);
    Eigen::SparseMatrix<double> H = A;
    for (int i = 0; i < n; ++i) H.coeffRef(i, i) -= c[i];
    for (int j = 0; j < pairs.values.size(); ++j) {
      const Eigen::VectorXd w = pairs.vectors.col(j);
      const Eigen::VectorXd Hw = H * w;
      const Eigen::VectorXd Aw = A * w;
      const double mu = pairs.values[j];
      const double denom =
          std::max(1e-300, Hw.norm() + std::abs(mu) * Aw.norm());
      rep.residuals.push_back((Hw - mu * Aw).norm() / denom);
    }
  }

  rep.eigenvalues.assign(pairs.values.data(),
                         pairs.values.data() + pairs.values.size());
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());
  const double spectral_scale =
      std::max(1.0, std::abs(rep.eigenvalues.empty() ? 0.0
                                                     : rep.eigenvalues.back()));
  rep.degeneracy_tol = opts.degeneracy_tol * spectral_scale;
  rep.gap = std::numeric_limits<double>::infinity();
  for (double mu : rep.eigenvalues) {
    if (mu < -rep.degeneracy_tol) ++rep.index;
    else if (std::abs(mu) <= rep.degeneracy_tol) ++rep.near_degenerate;
    rep.gap = std::min(rep.gap, std::abs(mu));
  }
  return rep;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> laplacian_modes(const DomainGrid& g,
                                                            int k) {
  const int n = g.n_interior();
  k = std::min(k, n);
  Eigen::MatrixXd A = dense_stencil(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("laplacian_modes: eigensolve failed");
  return {es.eigenvalues().head(k), es.eigenvectors().leftCols(k)};
}

std::vector<double> compactness_probe(const DomainGrid& g, const Field& v,
                                      const ExponentParams& prm, int n_modes) {
  const int n = g.n_interior();
  n_modes = std::min(n_modes, n);
  const auto [lam, modes] = laplacian_modes(g, n_modes);

  const Field c = hessian_potential(v, prm);
  Eigen::SparseMatrix<double> A = stencil_matrix(g);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);

  std::vector<double> ratios;
  ratios.reserve(n_modes);
  for (int j = 0; j < n_modes; ++j) {
    const Eigen::VectorXd w = modes.col(j);
    const Eigen::VectorXd Kw = c.cwiseProduct(w);
    if (Kw.norm() == 0.0) {
      ratios.push_back(0.0);
      continue;
    }
    const double num_sq = Kw.dot(solver.solve(Kw));  // ||Kw||^2 in A^{-1}
    const double den_sq = w.dot(A * w);              // ||w||^2 in A
    ratios.push_back(std::sqrt(std::max(0.0, num_sq) / den_sq));
  }
  return ratios;
}

}  // namespace qsw

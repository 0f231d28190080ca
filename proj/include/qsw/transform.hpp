#pragma once

// Change of variable f for the quasilinear problem: f' = (1 + 2 f^2)^{-1/2}
// on [0, inf), extended oddly. f is evaluated by inverting its closed-form
// inverse (the quadrature of the defining ODE) with a safeguarded Newton
// iteration, which keeps every sample accurate to ~1e-12 relative.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsw {

/// One sample of the transform: f(t), f'(t), f''(t).
template <class Scalar>
struct TransformSample {
  Scalar t{};
  Scalar f{};
  Scalar fp{};
  Scalar fpp{};
};

namespace detail {

// asinh via log1p: monotone in floating point also for tiny arguments.
template <class Scalar>
Scalar stable_asinh(Scalar x) {
  const Scalar ax = std::abs(x);
  const Scalar r =
      std::log1p(ax + ax * ax / (Scalar(1) + std::sqrt(Scalar(1) + ax * ax)));
  return std::copysign(r, x);
}

}  // namespace detail

/// f^{-1}(s) = \int_0^s sqrt(1 + 2u^2) du, odd in s.
/// Closed form: s*sqrt(1+2s^2)/2 + asinh(sqrt(2) s)/(2 sqrt(2)).
template <class Scalar>
Scalar inv_f(Scalar s) {
  if (!std::isfinite(s)) throw std::domain_error("inv_f: non-finite input");
  const Scalar sqrt2 = std::sqrt(Scalar(2));
  const Scalar as = std::abs(s);
  const Scalar root = std::sqrt(Scalar(1) + Scalar(2) * as * as);
  const Scalar r = as * root / Scalar(2) +
                   detail::stable_asinh(sqrt2 * as) / (Scalar(2) * sqrt2);
  return std::copysign(r, s);
}

/// Evaluate f, f', f'' at t. Newton on inv_f(s) - t with a bisection
/// safeguard; the seed is t for small arguments and 2^{1/4} sqrt(t) for
/// large ones (the two asymptotic regimes of f). `hint`, when positive,
/// seeds the iteration instead (warm starts in nodewise loops).
template <class Scalar>
TransformSample<Scalar> f_of(Scalar t, Scalar hint = Scalar(-1)) {
  if (!std::isfinite(t)) throw std::domain_error("f_of: non-finite input");
  TransformSample<Scalar> out;
  out.t = t;
  const Scalar at = std::abs(t);
  if (at == Scalar(0)) {
    out.f = Scalar(0);
    out.fp = Scalar(1);
    out.fpp = Scalar(0);
    return out;
  }

  const Scalar fourth_root2 = std::pow(Scalar(2), Scalar(0.25));
  Scalar lo = Scalar(0);
  Scalar hi = std::max(at, fourth_root2 * std::sqrt(at)) + Scalar(1);
  Scalar s = (hint > Scalar(0) && hint < hi)
                 ? hint
                 : std::min(at, fourth_root2 * std::sqrt(at));
  if (s <= Scalar(0) || s >= hi) s = at < Scalar(1) ? at : std::sqrt(at);

  const Scalar tol = Scalar(4) * std::numeric_limits<Scalar>::epsilon() *
                     std::max(Scalar(1), at);
  for (int it = 0; it < 80; ++it) {
    const Scalar F = inv_f(s) - at;
    if (std::abs(F) <= tol) break;
    if (F > Scalar(0)) hi = s; else lo = s;
    const Scalar dF = std::sqrt(Scalar(1) + Scalar(2) * s * s);
    Scalar next = s - F / dF;
    if (!(next > lo && next < hi)) next = (lo + hi) / Scalar(2);
    if (next == s) break;
    s = next;
  }

  out.f = std::copysign(s, t);
  out.fp = Scalar(1) / std::sqrt(Scalar(1) + Scalar(2) * out.f * out.f);
  out.fpp = Scalar(-2) * out.f * out.fp * out.fp * out.fp * out.fp;
  return out;
}

// ---------------------------------------------------------------------------
// Inequality certificate
// ---------------------------------------------------------------------------

/// One checked instance of a scalar inequality. Margins are normalised by
/// max(1, |lhs|, |rhs|) so a single global tolerance is meaningful across
/// the full dynamic range of the power inequalities.
struct CertificateRecord {
  std::string inequality;
  double t = 0.0;
  double lambda = 0.0;
  double p = 0.0;
  double margin = 0.0;
  bool pass = true;
};

struct CertificateReport {
  std::vector<CertificateRecord> records;
  double tolerance = -1e-12;
  bool all_pass = true;
  double worst_margin = 0.0;
  std::string worst_inequality;
  double constant_lower_bound = 0.0;  ///< C in the two-branch lower bound, pinned to f(1)
  double asymptotic_constant = 0.0;   ///< f(t)/sqrt(t) limit; derived, not quoted
  std::size_t sample_count = 0;
};

/// Check every scalar inequality satisfied by f over the given sample grids.
/// t_samples: signed arguments; lambda_samples: scaling factors (split
/// internally at 1); p_samples: growth exponents in (4, 2*2N/(N-2)].
/// `bias` shifts every f value (testing hook for the failure path).
CertificateReport certify_inequalities(const std::vector<double>& t_samples,
                                       const std::vector<double>& lambda_samples,
                                       const std::vector<double>& p_samples,
                                       double bias = 0.0);

/// Default sample grids used by the CLI and the acceptance suite:
/// `n_t` log-spaced magnitudes over [1e-8, 1e8] with both signs.
std::vector<double> default_t_samples(int n_t = 1250);
std::vector<double> default_lambda_samples(int n_lambda = 80);
std::vector<double> default_p_samples();

}  // namespace qsw

#include "qsw/transform.hpp"

#include <algorithm>
#include <cmath>

namespace qsw {

namespace {

struct Sample {
  double t, f, fp;
};

// f with the optional test bias folded in; fp recomputed from the biased f
// so the pair stays internally consistent.
Sample eval(double t, double bias) {
  const auto s = f_of(t);
  const double f = s.f + bias;
  return {t, f, 1.0 / std::sqrt(1.0 + 2.0 * f * f)};
}

double relative_margin(double lhs, double rhs) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return (lhs - rhs) / scale;
}

class Builder {
 public:
  explicit Builder(CertificateReport& rep) : rep_(rep) {}

  // lhs >= rhs, normalised margin
  void check(const std::string& id, double t, double lambda, double p,
             double lhs, double rhs) {
    CertificateRecord rec;
    rec.inequality = id;
    rec.t = t;
    rec.lambda = lambda;
    rec.p = p;
    rec.margin = relative_margin(lhs, rhs);
    rec.pass = rec.margin >= rep_.tolerance;
    if (!rec.pass) rep_.all_pass = false;
    if (rep_.records.empty() || rec.margin < rep_.worst_margin) {
      rep_.worst_margin = rec.margin;
      rep_.worst_inequality = id;
    }
    rep_.records.push_back(std::move(rec));
  }

 private:
  CertificateReport& rep_;
};

}  // namespace

CertificateReport certify_inequalities(const std::vector<double>& t_samples,
                                       const std::vector<double>& lambda_samples,
                                       const std::vector<double>& p_samples,
                                       double bias) {
  if (t_samples.empty() || lambda_samples.empty() || p_samples.empty())
    throw std::invalid_argument("certify_inequalities: empty sample list");

  CertificateReport rep;
  Builder add(rep);
  const double fourth_root2 = std::pow(2.0, 0.25);
  rep.constant_lower_bound = eval(1.0, bias).f;
  rep.asymptotic_constant = fourth_root2;

  // Pointwise clauses over every signed sample.
  for (double t : t_samples) {
    const Sample s = eval(t, bias);
    const double at = std::abs(t), af = std::abs(s.f);
    add.check("lemaf_ii", t, 0, 0, 1.0, std::abs(s.fp));
    add.check("lemaf_iii", t, 0, 0, at, af);
    if (t != 0.0)
      add.check("lemaf_iv_limit", t, 0, 0, t * t, 1.0 - s.f / t);
    add.check("lemaf_v", t, 0, 0, fourth_root2 * std::sqrt(at), af);
    if (t != 0.0) {
      // (vi) with the sign flip at t<0 folded in via |t|, f odd
      add.check("lemaf_vi_upper", t, 0, 0, af, at * s.fp);
      add.check("lemaf_vi_lower", t, 0, 0, at * s.fp, af / 2.0);
    }
    if (at >= 1e6)
      add.check("lemaf_vii_limit", t, 0, 0, 1e-4 * fourth_root2,
                std::abs(af / std::sqrt(at) - fourth_root2));
    if (at <= 1.0)
      add.check("lemaf_viii", t, 0, 0, af, rep.constant_lower_bound * at);
    else
      add.check("lemaf_viii", t, 0, 0, af,
                rep.constant_lower_bound * std::sqrt(at));
    add.check("lemaf_ix", t, 0, 0, 1.0 / std::sqrt(2.0), af * s.fp);
    add.check("eq_util_lower", t, 0, 0, s.f * s.fp * t, s.f * s.f / 2.0);
    add.check("eq_util_upper", t, 0, 0, s.f * s.f, s.f * s.fp * t);
  }

  // Order checks on the sorted positive grid.
  std::vector<double> pos;
  for (double t : t_samples)
    if (t > 0.0) pos.push_back(t);
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());

  for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
    const Sample a = eval(pos[i], bias), b = eval(pos[i + 1], bias);
    add.check("mono_i_decreasing", pos[i + 1], 0, 0, a.f * a.fp / a.t,
              b.f * b.fp / b.t);
    add.check("mono_ii_increasing", pos[i + 1], 0, 0,
              b.f * b.f * b.f * b.fp / b.t, a.f * a.f * a.f * a.fp / a.t);
    for (double p : p_samples)
      add.check("mono_iii_increasing", pos[i + 1], 0, p,
                std::pow(std::abs(b.f), p - 2) * b.f * b.fp / b.t,
                std::pow(std::abs(a.f), p - 2) * a.f * a.fp / a.t);
    add.check("outras_iii_mono", pos[i + 1], 0, 0, b.f * b.fp, a.f * a.fp);
    add.check("ratio_t_nonincreasing", pos[i + 1], 0, 0, a.f / a.t, b.f / b.t);
    add.check("ratio_sqrt_nondecreasing", pos[i + 1], 0, 0,
              b.f / std::sqrt(b.t), a.f / std::sqrt(a.t));
  }

  // Scaling inequalities: thinned t grid x full lambda grid x alpha = p.
  std::vector<double> lam_low, lam_high;
  for (double l : lambda_samples)
    (l <= 1.0 ? lam_low : lam_high).push_back(l);
  const std::size_t stride = std::max<std::size_t>(1, pos.size() / 50);
  for (std::size_t i = 0; i < pos.size(); i += stride) {
    const double t = pos[i];
    const Sample s = eval(t, bias);
    for (double l : lam_low) {
      const Sample sl = eval(l * t, bias);
      add.check("outras_iii_low", t, l, 0, l * s.f * s.fp * t,
                sl.f * sl.fp * l * t);
      for (double a : p_samples) {
        add.check("outras_iv", t, l, a, std::pow(sl.f, a),
                  std::pow(l, a) * std::pow(s.f, a));
        add.check("outras_v", t, l, a, std::pow(l, a / 2) * std::pow(s.f, a),
                  std::pow(sl.f, a));
      }
    }
    for (double l : lam_high) {
      const Sample sl = eval(l * t, bias);
      add.check("outras_iii_high", t, l, 0, sl.f * sl.fp * l * t,
                l * s.f * s.fp * t);
      for (double a : p_samples) {
        add.check("outras_vi", t, l, a, std::pow(l, a) * std::pow(s.f, a),
                  std::pow(sl.f, a));
        add.check("outras_vii", t, l, a, std::pow(sl.f, a),
                  std::pow(l, a / 2) * std::pow(s.f, a));
      }
    }
  }

  rep.sample_count = rep.records.size();
  return rep;
}

std::vector<double> default_t_samples(int n_t) {
  std::vector<double> out;
  out.reserve(2 * static_cast<std::size_t>(n_t));
  const double lo = std::log10(1e-8), hi = std::log10(1e8);
  for (int i = 0; i < n_t; ++i) {
    const double e = lo + (hi - lo) * i / double(n_t - 1);
    const double t = std::pow(10.0, e);
    out.push_back(t);
    out.push_back(-t);
  }
  return out;
}

std::vector<double> default_lambda_samples(int n_lambda) {
  std::vector<double> out;
  const int half = n_lambda / 2;
  for (int i = 0; i <= half; ++i) out.push_back(double(i) / half);
  for (int i = 1; i < n_lambda - half; ++i)
    out.push_back(1.0 + 9.0 * double(i) / (n_lambda - half - 1));
  return out;
}

std::vector<double> default_p_samples() { return {4.5, 6.0, 9.0, 11.5}; }

}  // namespace qsw

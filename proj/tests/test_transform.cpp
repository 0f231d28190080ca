#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>

#include "qsw/transform.hpp"

using namespace qsw;

namespace {

// Independent oracle: adaptive-free composite Simpson quadrature of the
// defining integrand sqrt(1 + 2u^2) on [0, s].
double quadrature_inv_f(double s, int panels = 200000) {
  const double sign = s < 0 ? -1.0 : 1.0;
  const double b = std::abs(s);
  auto g = [](double u) { return std::sqrt(1.0 + 2.0 * u * u); };
  const double h = b / panels;
  double acc = g(0.0) + g(b);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * g(i * h);
  return sign * acc * h / 3.0;
}

std::vector<double> roundtrip_grid() {
  std::vector<double> ts;
  for (int e = -8; e <= 8; ++e)
    for (double m : {1.0, 3.0}) {
      ts.push_back(m * std::pow(10.0, e));
      ts.push_back(-m * std::pow(10.0, e));
    }
  return ts;
}

}  // namespace

TEST_CASE("closed-form inverse matches the quadrature oracle") {
  for (double s : {0.1, 0.5, 1.0, 3.0, 17.0, 120.0}) {
    const double oracle = quadrature_inv_f(s);
    CHECK(inv_f(s) == doctest::Approx(oracle).epsilon(1e-11));
  }
}

TEST_CASE("inv_f basic values") {
  CHECK(inv_f(0.0) == 0.0);
  // s sqrt(1+2s^2)/2 + asinh(sqrt 2 s)/(2 sqrt 2) at s = 1
  const double expected =
      std::sqrt(3.0) / 2.0 + std::asinh(std::sqrt(2.0)) / (2.0 * std::sqrt(2.0));
  CHECK(inv_f(1.0) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(inv_f(1.0) == doctest::Approx(1.27127).epsilon(1e-5));
  CHECK(inv_f(1.0) == doctest::Approx(quadrature_inv_f(1.0)).epsilon(1e-12));
  for (double s : {0.3, 2.0, 1e4}) CHECK(inv_f(-s) == -inv_f(s));
  CHECK_THROWS_AS(inv_f(std::nan("")), std::domain_error);
  // strictly increasing across a fine grid
  double prev = inv_f(-5.0);
  for (int i = 1; i <= 1000; ++i) {
    const double cur = inv_f(-5.0 + i * 0.01);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("f_of at zero and odd symmetry") {
  const auto s0 = f_of(0.0);
  CHECK(s0.f == 0.0);
  CHECK(s0.fp == 1.0);
  CHECK(s0.fpp == 0.0);
  for (double t : {1e-6, 0.37, 1.0, 42.0, 1e7}) {
    const auto sp = f_of(t);
    const auto sm = f_of(-t);
    CHECK(sm.f == -sp.f);
    CHECK(sm.fp == sp.fp);
    CHECK(sm.fpp == -sp.fpp);
  }
}

TEST_CASE("derivative identities hold exactly as evaluated") {
  for (double t : roundtrip_grid()) {
    const auto s = f_of(t);
    CHECK(s.fp == 1.0 / std::sqrt(1.0 + 2.0 * s.f * s.f));
    CHECK(s.fpp == -2.0 * s.f * s.fp * s.fp * s.fp * s.fp);
    CHECK(s.fp > 0.0);
    CHECK(s.fp <= 1.0);
  }
}

TEST_CASE("round trip inv_f(f(t)) = t over the full range") {
  for (double t : roundtrip_grid()) {
    const auto s = f_of(t);
    CHECK(std::abs(inv_f(s.f) - t) <= 1e-10 * std::max(1.0, std::abs(t)));
  }
}

TEST_CASE("small and large argument limits") {
  CHECK(f_of(1e-8).f / 1e-8 == doctest::Approx(1.0).epsilon(1e-6));
  const double fourth_root2 = std::pow(2.0, 0.25);
  CHECK(f_of(1e8).f / 1e4 == doctest::Approx(fourth_root2).epsilon(1e-4));
  // the asymptotic constant comes from inv_f(s) ~ s^2/sqrt(2); confirm with
  // the quadrature oracle at a large argument
  const double s = f_of(1e8).f;
  CHECK(quadrature_inv_f(s) == doctest::Approx(1e8).epsilon(1e-9));
}

TEST_CASE("warm-started evaluation matches cold") {
  double hint = -1.0;
  for (double t : {0.2, 0.21, 0.22, 5.0, 5.1}) {
    const auto warm = f_of(t, hint);
    const auto cold = f_of(t);
    CHECK(std::abs(warm.f - cold.f) <= 1e-14 * std::max(1.0, cold.f));
    hint = warm.f;
  }
}

TEST_CASE("certificate over default grids passes with margin") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = certify_inequalities(default_t_samples(),
                                        default_lambda_samples(),
                                        default_p_samples());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  CHECK(rep.all_pass);
  CHECK(rep.worst_margin >= -1e-12);
  CHECK(rep.sample_count >= 10000);
  CHECK(secs < 5.0);
  CHECK(rep.constant_lower_bound == doctest::Approx(f_of(1.0).f));
}

TEST_CASE("biased evaluation fails the certificate") {
  const auto rep =
      certify_inequalities(default_t_samples(200), default_lambda_samples(20),
                           default_p_samples(), 1e-3);
  CHECK_FALSE(rep.all_pass);
}

TEST_CASE("empty sample lists are rejected") {
  CHECK_THROWS_AS(certify_inequalities({}, {1.0}, {6.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(certify_inequalities({1.0}, {}, {6.0}),
                  std::invalid_argument);
}

TEST_CASE("spot checks of the certified inequalities") {
  // the two-sided bound at t = 1
  const auto s1 = f_of(1.0);
  CHECK(s1.f * s1.f / 2.0 <= s1.f * s1.fp * 1.0);
  CHECK(s1.f * s1.fp * 1.0 <= s1.f * s1.f);

  // scaling bound at lambda = 1 is an equality
  const double a = 6.0;
  CHECK(std::pow(f_of(0.7).f, a) ==
        doctest::Approx(std::pow(1.0, a) * std::pow(f_of(0.7).f, a)));

  // monotone growth with the |f|^{p-2} factor at p = 5
  const auto sa = f_of(0.5), sb = f_of(2.0);
  const double p = 5.0;
  const double va = std::pow(std::abs(sa.f), p - 2) * sa.f * sa.fp / 0.5;
  const double vb = std::pow(std::abs(sb.f), p - 2) * sb.f * sb.fp / 2.0;
  CHECK(va < vb);

  // f f' increasing on positive samples
  const auto sc = f_of(3.0);
  CHECK(sb.f * sb.fp < sc.f * sc.fp);
}

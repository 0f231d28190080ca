#include "qsw/functional.hpp"

#include <cmath>

namespace qsw {

ExponentParams ExponentParams::make(double p, int dim, double cap_for_2d) {
  ExponentParams prm;
  prm.dim = dim;
  prm.p = p;
  if (dim >= 3) {
    prm.crit = 4.0 * dim / (dim - 2.0);
  } else if (dim == 2) {
    if (!(cap_for_2d > 4.0))
      throw std::invalid_argument(
          "ExponentParams: 2-D mode needs an exponent cap > 4");
    prm.crit = cap_for_2d;
    prm.outside_paper_hypotheses = true;
  } else {
    throw std::invalid_argument("ExponentParams: dimension must be 2 or 3");
  }
  if (!(p > 4.0) || p > prm.crit + 1e-12)
    throw std::invalid_argument("ExponentParams: p must lie in (4, crit]");
  return prm;
}

ExponentParams ExponentParams::at(double q) const {
  ExponentParams prm = *this;
  if (!(q > 4.0) || q > crit + 1e-12)
    throw std::invalid_argument("ExponentParams::at: exponent out of range");
  prm.p = q;
  return prm;
}

TransformField transform_field(const Field& v) {
  const int n = static_cast<int>(v.size());
  TransformField tf{Field(n), Field(n), Field(n)};
  double hint = -1.0;
  for (int i = 0; i < n; ++i) {
    const auto s = f_of(v[i], hint);
    tf.f[i] = s.f;
    tf.fp[i] = s.fp;
    tf.fpp[i] = s.fpp;
    hint = std::abs(s.f);
  }
  return tf;
}

Field nonlinearity(const TransformField& tf, double p) {
  const int n = static_cast<int>(tf.f.size());
  Field out(n);
  for (int i = 0; i < n; ++i) {
    const double af = std::abs(tf.f[i]);
    out[i] = af == 0.0 ? 0.0 : std::pow(af, p - 2) * tf.f[i] * tf.fp[i];
  }
  return out;
}

Field nonlinearity_derivative(const TransformField& tf, double p) {
  const int n = static_cast<int>(tf.f.size());
  Field out(n);
  for (int i = 0; i < n; ++i) {
    const double af = std::abs(tf.f[i]);
    out[i] = af == 0.0 ? 0.0
                       : std::pow(af, p - 2) *
                             ((p - 1) * tf.fp[i] * tf.fp[i] +
                              tf.f[i] * tf.fpp[i]);
  }
  return out;
}

namespace {

double potential_integral(const DomainGrid& g, const Field& f_values, double p) {
  double acc = 0.0;
  for (int i = 0; i < f_values.size(); ++i)
    acc += std::pow(std::abs(f_values[i]), p);
  return acc * g.cell_volume();
}

}  // namespace

double energy(const DomainGrid& g, const Field& v, const ExponentParams& prm) {
  const TransformField tf = transform_field(v);
  return 0.5 * grad_norm_sq(g, v) - potential_integral(g, tf.f, prm.p) / prm.p;
}

Field gradient(const DomainGrid& g, const Field& v, const ExponentParams& prm) {
  const TransformField tf = transform_field(v);
  return laplacian_apply(g, v) - nonlinearity(tf, prm.p);
}

double nehari_residual(const DomainGrid& g, const Field& v,
                       const ExponentParams& prm) {
  const TransformField tf = transform_field(v);
  const Field nl = nonlinearity(tf, prm.p);
  return grad_norm_sq(g, v) - g.cell_volume() * nl.dot(v);
}

Field hessian_apply(const DomainGrid& g, const Field& v, const Field& w,
                    const ExponentParams& prm) {
  const TransformField tf = transform_field(v);
  const Field c = nonlinearity_derivative(tf, prm.p);
  return laplacian_apply(g, w) - c.cwiseProduct(w);
}

double energy_positive_part(const DomainGrid& g, const Field& v,
                            const ExponentParams& prm) {
  const TransformField tf = transform_field(v.cwiseMax(0.0));
  return 0.5 * grad_norm_sq(g, v) - potential_integral(g, tf.f, prm.p) / prm.p;
}

Field gradient_positive_part(const DomainGrid& g, const Field& v,
                             const ExponentParams& prm) {
  const TransformField tf = transform_field(v.cwiseMax(0.0));
  return laplacian_apply(g, v) - nonlinearity(tf, prm.p);
}

double gradient_norm(const DomainGrid& g, const Field& grad) {
  return std::sqrt(g.cell_volume()) * grad.norm();
}

PohozaevBalance pohozaev_residual(const DomainGrid& g, const Field& v,
                                  const ExponentParams& prm) {
  if (g.spec.tag == ShapeTag::annulus ||
      g.spec.tag == ShapeTag::rectangle_with_hole)
    throw std::invalid_argument(
        "pohozaev_residual: shape is not star-shaped about its center");

  PohozaevBalance b;
  const int N = g.dim;
  b.dirichlet_term = 0.5 * (N - 2) * grad_norm_sq(g, v);

  // One-sided normal differences on interior-ghost faces, weighted by
  // (x - center) . n ; face measure h^{N-1}.
  double flux = 0.0;
  const double face = std::pow(g.h, N - 1);
  for (int i = 0; i < g.n_interior(); ++i) {
    const Eigen::Vector3d xi = g.interior_pos(i);
    for (int d = 0; d < g.dim; ++d) {
      for (int side : {0, 1}) {
        if (g.neighbors(i, 2 * d + side) >= 0) continue;
        const double dn = v[i] / g.h;  // |dv/dnu| to first order
        Eigen::Vector3d xf = xi;
        xf[d] += side == 1 ? g.h / 2.0 : -g.h / 2.0;
        const double sigma_nu =
            (side == 1 ? 1.0 : -1.0) * (xf[d] - g.center[d]);
        flux += 0.5 * dn * dn * sigma_nu * face;
      }
    }
  }
  b.boundary_flux = flux;

  const TransformField tf = transform_field(v);
  b.potential_term = double(N) / prm.p * potential_integral(g, tf.f, prm.p);
  b.residual = b.dirichlet_term + b.boundary_flux - b.potential_term;
  return b;
}

}  // namespace qsw

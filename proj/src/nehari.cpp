#include "qsw/nehari.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

namespace qsw {

namespace detail {

NehariProjection solve_projection(const std::function<double(double)>& phi,
                                  const std::function<double(double)>& dphi,
                                  double scale_sq, double tol) {
  NehariProjection out;
  auto done = [&](double t, double val) {
    return std::abs(val) <= tol * std::max(t * t * scale_sq, 1e-300);
  };

  double t = 1.0;
  double val = phi(t);
  out.iterations = 1;
  if (done(t, val)) {
    out.t = t;
    out.t_lo = out.t_hi = t;
    out.residual = val;
    return out;
  }

  double t_lo, t_hi;
  if (val > 0.0) {
    t_lo = 1.0;
    t_hi = 2.0;
    int k = 0;
    while (phi(t_hi) > 0.0) {
      if (++k > 200)
        throw std::runtime_error("project: no sign change after 200 doublings");
      t_lo = t_hi;
      t_hi *= 2.0;
      ++out.iterations;
    }
  } else {
    t_hi = 1.0;
    t_lo = 0.5;
    int k = 0;
    while (phi(t_lo) < 0.0) {
      if (++k > 200)
        throw std::runtime_error("project: no sign change after 200 halvings");
      t_hi = t_lo;
      t_lo *= 0.5;
      ++out.iterations;
    }
  }
  out.t_lo = t_lo;
  out.t_hi = t_hi;

  t = std::sqrt(t_lo * t_hi);
  for (int it = 0; it < 200; ++it) {
    val = phi(t);
    ++out.iterations;
    if (done(t, val) || t_hi - t_lo <= 1e-15 * t) break;
    if (val > 0.0) t_lo = t; else t_hi = t;
    const double d = dphi(t);
    double next = d != 0.0 ? t - val / d : 0.5 * (t_lo + t_hi);
    if (!(next > t_lo && next < t_hi)) next = 0.5 * (t_lo + t_hi);
    t = next;
  }
  out.t = t;
  out.residual = val;
  return out;
}

}  // namespace detail

namespace {

// phi(t) for the projection of v, with the nonlinearity evaluated on
// w = v or v^+ depending on the positive-part mode.
struct ProjectionFn {
  const DomainGrid& g;
  const ExponentParams& prm;
  Field w;
  double norm_sq;
  double hN;

  double rhs_over_t2(double t) const {
    const TransformField tf = transform_field(t * w);
    return hN * nonlinearity(tf, prm.p).dot(t * w) / (t * t);
  }
  double phi(double t) const { return t * t * (norm_sq - rhs_over_t2(t)); }
  double dphi(double t) const {
    const TransformField tf = transform_field(t * w);
    const Field nl = nonlinearity(tf, prm.p);
    const Field nd = nonlinearity_derivative(tf, prm.p);
    double acc = 0.0;
    for (int i = 0; i < w.size(); ++i)
      acc += (nd[i] * t * w[i] + nl[i]) * w[i];
    return 2.0 * t * norm_sq - hN * acc;
  }
};

}  // namespace

NehariProjection project(const DomainGrid& g, const Field& v,
                         const ExponentParams& prm, bool positive, double tol) {
  const double nsq = grad_norm_sq(g, v);
  if (!(nsq > 1e-28))
    throw std::invalid_argument("project: zero field has no Nehari multiple");
  ProjectionFn fn{g, prm, positive ? Field(v.cwiseMax(0.0)) : v, nsq,
                  g.cell_volume()};
  if (positive && fn.w.lpNorm<Eigen::Infinity>() <= 0.0)
    throw std::runtime_error("project: positive part vanishes");

  auto proj = detail::solve_projection(
      [&](double t) { return fn.phi(t); }, [&](double t) { return fn.dphi(t); },
      nsq, tol);

  // The scalar right side over t^2 must increase with t across the bracket;
  // this is the uniqueness mechanism, so a violation means a broken kernel.
  const double ta = std::min(proj.t_lo, proj.t / 2.0);
  const double tb = proj.t;
  const double tc = std::max(proj.t_hi, proj.t * 1.5);
  const double ra = fn.rhs_over_t2(ta), rb = fn.rhs_over_t2(tb),
               rc = fn.rhs_over_t2(tc);
  const double scale = std::max({1e-300, std::abs(ra), std::abs(rc)});
  if (rb - ra < -1e-9 * scale || rc - rb < -1e-9 * scale)
    throw std::runtime_error(
        "project: scalar right side not increasing across bracket");
  return proj;
}

double reduced_energy(const DomainGrid& g, const Field& v,
                      const ExponentParams& prm, bool positive) {
  const auto proj = project(g, v, prm, positive);
  const Field w = proj.t * v;
  return positive ? energy_positive_part(g, w, prm) : energy(g, w, prm);
}

namespace {

struct DeflationSet {
  std::vector<const Field*> known;
  double rho = 1.0;  // scaled per solution by its squared H1 norm
  bool empty() const { return known.empty(); }
};

double objective(const DomainGrid& g, const ExponentParams& prm, bool positive,
                 const Field& v, const DeflationSet& defl, double* base_energy) {
  const double E = positive ? energy_positive_part(g, v, prm)
                            : energy(g, v, prm);
  if (base_energy) *base_energy = E;
  double fac = 1.0;
  for (const Field* k : defl.known) {
    const double d2 = std::max(grad_norm_sq(g, v - *k), 1e-300);
    fac *= 1.0 + defl.rho * grad_norm_sq(g, *k) / d2;
  }
  return E * fac;
}

CriticalPointReport finalize_report(const DomainGrid& g,
                                    const ExponentParams& prm,
                                    const SolveOptions& opts, Field v,
                                    bool converged, int iterations) {
  const auto proj = project(g, v, prm, opts.positivity, opts.project_tol);
  v *= proj.t;

  CriticalPointReport r;
  r.field = v;
  r.p = prm.p;
  r.crit = prm.crit;
  r.dim = prm.dim;
  r.outside_paper_hypotheses = prm.outside_paper_hypotheses;
  r.converged = converged;
  r.iterations = iterations;
  const Field grad = opts.positivity ? gradient_positive_part(g, v, prm)
                                     : gradient(g, v, prm);
  r.energy = opts.positivity ? energy_positive_part(g, v, prm)
                             : energy(g, v, prm);
  r.grad_norm = gradient_norm(g, grad);
  r.nehari_residual = proj.residual;
  r.norm_h1 = std::sqrt(grad_norm_sq(g, v));
  r.sup_norm = v.lpNorm<Eigen::Infinity>();
  r.barycenter = barycenter(g, v);
  r.width = std::sqrt(std::max(0.0, grad_second_moment(g, v, r.barycenter)));
  const double vmax = v.maxCoeff();
  r.positive = v.minCoeff() >= -1e-12 * std::max(vmax, 1e-300);
  return r;
}

// Limited-memory BFGS pairs with the inverse stencil as the base metric.
// Inner products pair gradients with steps, so the h^N factor cancels.
class LbfgsMemory {
 public:
  explicit LbfgsMemory(int m) : m_(m) {}

  void push(const DomainGrid& g, Field s, Field y) {
    const double sy = s.dot(y);
    if (!(sy > 1e-12 * s.norm() * y.norm())) return;  // curvature condition
    Entry e;
    e.ainv_y = laplacian_solve(g, y, 1e-10);
    e.y_ainv_y = y.dot(e.ainv_y);
    e.s = std::move(s);
    e.y = std::move(y);
    e.sy = sy;
    entries_.push_back(std::move(e));
    if (static_cast<int>(entries_.size()) > m_) entries_.erase(entries_.begin());
  }

  void clear() { entries_.clear(); }
  bool empty() const { return entries_.empty(); }

  // two-loop recursion; H0 = gamma * A^{-1}
  Field direction(const DomainGrid& g, const Field& grad) const {
    Field q = grad;
    std::vector<double> alpha(entries_.size());
    for (int i = static_cast<int>(entries_.size()) - 1; i >= 0; --i) {
      alpha[i] = entries_[i].s.dot(q) / entries_[i].sy;
      q -= alpha[i] * entries_[i].y;
    }
    Field r = laplacian_solve(g, q, 1e-10);
    if (!entries_.empty()) {
      const auto& last = entries_.back();
      r *= last.sy / std::max(last.y_ainv_y, 1e-300);
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const double beta = entries_[i].y.dot(r) / entries_[i].sy;
      r += (alpha[i] - beta) * entries_[i].s;
    }
    return -r;
  }

 private:
  struct Entry {
    Field s, y, ainv_y;
    double sy = 0.0, y_ainv_y = 0.0;
  };
  std::vector<Entry> entries_;
  int m_;
};

CriticalPointReport minimize(const DomainGrid& g, const ExponentParams& prm,
                             const Field& init, const SolveOptions& opts,
                             const DeflationSet& defl) {
  if (!(grad_norm_sq(g, init) > 1e-28))
    throw std::invalid_argument("ground_state: zero initial field");
  const double hN = g.cell_volume();
  const double eps = std::numeric_limits<double>::epsilon();
  const bool pos = opts.positivity;

  auto retract = [&](const Field& u) {
    const auto proj = project(g, u, prm, pos, opts.project_tol);
    return Field(proj.t * u);
  };
  auto grad_of = [&](const Field& u) {
    return pos ? gradient_positive_part(g, u, prm) : gradient(g, u, prm);
  };

  Field v = retract(init);
  double E = 0.0;
  double obj = objective(g, prm, pos, v, defl, &E);
  Field grad = grad_of(v);
  double gn = gradient_norm(g, grad);
  const double gn0 = std::max(gn, 1e-300);
  const double target = std::max(opts.gtol_rel * gn0, opts.gtol_abs);

  LbfgsMemory memory(8);
  double alpha = 1.0;
  bool converged = gn <= target;
  bool stalled = false;
  int iters = 0;

  for (int k = 0; k < opts.max_iter && !converged && !stalled; ++k) {
    iters = k + 1;
    const Field z = laplacian_solve(g, grad, 1e-10);

    Field dir;         // quasi-Newton (or deflated descent) direction
    double m;          // -directional derivative of the objective along dir
    bool quasi_newton = false;
    if (defl.empty()) {
      if (!memory.empty()) {
        dir = memory.direction(g, grad);
        m = -hN * grad.dot(dir);
        quasi_newton = m > 0.0;
      }
      if (!quasi_newton) {
        dir = -z;
        m = hN * grad.dot(z);
      }
    } else {
      double fac = 1.0;
      Field pen_pre = Field::Zero(v.size());   // A^{-1}-applied penalty part
      Field pen_eu = Field::Zero(v.size());    // Euclidean penalty part
      for (const Field* kf : defl.known) {
        const double d2 = std::max(grad_norm_sq(g, v - *kf), 1e-300);
        const double rho = defl.rho * grad_norm_sq(g, *kf);
        const double ck = -2.0 * rho / (d2 * d2) / (1.0 + rho / d2);
        fac *= 1.0 + rho / d2;
        pen_pre += ck * (v - *kf);
        pen_eu += ck * laplacian_apply(g, v - *kf);
      }
      const Field grad_obj = fac * grad + (E * fac) * pen_eu;
      const Field z_obj = fac * z + (E * fac) * pen_pre;
      dir = -z_obj;
      m = hN * grad_obj.dot(z_obj);
    }
    if (!(m > 0.0)) break;

    const double floor = 64.0 * eps * std::max(1.0, std::abs(obj));
    const Field v_old = v;
    const Field grad_old = grad;
    double step = quasi_newton ? 1.0 : alpha;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks && !accepted; ++bt) {
      const Field trial = v + step * dir;
      if (!(grad_norm_sq(g, trial) > 1e-28)) {
        step *= opts.backtrack;
        continue;
      }
      Field w;
      try {
        w = retract(trial);
      } catch (const std::runtime_error&) {
        step *= opts.backtrack;
        continue;
      }
      double Ew = 0.0;
      const double objw = objective(g, prm, pos, w, defl, &Ew);
      if (opts.armijo_c * step * m >= floor) {
        if (objw <= obj - opts.armijo_c * step * m) {
          v = w;
          E = Ew;
          obj = objw;
          grad = grad_of(v);
          gn = gradient_norm(g, grad);
          accepted = true;
        }
      } else {
        // energy differences are below roundoff; judge by gradient decrease
        const Field gw = grad_of(w);
        const double gnw = gradient_norm(g, gw);
        if (gnw <= gn) {
          v = w;
          E = Ew;
          obj = objw;
          grad = gw;
          gn = gnw;
          accepted = true;
        }
      }
      if (!accepted) step *= opts.backtrack;
    }
    if (accepted) {
      if (defl.empty()) memory.push(g, v - v_old, grad - grad_old);
      if (!quasi_newton) alpha = std::min(2.0 * step, 4.0);
      converged = gn <= target;
    } else if (quasi_newton) {
      memory.clear();  // retry this iterate with the plain direction
    } else {
      stalled = true;
    }
    if (opts.verbose && (k % 25 == 0 || converged || stalled))
      std::fprintf(stderr, "  it %4d  gn %.3e  step %.3e  qn %d  E %.12g\n", k,
                   gn, step, quasi_newton ? 1 : 0, E);
  }

  return finalize_report(g, prm, opts, v, converged, iters);
}

}  // namespace

CriticalPointReport ground_state(const DomainGrid& g, const ExponentParams& prm,
                                 const Field& init, const SolveOptions& opts) {
  return minimize(g, prm, init, opts, DeflationSet{});
}

// --- bump seeds --------------------------------------------------------------

namespace {

using BumpKey = std::tuple<double, double, int, int>;  // p, r, nodes, dim

struct BumpCacheEntry {
  DomainGrid grid;
  Field profile;
};

std::map<BumpKey, std::shared_ptr<const BumpCacheEntry>>& bump_cache() {
  static std::map<BumpKey, std::shared_ptr<const BumpCacheEntry>> cache;
  return cache;
}
std::mutex bump_mutex;

}  // namespace

Field make_bump_seed(const DomainGrid& g, const ExponentParams& prm,
                     const Eigen::Vector3d& center, double r) {
  if (!g.contains_ball(center, r))
    throw std::invalid_argument("make_bump_seed: B_r(center) not inside mask");

  int nb = 2 * static_cast<int>(std::ceil(r / g.h)) + 1;
  nb = std::clamp(nb, 17, 41);
  if (nb % 2 == 0) ++nb;
  const BumpKey key{prm.p, r, nb, g.dim};

  std::shared_ptr<const BumpCacheEntry> entry;
  {
    std::lock_guard<std::mutex> lock(bump_mutex);
    auto it = bump_cache().find(key);
    if (it != bump_cache().end()) {
      entry = it->second;
    } else {
      ShapeSpec bs;
      bs.tag = ShapeTag::ball;
      bs.dim = g.dim;
      bs.radius = r;
      auto e = std::make_shared<BumpCacheEntry>();
      e->grid = build_domain(bs, nb);
      Field init(e->grid.n_interior());
      for (int i = 0; i < init.size(); ++i) {
        const double d = (e->grid.interior_pos(i) - e->grid.center).norm();
        init[i] = std::cos(0.5 * M_PI * std::min(1.0, d / r));
      }
      SolveOptions o;
      o.positivity = true;
      o.gtol_rel = 1e-8;
      o.max_iter = 4000;
      e->profile = ground_state(e->grid, prm, init, o).field;
      bump_cache().emplace(key, e);
      entry = e;
    }
  }

  Field out(g.n_interior());
  for (int i = 0; i < out.size(); ++i) {
    Eigen::Vector3d x = g.interior_pos(i) - center + entry->grid.center;
    if (g.dim == 2) x[2] = entry->grid.center[2];
    const double d = (g.interior_pos(i) - center).head(g.dim).norm();
    out[i] = d < r ? interpolate(entry->grid, entry->profile, x) : 0.0;
  }
  return out;
}

double relative_distance(const DomainGrid& g, const Field& a, const Field& b) {
  const double na = std::sqrt(grad_norm_sq(g, a));
  const double nb = std::sqrt(grad_norm_sq(g, b));
  const double scale = std::max({na, nb, 1e-300});
  return std::sqrt(grad_norm_sq(g, a - b)) / scale;
}

std::vector<CriticalPointReport> multistart_deflate(
    const DomainGrid& g, const ExponentParams& prm,
    const std::vector<Field>& seeds, double dedupe_radius,
    const SolveOptions& opts) {
  if (seeds.empty())
    throw std::invalid_argument("multistart_deflate: empty seed list");
  if (!(dedupe_radius > 0.0))
    throw std::invalid_argument("multistart_deflate: dedupe radius must be > 0");

  std::vector<CriticalPointReport> runs;
  if (opts.threads > 1) {
    std::vector<std::future<CriticalPointReport>> futs;
    futs.reserve(seeds.size());
    for (const Field& s : seeds)
      futs.push_back(std::async(std::launch::async, [&, sp = s] {
        return ground_state(g, prm, sp, opts);
      }));
    for (auto& f : futs) runs.push_back(f.get());
  } else {
    for (const Field& s : seeds) runs.push_back(ground_state(g, prm, s, opts));
  }

  auto cluster = [&](std::vector<CriticalPointReport>& reps,
                     CriticalPointReport&& rep) {
    for (auto& existing : reps) {
      if (relative_distance(g, existing.field, rep.field) < dedupe_radius)
        return;  // already represented; reps are sorted by energy
    }
    reps.push_back(std::move(rep));
  };

  std::sort(runs.begin(), runs.end(),
            [](const auto& a, const auto& b) { return a.energy < b.energy; });
  std::vector<CriticalPointReport> reps;
  for (auto& r : runs)
    if (r.converged) cluster(reps, std::move(r));

  for (int round = 0; round < opts.deflation_rounds; ++round) {
    DeflationSet defl;
    defl.rho = opts.deflation_rho;
    std::vector<Field> anchors;
    anchors.reserve(reps.size());
    for (const auto& r : reps) anchors.push_back(r.field);
    for (const Field& a : anchors) defl.known.push_back(&a);

    std::vector<CriticalPointReport> extra;
    for (const Field& s : seeds) {
      SolveOptions coarse = opts;
      coarse.gtol_rel = std::max(opts.gtol_rel, 1e-5);
      CriticalPointReport probe;
      try {
        probe = minimize(g, prm, s, coarse, defl);
      } catch (const std::runtime_error&) {
        continue;
      }
      bool fresh = true;
      for (const Field& a : anchors)
        fresh = fresh && relative_distance(g, a, probe.field) >= dedupe_radius;
      if (!fresh) continue;
      auto polished = ground_state(g, prm, probe.field, opts);
      if (polished.converged) extra.push_back(std::move(polished));
    }
    std::sort(extra.begin(), extra.end(),
              [](const auto& a, const auto& b) { return a.energy < b.energy; });
    for (auto& r : extra) cluster(reps, std::move(r));
    std::sort(reps.begin(), reps.end(),
              [](const auto& a, const auto& b) { return a.energy < b.energy; });
  }

  std::sort(reps.begin(), reps.end(),
            [](const auto& a, const auto& b) { return a.energy < b.energy; });
  for (std::size_t i = 0; i < reps.size(); ++i) {
    reps[i].deflation_distances.clear();
    for (std::size_t j = 0; j < reps.size(); ++j)
      if (j != i)
        reps[i].deflation_distances.push_back(
            relative_distance(g, reps[i].field, reps[j].field));
  }
  return reps;
}

}  // namespace qsw

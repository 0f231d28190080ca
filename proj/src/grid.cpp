#include "qsw/grid.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace qsw {

std::string to_string(ShapeTag tag) {
  switch (tag) {
    case ShapeTag::rectangle: return "rectangle";
    case ShapeTag::ball: return "ball";
    case ShapeTag::annulus: return "annulus";
    case ShapeTag::rectangle_with_hole: return "rectangle_with_hole";
  }
  return "unknown";
}

ShapeTag shape_tag_from_string(const std::string& s) {
  if (s == "rectangle") return ShapeTag::rectangle;
  if (s == "ball") return ShapeTag::ball;
  if (s == "annulus") return ShapeTag::annulus;
  if (s == "rectangle_with_hole") return ShapeTag::rectangle_with_hole;
  throw std::invalid_argument("unknown shape tag: " + s);
}

namespace {

// Squared distance from node (i,j,k) to the box center in units of (h/2)^2,
// computed from integers so axis reflections are bit-exact.
double center_dist_sq(const std::array<int, 3>& c, const std::array<int, 3>& n,
                      int dim, double h) {
  double d2 = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double q = (2.0 * c[d] - (n[d] - 1)) * (h / 2.0);
    d2 += q * q;
  }
  return d2;
}

void check_connected(const DomainGrid& g) {
  const int n = g.n_interior();
  if (n == 0) return;
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int i = q.front();
    q.pop();
    for (int d = 0; d < 2 * g.dim; ++d) {
      const int nb = g.neighbors(i, d);
      if (nb >= 0 && !seen[nb]) {
        seen[nb] = 1;
        ++count;
        q.push(nb);
      }
    }
  }
  if (count != n)
    throw std::runtime_error("build_domain: interior mask is disconnected");
}

}  // namespace

DomainGrid build_domain(const ShapeSpec& spec, int resolution) {
  if (spec.dim != 2 && spec.dim != 3)
    throw std::invalid_argument("build_domain: dimension must be 2 or 3");
  if (resolution < 8)
    throw std::invalid_argument("build_domain: resolution must be >= 8");

  DomainGrid g;
  g.dim = spec.dim;
  g.spec = spec;
  g.resolution = resolution;

  switch (spec.tag) {
    case ShapeTag::ball: {
      if (!(spec.radius > 0))
        throw std::invalid_argument("build_domain: ball radius must be > 0");
      g.h = 2.0 * spec.radius / (resolution - 1);
      for (int d = 0; d < g.dim; ++d) g.shape[d] = resolution;
      g.origin = -spec.radius * Eigen::Vector3d::Ones();
      if (g.dim == 2) g.origin[2] = 0.0;
      break;
    }
    case ShapeTag::annulus: {
      if (!(spec.r_inner > 0) || !(spec.r_outer > spec.r_inner))
        throw std::invalid_argument(
            "build_domain: annulus radii must satisfy 0 < r_inner < r_outer");
      g.h = 2.0 * spec.r_outer / (resolution - 1);
      for (int d = 0; d < g.dim; ++d) g.shape[d] = resolution;
      g.origin = -spec.r_outer * Eigen::Vector3d::Ones();
      if (g.dim == 2) g.origin[2] = 0.0;
      break;
    }
    case ShapeTag::rectangle:
    case ShapeTag::rectangle_with_hole: {
      for (int d = 0; d < g.dim; ++d)
        if (!(spec.lengths[d] > 0))
          throw std::invalid_argument("build_domain: box lengths must be > 0");
      g.h = spec.lengths[0] / (resolution - 1);
      for (int d = 0; d < g.dim; ++d) {
        g.shape[d] = static_cast<int>(std::lround(spec.lengths[d] / g.h)) + 1;
        if (g.shape[d] < 3)
          throw std::invalid_argument("build_domain: box too thin for spacing");
      }
      g.origin.setZero();
      if (spec.tag == ShapeTag::rectangle_with_hole &&
          !(spec.hole_radius > 0 &&
            2 * spec.hole_radius < spec.lengths.head(g.dim).minCoeff()))
        throw std::invalid_argument("build_domain: hole does not fit in box");
      break;
    }
  }
  if (g.dim == 2) g.shape[2] = 1;

  g.center = g.origin + (g.h / 2.0) * Eigen::Vector3d(g.shape[0] - 1,
                                                      g.shape[1] - 1,
                                                      g.dim == 3 ? g.shape[2] - 1 : 0);

  const int total = g.total_nodes();
  g.mask.assign(total, 0);
  g.interior_of_node.assign(total, -1);

  for (int node = 0; node < total; ++node) {
    const auto c = g.node_coords(node);
    bool inside_box = true;
    for (int d = 0; d < g.dim; ++d)
      inside_box = inside_box && c[d] > 0 && c[d] < g.shape[d] - 1;
    if (!inside_box) continue;

    bool interior = false;
    switch (spec.tag) {
      case ShapeTag::rectangle:
        interior = true;
        break;
      case ShapeTag::ball:
        interior = center_dist_sq(c, g.shape, g.dim, g.h) <
                   spec.radius * spec.radius;
        break;
      case ShapeTag::annulus: {
        const double d2 = center_dist_sq(c, g.shape, g.dim, g.h);
        interior = d2 > spec.r_inner * spec.r_inner &&
                   d2 < spec.r_outer * spec.r_outer;
        break;
      }
      case ShapeTag::rectangle_with_hole:
        interior = center_dist_sq(c, g.shape, g.dim, g.h) >
                   spec.hole_radius * spec.hole_radius;
        break;
    }
    if (interior) {
      g.mask[node] = 1;
      g.interior_of_node[node] = static_cast<std::int32_t>(g.node_of_interior.size());
      g.node_of_interior.push_back(node);
    }
  }

  const int n = g.n_interior();
  if (n < 8)
    throw std::invalid_argument(
        "build_domain: degenerate grid (fewer than 8 interior nodes)");

  g.neighbors.resize(n, 2 * g.dim);
  for (int idx = 0; idx < n; ++idx) {
    const auto c = g.node_coords(g.node_of_interior[idx]);
    for (int d = 0; d < g.dim; ++d) {
      auto cm = c, cp = c;
      cm[d] -= 1;
      cp[d] += 1;
      g.neighbors(idx, 2 * d) = g.interior_of_node[g.node_index(cm[0], cm[1], cm[2])];
      g.neighbors(idx, 2 * d + 1) = g.interior_of_node[g.node_index(cp[0], cp[1], cp[2])];
    }
  }

  if (spec.tag == ShapeTag::annulus || spec.tag == ShapeTag::rectangle_with_hole)
    check_connected(g);
  return g;
}

bool DomainGrid::contains_ball(const Eigen::Vector3d& c, double r) const {
  bool any = false;
  for (int node = 0; node < total_nodes(); ++node) {
    Eigen::Vector3d x = node_pos(node);
    if (dim == 2) x[2] = c[2];
    const double d = (x - c).norm();
    if (d <= r) {
      if (!mask[node]) return false;
      any = true;
    }
  }
  return any;
}

std::vector<std::int32_t> DomainGrid::reflection_map(int axis) const {
  if (axis < 0 || axis >= dim)
    throw std::invalid_argument("reflection_map: bad axis");
  std::vector<std::int32_t> map(n_interior(), -1);
  for (int idx = 0; idx < n_interior(); ++idx) {
    auto c = node_coords(node_of_interior[idx]);
    c[axis] = shape[axis] - 1 - c[axis];
    const std::int32_t r = interior_of_node[node_index(c[0], c[1], c[2])];
    if (r < 0)
      throw std::runtime_error("reflection_map: mask not reflection symmetric");
    map[idx] = r;
  }
  return map;
}

Field laplacian_apply(const DomainGrid& g, const Field& v) {
  const int n = g.n_interior();
  if (v.size() != n) throw std::invalid_argument("laplacian_apply: size mismatch");
  Field out(n);
  const double inv_h2 = 1.0 / (g.h * g.h);
  const double diag = 2.0 * g.dim;
  for (int i = 0; i < n; ++i) {
    double acc = diag * v[i];
    for (int d = 0; d < g.dim; ++d) {
      const int m = g.neighbors(i, 2 * d);
      const int p = g.neighbors(i, 2 * d + 1);
      // left+right first: keeps the stencil bit-exact under reflections
      acc -= (m >= 0 ? v[m] : 0.0) + (p >= 0 ? v[p] : 0.0);
    }
    out[i] = acc * inv_h2;
  }
  return out;
}

double grad_norm_sq(const DomainGrid& g, const Field& v) {
  const int n = g.n_interior();
  if (v.size() != n) throw std::invalid_argument("grad_norm_sq: size mismatch");
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < g.dim; ++d) {
      const int p = g.neighbors(i, 2 * d + 1);
      const double dp = (p >= 0 ? v[p] : 0.0) - v[i];
      acc += dp * dp;
      if (g.neighbors(i, 2 * d) < 0) acc += v[i] * v[i];  // ghost face on the left
    }
  }
  const double hN = g.cell_volume();
  return acc * hN / (g.h * g.h);
}

double integrate(const DomainGrid& g, const Field& values) {
  if (values.size() != g.n_interior())
    throw std::invalid_argument("integrate: size mismatch");
  return g.cell_volume() * values.sum();
}

Eigen::Vector3d moment(const DomainGrid& g, const Field& values) {
  if (values.size() != g.n_interior())
    throw std::invalid_argument("moment: size mismatch");
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  for (int i = 0; i < g.n_interior(); ++i) acc += values[i] * g.interior_pos(i);
  return g.cell_volume() * acc;
}

namespace {

// Accumulate sum_faces w(face) * diff^2 over all faces with the callable
// receiving the face midpoint; shared by barycenter and width.
template <class Visit>
double visit_faces(const DomainGrid& g, const Field& v, Visit&& visit) {
  double den = 0.0;
  for (int i = 0; i < g.n_interior(); ++i) {
    const Eigen::Vector3d xi = g.interior_pos(i);
    for (int d = 0; d < g.dim; ++d) {
      const int p = g.neighbors(i, 2 * d + 1);
      const double dp = (p >= 0 ? v[p] : 0.0) - v[i];
      Eigen::Vector3d mid = xi;
      mid[d] += g.h / 2.0;
      visit(mid, dp * dp);
      den += dp * dp;
      if (g.neighbors(i, 2 * d) < 0) {
        Eigen::Vector3d midm = xi;
        midm[d] -= g.h / 2.0;
        visit(midm, v[i] * v[i]);
        den += v[i] * v[i];
      }
    }
  }
  return den;
}

}  // namespace

Eigen::Vector3d barycenter(const DomainGrid& g, const Field& v) {
  Eigen::Vector3d num = Eigen::Vector3d::Zero();
  const double den = visit_faces(
      g, v, [&](const Eigen::Vector3d& mid, double w) { num += w * mid; });
  if (den <= 0.0) return g.center;
  return num / den;
}

double grad_second_moment(const DomainGrid& g, const Field& v,
                          const Eigen::Vector3d& point) {
  double num = 0.0;
  const double den = visit_faces(g, v, [&](const Eigen::Vector3d& mid, double w) {
    num += w * (mid - point).squaredNorm();
  });
  if (den <= 0.0) return 0.0;
  return num / den;
}

Field reflect(const DomainGrid& g, const Field& v, int axis) {
  const auto map = g.reflection_map(axis);
  Field out(v.size());
  for (int i = 0; i < v.size(); ++i) out[map[i]] = v[i];
  return out;
}

double reflection_asymmetry(const DomainGrid& g, const Field& v) {
  const double nv = v.norm();
  if (nv == 0.0) return 0.0;
  double worst = 0.0;
  for (int d = 0; d < g.dim; ++d)
    worst = std::max(worst, (v - reflect(g, v, d)).norm() / nv);
  return worst;
}

double poincare_lower_bound(const DomainGrid& g) {
  double lam = 0.0;
  for (int d = 0; d < g.dim; ++d) {
    const double s = std::sin(M_PI / (2.0 * (g.shape[d] - 1)));
    lam += 4.0 / (g.h * g.h) * s * s;
  }
  return lam;
}

double interpolate(const DomainGrid& g, const Field& v,
                   const Eigen::Vector3d& x) {
  const int kd = g.dim;
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> w{0.0, 0.0, 0.0};
  for (int d = 0; d < kd; ++d) {
    const double s = (x[d] - g.origin[d]) / g.h;
    const double fl = std::floor(s);
    base[d] = static_cast<int>(fl);
    w[d] = s - fl;
    if (base[d] < -1 || base[d] > g.shape[d] - 1) return 0.0;
  }
  double acc = 0.0;
  const int corners = 1 << kd;
  for (int c = 0; c < corners; ++c) {
    double weight = 1.0;
    std::array<int, 3> idx = base;
    for (int d = 0; d < kd; ++d) {
      const int bit = (c >> d) & 1;
      idx[d] += bit;
      weight *= bit ? w[d] : 1.0 - w[d];
    }
    if (weight == 0.0) continue;
    bool in = true;
    for (int d = 0; d < kd; ++d)
      in = in && idx[d] >= 0 && idx[d] < g.shape[d];
    if (!in) continue;
    const int node = g.node_index(idx[0], idx[1], idx[2]);
    const int ii = g.interior_of_node[node];
    if (ii >= 0) acc += weight * v[ii];
  }
  return acc;
}

double distance_to_domain(const DomainGrid& g, const Eigen::Vector3d& x) {
  double best = std::numeric_limits<double>::infinity();
  for (int idx = 0; idx < g.n_interior(); ++idx) {
    Eigen::Vector3d p = g.interior_pos(idx);
    if (g.dim == 2) p[2] = x[2];
    const double d = (p - x).norm();
    if (d < best) best = d;
    if (best <= g.h / 2.0) return 0.0;  // inside an interior node's cell
  }
  return best;
}

Field laplacian_solve(const DomainGrid& g, const Field& rhs, double rel_tol,
                      int max_iter) {
  const int n = g.n_interior();
  if (max_iter < 0) max_iter = 20 * n;
  Field x = Field::Zero(n);
  Field r = rhs;
  Field p = r;
  double rs = r.squaredNorm();
  const double stop = rel_tol * rel_tol * rs;
  if (rs == 0.0) return x;
  for (int it = 0; it < max_iter && rs > stop; ++it) {
    const Field Ap = laplacian_apply(g, p);
    const double alpha = rs / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    const double rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  return x;
}

}  // namespace qsw

#pragma once

// Masked uniform Cartesian grids in 2 or 3 dimensions. The domain is the set
// of interior nodes; everything outside carries the homogeneous Dirichlet
// value and is never stored. Fields are plain Eigen vectors over the
// interior nodes, and all operators are free functions on (grid, vector).

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsw {

using Field = Eigen::VectorXd;

enum class ShapeTag { rectangle, ball, annulus, rectangle_with_hole };

std::string to_string(ShapeTag tag);
ShapeTag shape_tag_from_string(const std::string& s);

struct ShapeSpec {
  ShapeTag tag = ShapeTag::ball;
  int dim = 3;
  double radius = 0.5;                     // ball
  double r_inner = 0.2, r_outer = 0.5;     // annulus
  Eigen::Vector3d lengths{1.0, 1.0, 1.0};  // rectangle[_with_hole]
  double hole_radius = 0.25;               // rectangle_with_hole
};

struct DomainGrid {
  int dim = 3;
  std::array<int, 3> shape{0, 0, 1};  // node counts per axis; shape[2]=1 in 2D
  double h = 0.0;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  ShapeSpec spec;
  int resolution = 0;

  std::vector<std::uint8_t> mask;        // per node, 1 = interior
  std::vector<std::int32_t> interior_of_node;  // -1 for boundary/exterior
  std::vector<std::int32_t> node_of_interior;
  // 2*dim columns: (-x,+x,-y,+y[,-z,+z]); -1 means Dirichlet ghost.
  Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic> neighbors;

  int n_interior() const { return static_cast<int>(node_of_interior.size()); }
  int total_nodes() const { return shape[0] * shape[1] * shape[2]; }
  double cell_volume() const { return dim == 2 ? h * h : h * h * h; }

  int node_index(int i, int j, int k) const {
    return (k * shape[1] + j) * shape[0] + i;
  }
  std::array<int, 3> node_coords(int node) const {
    const int i = node % shape[0];
    const int j = (node / shape[0]) % shape[1];
    const int k = node / (shape[0] * shape[1]);
    return {i, j, k};
  }
  Eigen::Vector3d node_pos(int node) const {
    const auto c = node_coords(node);
    return origin + h * Eigen::Vector3d(c[0], c[1], c[2]);
  }
  Eigen::Vector3d interior_pos(int idx) const {
    return node_pos(node_of_interior[idx]);
  }

  /// True when every node center inside the closed ball B_r(c) is interior.
  bool contains_ball(const Eigen::Vector3d& c, double r) const;

  /// Interior-index permutation of the reflection through the grid center
  /// along `axis`. Throws if the mask is not invariant.
  std::vector<std::int32_t> reflection_map(int axis) const;
};

/// Build the masked grid realizing `spec` with `resolution` nodes per axis
/// along the reference axis. Rejects degenerate inputs (resolution < 8,
/// non-ordered radii, fewer than 8 interior nodes, disconnected annulus).
DomainGrid build_domain(const ShapeSpec& spec, int resolution);

// --- stencil and quadrature -------------------------------------------------

/// Applies the (positive definite) 5/7-point -Laplacian with Dirichlet ghosts.
Field laplacian_apply(const DomainGrid& g, const Field& v);

/// Dirichlet energy  ~ \int |grad v|^2, assembled from forward differences
/// over all faces (including interior-ghost faces).
double grad_norm_sq(const DomainGrid& g, const Field& v);

/// Midpoint quadrature h^N * sum g_i.
double integrate(const DomainGrid& g, const Field& values);

/// h^N * sum x_i g_i.
Eigen::Vector3d moment(const DomainGrid& g, const Field& values);

/// Gradient-energy barycenter: face-weighted \int x |grad v|^2 / \int |grad v|^2.
Eigen::Vector3d barycenter(const DomainGrid& g, const Field& v);

/// Second moment of |grad v|^2 about `point`, normalised; the squared
/// concentration width.
double grad_second_moment(const DomainGrid& g, const Field& v,
                          const Eigen::Vector3d& point);

/// Reflect a field through the grid center along `axis`.
Field reflect(const DomainGrid& g, const Field& v, int axis);

/// max_axis ||v - reflect(v)|| / ||v||; zero for symmetric fields.
double reflection_asymmetry(const DomainGrid& g, const Field& v);

/// Lower bound on the Rayleigh quotient of the stencil from the bounding box
/// (Dirichlet eigenvalue of the enclosing rectangle grid).
double poincare_lower_bound(const DomainGrid& g);

/// Trilinear (bilinear in 2D) interpolation of an interior field at `x`,
/// zero outside the mask.
double interpolate(const DomainGrid& g, const Field& v,
                   const Eigen::Vector3d& x);

/// Distance from `x` to the nearest interior node center (0 if `x` lies in
/// the cell of an interior node); the discrete d(x, Omega).
double distance_to_domain(const DomainGrid& g, const Eigen::Vector3d& x);

/// Conjugate gradients for laplacian_apply; deterministic, matrix-free.
Field laplacian_solve(const DomainGrid& g, const Field& rhs,
                      double rel_tol = 1e-10, int max_iter = -1);

}  // namespace qsw

#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace wavenull {

/// Cubic Hermite shape functions on an interval of length `delta` with local
/// coordinate c in [0,1]:
///   0: (1+2c)(1-c)^2     value at the left node
///   1: c^2 (3-2c)        value at the right node
///   2: delta c (1-c)^2   derivative at the left node
///   3: delta c^2 (c-1)   derivative at the right node
/// Derivatives are taken with respect to the physical coordinate.
double hermite_eval(int i, double c, double delta, int deriv);

/// All four shape functions (value, first and second derivative) at once.
struct HermiteValues {
  std::array<double, 4> v;
  std::array<double, 4> d1;
  std::array<double, 4> d2;
};

HermiteValues hermite_all(double c, double delta);

/// Uniform Nx x Nt quadrangulation of [0,1] x [0,T]. Node indices are
/// zero-based: x_k = k/Nx, t_l = l T/Nt.
struct SpaceTimeMesh {
  int nx = 0;
  int nt = 0;
  double T = 0.0;

  SpaceTimeMesh() = default;
  SpaceTimeMesh(int nx_, int nt_, double T_);

  double dx() const { return 1.0 / nx; }
  double dt() const { return T / nt; }
  double x(int k) const { return static_cast<double>(k) / nx; }
  double t(int l) const { return T * static_cast<double>(l) / nt; }

  /// Cell index containing the coordinate (upper edge belongs to the last cell).
  int cell_x(double x) const;
  int cell_t(double t) const;
};

/// Nodal degree of freedom kinds, in storage order.
enum NodalDof : int { dof_u = 0, dof_ux = 1, dof_ut = 2, dof_uxt = 3 };

/// Global numbering of the Hermite DOFs of P_h.
///
/// Nodes are ordered time-level-major, space-minor with four contiguous DOFs
/// per node. Value and time-derivative DOFs on x = 0 and x = 1 are
/// constrained to zero and dropped from the free numbering.
class DofMap {
 public:
  explicit DofMap(const SpaceTimeMesh& mesh);

  const SpaceTimeMesh& mesh() const { return mesh_; }

  int full_index(int k, int l, int d) const { return ((l * (mesh_.nx + 1)) + k) * 4 + d; }
  /// -1 for constrained DOFs.
  int free_index(int k, int l, int d) const { return free_of_full_[full_index(k, l, d)]; }
  bool constrained(int k, int l, int d) const { return free_index(k, l, d) < 0; }

  std::size_t num_full() const { return free_of_full_.size(); }
  std::size_t num_free() const { return num_free_; }

  /// Largest |i - j| over free DOFs sharing a cell.
  int half_bandwidth() const { return half_bandwidth_; }

  /// Free indices of the 16 local DOFs of cell (k,l), -1 when constrained.
  /// Local ordering: node (i,j) in {0,1}^2 as 4*(2j+i) + d.
  std::array<int, 16> cell_dofs(int k, int l) const;

 private:
  SpaceTimeMesh mesh_;
  std::vector<int> free_of_full_;
  std::size_t num_free_ = 0;
  int half_bandwidth_ = 0;
};

/// For local DOF `a` of a cell, the x and t shape indices of its tensor factor.
struct LocalShape {
  int x_shape;
  int t_shape;
};

constexpr LocalShape local_shape(int a) {
  const int node = a / 4;
  const int d = a % 4;
  const int i = node % 2;
  const int j = node / 2;
  const int ax = (d == dof_ux || d == dof_uxt) ? 1 : 0;
  const int at = (d == dof_ut || d == dof_uxt) ? 1 : 0;
  return {i + 2 * ax, j + 2 * at};
}

/// A C^1 piecewise-bicubic field on the space-time mesh (an element of P_h).
class FieldPh {
 public:
  explicit FieldPh(std::shared_ptr<const DofMap> dofs);
  FieldPh(std::shared_ptr<const DofMap> dofs, std::vector<double> coeffs);

  const DofMap& dofmap() const { return *dofs_; }
  std::shared_ptr<const DofMap> dofmap_ptr() const { return dofs_; }
  const SpaceTimeMesh& mesh() const { return dofs_->mesh(); }

  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }

  /// Nodal DOF value; constrained DOFs read as exact zero.
  double nodal(int k, int l, int d) const;

  /// Value or mixed derivative d^{ox+ot} p / dx^ox dt^ot at (x,t), orders <= 2.
  double eval(double x, double t, int ox = 0, int ot = 0) const;

 private:
  std::shared_ptr<const DofMap> dofs_;
  std::vector<double> coeffs_;
};

/// u with the derivatives needed by the Hermite interpolation operator.
struct SmoothFunction2D {
  std::function<double(double, double)> u;
  std::function<double(double, double)> ux;
  std::function<double(double, double)> ut;
  std::function<double(double, double)> uxt;
};

/// Pi_h u: matches u, u_x, u_t, u_xt at every node. Throws
/// constraint_violation when u or u_t does not vanish on x in {0,1}.
FieldPh interpolate(const SmoothFunction2D& u, std::shared_ptr<const DofMap> dofs);

/// Hermite-in-time representation of p_x(1, .): node values and time
/// derivatives at every t_l.
struct TraceRaw {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> derivs;
};

TraceRaw boundary_trace_x(const FieldPh& f);

/// Aggregate element integrals of the interpolation error expansion on one
/// cell, computed by quadrature, alongside their closed forms.
struct ElementMoments {
  // order: m, n, p, |t - t_j|^3, |x - x_i|^3, |x - x_i|^2 |t - t_j|^3
  std::array<double, 6> quadrature;
  std::array<double, 6> closed_form;
};

ElementMoments element_moment_oracles(double dx, double dt);

/// CSV with header `k,l,u,ux,ut,uxt`, one row per node.
void write_field_csv(std::ostream& out, const FieldPh& f);
FieldPh read_field_csv(std::istream& in, double T);

/// Exact embedding of a field into a nested refinement (fine nx, nt multiples).
FieldPh prolongate(const FieldPh& coarse, std::shared_ptr<const DofMap> fine);

}  // namespace wavenull

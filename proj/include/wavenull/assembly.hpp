#pragma once

#include <memory>
#include <span>
#include <vector>

#include "wavenull/fem_space.hpp"
#include "wavenull/linalg.hpp"
#include "wavenull/problem.hpp"

namespace wavenull {

/// Value and the derivatives of a function that the wave operator needs.
struct PointJet {
  double v = 0.0;
  double x = 0.0;
  double t = 0.0;
  double xx = 0.0;
  double tt = 0.0;
};

/// L q = q_tt - a_x q_x - a q_xx + b q at (x,t).
double apply_L(const PointJet& q, const CoefficientField& a, const PotentialField& b, double x,
               double t);

/// The two weights of the bilinear form as used by a given mode: the interior
/// weight rho^{-2} and the boundary weight theta^2 rho(1,.)^{-2}, either
/// evaluated pointwise or replaced by their nodal (bi)linear interpolants.
class WeightField {
 public:
  WeightField(const CarlemanWeights& weights, const SpaceTimeMesh& mesh, WeightMode mode);

  /// Interior weight in cell (k,l) at local coordinates (cx, ct).
  double interior(int k, int l, double cx, double ct) const;
  /// Boundary weight on time cell l at local coordinate ct.
  double boundary(int l, double ct) const;

  WeightMode mode() const { return mode_; }

 private:
  CarlemanWeights w_;
  SpaceTimeMesh mesh_;
  WeightMode mode_;
  std::vector<double> nodal_interior_;  // (nx+1) x (nt+1), time-major
  std::vector<double> nodal_boundary_;  // nt+1
};

/// Bilinear form m_h over P_h:
///   sum_K int_K W L phi_i L phi_j + int_0^T a(1)^2 W0 (phi_i)_x(1,t) (phi_j)_x(1,t) dt
BandedSpdMatrix assemble_M(const DofMap& dofs, const ProblemConfig& config, WeightMode mode,
                           int quad_order = 5);

/// Unweighted (rho = 1) interior form without the boundary term.
BandedSpdMatrix assemble_M_unweighted(const DofMap& dofs, const ProblemConfig& config,
                                      int quad_order = 5);

/// Closed-form solution of -w'' = f, w(0) = w(1) = 0 for f piecewise linear
/// on a uniform grid of [0,1] (given by its nodal values).
class PoissonInverse1D {
 public:
  explicit PoissonInverse1D(std::vector<double> nodal_f);

  double value(double x) const;
  double slope(double x) const;

 private:
  int locate(double x) const;

  int n_;
  double h_;
  std::vector<double> f_;
  std::vector<double> F_;  // int_0^{x_k} f
  std::vector<double> G_;  // int_0^{x_k} F
  double c_ = 0.0;         // w'(0)
};

PoissonInverse1D neg_laplacian_inverse_1d(std::span<const double> nodal_f);

/// Nodal samples of a data function on x_k = k/nx.
std::vector<double> nodal_samples(const DataFunction& f, int nx);

/// Load l_h(q) = int pi(y0) q_t(.,0) - <pi(y1), q(.,0)>, the pairing taken as
/// int w' q_x(.,0) with -w'' = pi(y1).
std::vector<double> assemble_rhs(const DofMap& dofs, const InitialData& data);

/// Gram matrix of int p_x(x,0) q_x(x,0) + p_t(x,0) q_t(x,0) dx.
BandedSpdMatrix assemble_A_obs(const DofMap& dofs);

/// Matrix-free evaluation of m_h(p, q) by quadrature, independent of the
/// banded assembly path.
double energy_form(const FieldPh& p, const FieldPh& q, const ProblemConfig& config,
                   WeightMode mode, int quad_order = 5);
double energy_norm_sq(const FieldPh& p, const ProblemConfig& config, WeightMode mode,
                      int quad_order = 5);

/// Matrix-free l_h(q).
double load_functional(const FieldPh& q, const InitialData& data);

}  // namespace wavenull

#include "wavenull/assembly.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "wavenull/error.hpp"
#include "wavenull/quadrature.hpp"

namespace wavenull {

double apply_L(const PointJet& q, const CoefficientField& a, const PotentialField& b, double x,
               double t) {
  return q.tt - a.slope(x) * q.x - a.value(x) * q.xx + b(x, t) * q.v;
}

// ---------------------------------------------------------------------------

WeightField::WeightField(const CarlemanWeights& weights, const SpaceTimeMesh& mesh,
                         WeightMode mode)
    : w_(weights), mesh_(mesh), mode_(mode) {
  if (mode_ == WeightMode::interpolated) {
    nodal_interior_.resize(static_cast<std::size_t>(mesh.nx + 1) * (mesh.nt + 1));
    for (int l = 0; l <= mesh.nt; ++l) {
      for (int k = 0; k <= mesh.nx; ++k) {
        nodal_interior_[l * (mesh.nx + 1) + k] = w_.rho_inv2(mesh.x(k), mesh.t(l));
      }
    }
    nodal_boundary_.resize(mesh.nt + 1);
    for (int l = 0; l <= mesh.nt; ++l) nodal_boundary_[l] = w_.control_weight(mesh.t(l));
  }
}

double WeightField::interior(int k, int l, double cx, double ct) const {
  if (mode_ == WeightMode::exact) {
    return w_.rho_inv2(mesh_.x(k) + cx * mesh_.dx(), mesh_.t(l) + ct * mesh_.dt());
  }
  const std::size_t row = mesh_.nx + 1;
  const double w00 = nodal_interior_[l * row + k];
  const double w10 = nodal_interior_[l * row + k + 1];
  const double w01 = nodal_interior_[(l + 1) * row + k];
  const double w11 = nodal_interior_[(l + 1) * row + k + 1];
  return (1.0 - cx) * (1.0 - ct) * w00 + cx * (1.0 - ct) * w10 + (1.0 - cx) * ct * w01 +
         cx * ct * w11;
}

double WeightField::boundary(int l, double ct) const {
  if (mode_ == WeightMode::exact) return w_.control_weight(mesh_.t(l) + ct * mesh_.dt());
  return (1.0 - ct) * nodal_boundary_[l] + ct * nodal_boundary_[l + 1];
}

// ---------------------------------------------------------------------------

namespace {

template <typename WeightFn>
void assemble_interior(const DofMap& dofs, const ProblemConfig& config, WeightFn&& weight,
                       int quad_order, BandedSpdMatrix& m) {
  const SpaceTimeMesh& mesh = dofs.mesh();
  const GaussRule& g = gauss_unit(quad_order);
  const std::size_t nq = g.size();
  const double dx = mesh.dx();
  const double dt = mesh.dt();

  std::vector<HermiteValues> hx(nq);
  std::vector<HermiteValues> ht(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    hx[q] = hermite_all(g.points[q], dx);
    ht[q] = hermite_all(g.points[q], dt);
  }
  std::array<LocalShape, 16> shapes{};
  for (int a = 0; a < 16; ++a) shapes[a] = local_shape(a);

  std::vector<double> a_val(nq);
  std::vector<double> a_slope(nq);
  std::array<double, 16 * 16> ke{};
  std::array<double, 16> lphi{};
  for (int k = 0; k < mesh.nx; ++k) {
    for (std::size_t q = 0; q < nq; ++q) {
      const double x = mesh.x(k) + g.points[q] * dx;
      a_val[q] = config.coefficient.value(x);
      a_slope[q] = config.coefficient.slope(x);
    }
    for (int l = 0; l < mesh.nt; ++l) {
      ke.fill(0.0);
      for (std::size_t qa = 0; qa < nq; ++qa) {
        const double x = mesh.x(k) + g.points[qa] * dx;
        const HermiteValues& X = hx[qa];
        for (std::size_t qb = 0; qb < nq; ++qb) {
          const double t = mesh.t(l) + g.points[qb] * dt;
          const HermiteValues& Tm = ht[qb];
          const double b = config.potential(x, t);
          const double w =
              g.weights[qa] * g.weights[qb] * dx * dt * weight(k, l, g.points[qa], g.points[qb]);
          for (int a = 0; a < 16; ++a) {
            const LocalShape s = shapes[a];
            lphi[a] = X.v[s.x_shape] * Tm.d2[s.t_shape] -
                      a_slope[qa] * X.d1[s.x_shape] * Tm.v[s.t_shape] -
                      a_val[qa] * X.d2[s.x_shape] * Tm.v[s.t_shape] +
                      b * X.v[s.x_shape] * Tm.v[s.t_shape];
          }
          for (int a = 0; a < 16; ++a) {
            const double wa = w * lphi[a];
            for (int c = 0; c <= a; ++c) ke[a * 16 + c] += wa * lphi[c];
          }
        }
      }
      const std::array<int, 16> idx = dofs.cell_dofs(k, l);
      for (int a = 0; a < 16; ++a) {
        if (idx[a] < 0) continue;
        for (int c = 0; c <= a; ++c) {
          if (idx[c] < 0) continue;
          const double v = ke[a * 16 + c];
          if (a != c && idx[a] == idx[c]) {
            m.add(idx[a], idx[c], 2.0 * v);
          } else {
            m.add(idx[a], idx[c], v);
          }
        }
      }
    }
  }
}

}  // namespace

BandedSpdMatrix assemble_M(const DofMap& dofs, const ProblemConfig& config, WeightMode mode,
                           int quad_order) {
  const SpaceTimeMesh& mesh = dofs.mesh();
  const CarlemanWeights weights(config.weights);
  const WeightField wf(weights, mesh, mode);
  BandedSpdMatrix m(dofs.num_free(), dofs.half_bandwidth());
  assemble_interior(
      dofs, config,
      [&](int k, int l, double cx, double ct) { return wf.interior(k, l, cx, ct); }, quad_order, m);

  // Boundary observation term at x = 1: only u_x and u_xt DOFs of the last
  // node column have a non-zero x-derivative there.
  const GaussRule& g = gauss_unit(quad_order);
  const double a1 = config.coefficient.value(1.0);
  const double dt = mesh.dt();
  for (int l = 0; l < mesh.nt; ++l) {
    const int idx[4] = {dofs.free_index(mesh.nx, l, dof_ux), dofs.free_index(mesh.nx, l, dof_uxt),
                        dofs.free_index(mesh.nx, l + 1, dof_ux),
                        dofs.free_index(mesh.nx, l + 1, dof_uxt)};
    const int tshape[4] = {0, 2, 1, 3};
    double ke[4][4] = {};
    for (std::size_t q = 0; q < g.size(); ++q) {
      const HermiteValues ht = hermite_all(g.points[q], dt);
      const double w = g.weights[q] * dt * a1 * a1 * wf.boundary(l, g.points[q]);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j <= i; ++j) ke[i][j] += w * ht.v[tshape[i]] * ht.v[tshape[j]];
      }
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j <= i; ++j) m.add(idx[i], idx[j], ke[i][j]);
    }
  }
  return m;
}

BandedSpdMatrix assemble_M_unweighted(const DofMap& dofs, const ProblemConfig& config,
                                      int quad_order) {
  BandedSpdMatrix m(dofs.num_free(), dofs.half_bandwidth());
  assemble_interior(
      dofs, config, [](int, int, double, double) { return 1.0; }, quad_order, m);
  return m;
}

// ---------------------------------------------------------------------------

PoissonInverse1D::PoissonInverse1D(std::vector<double> nodal_f)
    : n_(static_cast<int>(nodal_f.size()) - 1), f_(std::move(nodal_f)) {
  if (n_ < 1) throw Error(ErrorCode::invalid_argument, "Poisson inverse needs at least two nodes");
  h_ = 1.0 / n_;
  F_.assign(n_ + 1, 0.0);
  G_.assign(n_ + 1, 0.0);
  for (int k = 0; k < n_; ++k) {
    const double df = f_[k + 1] - f_[k];
    F_[k + 1] = F_[k] + f_[k] * h_ + df * h_ / 2.0;
    G_[k + 1] = G_[k] + F_[k] * h_ + f_[k] * h_ * h_ / 2.0 + df * h_ * h_ / 6.0;
  }
  c_ = G_[n_];
}

int PoissonInverse1D::locate(double x) const {
  return std::clamp(static_cast<int>(std::floor(x * n_)), 0, n_ - 1);
}

double PoissonInverse1D::value(double x) const {
  const int k = locate(x);
  const double s = x - static_cast<double>(k) / n_;
  const double df = f_[k + 1] - f_[k];
  const double G = G_[k] + F_[k] * s + f_[k] * s * s / 2.0 + df * s * s * s / (6.0 * h_);
  return c_ * x - G;
}

double PoissonInverse1D::slope(double x) const {
  const int k = locate(x);
  const double s = x - static_cast<double>(k) / n_;
  const double df = f_[k + 1] - f_[k];
  const double F = F_[k] + f_[k] * s + df * s * s / (2.0 * h_);
  return c_ - F;
}

PoissonInverse1D neg_laplacian_inverse_1d(std::span<const double> nodal_f) {
  return PoissonInverse1D(std::vector<double>(nodal_f.begin(), nodal_f.end()));
}

std::vector<double> nodal_samples(const DataFunction& f, int nx) {
  std::vector<double> out(nx + 1);
  for (int k = 0; k <= nx; ++k) out[k] = f(static_cast<double>(k) / nx);
  return out;
}

std::vector<double> assemble_rhs(const DofMap& dofs, const InitialData& data) {
  const SpaceTimeMesh& mesh = dofs.mesh();
  const std::vector<double> y0 = nodal_samples(data.y0, mesh.nx);
  const PoissonInverse1D w(nodal_samples(data.y1, mesh.nx));
  std::vector<double> rhs(dofs.num_free(), 0.0);
  const GaussRule& g = gauss_unit(5);
  const double dx = mesh.dx();
  for (int k = 0; k < mesh.nx; ++k) {
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double c = g.points[q];
      const double x = mesh.x(k) + c * dx;
      const double wq = g.weights[q] * dx;
      const HermiteValues X = hermite_all(c, dx);
      const double y0h = (1.0 - c) * y0[k] + c * y0[k + 1];
      const double wp = w.slope(x);
      for (int i = 0; i < 2; ++i) {
        // q_t(x,0) picks the time-derivative DOFs, q(x,0) the value DOFs.
        const int iut = dofs.free_index(k + i, 0, dof_ut);
        const int iuxt = dofs.free_index(k + i, 0, dof_uxt);
        const int iu = dofs.free_index(k + i, 0, dof_u);
        const int iux = dofs.free_index(k + i, 0, dof_ux);
        if (iut >= 0) rhs[iut] += wq * y0h * X.v[i];
        if (iuxt >= 0) rhs[iuxt] += wq * y0h * X.v[i + 2];
        if (iu >= 0) rhs[iu] -= wq * wp * X.d1[i];
        if (iux >= 0) rhs[iux] -= wq * wp * X.d1[i + 2];
      }
    }
  }
  return rhs;
}

BandedSpdMatrix assemble_A_obs(const DofMap& dofs) {
  const SpaceTimeMesh& mesh = dofs.mesh();
  BandedSpdMatrix a(dofs.num_free(), dofs.half_bandwidth());
  const GaussRule& g = gauss_unit(5);
  const double dx = mesh.dx();
  for (int k = 0; k < mesh.nx; ++k) {
    // p_x(x,0) from value-type DOFs, p_t(x,0) from time-derivative DOFs.
    const int vidx[4] = {dofs.free_index(k, 0, dof_u), dofs.free_index(k + 1, 0, dof_u),
                         dofs.free_index(k, 0, dof_ux), dofs.free_index(k + 1, 0, dof_ux)};
    const int tidx[4] = {dofs.free_index(k, 0, dof_ut), dofs.free_index(k + 1, 0, dof_ut),
                         dofs.free_index(k, 0, dof_uxt), dofs.free_index(k + 1, 0, dof_uxt)};
    double kx[4][4] = {};
    double kt[4][4] = {};
    for (std::size_t q = 0; q < g.size(); ++q) {
      const HermiteValues X = hermite_all(g.points[q], dx);
      const double w = g.weights[q] * dx;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          kx[i][j] += w * X.d1[i] * X.d1[j];
          kt[i][j] += w * X.v[i] * X.v[j];
        }
      }
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (vidx[i] >= 0 && vidx[j] >= 0 && vidx[i] >= vidx[j]) a.add(vidx[i], vidx[j], kx[i][j]);
        if (tidx[i] >= 0 && tidx[j] >= 0 && tidx[i] >= tidx[j]) a.add(tidx[i], tidx[j], kt[i][j]);
      }
    }
  }
  return a;
}

// ---------------------------------------------------------------------------

namespace {

/// Evaluates p and its derivatives on a cell at tensor quadrature points.
std::array<double, 16> gather_local(const FieldPh& p, int k, int l) {
  std::array<double, 16> c{};
  for (int a = 0; a < 16; ++a) {
    const int node = a / 4;
    c[a] = p.nodal(k + node % 2, l + node / 2, a % 4);
  }
  return c;
}

PointJet local_jet(const std::array<double, 16>& c, const HermiteValues& X,
                   const HermiteValues& Tm) {
  PointJet j;
  for (int a = 0; a < 16; ++a) {
    if (c[a] == 0.0) continue;
    const LocalShape s = local_shape(a);
    j.v += c[a] * X.v[s.x_shape] * Tm.v[s.t_shape];
    j.x += c[a] * X.d1[s.x_shape] * Tm.v[s.t_shape];
    j.t += c[a] * X.v[s.x_shape] * Tm.d1[s.t_shape];
    j.xx += c[a] * X.d2[s.x_shape] * Tm.v[s.t_shape];
    j.tt += c[a] * X.v[s.x_shape] * Tm.d2[s.t_shape];
  }
  return j;
}

}  // namespace

double energy_form(const FieldPh& p, const FieldPh& q, const ProblemConfig& config,
                   WeightMode mode, int quad_order) {
  const SpaceTimeMesh& mesh = p.mesh();
  const CarlemanWeights weights(config.weights);
  const WeightField wf(weights, mesh, mode);
  const GaussRule& g = gauss_unit(quad_order);
  const double dx = mesh.dx();
  const double dt = mesh.dt();
  double sum = 0.0;
  for (int l = 0; l < mesh.nt; ++l) {
    for (int k = 0; k < mesh.nx; ++k) {
      const auto cp = gather_local(p, k, l);
      const auto cq = gather_local(q, k, l);
      for (std::size_t qa = 0; qa < g.size(); ++qa) {
        const HermiteValues X = hermite_all(g.points[qa], dx);
        const double x = mesh.x(k) + g.points[qa] * dx;
        for (std::size_t qb = 0; qb < g.size(); ++qb) {
          const HermiteValues Tm = hermite_all(g.points[qb], dt);
          const double t = mesh.t(l) + g.points[qb] * dt;
          const double lp = apply_L(local_jet(cp, X, Tm), config.coefficient, config.potential, x, t);
          const double lq = apply_L(local_jet(cq, X, Tm), config.coefficient, config.potential, x, t);
          sum += g.weights[qa] * g.weights[qb] * dx * dt * wf.interior(k, l, g.points[qa], g.points[qb]) *
                 lp * lq;
        }
      }
    }
  }
  const double a1 = config.coefficient.value(1.0);
  for (int l = 0; l < mesh.nt; ++l) {
    for (std::size_t qb = 0; qb < g.size(); ++qb) {
      const double t = mesh.t(l) + g.points[qb] * dt;
      sum += g.weights[qb] * dt * a1 * a1 * wf.boundary(l, g.points[qb]) * p.eval(1.0, t, 1, 0) *
             q.eval(1.0, t, 1, 0);
    }
  }
  return sum;
}

double energy_norm_sq(const FieldPh& p, const ProblemConfig& config, WeightMode mode,
                      int quad_order) {
  return energy_form(p, p, config, mode, quad_order);
}

double load_functional(const FieldPh& q, const InitialData& data) {
  const SpaceTimeMesh& mesh = q.mesh();
  const std::vector<double> y0 = nodal_samples(data.y0, mesh.nx);
  const PoissonInverse1D w(nodal_samples(data.y1, mesh.nx));
  const GaussRule& g = gauss_unit(5);
  double sum = 0.0;
  for (int k = 0; k < mesh.nx; ++k) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double c = g.points[i];
      const double x = mesh.x(k) + c * mesh.dx();
      const double y0h = (1.0 - c) * y0[k] + c * y0[k + 1];
      sum += g.weights[i] * mesh.dx() * (y0h * q.eval(x, 0.0, 0, 1) - w.slope(x) * q.eval(x, 0.0, 1, 0));
    }
  }
  return sum;
}

}  // namespace wavenull

#include "wavenull/fem_space.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "wavenull/error.hpp"
#include "wavenull/quadrature.hpp"

namespace wavenull {

double hermite_eval(int i, double c, double delta, int deriv) {
  if (i < 0 || i > 3) throw Error(ErrorCode::invalid_argument, "hermite_eval: index must be 0..3");
  if (deriv < 0 || deriv > 2) {
    throw Error(ErrorCode::invalid_argument, "hermite_eval: unsupported derivative order");
  }
  const HermiteValues h = hermite_all(c, delta);
  switch (deriv) {
    case 0:
      return h.v[i];
    case 1:
      return h.d1[i];
    default:
      return h.d2[i];
  }
}

HermiteValues hermite_all(double c, double delta) {
  HermiteValues h;
  const double omc = 1.0 - c;
  h.v = {(1.0 + 2.0 * c) * omc * omc, c * c * (3.0 - 2.0 * c), delta * c * omc * omc,
         delta * c * c * (c - 1.0)};
  const double inv = 1.0 / delta;
  h.d1 = {(6.0 * c * c - 6.0 * c) * inv, (6.0 * c - 6.0 * c * c) * inv, 1.0 - 4.0 * c + 3.0 * c * c,
          3.0 * c * c - 2.0 * c};
  h.d2 = {(12.0 * c - 6.0) * inv * inv, (6.0 - 12.0 * c) * inv * inv, (6.0 * c - 4.0) * inv,
          (6.0 * c - 2.0) * inv};
  return h;
}

// ---------------------------------------------------------------------------

SpaceTimeMesh::SpaceTimeMesh(int nx_, int nt_, double T_) : nx(nx_), nt(nt_), T(T_) {
  if (nx < 1 || nt < 1 || !(T > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "mesh needs Nx, Nt >= 1 and T > 0");
  }
}

int SpaceTimeMesh::cell_x(double x) const {
  if (x < -1e-14 || x > 1.0 + 1e-14) throw Error(ErrorCode::domain, "x outside [0,1]");
  return std::clamp(static_cast<int>(std::floor(x * nx)), 0, nx - 1);
}

int SpaceTimeMesh::cell_t(double t) const {
  if (t < -1e-14 * T || t > T * (1.0 + 1e-14)) throw Error(ErrorCode::domain, "t outside [0,T]");
  return std::clamp(static_cast<int>(std::floor(t / T * nt)), 0, nt - 1);
}

// ---------------------------------------------------------------------------

DofMap::DofMap(const SpaceTimeMesh& mesh) : mesh_(mesh) {
  free_of_full_.assign(static_cast<std::size_t>(4) * (mesh.nx + 1) * (mesh.nt + 1), -1);
  int next = 0;
  for (int l = 0; l <= mesh.nt; ++l) {
    for (int k = 0; k <= mesh.nx; ++k) {
      const bool lateral = (k == 0 || k == mesh.nx);
      for (int d = 0; d < 4; ++d) {
        if (lateral && (d == dof_u || d == dof_ut)) continue;
        free_of_full_[full_index(k, l, d)] = next++;
      }
    }
  }
  num_free_ = static_cast<std::size_t>(next);
  for (int l = 0; l < mesh.nt; ++l) {
    for (int k = 0; k < mesh.nx; ++k) {
      int lo = next;
      int hi = -1;
      for (int idx : cell_dofs(k, l)) {
        if (idx < 0) continue;
        lo = std::min(lo, idx);
        hi = std::max(hi, idx);
      }
      half_bandwidth_ = std::max(half_bandwidth_, hi - lo);
    }
  }
}

std::array<int, 16> DofMap::cell_dofs(int k, int l) const {
  std::array<int, 16> out{};
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) {
      for (int d = 0; d < 4; ++d) out[4 * (2 * j + i) + d] = free_index(k + i, l + j, d);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

FieldPh::FieldPh(std::shared_ptr<const DofMap> dofs)
    : dofs_(std::move(dofs)), coeffs_(dofs_->num_free(), 0.0) {}

FieldPh::FieldPh(std::shared_ptr<const DofMap> dofs, std::vector<double> coeffs)
    : dofs_(std::move(dofs)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != dofs_->num_free()) {
    throw Error(ErrorCode::invalid_argument, "field coefficient count does not match the DOF map");
  }
}

double FieldPh::nodal(int k, int l, int d) const {
  const int idx = dofs_->free_index(k, l, d);
  return idx < 0 ? 0.0 : coeffs_[idx];
}

double FieldPh::eval(double x, double t, int ox, int ot) const {
  if (ox < 0 || ox > 2 || ot < 0 || ot > 2) {
    throw Error(ErrorCode::invalid_argument, "eval: derivative orders must be 0..2");
  }
  const SpaceTimeMesh& m = mesh();
  const int k = m.cell_x(x);
  const int l = m.cell_t(t);
  const HermiteValues hx = hermite_all((x - m.x(k)) / m.dx(), m.dx());
  const HermiteValues ht = hermite_all((t - m.t(l)) / m.dt(), m.dt());
  const auto& bx = ox == 0 ? hx.v : (ox == 1 ? hx.d1 : hx.d2);
  const auto& bt = ot == 0 ? ht.v : (ot == 1 ? ht.d1 : ht.d2);
  double sum = 0.0;
  for (int a = 0; a < 16; ++a) {
    const int node = a / 4;
    const double c = nodal(k + node % 2, l + node / 2, a % 4);
    if (c == 0.0) continue;
    const LocalShape s = local_shape(a);
    sum += c * bx[s.x_shape] * bt[s.t_shape];
  }
  return sum;
}

// ---------------------------------------------------------------------------

FieldPh interpolate(const SmoothFunction2D& u, std::shared_ptr<const DofMap> dofs) {
  FieldPh f(dofs);
  const SpaceTimeMesh& m = dofs->mesh();
  for (int l = 0; l <= m.nt; ++l) {
    const double t = m.t(l);
    for (int k = 0; k <= m.nx; ++k) {
      const double x = m.x(k);
      const double vals[4] = {u.u(x, t), u.ux(x, t), u.ut(x, t), u.uxt(x, t)};
      for (int d = 0; d < 4; ++d) {
        const int idx = dofs->free_index(k, l, d);
        if (idx >= 0) {
          f.coeffs()[idx] = vals[d];
        } else if (std::abs(vals[d]) > 1e-12) {
          std::ostringstream msg;
          msg << "interpolate: function does not vanish on the lateral boundary at (x,t) = (" << x
              << ", " << t << ")";
          throw Error(ErrorCode::constraint_violation, msg.str());
        }
      }
    }
  }
  return f;
}

TraceRaw boundary_trace_x(const FieldPh& f) {
  const SpaceTimeMesh& m = f.mesh();
  TraceRaw tr;
  tr.times.resize(m.nt + 1);
  tr.values.resize(m.nt + 1);
  tr.derivs.resize(m.nt + 1);
  for (int l = 0; l <= m.nt; ++l) {
    tr.times[l] = m.t(l);
    tr.values[l] = f.nodal(m.nx, l, dof_ux);
    tr.derivs[l] = f.nodal(m.nx, l, dof_uxt);
  }
  return tr;
}

// ---------------------------------------------------------------------------

ElementMoments element_moment_oracles(double dx, double dt) {
  ElementMoments out{};
  // Integrands are polynomials of degree <= 14 per variable on the cell.
  const GaussRule& g = gauss_unit(10);
  const double node_x[2] = {0.0, dx};
  const double node_t[2] = {0.0, dt};
  for (std::size_t qa = 0; qa < g.size(); ++qa) {
    const double x = dx * g.points[qa];
    const HermiteValues hx = hermite_all(g.points[qa], dx);
    for (std::size_t qb = 0; qb < g.size(); ++qb) {
      const double t = dt * g.points[qb];
      const HermiteValues ht = hermite_all(g.points[qb], dt);
      const double w = g.weights[qa] * g.weights[qb] * dx * dt;
      for (int i = 0; i < 2; ++i) {
        const double ex = x - node_x[i];
        for (int j = 0; j < 2; ++j) {
          const double et = t - node_t[j];
          const double m = (hx.v[i] * ex - hx.v[i + 2]) * ht.v[j];
          const double n = hx.v[i] * (ht.v[j] * et - ht.v[j + 2]);
          const double p = hx.v[i] * ht.v[j] * ex * et - hx.v[i + 2] * ht.v[j + 2];
          const double ll = hx.v[i] * ht.v[j];
          const double at3 = std::pow(std::abs(et), 3);
          const double ax3 = std::pow(std::abs(ex), 3);
          out.quadrature[0] += w * m * m;
          out.quadrature[1] += w * n * n;
          out.quadrature[2] += w * p * p;
          out.quadrature[3] += w * ll * ll * at3;
          out.quadrature[4] += w * ll * ll * ax3;
          out.quadrature[5] += w * ll * ll * ex * ex * at3;
        }
      }
    }
  }
  out.closed_form = {
      104.0 / 11025.0 * dx * dx * dx * dt,
      104.0 / 11025.0 * dx * dt * dt * dt,
      353.0 / 198450.0 * dx * dx * dx * dt * dt * dt,
      143.0 / 7350.0 * dx * std::pow(dt, 4),
      143.0 / 7350.0 * std::pow(dx, 4) * dt,
      209.0 / 132300.0 * dx * dx * dx * std::pow(dt, 4),
  };
  return out;
}

// ---------------------------------------------------------------------------

void write_field_csv(std::ostream& out, const FieldPh& f) {
  const SpaceTimeMesh& m = f.mesh();
  out << "k,l,u,ux,ut,uxt\n";
  out.precision(17);
  for (int l = 0; l <= m.nt; ++l) {
    for (int k = 0; k <= m.nx; ++k) {
      out << k << ',' << l;
      for (int d = 0; d < 4; ++d) out << ',' << f.nodal(k, l, d);
      out << '\n';
    }
  }
}

FieldPh read_field_csv(std::istream& in, double T) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,l,u,ux,ut,uxt", 0) != 0) {
    throw Error(ErrorCode::parse, "field CSV: missing header 'k,l,u,ux,ut,uxt'");
  }
  std::vector<std::array<double, 4>> rows;
  std::vector<std::pair<int, int>> nodes;
  int max_k = 0;
  int max_l = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    int k = 0;
    int l = 0;
    std::array<double, 4> v{};
    if (!(ls >> k >> l >> v[0] >> v[1] >> v[2] >> v[3])) {
      throw Error(ErrorCode::parse, "field CSV: malformed row at line " + std::to_string(lineno));
    }
    max_k = std::max(max_k, k);
    max_l = std::max(max_l, l);
    nodes.emplace_back(k, l);
    rows.push_back(v);
  }
  auto dofs = std::make_shared<const DofMap>(SpaceTimeMesh(max_k, max_l, T));
  if (rows.size() != static_cast<std::size_t>(max_k + 1) * (max_l + 1)) {
    throw Error(ErrorCode::parse, "field CSV: node count does not form a full grid");
  }
  FieldPh f(dofs);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int d = 0; d < 4; ++d) {
      const int idx = dofs->free_index(nodes[r].first, nodes[r].second, d);
      if (idx >= 0) f.coeffs()[idx] = rows[r][d];
    }
  }
  return f;
}

FieldPh prolongate(const FieldPh& coarse, std::shared_ptr<const DofMap> fine) {
  const SpaceTimeMesh& cm = coarse.mesh();
  const SpaceTimeMesh& fm = fine->mesh();
  if (fm.nx % cm.nx != 0 || fm.nt % cm.nt != 0 || std::abs(fm.T - cm.T) > 1e-12 * cm.T) {
    throw Error(ErrorCode::invalid_argument, "prolongate: meshes are not nested");
  }
  FieldPh f(fine);
  for (int l = 0; l <= fm.nt; ++l) {
    for (int k = 0; k <= fm.nx; ++k) {
      const double x = fm.x(k);
      const double t = fm.t(l);
      for (int d = 0; d < 4; ++d) {
        const int idx = fine->free_index(k, l, d);
        if (idx < 0) continue;
        const int ox = (d == dof_ux || d == dof_uxt) ? 1 : 0;
        const int ot = (d == dof_ut || d == dof_uxt) ? 1 : 0;
        f.coeffs()[idx] = coarse.eval(x, t, ox, ot);
      }
    }
  }
  return f;
}

}  // namespace wavenull

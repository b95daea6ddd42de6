#pragma once

#include <iosfwd>
#include <vector>

#include "wavenull/fem_space.hpp"
#include "wavenull/problem.hpp"

namespace wavenull {

/// Boundary control v on [0,T] as a cubic Hermite curve in time.
struct ControlTrace {
  std::vector<double> times;
  std::vector<double> v;
  std::vector<double> vt;
  /// p_x(1, t_l) and p_xt(1, t_l) of the field the control came from.
  TraceRaw raw;

  int intervals() const { return static_cast<int>(times.size()) - 1; }
  /// v at an arbitrary t in [0,T].
  double operator()(double t) const;
};

/// v(t_l) = -theta^2 rho(1,t_l)^{-2} a(1) p_x(1,t_l); v_t by the product rule.
ControlTrace extract_control(const FieldPh& p, const ProblemConfig& config);

/// Hermite blend on [t_j, t_{j+1}] at local coordinate theta.
double sample_control(const ControlTrace& trace, int j, double theta);

double norm_l2_control(const ControlTrace& trace);

/// y = -W L p with W the interior weight of the chosen mode.
double state_at(const FieldPh& p, const ProblemConfig& config, double x, double t);

struct StateGrid {
  std::vector<double> xs;
  std::vector<double> ts;
  std::vector<double> y;  // ts.size() rows of xs.size()
};

/// State recovered from p on a (nsx+1) x (nst+1) uniform grid of Q_T.
StateGrid extract_state(const FieldPh& p, const ProblemConfig& config, int nsx, int nst);

/// Element of the spatial cubic Hermite space Z_h: (value, slope) per node.
struct SpatialField {
  int nx = 0;
  std::vector<double> dofs;  // 2 (nx+1)

  double eval(double x, int deriv = 0) const;
};

/// L2(0,1) projection onto Z_h (load by 40 x 5-point composite Gauss per
/// interval, split at the data breakpoints).
SpatialField l2_project_y0(const DataFunction& y0, int nx);

struct WaveTrajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<SpatialField> states;
};

struct ForwardOptions {
  /// Time steps per space-time cell; raised automatically to satisfy the
  /// stability limit of the scheme when the coefficient is large.
  int substeps = 4;
  bool auto_cfl = true;
  /// When set, overrides the step count derived from substeps.
  int total_steps = 0;
  /// Start from the nodal piecewise linear interpolants of (y0, y1), the data
  /// the discrete control was computed for, instead of the exact data.
  bool interpolated_data = true;
};

/// Largest stable step of the centered scheme with consistent cubic Hermite
/// mass (lambda_max(M^{-1}K) h^2 = 42 for a = 1).
double forward_dt_limit(double dx, double a_max);

/// Centered second-order scheme for y_tt - (a y_x)_x + b y = 0 with
/// y(0,t) = 0, y(1,t) = v(t).
WaveTrajectory forward_solve(const ProblemConfig& config, const ControlTrace& trace,
                             const ForwardOptions& options = {});

/// Same scheme with a zero control (free wave).
WaveTrajectory forward_solve_free(const ProblemConfig& config, const ForwardOptions& options);

double norm_l2(const SpatialField& y);
double norm_l2_final(const WaveTrajectory& traj);
/// ||w'||_{L2} with -w'' = g, w(0) = w(1) = 0, g in Z_h.
double norm_hminus1(const SpatialField& g);
double norm_hminus1_final_velocity(const WaveTrajectory& traj);

/// 1/2 int |y_t|^2 + a |y_x|^2 at step n (backward-difference velocity).
double wave_energy(const WaveTrajectory& traj, const CoefficientField& a, std::size_t n);

/// J = 1/2 int rho^2 |y|^2 + 1/2 int rho0^2 |v|^2, state from the trajectory.
double eval_cost_J(const WaveTrajectory& traj, const ControlTrace& trace,
                   const ProblemConfig& config);

/// J evaluated with the state and control recovered from p directly.
double eval_cost_field(const FieldPh& p, const ProblemConfig& config);

void write_control_csv(std::ostream& out, const ControlTrace& trace);
/// (t, x, y) on the nodes of every `stride`-th fine step.
void write_trajectory_csv(std::ostream& out, const WaveTrajectory& traj, int stride);

}  // namespace wavenull

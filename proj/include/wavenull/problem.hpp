#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wavenull {

/// Smoothstep S(u) = 6u^5 - 15u^4 + 10u^3 and its first two derivatives.
double smoothstep(double u);
double smoothstep_d1(double u);
double smoothstep_d2(double u);

/// Principal part coefficient a(x) on [0,1].
///
/// Three families are supported: a constant, a polynomial sum c_i x^i, and a
/// C^2 monotone blend between two plateaus (left value up to x_start, right
/// value from x_end on, quintic smoothstep in between).
class CoefficientField {
 public:
  enum class Kind { constant, polynomial, transition };

  static CoefficientField constant(double a0);
  static CoefficientField polynomial(std::vector<double> coeffs);
  static CoefficientField transition(double left, double right, double x_start, double x_end);

  Kind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }

  double value(double x) const;
  double slope(double x) const;

  /// Smallest / largest value over a dense sampling of [0,1].
  double min_value() const;
  double max_value() const;

  std::string describe() const;

 private:
  CoefficientField(Kind kind, std::vector<double> params)
      : kind_(kind), params_(std::move(params)) {}

  Kind kind_;
  std::vector<double> params_;
};

/// Potential b(x,t), either constant or an arbitrary bounded function.
class PotentialField {
 public:
  static PotentialField constant(double b);
  static PotentialField function(std::function<double(double, double)> fn, double bound);

  double operator()(double x, double t) const { return is_constant_ ? value_ : fn_(x, t); }
  double bound() const { return bound_; }
  bool is_constant() const { return is_constant_; }
  std::string describe() const;

 private:
  PotentialField() = default;

  bool is_constant_ = true;
  double value_ = 0.0;
  double bound_ = 0.0;
  std::function<double(double, double)> fn_;
};

/// One-dimensional data function descriptor (initial position or velocity).
///
/// Textual form: `zero`, `constant c`, `sin [amp] [freq]` (amp sin(freq pi x)),
/// `gaussian c x_c [amp]` (amp exp(-c (x-x_c)^2)), `tent` (x on [0,1/2], 1-x
/// after) and `indicator lo hi [value]` (value on the closed [lo,hi]).
class DataFunction {
 public:
  enum class Kind { zero, constant, sine, gaussian, tent, indicator };

  DataFunction() = default;
  DataFunction(Kind kind, std::vector<double> params);

  static DataFunction parse(const std::string& text);

  double operator()(double x) const;
  Kind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }

  /// Points in (0,1) where the function or its derivative jumps.
  std::vector<double> breakpoints() const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::zero;
  std::vector<double> params_;
};

struct InitialData {
  DataFunction y0;
  DataFunction y1;
};

/// Profile of the time cutoff theta near t = 0 (mirrored near T), u = t/delta:
///   smoothstep: theta = S(u), S the quintic smoothstep (C^2, flat at 0)
///   root:       theta^2 = 1 - (1-u)^3, so theta ~ sqrt(3u) and the boundary
///               weight vanishes linearly at the ends
enum class CutoffShape { smoothstep, root };

/// Parameters of the Carleman weights. Unset M0 means the minimal admissible
/// shift, unset delta means `default_delta_fraction * T`.
struct WeightParams {
  double x0 = -0.05;
  double beta = 0.99;
  double lambda = 0.1;
  double s = 1.0;
  std::optional<double> M0;
  std::optional<double> delta;
  double T = 2.2;
  CutoffShape cutoff = CutoffShape::root;

  static constexpr double default_delta_fraction = 0.5;
};

/// Resolved, validated weight functions.
///
///   phi(x,t)    = |x - x0|^2 - beta t^2 + M0          for t in [-T, T]
///   varphi(x,t) = exp(lambda phi)
///   rho(x,t)    = exp(-s varphi(x, 2t - T))            for t in [0, T]
///   rho0(t)     = rho(1,t) / theta(t)
///
/// theta is the cutoff ramping from 0 to 1 on [0, delta], mirrored on
/// [T - delta, T], and 1 in between (see CutoffShape).
class CarlemanWeights {
 public:
  explicit CarlemanWeights(const WeightParams& params);

  double x0() const { return x0_; }
  double beta() const { return beta_; }
  double lambda() const { return lambda_; }
  double s() const { return s_; }
  double M0() const { return M0_; }
  double delta() const { return delta_; }
  double T() const { return T_; }

  double phi(double x, double t) const;
  double varphi(double x, double t) const;
  double rho(double x, double t) const;
  /// rho^{-2}, the interior weight of the scalar product.
  double rho_inv2(double x, double t) const;

  CutoffShape cutoff() const { return shape_; }
  double theta(double t) const;
  double theta_sq(double t) const;
  double theta_sq_d1(double t) const;

  /// rho0 itself; +infinity at t in {0, T}.
  double rho0(double t) const;
  /// theta^2 rho(1,t)^{-2}, the boundary weight. Vanishes at t in {0, T}.
  double control_weight(double t) const;
  double control_weight_d1(double t) const;

 private:
  double x0_, beta_, lambda_, s_, M0_, delta_, T_;
  CutoffShape shape_;
};

struct AdmissibilityReport {
  bool admissible = false;
  double lhs = 0.0;  ///< -min (a + (x-x0) a_x)
  double rhs = 0.0;  ///<  min (a + (x-x0) a_x / 2)
};

AdmissibilityReport check_admissible(const CoefficientField& a, double x0);

/// Open interval of valid beta; throws inadmissible_coefficient if empty.
std::pair<double, double> beta_bounds(const CoefficientField& a, double x0);

struct HorizonReport {
  bool ok = false;
  double critical_T = 0.0;
};

HorizonReport check_time_horizon(const CoefficientField& a, double x0, double beta, double T);

/// Minimum of f on [lo,hi] by dense sampling plus golden-section refinement.
double minimize_sampled(const std::function<double(double)>& f, double lo, double hi,
                        int samples = 10001, double tol = 1e-10);

enum class WeightMode { exact, interpolated };

struct ProblemConfig {
  CoefficientField coefficient = CoefficientField::constant(1.0);
  PotentialField potential = PotentialField::constant(0.0);
  InitialData data;
  WeightParams weights;
  int nx = 10;
  int nt = 22;
  WeightMode mode = WeightMode::interpolated;
  int quad_order = 5;
  /// Forward verification substeps per space-time cell in time.
  int substeps = 4;
  /// When false, T below the critical horizon is reported but not rejected.
  bool enforce_horizon = true;

  /// Checks every component invariant; throws Error on the first failure.
  void validate() const;
};

/// Nt such that dt matches 1/nx as closely as possible.
int matched_time_cells(int nx, double T);

}  // namespace wavenull

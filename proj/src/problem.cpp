#include "wavenull/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wavenull/error.hpp"

namespace wavenull {

double smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double smoothstep_d1(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return 30.0 * u * u * (1.0 - u) * (1.0 - u);
}

double smoothstep_d2(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
}

// ---------------------------------------------------------------------------
// CoefficientField

CoefficientField CoefficientField::constant(double a0) {
  if (!(a0 > 0.0) || !std::isfinite(a0)) {
    throw Error(ErrorCode::invalid_coefficient, "constant coefficient must be positive and finite");
  }
  return CoefficientField(Kind::constant, {a0});
}

CoefficientField CoefficientField::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) {
    throw Error(ErrorCode::invalid_coefficient, "polynomial coefficient needs at least one term");
  }
  CoefficientField a(Kind::polynomial, std::move(coeffs));
  if (!(a.min_value() > 0.0)) {
    throw Error(ErrorCode::invalid_coefficient, "polynomial coefficient must stay positive on [0,1]");
  }
  return a;
}

CoefficientField CoefficientField::transition(double left, double right, double x_start,
                                              double x_end) {
  if (!(left > 0.0) || !(right > 0.0) || !(x_start < x_end) || x_start < 0.0 || x_end > 1.0) {
    throw Error(ErrorCode::invalid_coefficient,
                "transition coefficient needs positive plateaus and 0 <= x_start < x_end <= 1");
  }
  return CoefficientField(Kind::transition, {left, right, x_start, x_end});
}

double CoefficientField::value(double x) const {
  switch (kind_) {
    case Kind::constant:
      return params_[0];
    case Kind::polynomial: {
      double v = 0.0;
      for (auto it = params_.rbegin(); it != params_.rend(); ++it) v = v * x + *it;
      return v;
    }
    case Kind::transition: {
      const double u = (x - params_[2]) / (params_[3] - params_[2]);
      return params_[0] + (params_[1] - params_[0]) * smoothstep(u);
    }
  }
  return 0.0;
}

double CoefficientField::slope(double x) const {
  switch (kind_) {
    case Kind::constant:
      return 0.0;
    case Kind::polynomial: {
      double v = 0.0;
      for (std::size_t i = params_.size(); i-- > 1;) v = v * x + static_cast<double>(i) * params_[i];
      return v;
    }
    case Kind::transition: {
      const double width = params_[3] - params_[2];
      const double u = (x - params_[2]) / width;
      return (params_[1] - params_[0]) * smoothstep_d1(u) / width;
    }
  }
  return 0.0;
}

double CoefficientField::min_value() const {
  return minimize_sampled([this](double x) { return value(x); }, 0.0, 1.0);
}

double CoefficientField::max_value() const {
  return -minimize_sampled([this](double x) { return -value(x); }, 0.0, 1.0);
}

std::string CoefficientField::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::constant:
      out << "constant " << params_[0];
      break;
    case Kind::polynomial:
      out << "polynomial";
      for (double c : params_) out << ' ' << c;
      break;
    case Kind::transition:
      out << "transition " << params_[0] << ' ' << params_[1] << ' ' << params_[2] << ' '
          << params_[3];
      break;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// PotentialField

PotentialField PotentialField::constant(double b) {
  if (!std::isfinite(b)) throw Error(ErrorCode::invalid_argument, "potential must be finite");
  PotentialField p;
  p.is_constant_ = true;
  p.value_ = b;
  p.bound_ = std::abs(b);
  return p;
}

PotentialField PotentialField::function(std::function<double(double, double)> fn, double bound) {
  if (!fn || !(bound >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "potential function needs an evaluator and a bound");
  }
  PotentialField p;
  p.is_constant_ = false;
  p.fn_ = std::move(fn);
  p.bound_ = bound;
  return p;
}

std::string PotentialField::describe() const {
  if (is_constant_) {
    std::ostringstream out;
    out << value_;
    return out.str();
  }
  return "function";
}

// ---------------------------------------------------------------------------
// DataFunction

DataFunction::DataFunction(Kind kind, std::vector<double> params)
    : kind_(kind), params_(std::move(params)) {
  std::size_t need_min = 0;
  std::size_t need_max = 0;
  switch (kind_) {
    case Kind::zero:
    case Kind::tent:
      break;
    case Kind::constant:
      need_min = need_max = 1;
      break;
    case Kind::sine:
      need_max = 2;
      break;
    case Kind::gaussian:
      need_min = 2;
      need_max = 3;
      break;
    case Kind::indicator:
      need_min = 2;
      need_max = 3;
      break;
  }
  if (params_.size() < need_min || params_.size() > need_max) {
    throw Error(ErrorCode::invalid_argument, "data function '" + describe() + "': wrong parameter count");
  }
  if (kind_ == Kind::sine) {
    if (params_.empty()) params_.push_back(1.0);
    if (params_.size() == 1) params_.push_back(1.0);
  }
  if (kind_ == Kind::gaussian && params_.size() == 2) params_.push_back(1.0);
  if (kind_ == Kind::indicator) {
    if (params_.size() == 2) params_.push_back(1.0);
    if (!(params_[0] < params_[1])) {
      throw Error(ErrorCode::invalid_argument, "indicator support must satisfy lo < hi");
    }
  }
}

DataFunction DataFunction::parse(const std::string& text) {
  std::istringstream in(text);
  std::string name;
  in >> name;
  std::vector<double> params;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      params.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse, "data function '" + text + "': bad number '" + token + "'");
    }
  }
  static const std::pair<const char*, Kind> names[] = {
      {"zero", Kind::zero},         {"constant", Kind::constant}, {"sin", Kind::sine},
      {"gaussian", Kind::gaussian}, {"tent", Kind::tent},         {"indicator", Kind::indicator},
  };
  for (const auto& [key, kind] : names) {
    if (name == key) return DataFunction(kind, std::move(params));
  }
  throw Error(ErrorCode::parse, "unknown data function '" + name + "'");
}

double DataFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::constant:
      return params_[0];
    case Kind::sine:
      return params_[0] * std::sin(params_[1] * std::numbers::pi * x);
    case Kind::gaussian: {
      const double d = x - params_[1];
      return params_[2] * std::exp(-params_[0] * d * d);
    }
    case Kind::tent:
      return x <= 0.5 ? x : 1.0 - x;
    case Kind::indicator:
      return (x >= params_[0] && x <= params_[1]) ? params_[2] : 0.0;
  }
  return 0.0;
}

std::vector<double> DataFunction::breakpoints() const {
  std::vector<double> out;
  if (kind_ == Kind::tent) out.push_back(0.5);
  if (kind_ == Kind::indicator) {
    for (double p : {params_[0], params_[1]}) {
      if (p > 0.0 && p < 1.0) out.push_back(p);
    }
  }
  return out;
}

std::string DataFunction::describe() const {
  static const char* names[] = {"zero", "constant", "sin", "gaussian", "tent", "indicator"};
  std::ostringstream out;
  out << names[static_cast<int>(kind_)];
  for (double p : params_) out << ' ' << p;
  return out.str();
}

// ---------------------------------------------------------------------------
// Weights

CarlemanWeights::CarlemanWeights(const WeightParams& p)
    : x0_(p.x0), beta_(p.beta), lambda_(p.lambda), s_(p.s), T_(p.T), shape_(p.cutoff) {
  if (!(T_ > 0.0)) throw Error(ErrorCode::invalid_argument, "T must be positive");
  if (!(x0_ < 0.0)) throw Error(ErrorCode::invalid_argument, "x0 must be negative");
  if (!(lambda_ > 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be positive");
  if (!(s_ >= 0.0)) throw Error(ErrorCode::invalid_argument, "s must be non-negative");
  const double M0_min = 1.0 - x0_ * x0_ + beta_ * T_ * T_;
  M0_ = p.M0.value_or(M0_min);
  if (M0_ < M0_min - 1e-12 * std::max(1.0, std::abs(M0_min))) {
    std::ostringstream msg;
    msg << "M0 = " << M0_ << " is below the minimal shift 1 - x0^2 + beta T^2 = " << M0_min;
    throw Error(ErrorCode::invalid_argument, msg.str());
  }
  delta_ = p.delta.value_or(WeightParams::default_delta_fraction * T_);
  if (!(delta_ >= 0.0 && delta_ <= 0.5 * T_)) {
    throw Error(ErrorCode::invalid_argument, "delta must lie in [0, T/2]");
  }
  // phi is largest at x = 1, t = 0 (beta > 0) or at t = +-T (beta < 0).
  const double phi_max = (1.0 - x0_) * (1.0 - x0_) + std::max(0.0, -beta_) * T_ * T_ + M0_;
  constexpr double limit = 700.0;
  if (lambda_ * phi_max > limit) {
    std::ostringstream msg;
    msg << "weight overflow: lambda * max phi = " << lambda_ * phi_max
        << " (lambda = " << lambda_ << ", M0 = " << M0_ << ")";
    throw Error(ErrorCode::weight_overflow, msg.str());
  }
  if (2.0 * s_ * std::exp(lambda_ * phi_max) > limit) {
    std::ostringstream msg;
    msg << "weight overflow: 2 s max varphi = " << 2.0 * s_ * std::exp(lambda_ * phi_max)
        << " (s = " << s_ << ", lambda = " << lambda_ << ")";
    throw Error(ErrorCode::weight_overflow, msg.str());
  }
}

double CarlemanWeights::phi(double x, double t) const {
  const double d = x - x0_;
  return d * d - beta_ * t * t + M0_;
}

double CarlemanWeights::varphi(double x, double t) const { return std::exp(lambda_ * phi(x, t)); }

double CarlemanWeights::rho(double x, double t) const {
  return std::exp(-s_ * varphi(x, 2.0 * t - T_));
}

double CarlemanWeights::rho_inv2(double x, double t) const {
  return std::exp(2.0 * s_ * varphi(x, 2.0 * t - T_));
}

namespace {

/// Ramp profile g(u) of theta^2 on u in [0,1] and its derivative.
double ramp_sq(CutoffShape shape, double u) {
  if (shape == CutoffShape::smoothstep) {
    const double v = smoothstep(u);
    return v * v;
  }
  const double w = 1.0 - u;
  return 1.0 - w * w * w;
}

double ramp_sq_d1(CutoffShape shape, double u) {
  if (shape == CutoffShape::smoothstep) return 2.0 * smoothstep(u) * smoothstep_d1(u);
  const double w = 1.0 - u;
  return 3.0 * w * w;
}

}  // namespace

double CarlemanWeights::theta(double t) const { return std::sqrt(theta_sq(t)); }

double CarlemanWeights::theta_sq(double t) const {
  if (delta_ == 0.0) return 1.0;  // no cutoff
  if (t <= 0.0 || t >= T_) return 0.0;
  if (t < delta_) return ramp_sq(shape_, t / delta_);
  if (t > T_ - delta_) return ramp_sq(shape_, (T_ - t) / delta_);
  return 1.0;
}

double CarlemanWeights::theta_sq_d1(double t) const {
  if (delta_ == 0.0) return 0.0;
  // One-sided at the ends: the root profile leaves 0 with nonzero slope.
  if (t <= 0.0) return ramp_sq_d1(shape_, 0.0) / delta_;
  if (t >= T_) return -ramp_sq_d1(shape_, 0.0) / delta_;
  if (t < delta_) return ramp_sq_d1(shape_, t / delta_) / delta_;
  if (t > T_ - delta_) return -ramp_sq_d1(shape_, (T_ - t) / delta_) / delta_;
  return 0.0;
}

double CarlemanWeights::rho0(double t) const {
  const double th = theta(t);
  if (th == 0.0) return std::numeric_limits<double>::infinity();
  return rho(1.0, t) / th;
}

double CarlemanWeights::control_weight(double t) const {
  return theta_sq(t) * rho_inv2(1.0, t);
}

double CarlemanWeights::control_weight_d1(double t) const {
  // d/dt rho^{-2}(1,t) = rho^{-2} * 2 s * d/dt varphi(1, 2t - T)
  //                    = rho^{-2} * 2 s * varphi * lambda * (-2 beta tau) * 2,  tau = 2t - T
  const double tau = 2.0 * t - T_;
  const double w = rho_inv2(1.0, t);
  const double dw = w * 2.0 * s_ * varphi(1.0, tau) * lambda_ * (-2.0 * beta_ * tau) * 2.0;
  return theta_sq_d1(t) * w + theta_sq(t) * dw;
}

// ---------------------------------------------------------------------------
// Admissibility

double minimize_sampled(const std::function<double(double)>& f, double lo, double hi, int samples,
                        double tol) {
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  const double h = (hi - lo) / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    const double v = f(lo + i * h);
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::invalid_coefficient, "non-finite coefficient evaluation");
    }
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = lo + std::max(0, best - 1) * h;
  double b = lo + std::min(samples - 1, best + 1) * h;
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::min({best_val, fc, fd, f(0.5 * (a + b))});
}

AdmissibilityReport check_admissible(const CoefficientField& a, double x0) {
  if (!(x0 < 0.0)) throw Error(ErrorCode::invalid_argument, "x0 must be negative");
  AdmissibilityReport r;
  r.lhs = -minimize_sampled([&](double x) { return a.value(x) + (x - x0) * a.slope(x); }, 0.0, 1.0);
  r.rhs = minimize_sampled([&](double x) { return a.value(x) + 0.5 * (x - x0) * a.slope(x); }, 0.0,
                           1.0);
  r.admissible = r.lhs < r.rhs;
  return r;
}

std::pair<double, double> beta_bounds(const CoefficientField& a, double x0) {
  const AdmissibilityReport r = check_admissible(a, x0);
  if (!(r.lhs < r.rhs)) {
    std::ostringstream msg;
    msg << "coefficient " << a.describe() << " is not admissible for x0 = " << x0
        << ": -min(a + (x-x0) a_x) = " << r.lhs << " is not below min(a + (x-x0) a_x / 2) = "
        << r.rhs;
    throw Error(ErrorCode::inadmissible_coefficient, msg.str());
  }
  return {r.lhs, r.rhs};
}

HorizonReport check_time_horizon(const CoefficientField& a, double x0, double beta, double T) {
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "the time horizon test needs beta > 0");
  }
  const double peak =
      -minimize_sampled([&](double x) { return -std::sqrt(a.value(x)) * (x - x0); }, 0.0, 1.0);
  HorizonReport r;
  r.critical_T = 2.0 / beta * peak;
  r.ok = T > r.critical_T;
  return r;
}

void ProblemConfig::validate() const {
  if (nx < 2 || nt < 2) throw Error(ErrorCode::invalid_argument, "Nx and Nt must be at least 2");
  if (quad_order < 1) throw Error(ErrorCode::invalid_argument, "quadrature order must be positive");
  if (substeps < 1) throw Error(ErrorCode::invalid_argument, "substeps must be positive");
  const CarlemanWeights w(weights);
  if (!(coefficient.min_value() > 0.0)) {
    throw Error(ErrorCode::invalid_coefficient, "coefficient must be positive on [0,1]");
  }
  const auto [lo, hi] = beta_bounds(coefficient, weights.x0);
  if (!(weights.beta > lo && weights.beta < hi)) {
    std::ostringstream msg;
    msg << "beta = " << weights.beta << " outside the admissible interval (" << lo << ", " << hi
        << ")";
    throw Error(ErrorCode::invalid_argument, msg.str());
  }
  if (enforce_horizon) {
    const HorizonReport h = check_time_horizon(coefficient, weights.x0, weights.beta, weights.T);
    if (!h.ok) {
      std::ostringstream msg;
      msg << "T = " << weights.T << " does not exceed the critical horizon "
          << "(2/beta) max sqrt(a)(x - x0) = " << h.critical_T;
      throw Error(ErrorCode::time_horizon, msg.str());
    }
  }
}

int matched_time_cells(int nx, double T) {
  return std::max(2, static_cast<int>(std::lround(T * nx)));
}

}  // namespace wavenull

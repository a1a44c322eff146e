#pragma once

// Two explicit Randers families with closed-form radial geometry, indexed by
// an asymmetry budget lambda > 1 (theta = (lambda-1)/(lambda+1)) and a
// regularization eps > 0:
//   * FlatFamily: a Funk-type perturbation of Euclidean R^n,
//   * BallFamily: a perturbation of a rescaled Klein ball, curvature ceiling
//     -kappa^2 restored through the calibrated scale k_eps, optional drift
//     weight exp(-(n-1) h rho) on the measure.
// The closed forms are authoritative for experiments; the generic tensor
// engine re-derives them in tests as an independent oracle.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/dual.hpp"
#include "finsler/randers.hpp"

namespace finsler {

template <class T>
T vec_norm_sq(const std::vector<T>& x) {
  T s(0.0);
  for (const T& c : x) s = s + c * c;
  return s;
}

struct FamilyParams {
  int n = 3;            // dimension >= 2
  double lambda = 2.0;  // asymmetry budget > 1
  double eps = 1.0;     // regularization > 0
  double kappa = 1.0;   // curvature scale (ball family)
  double h = 0.0;       // drift exponent (ball family), 0 <= h < kappa
  double theta() const { return (lambda - 1.0) / (lambda + 1.0); }
};

inline void validate_family_params(const FamilyParams& p, bool ball) {
  if (p.n < 2) throw std::invalid_argument("family: dimension must be at least 2");
  if (!(p.lambda > 1.0))
    throw std::invalid_argument("family: lambda must exceed 1 (theta in (0,1))");
  if (!(p.eps > 0.0) || !std::isfinite(p.eps))
    throw std::invalid_argument("family: eps must be positive and finite");
  if (ball) {
    if (!(p.kappa > 0.0)) throw std::invalid_argument("family: kappa must be positive");
    if (!(p.h >= 0.0 && p.h < p.kappa))
      throw std::invalid_argument("family: drift must satisfy 0 <= h < kappa");
  }
}

// ---------------------------------------------------------------------------
// Calibration of the hyperbolic scale k_eps = max{kappa, kappa/sqrt(K_{eps,0}),
// kappa/sqrt(K_eps)} so that the radial flag curvature stays <= -kappa^2.

struct CalibrationBreakdown {
  double k_eps = 0.0;
  double eps0 = 0.0;    // threshold above which the interior bound degenerates
  double K_eps0 = 0.0;  // normalized curvature bound at the origin
  double K_eps = 0.0;   // normalized interior curvature bound (+inf beyond eps0)
  double cand_scale = 0.0;     // kappa
  double cand_origin = 0.0;    // kappa / sqrt(K_eps0)
  double cand_interior = 0.0;  // kappa / sqrt(K_eps), 0 when K_eps = +inf
  std::string branch;          // which candidate realizes the max
};

inline double calib_eps0(double theta) { return std::sqrt(3.0 * (1.0 - theta) / (8.0 * theta)); }

inline double calib_K_eps0(double theta, double eps) {
  return (1.0 - theta) * (1.0 - theta) * (1.0 + 3.0 * theta * (1.0 - theta) / (eps * eps));
}

inline double calib_K_eps(double theta, double eps) {
  double u = 1.0 - theta;
  double disc = 3.0 * u * u * u * (3.0 * u - 8.0 * eps * eps * theta);
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  double R = std::sqrt(disc);
  double num = 6.0 * u * u * std::pow(u * (3.0 * u - 2.0 * eps * eps * theta) + R, 3);
  double den = std::pow(3.0 * u * u + R, 4);
  return num / den;
}

inline CalibrationBreakdown calibrate_k_eps(double kappa, double theta, double eps) {
  if (!(kappa > 0.0) || !(theta > 0.0 && theta < 1.0) || !(eps > 0.0))
    throw std::invalid_argument("calibrate_k_eps: need kappa > 0, theta in (0,1), eps > 0");
  CalibrationBreakdown out;
  out.eps0 = calib_eps0(theta);
  out.K_eps0 = calib_K_eps0(theta, eps);
  out.K_eps = calib_K_eps(theta, eps);
  out.cand_scale = kappa;
  out.cand_origin = kappa / std::sqrt(out.K_eps0);
  out.cand_interior = std::isinf(out.K_eps) ? 0.0 : kappa / std::sqrt(out.K_eps);
  out.k_eps = out.cand_scale;
  out.branch = "scale";
  if (out.cand_origin > out.k_eps) {
    out.k_eps = out.cand_origin;
    out.branch = "origin";
  }
  if (out.cand_interior > out.k_eps) {
    out.k_eps = out.cand_interior;
    out.branch = "interior";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flat family on R^n:  F(x,y) = |y| - theta (r+2eps)/(r+eps)^2 <x,y>, r = |x|.

class FlatFamily {
 public:
  explicit FlatFamily(FamilyParams p) : p_(p), th_(p.theta()) {
    validate_family_params(p, false);
  }

  const FamilyParams& params() const { return p_; }
  int dim() const { return p_.n; }
  Domain domain() const { return FullSpace{}; }

  template <class T>
  std::vector<T> a_matrix(const std::vector<T>& x) const {
    int n = p_.n;
    std::vector<T> a(static_cast<size_t>(n) * n, T(0.0));
    for (int i = 0; i < n; ++i) a[i * n + i] = T(1.0);
    return a;
  }

  template <class T>
  std::vector<T> b_form(const std::vector<T>& x) const {
    int n = p_.n;
    std::vector<T> b(n, T(0.0));
    T r2 = vec_norm_sq(x);
    if (!(fval(r2) > 0.0)) return b;  // exact center: the drift vanishes
    T r = sqrt(r2);
    T re = r + p_.eps;
    T coeff = (r + 2.0 * p_.eps) * th_ / (re * re);
    for (int i = 0; i < n; ++i) b[i] = T(0.0) - x[i] * coeff;
    return b;
  }

  template <class T>
  T log_density(const std::vector<T>& x) const {
    T r2 = vec_norm_sq(x);
    T q = q_profile_t(sqrt(r2));
    return log(T(1.0) - q * q) * (0.5 * (p_.n + 1));
  }

  // ---- closed radial profiles (argument r = |x| unless stated otherwise) ----

  template <class T>
  T q_profile_t(const T& r) const {  // |b|_a
    T re = r + p_.eps;
    return r * (r + 2.0 * p_.eps) * th_ / (re * re);
  }
  double q_profile(double r) const { return q_profile_t(r); }

  template <class T>
  T rho_t(const T& r) const {  // distance from the center
    return r * (r * (1.0 - th_) + p_.eps) / (r + p_.eps);
  }
  double rho(double r) const { return rho_t(r); }

  template <class T>
  T rho_of_x(const std::vector<T>& x) const {
    return rho_t(sqrt(vec_norm_sq(x)));
  }

  double rho_reverse(double r) const {  // distance toward the center
    return r * (r * (1.0 + th_) + p_.eps) / (r + p_.eps);
  }

  std::vector<double> d_rho(const std::vector<double>& x) const {
    double r = std::sqrt(vec_norm_sq(x));
    if (!(r > 0.0)) throw std::domain_error("d_rho: undefined at the center");
    double coeff = (1.0 - q_profile(r)) / r;
    std::vector<double> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = coeff * x[i];
    return out;
  }

  std::vector<double> grad_rho(const std::vector<double>& x) const {
    double r = std::sqrt(vec_norm_sq(x));
    if (!(r > 0.0)) throw std::domain_error("grad_rho: undefined at the center");
    double coeff = 1.0 / (r * (1.0 - q_profile(r)));
    std::vector<double> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = coeff * x[i];
    return out;
  }

  // flag curvature for outward radial flagpoles
  double flag_radial(double r) const {
    double e = p_.eps, re = r + e;
    double den = re * re - r * (r + 2.0 * e) * th_;
    return -3.0 * e * e * std::pow(re, 4) * th_ * (1.0 - th_) / std::pow(den, 4);
  }

  // flag curvature for inward radial flagpoles (positive: no lower bound)
  double flag_inward(double r) const {
    double e = p_.eps, re = r + e;
    double den = re * re + r * (r + 2.0 * e) * th_;
    return 3.0 * e * e * std::pow(re, 4) * th_ * (1.0 + th_) / std::pow(den, 4);
  }

  double sbar_radial(double r) const {  // S/F for outward radial directions
    double e = p_.eps, re = r + e;
    double q = r * (r + 2.0 * e) * th_;  // = q_profile * re^2
    return -(p_.n + 1) * e * e * re * th_ / (std::pow(re, 4) - q * q);
  }

  double reversibility_radial(double r) const {
    double q = q_profile(r);
    return (1.0 + q) / (1.0 - q);
  }

  double h_profile(double r) const {  // F*(-d rho) at radius r
    double q = q_profile(r);
    return (1.0 - q) / (1.0 + q);
  }

  double density_radial(double r) const {  // Busemann-Hausdorff density
    double q = q_profile(r);
    return std::pow(1.0 - q * q, 0.5 * (p_.n + 1));
  }

  // ---- distance-coordinate profiles (argument t = distance from center) ----

  double phi(double t) const {  // radius at distance t; inverse of rho
    double e = p_.eps;
    double root = std::sqrt((t + e) * (t + e) - 4.0 * t * e * th_);
    return (t - e + root) / (2.0 * (1.0 - th_));
  }

  double phi_prime(double t) const {
    double e = p_.eps;
    double root = std::sqrt((t + e) * (t + e) - 4.0 * t * e * th_);
    return (1.0 + (t + e - 2.0 * e * th_) / root) / (2.0 * (1.0 - th_));
  }

  double h_of_t(double t) const { return h_profile(phi(t)); }

  double psi(double t) const {  // reduced radial density of the measure
    double f = phi(t);
    return density_radial(f) * std::pow(f, p_.n - 1) * phi_prime(t);
  }

  double log_psi(double t) const {
    double f = phi(t);
    double q = q_profile(f);
    return 0.5 * (p_.n + 1) * std::log1p(-q * q) + (p_.n - 1) * std::log(f) +
           std::log(phi_prime(t));
  }

  double log_e_weight(double) const { return 0.0; }  // no drift weight

  // coordinates radius of the distance sphere and its t-derivative (for
  // sampling in distance coordinates)
  double coords_radius(double t) const { return phi(t); }
  double coords_radius_prime(double t) const { return phi_prime(t); }

  // model weight t^{n-1} brackets psi between these constants
  double psi_lower_const() const { return std::pow(1.0 - th_ * th_, 0.5 * (p_.n + 1)); }
  double psi_upper_const() const { return std::pow(1.0 - th_, -p_.n); }
  double log_model_weight(double t) const { return (p_.n - 1) * std::log(t); }

 private:
  FamilyParams p_;
  double th_;
};

// ---------------------------------------------------------------------------
// Ball family on the unit ball (rescaled Klein model), rbar = atanh(|x|):
//   a_ij = delta_ij/(vt^2(1-r^2)) + x_i x_j/(vt^2(1-r^2)^2),  vt = k_eps(1-theta)
//   b_i  = -theta rbar(rbar+2eps) x_i / (vt r (1-r^2) (rbar+eps)^2)

class BallFamily {
 public:
  explicit BallFamily(FamilyParams p) : p_(p), th_(p.theta()) {
    validate_family_params(p, true);
    calib_ = calibrate_k_eps(p.kappa, th_, p.eps);
    ke_ = calib_.k_eps;
    vt_ = ke_ * (1.0 - th_);
  }

  const FamilyParams& params() const { return p_; }
  const CalibrationBreakdown& calibration() const { return calib_; }
  double k_eps() const { return ke_; }
  double vartheta() const { return vt_; }
  int dim() const { return p_.n; }
  Domain domain() const { return BallDomain{1.0}; }

  template <class T>
  std::vector<T> a_matrix(const std::vector<T>& x) const {
    int n = p_.n;
    T r2 = vec_norm_sq(x);
    T one_r2 = T(1.0) - r2;
    if (!(fval(one_r2) > 0.0)) throw std::domain_error("ball family: point outside the unit ball");
    T c1 = T(1.0) / (one_r2 * (vt_ * vt_));
    T c2 = c1 / one_r2;
    std::vector<T> a(static_cast<size_t>(n) * n, T(0.0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a[i * n + j] = c2 * x[i] * x[j];
      a[i * n + i] = a[i * n + i] + c1;
    }
    return a;
  }

  template <class T>
  std::vector<T> b_form(const std::vector<T>& x) const {
    int n = p_.n;
    std::vector<T> b(n, T(0.0));
    T r2 = vec_norm_sq(x);
    if (!(fval(r2) > 0.0)) return b;  // exact center: the drift vanishes
    T r = sqrt(r2);
    T rb = atanh(r);
    T re = rb + p_.eps;
    T coeff = rb * (rb + 2.0 * p_.eps) * th_ / (r * (T(1.0) - r2) * (re * re) * vt_);
    for (int i = 0; i < n; ++i) b[i] = T(0.0) - x[i] * coeff;
    return b;
  }

  template <class T>
  T log_density(const std::vector<T>& x) const {  // weighted density sigma_eps
    T r2 = vec_norm_sq(x);
    T rb = atanh(sqrt(r2));
    T q = q_profile_t(rb);
    T base = log(T(1.0) - r2) * (-0.5 * (p_.n + 1)) + log(T(1.0) - q * q) * (0.5 * (p_.n + 1)) -
             std::log(vt_) * double(p_.n);
    if (p_.h == 0.0) return base;
    return base - rho_t(rb) * ((p_.n - 1) * p_.h);
  }

  // ---- closed radial profiles (argument rbar = atanh |x|) ----

  template <class T>
  T q_profile_t(const T& rb) const {
    T re = rb + p_.eps;
    return rb * (rb + 2.0 * p_.eps) * th_ / (re * re);
  }
  double q_profile(double rb) const { return q_profile_t(rb); }

  template <class T>
  T rho_t(const T& rb) const {
    return rb * (rb * (1.0 - th_) + p_.eps) / ((rb + p_.eps) * vt_);
  }
  double rho(double rb) const { return rho_t(rb); }

  template <class T>
  T rho_of_x(const std::vector<T>& x) const {
    return rho_t(atanh(sqrt(vec_norm_sq(x))));
  }

  double rho_reverse(double rb) const {
    return rb * (rb * (1.0 + th_) + p_.eps) / ((rb + p_.eps) * vt_);
  }

  std::vector<double> d_rho(const std::vector<double>& x) const {
    double r2 = vec_norm_sq(x);
    double r = std::sqrt(r2);
    if (!(r > 0.0)) throw std::domain_error("d_rho: undefined at the center");
    double rb = std::atanh(r);
    double re = rb + p_.eps;
    double coeff = (re * re - rb * (rb + 2.0 * p_.eps) * th_) / (vt_ * r * (1.0 - r2) * re * re);
    std::vector<double> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = coeff * x[i];
    return out;
  }

  std::vector<double> grad_rho(const std::vector<double>& x) const {
    double r2 = vec_norm_sq(x);
    double r = std::sqrt(r2);
    if (!(r > 0.0)) throw std::domain_error("grad_rho: undefined at the center");
    double rb = std::atanh(r);
    double re = rb + p_.eps;
    double coeff = vt_ * (1.0 - r2) * re * re / (r * (re * re - rb * (rb + 2.0 * p_.eps) * th_));
    std::vector<double> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = coeff * x[i];
    return out;
  }

  double flag_radial(double rb) const {
    double e = p_.eps, u = 1.0 - th_, re = rb + e;
    double e0 = std::pow(re, 4);
    double e1 = 2.0 * std::pow(rb, 4) + 8.0 * std::pow(rb, 3) * e +
                (10.0 * rb * rb - 3.0) * e * e + 4.0 * rb * e * e * e;
    double e2 = std::pow(rb, 4) + 4.0 * std::pow(rb, 3) * e + (4.0 * rb * rb - 3.0) * e * e;
    double den = re * re - rb * (rb + 2.0 * e) * th_;
    return -ke_ * ke_ * u * u * e0 * (e0 - e1 * th_ + e2 * th_ * th_) / std::pow(den, 4);
  }

  double sbar_radial(double rb) const {
    double e = p_.eps, re = rb + e;
    double q = rb * (rb + 2.0 * e) * th_;
    return (p_.n - 1) * p_.h -
           vt_ * (p_.n + 1) * re * th_ * e * e / (std::pow(re, 4) - q * q);
  }

  double reversibility_radial(double rb) const {
    double q = q_profile(rb);
    return (1.0 + q) / (1.0 - q);
  }

  double h_profile(double rb) const {
    double q = q_profile(rb);
    return (1.0 - q) / (1.0 + q);
  }

  double density_radial(double rb) const {  // sigma_F (no drift weight)
    double q = q_profile(rb);
    return std::pow(vt_, -p_.n) * std::pow(std::cosh(rb), p_.n + 1) *
           std::pow(1.0 - q * q, 0.5 * (p_.n + 1));
  }

  // ---- distance-coordinate profiles (argument t = distance from center) ----

  double phi(double t) const {  // rbar at distance t; inverse of rho
    double e = p_.eps, u = 1.0 - th_;
    double a = t * vt_ - e;
    double root = std::sqrt(a * a + 4.0 * t * vt_ * e * u);
    return (a + root) / (2.0 * u);
  }

  double phi_prime(double t) const {
    double e = p_.eps, u = 1.0 - th_;
    double a = t * vt_ - e;
    double root = std::sqrt(a * a + 4.0 * t * vt_ * e * u);
    return 0.5 * ke_ * (1.0 + (a + 2.0 * e * u) / root);
  }

  double h_of_t(double t) const { return h_profile(phi(t)); }

  double f_of_t(double t) const {
    double q = q_profile(phi(t));
    return 1.0 - q * q;
  }

  double psi(double t) const {
    double f = phi(t);
    return phi_prime(t) * std::pow(vt_, -p_.n) * std::pow(f_of_t(t), 0.5 * (p_.n + 1)) *
           std::pow(std::sinh(f), p_.n - 1);
  }

  double log_psi(double t) const {
    double f = phi(t);
    double q = q_profile(f);
    return std::log(phi_prime(t)) - p_.n * std::log(vt_) +
           0.5 * (p_.n + 1) * std::log1p(-q * q) + (p_.n - 1) * log_sinh(f);
  }

  double log_e_weight(double t) const { return -(p_.n - 1) * p_.h * t; }

  double coords_radius(double t) const { return std::tanh(phi(t)); }
  double coords_radius_prime(double t) const {
    double c = std::cosh(phi(t));
    return phi_prime(t) / (c * c);
  }

  // model weight sinh(k_eps t)^{n-1} e^{-(n-1) h t}
  double log_model_weight(double t) const {
    return (p_.n - 1) * (log_sinh(ke_ * t) - p_.h * t);
  }

  static double log_sinh(double z) {
    if (z > 20.0) return z - std::log(2.0) + std::log1p(-std::exp(-2.0 * z));
    return std::log(std::sinh(z));
  }

 private:
  FamilyParams p_;
  double th_;
  CalibrationBreakdown calib_;
  double ke_ = 0.0;
  double vt_ = 0.0;
};

// ---------------------------------------------------------------------------
// sinh-comparison constants: c sinh(k_eps t)^{n-1} <= psi(t) <= C sinh(k_eps t)^{n-1}
// for every member with eps < eps_tilde.

struct SinhBounds {
  double eps_bar = 0.0;    // pivot regularization for the scale ceiling
  double kappa_bar = 0.0;  // k_eps at the pivot: ceiling for admissible members
  double t_tilde = 1.0;    // pivot time separating the two lower-bound regimes
  double c1_tilde = 0.0;   // small-time sinh ratio floor
  double eps_tilde = 0.0;  // admissible regularization ceiling
  double s_eps_tilde = 0.0;
  double c2_tilde = 0.0;  // large-time sinh shift floor
  double c_tilde = 0.0;
  double c_lower = 0.0;  // per-member constants (set for a concrete eps)
  double C_upper = 0.0;
};

namespace detail {
// largest e in (0, hi] satisfying pred, assuming pred holds on an initial
// segment; grid scan plus bisection refinement
template <class Pred>
double largest_on_initial_segment(double hi, const Pred& pred) {
  const int grid = 2000;
  double best = 0.0, lo_fail = hi;
  bool failed = false;
  for (int i = 1; i <= grid; ++i) {
    double e = hi * i / grid;
    if (pred(e)) {
      if (!failed) best = e;
    } else if (!failed) {
      failed = true;
      lo_fail = e;
    }
  }
  if (!failed) return hi;
  double lo = best, up = lo_fail;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + up);
    if (pred(mid))
      lo = mid;
    else
      up = mid;
  }
  return lo;
}
}  // namespace detail

inline SinhBounds compute_sinh_bounds(int n, double kappa, double theta, double eps) {
  if (!(theta > 0.0 && theta < 1.0) || !(kappa > 0.0))
    throw std::invalid_argument("compute_sinh_bounds: need theta in (0,1), kappa > 0");
  SinhBounds sb;
  double e0 = calib_eps0(theta);
  sb.eps_bar = detail::largest_on_initial_segment(0.5 * e0, [&](double e) {
    double Ke = calib_K_eps(theta, e);
    return Ke <= std::min(calib_K_eps0(theta, e), 1.0);
  });
  sb.kappa_bar = calibrate_k_eps(kappa, theta, sb.eps_bar).k_eps;
  sb.t_tilde = 1.0;
  sb.c1_tilde = 0.5 * std::sinh((1.0 - theta) * sb.kappa_bar * sb.t_tilde) /
                std::sinh(sb.kappa_bar * sb.t_tilde);
  auto s_of = [&](double e) { return e * theta / (1.0 - theta); };
  sb.eps_tilde = detail::largest_on_initial_segment(sb.eps_bar, [&](double e) {
    return calibrate_k_eps(kappa, theta, e).k_eps * sb.t_tilde > 2.0 * s_of(e);
  });
  sb.s_eps_tilde = s_of(sb.eps_tilde);
  sb.c2_tilde = 0.5 / std::cosh(sb.s_eps_tilde);
  sb.c_tilde = std::min(sb.c1_tilde, sb.c2_tilde);
  double ke = calibrate_k_eps(kappa, theta, eps).k_eps;
  double vt = ke * (1.0 - theta);
  sb.c_lower = std::pow(1.0 - theta * theta, 0.5 * (n + 1)) * std::pow(sb.c_tilde, n - 1) /
               std::pow(vt, n - 1);
  sb.C_upper = ke / std::pow(vt, n);
  return sb;
}

// ---------------------------------------------------------------------------
// Tabulated profiles for reporting.

struct RadialProfileRow {
  double coord = 0.0;  // r (flat) or t (ball, distance)
  double rho = 0.0;
  double K = 0.0;
  double Sbar = 0.0;
  double rev = 0.0;
  double h_eps = 0.0;
  double psi = 0.0;
};

inline std::vector<RadialProfileRow> radial_profiles(const FlatFamily& fam,
                                                     const std::vector<double>& radii) {
  std::vector<RadialProfileRow> rows;
  rows.reserve(radii.size());
  for (double r : radii) {
    RadialProfileRow row;
    row.coord = r;
    row.rho = fam.rho(r);
    row.K = fam.flag_radial(r);
    row.Sbar = fam.sbar_radial(r);
    row.rev = fam.reversibility_radial(r);
    row.h_eps = fam.h_profile(r);
    row.psi = row.rho > 0.0 ? fam.psi(row.rho) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<RadialProfileRow> radial_profiles(const BallFamily& fam,
                                                     const std::vector<double>& rbars) {
  std::vector<RadialProfileRow> rows;
  rows.reserve(rbars.size());
  for (double rb : rbars) {
    RadialProfileRow row;
    row.coord = rb;
    row.rho = fam.rho(rb);
    row.K = fam.flag_radial(rb);
    row.Sbar = fam.sbar_radial(rb);
    row.rev = fam.reversibility_radial(rb);
    row.h_eps = fam.h_profile(rb);
    row.psi = row.rho > 0.0 ? fam.psi(row.rho) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace finsler

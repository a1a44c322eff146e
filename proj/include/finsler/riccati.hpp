#pragma once

// Profile pairs (w, L, W) together with a positive certificate G solving the
// one-dimensional differential inequality
//   (G w)' + G w L - (p-1) G^{p'} w >= W w      on (0, inf),  p' = p/(p-1),
// and the induced limit profile v with -(log v)' = G^{1/(p-1)}, v(1) = 1.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/dual.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

struct RiccatiPair {
  double p = 2.0;
  std::function<double(double)> w;    // weight profile
  std::function<double(double)> L;    // divergence comparison profile
  std::function<double(double)> W;    // Hardy weight profile
  std::function<double(double)> G;    // certificate
  std::function<double(double)> dGw;  // optional exact derivative of t -> G(t) w(t)
  double constant = 0.0;              // the constant carried by W (presets)
  std::string name = "custom";

  double p_conj() const { return p / (p - 1.0); }
};

// exact-derivative residual when dGw is provided, Richardson fallback otherwise
inline double riccati_residual(const RiccatiPair& pr, double t) {
  if (!(t > 0.0)) throw std::domain_error("riccati_residual: t must be positive");
  double d;
  if (pr.dGw) {
    d = pr.dGw(t);
  } else {
    auto f = [&](double s) { return pr.G(s) * pr.w(s); };
    d = richardson_diff(f, t);
  }
  double g = pr.G(t), w = pr.w(t);
  return d + g * w * pr.L(t) - (pr.p - 1.0) * std::pow(g, pr.p_conj()) * w - pr.W(t) * w;
}

inline std::vector<double> log_space(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > lo) || count < 2)
    throw std::invalid_argument("log_space: need 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < count; ++i) out[i] = std::exp(la + (lb - la) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

struct ResidualScan {
  double min_residual = 0.0;
  double max_abs_residual = 0.0;
  double argmin = 0.0;
};

inline ResidualScan riccati_residual_scan(const RiccatiPair& pr, double lo, double hi,
                                          int count) {
  ResidualScan out;
  bool first = true;
  for (double t : log_space(lo, hi, count)) {
    double r = riccati_residual(pr, t);
    if (first || r < out.min_residual) {
      out.min_residual = r;
      out.argmin = t;
    }
    out.max_abs_residual = std::max(out.max_abs_residual, std::fabs(r));
    first = false;
  }
  return out;
}

// divergence comparison profiles for the two model geometries
inline double comparison_L_flat(int n, double t) {
  if (!(t > 0.0)) throw std::domain_error("comparison_L_flat: t must be positive");
  return (n - 1) / t;
}

inline double comparison_L_ball(int n, double kappa, double h, double t) {
  if (!(t > 0.0)) throw std::domain_error("comparison_L_ball: t must be positive");
  return (n - 1) * (kappa / std::tanh(kappa * t) - h);
}

// ---------------------------------------------------------------------------
// Presets.

// power weights: w = t^alpha, L = (n-1)/t, W = c/t^p, c = ((n+alpha-p)/p)^p
inline RiccatiPair preset_hardy(int n, double p, double alpha) {
  if (!(p > 1.0)) throw std::invalid_argument("preset_hardy: need p > 1");
  if (!(n + alpha - p > 0.0))
    throw std::invalid_argument("preset_hardy: need p < n + alpha");
  double c = std::pow((n + alpha - p) / p, p);
  double c_conj = std::pow(c, (p - 1.0) / p);
  RiccatiPair pr;
  pr.p = p;
  pr.constant = c;
  pr.name = "hardy";
  pr.w = [alpha](double t) { return std::pow(t, alpha); };
  pr.L = [n](double t) { return comparison_L_flat(n, t); };
  pr.W = [c, p](double t) { return c * std::pow(t, -p); };
  pr.G = [c_conj, p](double t) { return c_conj * std::pow(t, 1.0 - p); };
  pr.dGw = [c_conj, p, alpha](double t) {
    return c_conj * (alpha + 1.0 - p) * std::pow(t, alpha - p);
  };
  return pr;
}

// constant profiles: w = 1, L = (n-1)(kappa-h), W = c = ((n-1)(kappa-h)/p)^p
inline RiccatiPair preset_mckean(int n, double p, double kappa, double h) {
  if (!(p > 1.0)) throw std::invalid_argument("preset_mckean: need p > 1");
  if (!(kappa > h && h >= 0.0))
    throw std::invalid_argument("preset_mckean: need kappa > h >= 0");
  if (n < 2) throw std::invalid_argument("preset_mckean: need n >= 2");
  double gap = (n - 1) * (kappa - h);
  double c = std::pow(gap / p, p);
  double c_conj = std::pow(c, (p - 1.0) / p);
  RiccatiPair pr;
  pr.p = p;
  pr.constant = c;
  pr.name = "mckean";
  pr.w = [](double) { return 1.0; };
  pr.L = [gap](double) { return gap; };
  pr.W = [c](double) { return c; };
  pr.G = [c_conj](double) { return c_conj; };
  pr.dGw = [](double) { return 0.0; };
  return pr;
}

// multiply the Hardy weight by a factor (constant falsification experiments);
// the certificate G is left untouched, so the residual drops accordingly
inline RiccatiPair scale_W(RiccatiPair pr, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("scale_W: factor must be positive");
  auto base = pr.W;
  pr.W = [base, factor](double t) { return base(t) * factor; };
  pr.constant *= factor;
  pr.name += "*" + std::to_string(factor);
  return pr;
}

// ---------------------------------------------------------------------------
// Limit profile v: -(log v)' = G^{1/(p-1)}, anchored at v(1) = 1.

struct LimitFunction {
  std::function<double(double)> log_v;
  std::function<double(double)> neg_dlog;  // G^{1/(p-1)}
  double v(double t) const { return std::exp(log_v(t)); }
  double dv(double t) const { return -neg_dlog(t) * v(t); }
};

// closed forms for the presets, quadrature for anything else
inline LimitFunction limit_function(const RiccatiPair& pr, QuadratureSpec spec = {}) {
  LimitFunction lf;
  double p = pr.p;
  auto G = pr.G;
  double q = 1.0 / (p - 1.0);
  lf.neg_dlog = [G, q](double t) { return std::pow(G(t), q); };
  if (pr.name == "hardy") {
    double g1 = std::pow(pr.G(1.0), q);  // = (n+alpha-p)/p
    lf.log_v = [g1](double t) { return -g1 * std::log(t); };
    return lf;
  }
  if (pr.name == "mckean") {
    double g = std::pow(pr.G(1.0), q);  // = (n-1)(kappa-h)/p
    lf.log_v = [g](double t) { return -g * (t - 1.0); };
    return lf;
  }
  auto nd = lf.neg_dlog;
  lf.log_v = [nd, spec](double t) {
    if (!(t > 0.0)) throw std::domain_error("limit_function: t must be positive");
    if (t == 1.0) return 0.0;
    double lo = std::min(t, 1.0), hi = std::max(t, 1.0);
    auto res = integrate(nd, lo, hi, spec);
    if (!res.converged)
      throw QuadratureError("limit_function: quadrature did not converge");
    return t > 1.0 ? -res.value : res.value;
  };
  return lf;
}

// ---------------------------------------------------------------------------
// Tent truncation of v over knots t1 < t2 < t3 < t4: zero up to t1, linear
// ramp to v(t2), equal to v on [t2,t3], linear ramp down to zero at t4.

struct Knots {
  double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
  void validate() const {
    if (!(t1 > 0.0 && t1 < t2 && t2 < t3 && t3 < t4))
      throw std::invalid_argument("knots: need 0 < t1 < t2 < t3 < t4");
  }
};

struct Truncation {
  Knots kn;
  double v2 = 0.0, v3 = 0.0;  // v(t2), v(t3)
  const LimitFunction* lf = nullptr;

  double value(double t) const {
    if (t <= kn.t1 || t >= kn.t4) return 0.0;
    if (t < kn.t2) return v2 * (t - kn.t1) / (kn.t2 - kn.t1);
    if (t <= kn.t3) return lf->v(t);
    return v3 * (kn.t4 - t) / (kn.t4 - kn.t3);
  }

  // derivative away from knots; at a knot the side toward the interior wins
  double derivative(double t) const {
    if (t < kn.t1 || t > kn.t4) return 0.0;
    if (t < kn.t2) return v2 / (kn.t2 - kn.t1);
    if (t <= kn.t3) return lf->dv(t);
    return -v3 / (kn.t4 - kn.t3);
  }
};

inline Truncation make_truncation(const LimitFunction& lf, const Knots& kn) {
  kn.validate();
  Truncation tr;
  tr.kn = kn;
  tr.lf = &lf;
  tr.v2 = lf.v(kn.t2);
  tr.v3 = lf.v(kn.t3);
  return tr;
}

}  // namespace finsler

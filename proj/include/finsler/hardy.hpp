#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/families.hpp"
#include "finsler/quadrature.hpp"
#include "finsler/randers.hpp"
#include "finsler/riccati.hpp"
#include "finsler/rng.hpp"

namespace finsler {

// Radial reduction of a rotationally symmetric metric family. All quotient
// integrals run over the distance variable t; the closures below supply the
// reduced density psi, the drift weight e, the reversal profile h, and the
// coordinate radius map needed by the Monte-Carlo cross-check.
struct RadialModel {
  int n = 3;
  double lambda = 2.0;
  double theta = 1.0 / 3.0;
  double eps = 1.0;
  double k = 0.0;      // comparison-model scale; 0 selects the power weight
  double drift = 0.0;  // exponential drift rate in the weighted measure
  std::string family = "flat";

  std::function<double(double)> log_psi;           // log reduced density
  std::function<double(double)> log_e;             // log drift weight
  std::function<double(double)> h_of_t;            // reversal profile at distance t
  std::function<double(double)> chain_profile;     // reversal factor used in the bound chain
  std::function<double(double)> log_model_weight;  // log weight of the comparison model
  double C_over_c = 1.0;                           // density envelope ratio
};

inline RadialModel make_radial_model(const FlatFamily& fam) {
  RadialModel m;
  const auto& p = fam.params();
  m.n = p.n;
  m.lambda = p.lambda;
  m.theta = p.theta();
  m.eps = p.eps;
  m.k = 0.0;
  m.drift = 0.0;
  m.family = "flat";
  m.log_psi = [fam](double t) { return fam.log_psi(t); };
  m.log_e = [](double) { return 0.0; };
  m.h_of_t = [fam](double t) { return fam.h_of_t(t); };
  m.chain_profile = [fam](double t2) { return fam.h_profile(t2); };
  m.log_model_weight = [fam](double t) { return fam.log_model_weight(t); };
  m.C_over_c = fam.psi_upper_const() / fam.psi_lower_const();
  return m;
}

inline RadialModel make_radial_model(const BallFamily& fam,
                                     const SinhBounds& sb) {
  RadialModel m;
  const auto& p = fam.params();
  m.n = p.n;
  m.lambda = p.lambda;
  m.theta = p.theta();
  m.eps = p.eps;
  m.k = fam.k_eps();
  m.drift = p.h;
  m.family = "ball";
  m.log_psi = [fam](double t) { return fam.log_psi(t); };
  m.log_e = [fam](double t) { return fam.log_e_weight(t); };
  m.h_of_t = [fam](double t) { return fam.h_of_t(t); };
  // the chain uses the profile at the shrunk radius (1-theta)*kappa*t2,
  // which bounds h along [t2, t3] from above
  double kap = p.kappa;
  double th = p.theta();
  m.chain_profile = [fam, kap, th](double t2) {
    return fam.h_profile((1.0 - th) * kap * t2);
  };
  m.log_model_weight = [fam](double t) { return fam.log_model_weight(t); };
  m.C_over_c = sb.C_upper / sb.c_lower;
  return m;
}

inline RadialModel make_radial_model(const BallFamily& fam) {
  const auto& p = fam.params();
  return make_radial_model(
      fam, compute_sinh_bounds(p.n, p.kappa, p.theta(), p.eps));
}

// One evaluated quotient with its panel decomposition and the diagnostics
// recorded along the middle piece. Chain values are normalised by the dual
// norm of the reversed distance gradient, so they stay representable when
// the test function underflows.
struct QuotientBreakdown {
  double I_ramp_left = 0.0;
  double I_middle = 0.0;
  double I_ramp_right = 0.0;
  double J_ramp_left = 0.0;
  double J_middle = 0.0;
  double J_ramp_right = 0.0;
  double I = 0.0;
  double J = 0.0;
  double Q = 0.0;
  double lambda_p = 0.0;
  double quad_error = 0.0;  // worst relative quadrature error across panels
  bool log_mode = false;

  // left ramp: the literal gradient has unit dual norm; the reversed one is h
  double ramp_left_literal = 1.0;
  double ramp_left_reversed = 0.0;
  // middle chain at the median sample, per unit of the reversed dual norm:
  // lambda*F*(Du) >= max{F*(+-Du)} >= F*(-sgn(u) Du)
  double mid_chain_lambda_fstar = 0.0;
  double mid_chain_max_pm = 1.0;
  double mid_chain_signed = 1.0;
  bool mid_chain_ok = false;
  double mid_h_max = 0.0;  // max of h over the sampled middle grid
  double chain_factor = 0.0;

  // filled by the sweep layer
  double l0 = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
};

namespace detail {

struct PanelValue {
  LogVal value;
  double rel_error = 0.0;
  bool converged = true;
};

// integrate exp(log_f) over [a, b], switching to the log-substituted variable
// when the range spans many decades
inline PanelValue integrate_panel_log(const std::function<double(double)>& log_f,
                                      double a, double b,
                                      const QuadratureSpec& spec) {
  PanelValue out;
  if (a > 0.0 && b / a > 50.0) {
    auto g = [&](double s) {
      double t = std::exp(s);
      return log_f(t) + s;
    };
    auto r = integrate_log(g, std::log(a), std::log(b), spec);
    out.value = r.value;
    out.rel_error = r.rel_error;
    out.converged = r.converged;
  } else {
    auto r = integrate_log(log_f, a, b, spec);
    out.value = r.value;
    out.rel_error = r.rel_error;
    out.converged = r.converged;
  }
  return out;
}

inline PanelValue integrate_panel(const std::function<double(double)>& f,
                                  double a, double b,
                                  const QuadratureSpec& spec) {
  QuadratureSpec s = spec;
  s.log_substitution = (a > 0.0 && b / a > 50.0);
  auto r = integrate(f, a, b, s);
  PanelValue out;
  out.value = LogVal::from_value(r.value);
  out.rel_error =
      (r.value != 0.0) ? std::fabs(r.error / r.value) : r.error;
  out.converged = r.converged;
  return out;
}

}  // namespace detail

// Evaluate the truncated quotient Q = lambda^p * I / J for the test function
// built from the limit function lf on the knot vector kn. I uses the gradient
// dual norms of the three pieces (ramps carry unit dual norm, the middle
// piece carries the reversal profile); J is the weighted p-th moment against
// W. The whole evaluation moves to log-domain arithmetic when the model
// weight spans more than ~500 e-folds across the support.
inline QuotientBreakdown hardy_quotient_radial(const RadialModel& model,
                                               const RiccatiPair& pair,
                                               const LimitFunction& lf,
                                               const Knots& kn,
                                               const QuadratureSpec& spec = {}) {
  kn.validate();
  const double p = pair.p;
  if (!(p > 1.0)) throw std::domain_error("hardy_quotient_radial: requires p > 1");
  QuotientBreakdown out;
  out.lambda_p = std::pow(model.lambda, p);
  out.log_mode = (model.n - 1) * model.k * kn.t4 > 500.0;

  const double log_w21 = std::log(kn.t2 - kn.t1);
  const double log_w43 = std::log(kn.t4 - kn.t3);
  const double log_v2 = lf.log_v(kn.t2);
  const double log_v3 = lf.log_v(kn.t3);

  auto log_base = [&](double t) {
    return std::log(pair.w(t)) + model.log_psi(t) + model.log_e(t);
  };

  // log-integrands of the six panels
  auto L_IL = [&](double t) { return log_base(t); };
  auto L_IM = [&](double t) {
    return log_base(t) +
           p * (std::log(lf.neg_dlog(t)) + lf.log_v(t) +
                std::log(model.h_of_t(t)));
  };
  auto L_IR = [&](double t) { return log_base(t) + p * std::log(model.h_of_t(t)); };
  auto L_JL = [&](double t) {
    double ramp = (t > kn.t1) ? std::log(t - kn.t1) : -std::numeric_limits<double>::infinity();
    return log_base(t) + std::log(pair.W(t)) + p * (log_v2 + ramp - log_w21);
  };
  auto L_JM = [&](double t) {
    return log_base(t) + std::log(pair.W(t)) + p * lf.log_v(t);
  };
  auto L_JR = [&](double t) {
    double ramp = (t < kn.t4) ? std::log(kn.t4 - t) : -std::numeric_limits<double>::infinity();
    return log_base(t) + std::log(pair.W(t)) + p * (log_v3 + ramp - log_w43);
  };

  detail::PanelValue IL, IM, IR, JL, JM, JR;
  if (out.log_mode) {
    IL = detail::integrate_panel_log(L_IL, kn.t1, kn.t2, spec);
    IM = detail::integrate_panel_log(L_IM, kn.t2, kn.t3, spec);
    IR = detail::integrate_panel_log(L_IR, kn.t3, kn.t4, spec);
    JL = detail::integrate_panel_log(L_JL, kn.t1, kn.t2, spec);
    JM = detail::integrate_panel_log(L_JM, kn.t2, kn.t3, spec);
    JR = detail::integrate_panel_log(L_JR, kn.t3, kn.t4, spec);
  } else {
    auto lift = [](const std::function<double(double)>& lf_) {
      return [lf_](double t) { return std::exp(lf_(t)); };
    };
    IL = detail::integrate_panel(lift(L_IL), kn.t1, kn.t2, spec);
    IM = detail::integrate_panel(lift(L_IM), kn.t2, kn.t3, spec);
    IR = detail::integrate_panel(lift(L_IR), kn.t3, kn.t4, spec);
    JL = detail::integrate_panel(lift(L_JL), kn.t1, kn.t2, spec);
    JM = detail::integrate_panel(lift(L_JM), kn.t2, kn.t3, spec);
    JR = detail::integrate_panel(lift(L_JR), kn.t3, kn.t4, spec);
  }
  for (const auto* pv : {&IL, &IM, &IR, &JL, &JM, &JR}) {
    if (!pv->converged)
      throw QuadratureError("hardy_quotient_radial: a panel failed to converge");
    out.quad_error = std::max(out.quad_error, pv->rel_error);
  }

  // ramp coefficients v(t2)^p/(t2-t1)^p and v(t3)^p/(t4-t3)^p, in log form
  LogVal cIL = LogVal::from_log(p * (log_v2 - log_w21), 1);
  LogVal cIR = LogVal::from_log(p * (log_v3 - log_w43), 1);
  LogVal I_L = cIL * IL.value;
  LogVal I_M = IM.value;
  LogVal I_R = cIR * IR.value;
  LogVal Iv = I_L + I_M + I_R;
  LogVal Jv = JL.value + JM.value + JR.value;
  if (Jv.is_zero()) throw QuadratureError("hardy_quotient_radial: vanishing denominator");

  out.I_ramp_left = I_L.value();
  out.I_middle = I_M.value();
  out.I_ramp_right = I_R.value();
  out.J_ramp_left = JL.value.value();
  out.J_middle = JM.value.value();
  out.J_ramp_right = JR.value.value();
  out.I = Iv.value();
  out.J = Jv.value();
  out.Q = out.lambda_p * (Iv / Jv).value();

  // diagnostics: reversal profile along the support
  out.ramp_left_reversed = model.h_of_t(0.5 * (kn.t1 + kn.t2));
  out.chain_factor = model.chain_profile(kn.t2);
  double hmax = 0.0;
  const int grid = 33;
  for (int i = 0; i <= grid; ++i) {
    double t = kn.t2 * std::pow(kn.t3 / kn.t2, double(i) / grid);
    hmax = std::max(hmax, model.h_of_t(t));
  }
  out.mid_h_max = hmax;
  double tmid = kn.t2 * std::pow(kn.t3 / kn.t2, 0.5);
  double hmid = model.h_of_t(tmid);
  out.mid_chain_lambda_fstar = model.lambda * hmid;
  out.mid_chain_max_pm = std::max(hmid, 1.0);
  out.mid_chain_signed = 1.0;
  out.mid_chain_ok =
      out.mid_chain_lambda_fstar >= out.mid_chain_max_pm - 1e-12 &&
      out.mid_chain_max_pm >= out.mid_chain_signed - 1e-12 &&
      hmax <= out.chain_factor + 1e-12;
  return out;
}

// Reduced integral of exp(log_f) against the comparison-model weight,
// returned in log form so extreme weights stay representable.
inline LogVal model_integral_log(const RadialModel& model,
                                 const std::function<double(double)>& log_f,
                                 double a, double b,
                                 const QuadratureSpec& spec = {}) {
  auto g = [&](double t) { return log_f(t) + model.log_model_weight(t); };
  auto r = detail::integrate_panel_log(g, a, b, spec);
  if (!r.converged)
    throw QuadratureError("model_integral_log: quadrature failed to converge");
  return r.value;
}

// Monte-Carlo estimate of the same quotient straight from the n-dimensional
// integrals, exercising the metric engine (dual norms and densities computed
// from the raw metric data) instead of the radial reduction.
struct McQuotient {
  double Q = 0.0;
  double std_error = 0.0;  // delta-method standard error of Q
  long samples = 0;
  double I_hat = 0.0;
  double J_hat = 0.0;
};

template <class Family>
McQuotient hardy_quotient_montecarlo(const Family& fam, const RiccatiPair& pair,
                                     const LimitFunction& lf, const Knots& kn,
                                     long samples, std::uint64_t seed = 2024) {
  kn.validate();
  const auto& fp = fam.params();
  const int n = fp.n;
  const double p = pair.p;
  const double lambda_p = std::pow(fp.lambda, p);
  Truncation tr = make_truncation(lf, kn);
  Rng rng(seed);

  double sumI = 0.0, sumJ = 0.0, sumII = 0.0, sumJJ = 0.0, sumIJ = 0.0;
  std::vector<double> theta(n), x(n), du(n);
  for (long s = 0; s < samples; ++s) {
    double t = kn.t1 + (kn.t4 - kn.t1) * rng.uniform();
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) {
      theta[i] = rng.normal();
      nrm += theta[i] * theta[i];
    }
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) {
      theta[0] = 1.0;
      nrm = 1.0;
    }
    double R = fam.coords_radius(t);
    for (int i = 0; i < n; ++i) x[i] = R * theta[i] / nrm;

    // gradient of the truncated test function: chain rule through rho
    double dvt = tr.derivative(t);
    auto drho = fam.d_rho(x);
    for (int i = 0; i < n; ++i) du[i] = dvt * drho[i];

    // radial volume element in coordinates times the weighted density
    double jac = std::pow(R, n - 1) * fam.coords_radius_prime(t);
    double dens = bh_density(fam, x) * std::exp(fam.log_e_weight(t));
    double wt = pair.w(t) * dens * jac;

    double fstar = (dvt == 0.0) ? 0.0 : dual_norm(fam, x, du);
    double Ii = wt * std::pow(fstar, p);
    double vt = tr.value(t);
    double Ji = wt * pair.W(t) * std::pow(vt, p);
    sumI += Ii;
    sumJ += Ji;
    sumII += Ii * Ii;
    sumJJ += Ji * Ji;
    sumIJ += Ii * Ji;
  }
  double N = double(samples);
  McQuotient out;
  out.samples = samples;
  out.I_hat = sumI / N;
  out.J_hat = sumJ / N;
  if (out.J_hat <= 0.0)
    throw QuadratureError("hardy_quotient_montecarlo: vanishing denominator");
  out.Q = lambda_p * out.I_hat / out.J_hat;
  double varI = (sumII / N - out.I_hat * out.I_hat) / N;
  double varJ = (sumJJ / N - out.J_hat * out.J_hat) / N;
  double covIJ = (sumIJ / N - out.I_hat * out.J_hat) / N;
  double rel2 = varI / (out.I_hat * out.I_hat) + varJ / (out.J_hat * out.J_hat) -
                2.0 * covIJ / (out.I_hat * out.J_hat);
  out.std_error = out.Q * std::sqrt(std::max(rel2, 0.0));
  return out;
}

}  // namespace finsler

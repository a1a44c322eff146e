#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/families.hpp"
#include "finsler/hardy.hpp"
#include "finsler/riccati.hpp"

namespace finsler {

// Knot schedules for the two sweep presets. The Hardy schedule widens the
// middle window quadratically; the constant-gap schedule keeps unit ratios.
inline Knots hardy_knots(double delta) {
  if (!(delta > 1.0)) throw std::domain_error("hardy_knots: requires delta > 1");
  return Knots{0.5 * delta, delta, delta * delta, 2.0 * delta * delta};
}

inline Knots mckean_knots(double delta) {
  if (!(delta > 0.0)) throw std::domain_error("mckean_knots: requires delta > 0");
  return Knots{delta, 2.0 * delta, 3.0 * delta, 4.0 * delta};
}

// Ratio of the ramp contributions to the middle moment, evaluated against the
// comparison-model weight. Dimensionless; it controls the slack term in the
// quotient upper bound and must vanish along a sharp schedule.
inline double compute_l0(const RadialModel& model, const RiccatiPair& pair,
                         const LimitFunction& lf, const Knots& kn,
                         const QuadratureSpec& spec = {}) {
  kn.validate();
  const double p = pair.p;
  auto logw = [&](double t) { return std::log(pair.w(t)); };
  LogVal c1 = LogVal::from_log(p * (lf.log_v(kn.t2) - std::log(kn.t2 - kn.t1)), 1);
  LogVal c2 = LogVal::from_log(p * (lf.log_v(kn.t3) - std::log(kn.t4 - kn.t3)), 1);
  LogVal num = c1 * model_integral_log(model, logw, kn.t1, kn.t2, spec) +
               c2 * model_integral_log(model, logw, kn.t3, kn.t4, spec);
  auto logwWv = [&](double t) {
    return std::log(pair.w(t)) + std::log(pair.W(t)) + p * lf.log_v(t);
  };
  LogVal den = model_integral_log(model, logwWv, kn.t2, kn.t3, spec);
  if (den.is_zero()) throw QuadratureError("compute_l0: vanishing denominator");
  return (num / den).value();
}

// Supremum of G^{p'}/W over the middle window, located on a log grid and
// sharpened by golden-section search. Identically one for both presets.
inline double compute_l1(const RiccatiPair& pair, double t2, double t3) {
  if (!(0.0 < t2 && t2 < t3)) throw std::domain_error("compute_l1: requires 0 < t2 < t3");
  const double pc = pair.p_conj();
  auto f = [&](double s) {
    double t = std::exp(s);
    return std::pow(pair.G(t), pc) / pair.W(t);
  };
  const double lo = std::log(t2), hi = std::log(t3);
  const int grid = 64;
  double best = -std::numeric_limits<double>::infinity();
  int ib = 0;
  for (int i = 0; i <= grid; ++i) {
    double s = lo + (hi - lo) * i / grid;
    double v = f(s);
    if (v > best) {
      best = v;
      ib = i;
    }
  }
  double a = lo + (hi - lo) * std::max(ib - 1, 0) / grid;
  double b = lo + (hi - lo) * std::min(ib + 1, grid) / grid;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + std::fabs(a)); ++it) {
    if (f1 < f2) {  // maximise
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  return std::max(best, std::max(f1, f2));
}

// Reversal factor entering the bound chain, evaluated at the inner middle
// knot. Decreases to 1/lambda along schedules with eps * t2 -> infinity.
inline double compute_l2(const RadialModel& model, double t2) {
  return model.chain_profile(t2);
}

struct SweepConfig {
  std::string preset = "hardy";  // "hardy" (flat family) or "mckean" (ball family)
  int n = 3;
  double p = 2.0;
  double alpha = 0.0;  // hardy weight exponent
  double kappa = 1.0;  // ball family only
  double h = 0.0;      // ball family only
  double lambda = 2.0;
  std::vector<double> deltas;  // empty selects the preset default schedule
  double w_scale = 1.0;        // potential scaling for falsification runs
  double tol = 1e-8;
  QuadratureSpec quad{};
  int threads = 0;  // 0 = one thread per row
  bool record_timing = false;
};

struct SweepRow {
  double delta = 0.0;
  double eps = 0.0;
  double k_eps = 0.0;  // ball family scale; 0 for the flat family
  double Q = std::numeric_limits<double>::quiet_NaN();
  double Q_minus_1 = std::numeric_limits<double>::quiet_NaN();
  double l0 = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double quad_error = 0.0;
  double upper_bound = 0.0;
  bool bound_ok = false;
  bool skipped = false;
  bool ok = false;
  double wall_time_s = 0.0;
  std::string note;
};

struct SweepSummary {
  bool all_above_one = false;
  bool strictly_decreasing = false;
  double terminal_gap = std::numeric_limits<double>::quiet_NaN();
  double fit_constant = std::numeric_limits<double>::quiet_NaN();
  double fit_exponent = std::numeric_limits<double>::quiet_NaN();
  bool bound_chain_ok = false;
  bool l2_monotone = false;
  bool l0_quartering = false;
  // max relative variation of (Q-1)*log(delta) over the last three rows;
  // meaningful for the hardy preset only
  double stability = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> notes;
};

struct SweepReport {
  SweepConfig config;
  std::string family;
  std::vector<SweepRow> rows;
  SweepSummary summary;
};

inline std::vector<double> default_deltas(const std::string& preset) {
  if (preset == "hardy") {
    std::vector<double> d;
    for (int i = 2; i <= 8; ++i) d.push_back(std::pow(10.0, 0.5 * i));
    return d;
  }
  if (preset == "mckean") return {10.0, 20.0, 40.0, 80.0};
  throw std::domain_error("default_deltas: unknown preset '" + preset + "'");
}

namespace detail {

inline void linreg(const std::vector<double>& x, const std::vector<double>& y,
                   double& intercept, double& slope) {
  size_t m = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double den = m * sxx - sx * sx;
  if (den == 0.0) {
    intercept = slope = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  slope = (m * sxy - sx * sy) / den;
  intercept = (sy - slope * sx) / m;
}

}  // namespace detail

// Evaluate one sweep row: build the family at eps = 1/delta, assemble the
// Riccati pair (optionally with a scaled potential), run the radial quotient,
// and attach the bound-chain quantities.
inline SweepRow evaluate_sweep_row(const SweepConfig& cfg, double delta) {
  SweepRow row;
  row.delta = delta;
  row.eps = 1.0 / delta;
  auto t0 = std::chrono::steady_clock::now();

  RiccatiPair base;
  Knots kn;
  RadialModel model;
  if (cfg.preset == "hardy") {
    base = preset_hardy(cfg.n, cfg.p, cfg.alpha);
    kn = hardy_knots(delta);
    FamilyParams fp;
    fp.n = cfg.n;
    fp.lambda = cfg.lambda;
    fp.eps = row.eps;
    model = make_radial_model(FlatFamily(fp));
  } else if (cfg.preset == "mckean") {
    base = preset_mckean(cfg.n, cfg.p, cfg.kappa, cfg.h);
    kn = mckean_knots(delta);
    FamilyParams fp;
    fp.n = cfg.n;
    fp.lambda = cfg.lambda;
    fp.eps = row.eps;
    fp.kappa = cfg.kappa;
    fp.h = cfg.h;
    double theta = fp.theta();
    SinhBounds sb = compute_sinh_bounds(cfg.n, cfg.kappa, theta, row.eps);
    if (row.eps >= sb.eps_tilde) {
      row.skipped = true;
      row.note = "skipped: eps >= eps_tilde, outside the certified envelope range";
      return row;
    }
    BallFamily fam(fp);
    row.k_eps = fam.k_eps();
    model = make_radial_model(fam, sb);
  } else {
    throw std::domain_error("evaluate_sweep_row: unknown preset '" + cfg.preset + "'");
  }

  RiccatiPair run = (cfg.w_scale == 1.0) ? base : scale_W(base, cfg.w_scale);
  LimitFunction lf = limit_function(base);
  QuotientBreakdown qb = hardy_quotient_radial(model, run, lf, kn, cfg.quad);
  row.Q = qb.Q;
  row.Q_minus_1 = qb.Q - 1.0;
  row.quad_error = qb.quad_error;
  row.l0 = compute_l0(model, run, lf, kn, cfg.quad);
  row.l1 = compute_l1(run, kn.t2, kn.t3);
  row.l2 = compute_l2(model, kn.t2);
  double lambda_p = std::pow(cfg.lambda, cfg.p);
  row.upper_bound = lambda_p * std::pow(row.l2, cfg.p) * row.l1 +
                    lambda_p * model.C_over_c * row.l0;
  row.bound_ok = row.Q <= row.upper_bound + cfg.tol;
  row.ok = true;
  auto t1 = std::chrono::steady_clock::now();
  if (cfg.record_timing)
    row.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  return row;
}

inline SweepReport run_sweep(const SweepConfig& cfg_in) {
  SweepConfig cfg = cfg_in;
  if (cfg.deltas.empty()) cfg.deltas = default_deltas(cfg.preset);
  if (!(cfg.lambda > 1.0))
    throw std::domain_error("run_sweep: requires lambda > 1");
  SweepReport rep;
  rep.config = cfg;
  rep.family = (cfg.preset == "hardy") ? "flat" : "ball";
  rep.rows.resize(cfg.deltas.size());

  auto eval_into = [&](size_t i) {
    try {
      rep.rows[i] = evaluate_sweep_row(cfg, cfg.deltas[i]);
    } catch (const std::exception& e) {
      rep.rows[i] = SweepRow{};
      rep.rows[i].delta = cfg.deltas[i];
      rep.rows[i].eps = 1.0 / cfg.deltas[i];
      rep.rows[i].note = std::string("row failed: ") + e.what();
    }
  };
  if (cfg.threads == 1 || cfg.deltas.size() < 2) {
    for (size_t i = 0; i < cfg.deltas.size(); ++i) eval_into(i);
  } else {
    std::vector<std::future<void>> fs;
    for (size_t i = 0; i < cfg.deltas.size(); ++i)
      fs.push_back(std::async(std::launch::async, eval_into, i));
    for (auto& f : fs) f.get();
  }

  // verdicts over the rows that actually ran
  std::vector<const SweepRow*> live;
  for (const auto& r : rep.rows) {
    if (r.ok) live.push_back(&r);
    if (!r.note.empty()) rep.summary.notes.push_back(r.note);
  }
  auto& s = rep.summary;
  if (!live.empty()) {
    s.all_above_one = true;
    s.strictly_decreasing = true;
    s.bound_chain_ok = true;
    s.l2_monotone = true;
    s.l0_quartering = true;
    for (size_t i = 0; i < live.size(); ++i) {
      const SweepRow& r = *live[i];
      if (!(r.Q >= 1.0 - cfg.tol)) s.all_above_one = false;
      if (!r.bound_ok) s.bound_chain_ok = false;
      if (i > 0) {
        const SweepRow& q = *live[i - 1];
        if (!(r.Q < q.Q)) s.strictly_decreasing = false;
        if (!(r.l2 < q.l2)) s.l2_monotone = false;
        if (!(r.l0 <= 0.25 * q.l0)) s.l0_quartering = false;
      }
      if (!(r.l2 >= 1.0 / cfg.lambda - cfg.tol)) s.l2_monotone = false;
    }
    s.terminal_gap = live.back()->Q - 1.0;

    std::vector<double> xs, ys;
    for (const auto* r : live) {
      if (r->Q > 1.0) {
        xs.push_back(cfg.preset == "hardy" ? std::log(std::log(r->delta))
                                           : r->delta);
        ys.push_back(std::log(r->Q - 1.0));
      }
    }
    if (xs.size() >= 2) {
      double a, b;
      detail::linreg(xs, ys, a, b);
      s.fit_constant = std::exp(a);
      s.fit_exponent = b;
    }
    if (cfg.preset == "hardy" && live.size() >= 3) {
      double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
      for (size_t i = live.size() - 3; i < live.size(); ++i) {
        double g = (live[i]->Q - 1.0) * std::log(live[i]->delta);
        gmin = std::min(gmin, g);
        gmax = std::max(gmax, g);
      }
      s.stability = (gmin > 0.0) ? (gmax - gmin) / gmin
                                 : std::numeric_limits<double>::infinity();
    }
  }
  return rep;
}

// Pre-registered reference quotients, keyed by delta. Returns the largest
// relative deviation; throws if a delta in the report has no reference.
struct BaselinePoint {
  double delta = 0.0;
  double Q = 0.0;
};

inline double sweep_baseline_deviation(const SweepReport& rep,
                                       const std::vector<BaselinePoint>& base) {
  double worst = 0.0;
  for (const auto& r : rep.rows) {
    if (!r.ok) continue;
    const BaselinePoint* hit = nullptr;
    for (const auto& b : base) {
      if (std::fabs(b.delta - r.delta) <=
          1e-9 * std::max(1.0, std::fabs(b.delta))) {
        hit = &b;
        break;
      }
    }
    if (!hit)
      throw std::domain_error("sweep_baseline_deviation: no reference for delta=" +
                              std::to_string(r.delta));
    worst = std::max(worst, std::fabs(r.Q - hit->Q) / std::fabs(hit->Q));
  }
  return worst;
}

}  // namespace finsler

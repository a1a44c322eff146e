// Command-line front end: radial curvature profiles, Riccati pair residuals,
// single quotient evaluations, sharpness sweeps, and baseline regeneration.
//
// Exit codes: 0 success, 1 verdict failure, 2 configuration error,
// 3 numerical failure.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "finsler/config.hpp"
#include "finsler/families.hpp"
#include "finsler/hardy.hpp"
#include "finsler/randers.hpp"
#include "finsler/report.hpp"
#include "finsler/riccati.hpp"
#include "finsler/sharpness.hpp"
#include "finsler/tensors.hpp"

namespace {

using namespace finsler;

struct OutputOpts {
  std::string out;
  std::string format = "json";
  bool timing = false;
};

void emit(const OutputOpts& oo, const std::string& content) {
  if (oo.out.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << "\n";
  } else {
    std::string body = content;
    if (body.empty() || body.back() != '\n') body += "\n";
    write_atomic(oo.out, body);
    std::cerr << "wrote " << oo.out << "\n";
  }
}

RunConfig load_checked(const std::string& path, const std::string& command) {
  RunConfig c = load_config(path);
  if (!c.command.empty() && c.command != command)
    throw ConfigError("config is for command '" + c.command +
                      "', invoked as '" + command + "'");
  return c;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = lo + (hi - lo) * double(i) / (count - 1);
  return out;
}

// ---------------------------------------------------------------- curvature

struct EpsBlock {
  double eps = 0.0;
  double k_eps = 0.0;
  std::string branch;
  std::vector<RadialProfileRow> rows;
  double K_max = 0.0, Sbar_max = 0.0, rev_max = 0.0;
  double K_inward_min = 0.0;  // flat only
  double K_sup_pred = 0.0;    // ball only
  double oracle_delta = 0.0;
  bool bounds_ok = false;
};

template <class Fam>
double engine_probe_delta(const Fam& fam, int n, double coord,
                          bool coord_is_distance_model) {
  double r = coord_is_distance_model ? std::tanh(coord) : coord;
  std::vector<double> x(n, 0.0), y(n, 0.0);
  x[0] = r;
  y[0] = 1.0;
  double closedK = fam.flag_radial(coord);
  double engineK = flag_curvature_projective(fam, x, y);
  double dK = std::fabs(engineK - closedK) / std::max(1.0, std::fabs(closedK));
  double F = fval(finsler_norm(fam, x, y));
  double closedS = fam.sbar_radial(coord);
  double engineS = s_curvature(fam, x, y) / F;
  double dS = std::fabs(engineS - closedS) / std::max(1.0, std::fabs(closedS));
  return std::max(dK, dS);
}

int cmd_curvature(const RunConfig& cfg, const OutputOpts& oo) {
  if (cfg.family.empty())
    throw ConfigError("curvature: config must set 'family'");
  std::vector<double> eps_list = cfg.eps_list;
  if (eps_list.empty()) eps_list = {cfg.params.eps};
  std::vector<double> grid = linspace(cfg.grid.lo, cfg.grid.hi, cfg.grid.count);
  const double slack = 1e-9;

  std::vector<EpsBlock> blocks;
  bool all_ok = true;
  for (double eps : eps_list) {
    FamilyParams fp = cfg.params;
    fp.eps = eps;
    EpsBlock blk;
    blk.eps = eps;
    if (cfg.family == "flat") {
      FlatFamily fam(fp);
      blk.rows = radial_profiles(fam, grid);
      blk.K_inward_min = std::numeric_limits<double>::infinity();
      for (const auto& row : blk.rows) {
        if (row.coord > 0.0)
          blk.K_inward_min = std::min(blk.K_inward_min, fam.flag_inward(row.coord));
      }
      for (double f : {0.08, 0.25, 0.5, 0.75, 0.95}) {
        double r = cfg.grid.lo + f * (cfg.grid.hi - cfg.grid.lo);
        if (r < 1e-3) continue;
        blk.oracle_delta =
            std::max(blk.oracle_delta, engine_probe_delta(fam, fp.n, r, false));
      }
    } else {
      BallFamily fam(fp);
      blk.k_eps = fam.k_eps();
      blk.branch = fam.calibration().branch;
      blk.rows = radial_profiles(fam, grid);
      double kmin = std::min({fam.calibration().K_eps0, fam.calibration().K_eps, 1.0});
      blk.K_sup_pred = -blk.k_eps * blk.k_eps * kmin;
      for (double f : {0.08, 0.25, 0.5, 0.75, 0.95}) {
        double rb = cfg.grid.lo + f * (cfg.grid.hi - cfg.grid.lo);
        // the coordinate chart loses the boundary; probe within it
        if (rb < 1e-3 || rb > 14.0) continue;
        blk.oracle_delta =
            std::max(blk.oracle_delta, engine_probe_delta(fam, fp.n, rb, true));
      }
    }
    blk.K_max = -std::numeric_limits<double>::infinity();
    blk.Sbar_max = -std::numeric_limits<double>::infinity();
    blk.rev_max = 0.0;
    for (const auto& row : blk.rows) {
      blk.K_max = std::max(blk.K_max, row.K);
      blk.Sbar_max = std::max(blk.Sbar_max, row.Sbar);
      blk.rev_max = std::max(blk.rev_max, row.rev);
    }
    if (cfg.family == "flat") {
      blk.bounds_ok = blk.K_max <= slack && blk.Sbar_max <= slack &&
                      blk.rev_max <= fp.lambda + slack && blk.K_inward_min > 0.0;
    } else {
      double kap2 = fp.kappa * fp.kappa;
      double sbar_cap = (fp.n - 1) * fp.h;
      blk.bounds_ok = blk.K_max <= -kap2 + slack &&
                      blk.Sbar_max <= sbar_cap + slack &&
                      blk.rev_max <= fp.lambda + slack;
    }
    all_ok = all_ok && blk.bounds_ok;
    blocks.push_back(std::move(blk));
  }

  if (oo.format == "csv") {
    std::string out = "# curvature_report v1\neps,coord,rho,K,Sbar,rev,h_eps,psi\n";
    for (const auto& blk : blocks)
      for (const auto& row : blk.rows)
        out += csv_num(blk.eps) + "," + csv_num(row.coord) + "," +
               csv_num(row.rho) + "," + csv_num(row.K) + "," +
               csv_num(row.Sbar) + "," + csv_num(row.rev) + "," +
               csv_num(row.h_eps) + "," + csv_num(row.psi) + "\n";
    emit(oo, out);
    return all_ok ? 0 : 1;
  }

  JsonBuilder jb;
  jb.begin_object();
  jb.field("schema", "curvature_report");
  jb.field("version", 1);
  jb.field("family", cfg.family);
  jb.key("params").begin_object();
  jb.field("n", cfg.params.n);
  jb.field("lambda", cfg.params.lambda);
  if (cfg.family == "ball") {
    jb.field("kappa", cfg.params.kappa);
    jb.field("h", cfg.params.h);
  }
  jb.end_object();
  jb.key("grid").begin_object();
  jb.field("lo", cfg.grid.lo);
  jb.field("hi", cfg.grid.hi);
  jb.field("count", cfg.grid.count);
  jb.end_object();
  jb.key("eps_blocks").begin_array();
  for (const auto& blk : blocks) {
    jb.begin_object();
    jb.field("eps", blk.eps);
    if (cfg.family == "ball") {
      jb.field("k_eps", blk.k_eps);
      jb.field("branch", blk.branch);
      jb.field("K_sup_pred", blk.K_sup_pred);
    }
    jb.key("rows").begin_array();
    for (const auto& row : blk.rows) {
      jb.begin_object();
      jb.field("coord", row.coord);
      jb.field("rho", row.rho);
      jb.field("K", row.K);
      jb.field("Sbar", row.Sbar);
      jb.field("rev", row.rev);
      jb.field("h_eps", row.h_eps);
      jb.field("psi", row.psi);
      jb.end_object();
    }
    jb.end_array();
    jb.key("checks").begin_object();
    jb.field("K_max", blk.K_max);
    jb.field("Sbar_max", blk.Sbar_max);
    jb.field("rev_max", blk.rev_max);
    if (cfg.family == "flat") jb.field("K_inward_min", blk.K_inward_min);
    jb.field("oracle_delta", blk.oracle_delta);
    jb.field("bounds_ok", blk.bounds_ok);
    jb.end_object();
    jb.end_object();
  }
  jb.end_array();
  jb.field("all_ok", all_ok);
  jb.end_object();
  emit(oo, jb.str());
  return all_ok ? 0 : 1;
}

// ------------------------------------------------------------------ riccati

RiccatiPair make_preset(const RunConfig& cfg) {
  if (cfg.preset == "hardy") return preset_hardy(cfg.params.n, cfg.p, cfg.alpha);
  if (cfg.preset == "mckean")
    return preset_mckean(cfg.params.n, cfg.p, cfg.params.kappa, cfg.params.h);
  throw ConfigError("config must set 'preset' to \"hardy\" or \"mckean\"");
}

int cmd_riccati(const RunConfig& cfg, const OutputOpts& oo) {
  RiccatiPair base = make_preset(cfg);
  ResidualScan scan = riccati_residual_scan(base, cfg.scan.lo, cfg.scan.hi,
                                            cfg.scan.count);
  bool scaled = cfg.w_scale != 1.0;
  ResidualScan sscan;
  if (scaled) {
    RiccatiPair run = scale_W(base, cfg.w_scale);
    sscan = riccati_residual_scan(run, cfg.scan.lo, cfg.scan.hi, cfg.scan.count);
  }
  LimitFunction lf = limit_function(base);
  bool residual_ok = scan.max_abs_residual < cfg.tol;

  JsonBuilder jb;
  jb.begin_object();
  jb.field("schema", "riccati_report");
  jb.field("version", 1);
  jb.field("preset", cfg.preset);
  jb.key("params").begin_object();
  jb.field("n", cfg.params.n);
  jb.field("p", cfg.p);
  if (cfg.preset == "hardy") jb.field("alpha", cfg.alpha);
  if (cfg.preset == "mckean") {
    jb.field("kappa", cfg.params.kappa);
    jb.field("h", cfg.params.h);
  }
  jb.end_object();
  jb.field("constant", base.constant);
  jb.key("scan").begin_object();
  jb.field("lo", cfg.scan.lo);
  jb.field("hi", cfg.scan.hi);
  jb.field("count", cfg.scan.count);
  jb.field("min_residual", scan.min_residual);
  jb.field("max_abs_residual", scan.max_abs_residual);
  jb.field("argmin", scan.argmin);
  jb.end_object();
  if (scaled) {
    jb.key("scaled_scan").begin_object();
    jb.field("w_scale", cfg.w_scale);
    jb.field("min_residual", sscan.min_residual);
    jb.field("max_abs_residual", sscan.max_abs_residual);
    jb.field("argmin", sscan.argmin);
    jb.end_object();
  }
  jb.key("limit_probes").begin_array();
  for (double t : {1.0, 2.0, 5.0, 10.0}) {
    jb.begin_object();
    jb.field("t", t);
    jb.field("v", lf.v(t));
    jb.field("neg_dlog", lf.neg_dlog(t));
    jb.end_object();
  }
  jb.end_array();
  jb.field("residual_ok", residual_ok);
  jb.end_object();
  emit(oo, jb.str());
  return (residual_ok || scaled) ? 0 : 1;
}

// ----------------------------------------------------------------- quotient

int cmd_quotient(const RunConfig& cfg, const OutputOpts& oo,
                 std::optional<std::uint64_t> seed_override) {
  if (cfg.preset.empty()) throw ConfigError("quotient: config must set 'preset'");
  Knots kn;
  if (!cfg.knots.empty()) {
    kn = Knots{cfg.knots[0], cfg.knots[1], cfg.knots[2], cfg.knots[3]};
  } else if (cfg.delta > 0.0) {
    kn = (cfg.preset == "hardy") ? hardy_knots(cfg.delta) : mckean_knots(cfg.delta);
  } else {
    throw ConfigError("quotient: config must set 'knots' or 'delta'");
  }
  kn.validate();
  FamilyParams fp = cfg.params;
  if (!cfg.eps_given && cfg.delta > 0.0) fp.eps = 1.0 / cfg.delta;

  RiccatiPair base = make_preset(cfg);
  RiccatiPair run = (cfg.w_scale == 1.0) ? base : scale_W(base, cfg.w_scale);
  LimitFunction lf = limit_function(base);

  auto t0 = std::chrono::steady_clock::now();
  RadialModel model;
  McQuotient mc;
  std::string family = (cfg.preset == "hardy") ? "flat" : "ball";
  std::uint64_t seed = seed_override.value_or(cfg.mc.seed);
  if (family == "flat") {
    FlatFamily fam(fp);
    model = make_radial_model(fam);
    if (cfg.mc.enabled)
      mc = hardy_quotient_montecarlo(fam, run, lf, kn, cfg.mc.samples, seed);
  } else {
    BallFamily fam(fp);
    model = make_radial_model(fam);
    if (cfg.mc.enabled)
      mc = hardy_quotient_montecarlo(fam, run, lf, kn, cfg.mc.samples, seed);
  }
  QuotientBreakdown qb = hardy_quotient_radial(model, run, lf, kn, cfg.quad);
  qb.l0 = compute_l0(model, run, lf, kn, cfg.quad);
  qb.l1 = compute_l1(run, kn.t2, kn.t3);
  qb.l2 = compute_l2(model, kn.t2);
  double lambda_p = std::pow(fp.lambda, cfg.p);
  double bound = lambda_p * std::pow(qb.l2, cfg.p) * qb.l1 +
                 lambda_p * model.C_over_c * qb.l0;
  bool bound_ok = qb.Q <= bound + cfg.tol;
  bool mc_ok = true;
  if (cfg.mc.enabled) mc_ok = std::fabs(mc.Q - qb.Q) <= 3.0 * mc.std_error;
  bool verdict = qb.Q >= 1.0 - cfg.tol && bound_ok && qb.mid_chain_ok && mc_ok;
  auto t1 = std::chrono::steady_clock::now();

  JsonBuilder jb;
  jb.begin_object();
  jb.field("schema", "quotient_report");
  jb.field("version", 1);
  jb.field("preset", cfg.preset);
  jb.field("family", family);
  jb.key("params").begin_object();
  jb.field("n", fp.n);
  jb.field("p", cfg.p);
  if (cfg.preset == "hardy") jb.field("alpha", cfg.alpha);
  if (cfg.preset == "mckean") {
    jb.field("kappa", fp.kappa);
    jb.field("h", fp.h);
  }
  jb.field("lambda", fp.lambda);
  jb.field("eps", fp.eps);
  jb.field("w_scale", cfg.w_scale);
  jb.end_object();
  jb.key("knots").begin_object();
  jb.field("t1", kn.t1);
  jb.field("t2", kn.t2);
  jb.field("t3", kn.t3);
  jb.field("t4", kn.t4);
  jb.end_object();
  jb.key("breakdown").begin_object();
  jb.field("I_ramp_left", qb.I_ramp_left);
  jb.field("I_middle", qb.I_middle);
  jb.field("I_ramp_right", qb.I_ramp_right);
  jb.field("J_ramp_left", qb.J_ramp_left);
  jb.field("J_middle", qb.J_middle);
  jb.field("J_ramp_right", qb.J_ramp_right);
  jb.field("I", qb.I);
  jb.field("J", qb.J);
  jb.field("Q", qb.Q);
  jb.field("lambda_p", qb.lambda_p);
  jb.field("quad_error", qb.quad_error);
  jb.field("log_mode", qb.log_mode);
  jb.end_object();
  jb.key("diagnostics").begin_object();
  jb.field("ramp_left_literal", qb.ramp_left_literal);
  jb.field("ramp_left_reversed", qb.ramp_left_reversed);
  jb.field("mid_chain_lambda_fstar", qb.mid_chain_lambda_fstar);
  jb.field("mid_chain_max_pm", qb.mid_chain_max_pm);
  jb.field("mid_chain_signed", qb.mid_chain_signed);
  jb.field("mid_chain_ok", qb.mid_chain_ok);
  jb.field("mid_h_max", qb.mid_h_max);
  jb.field("chain_factor", qb.chain_factor);
  jb.end_object();
  jb.key("bound").begin_object();
  jb.field("l0", qb.l0);
  jb.field("l1", qb.l1);
  jb.field("l2", qb.l2);
  jb.field("C_over_c", model.C_over_c);
  jb.field("upper_bound", bound);
  jb.field("bound_ok", bound_ok);
  jb.end_object();
  if (cfg.mc.enabled) {
    jb.key("mc").begin_object();
    jb.field("Q", mc.Q);
    jb.field("std_error", mc.std_error);
    jb.field("samples", static_cast<long>(mc.samples));
    jb.key("seed").value(seed);
    jb.field("I_hat", mc.I_hat);
    jb.field("J_hat", mc.J_hat);
    jb.field("agree_3sigma", mc_ok);
    jb.end_object();
  }
  jb.field("verdict_ok", verdict);
  if (oo.timing)
    jb.field("wall_time_s", std::chrono::duration<double>(t1 - t0).count());
  jb.end_object();
  emit(oo, jb.str());
  if (cfg.w_scale != 1.0) return 0;
  return verdict ? 0 : 1;
}

// -------------------------------------------------------------------- sweep

std::vector<BaselinePoint> load_baseline(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open baseline file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("baseline is not valid JSON: ") + e.what());
  }
  std::vector<BaselinePoint> out;
  for (const auto& r : j.at("rows")) {
    if (!r.at("ok").get<bool>()) continue;
    out.push_back({r.at("delta").get<double>(), r.at("Q").get<double>()});
  }
  return out;
}

SweepConfig sweep_config_from(const RunConfig& cfg, bool timing) {
  if (cfg.preset.empty()) throw ConfigError("sweep: config must set 'preset'");
  SweepConfig sc;
  sc.preset = cfg.preset;
  sc.n = cfg.params.n;
  sc.p = cfg.p;
  sc.alpha = cfg.alpha;
  sc.kappa = cfg.params.kappa;
  sc.h = cfg.params.h;
  sc.lambda = cfg.params.lambda;
  sc.deltas = cfg.deltas;
  sc.w_scale = cfg.w_scale;
  sc.tol = cfg.tol;
  sc.quad = cfg.quad;
  sc.threads = cfg.threads;
  sc.record_timing = timing;
  return sc;
}

int cmd_sweep(const RunConfig& cfg, const OutputOpts& oo,
              const std::string& baseline_path, double baseline_tol) {
  SweepConfig sc = sweep_config_from(cfg, oo.timing);
  SweepReport rep = run_sweep(sc);

  double dev = 0.0;
  bool baseline_ok = true;
  if (!baseline_path.empty()) {
    dev = sweep_baseline_deviation(rep, load_baseline(baseline_path));
    baseline_ok = dev <= baseline_tol;
  }

  std::string content = (oo.format == "csv")
                            ? sweep_report_csv(rep, oo.timing)
                            : sweep_report_json(rep, oo.timing) + "\n";
  emit(oo, content);
  // Status line goes to stderr: stdout carries only the report, so
  // `sweep ... > report.json` stays parseable.
  std::cerr << "rows=" << rep.rows.size()
            << " all_above_one=" << (rep.summary.all_above_one ? "yes" : "no")
            << " strictly_decreasing="
            << (rep.summary.strictly_decreasing ? "yes" : "no")
            << " bound_chain_ok=" << (rep.summary.bound_chain_ok ? "yes" : "no");
  if (!baseline_path.empty())
    std::cerr << " baseline_dev=" << dev
              << " baseline_ok=" << (baseline_ok ? "yes" : "no");
  std::cerr << "\n";
  if (!baseline_ok) return 1;
  if (sc.w_scale != 1.0) return 0;
  return (rep.summary.all_above_one && rep.summary.bound_chain_ok) ? 0 : 1;
}

// -------------------------------------------------------------------- oracle

int cmd_oracle(const std::string& out_dir, int threads) {
  SweepConfig hc;
  hc.preset = "hardy";
  hc.n = 3;
  hc.p = 2.0;
  hc.alpha = 0.0;
  hc.lambda = 2.0;
  hc.threads = threads;
  SweepReport hrep = run_sweep(hc);
  write_atomic(out_dir + "/hardy_default.json", sweep_report_json(hrep, false) + "\n");
  std::cerr << "wrote " << out_dir << "/hardy_default.json\n";

  SweepConfig mc;
  mc.preset = "mckean";
  mc.n = 2;
  mc.p = 2.0;
  mc.kappa = 1.0;
  mc.h = 0.0;
  mc.lambda = 2.0;
  mc.threads = threads;
  SweepReport mrep = run_sweep(mc);
  write_atomic(out_dir + "/mckean_default.json", sweep_report_json(mrep, false) + "\n");
  std::cerr << "wrote " << out_dir << "/mckean_default.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Non-reversible metric families: curvature profiles, Riccati pairs, "
      "Hardy-type quotients, sharpness sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  OutputOpts oo;
  std::optional<std::uint64_t> seed_override;
  std::string baseline_path;
  double baseline_tol = 1e-6;
  std::string oracle_dir = "data/baselines";
  int oracle_threads = 0;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* copt = sub->add_option("--config", config_path, "JSON config file");
    if (config_required) copt->required();
    sub->add_option("--out", oo.out, "write the report to this path");
    sub->add_option("--format", oo.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--timing", oo.timing, "include wall-time fields");
  };

  auto* curv = app.add_subcommand("curvature", "radial curvature/density profiles");
  add_common(curv, true);
  auto* ricc = app.add_subcommand("riccati", "Riccati pair residual scan");
  add_common(ricc, true);
  auto* quot = app.add_subcommand("quotient", "evaluate one truncated quotient");
  add_common(quot, true);
  std::uint64_t seed_val = 0;
  auto* seed_opt = quot->add_option("--seed", seed_val, "Monte-Carlo seed override");
  auto* swp = app.add_subcommand("sweep", "run a sharpness sweep");
  add_common(swp, true);
  swp->add_option("--baseline", baseline_path, "reference sweep report (JSON)");
  swp->add_option("--baseline-tol", baseline_tol,
                  "max relative Q deviation from the baseline");
  auto* orc = app.add_subcommand("oracle", "regenerate committed baselines");
  orc->add_option("--out", oracle_dir, "baseline output directory");
  orc->add_option("--threads", oracle_threads, "row parallelism (0 = per row)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int r = app.exit(e);
    return r == 0 ? 0 : 2;
  }

  try {
    if (seed_opt->count() > 0) seed_override = seed_val;
    if (curv->parsed()) return cmd_curvature(load_checked(config_path, "curvature"), oo);
    if (ricc->parsed()) return cmd_riccati(load_checked(config_path, "riccati"), oo);
    if (quot->parsed())
      return cmd_quotient(load_checked(config_path, "quotient"), oo, seed_override);
    if (swp->parsed())
      return cmd_sweep(load_checked(config_path, "sweep"), oo, baseline_path,
                       baseline_tol);
    if (orc->parsed()) return cmd_oracle(oracle_dir, oracle_threads);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const QuadratureError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/families.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double lo = 0.0;
  double hi = 5.0;
  int count = 100;
};

struct McSpec {
  bool enabled = false;
  long samples = 100000;
  std::uint64_t seed = 2024;
};

// Parsed run configuration shared by the command-line subcommands. Every key
// is optional in the file; commands validate that what they need is present.
struct RunConfig {
  std::string command;  // if present, must match the invoked subcommand
  std::string family;   // "flat" or "ball"
  std::string preset;   // "hardy" or "mckean"
  FamilyParams params;
  bool eps_given = false;  // params.eps appeared explicitly
  double p = 2.0;
  double alpha = 0.0;
  std::vector<double> knots;  // exactly 4 when present
  double delta = 0.0;
  std::vector<double> deltas;
  double w_scale = 1.0;
  double tol = 1e-8;
  QuadratureSpec quad;
  GridSpec grid;  // radial profile grid (curvature command)
  std::vector<double> eps_list;
  GridSpec scan{0.1, 10.0, 10000};  // residual scan grid (riccati command)
  McSpec mc;
  int threads = 0;
};

namespace detail {

using njson = nlohmann::json;

inline void require_keys(const njson& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + path + it.key() + "'");
  }
}

inline double num_at(const njson& obj, const std::string& key,
                     const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError("key '" + path + key + "' must be a number");
  return v.get<double>();
}

inline void parse_grid(const njson& obj, GridSpec& g, const std::string& path) {
  require_keys(obj, {"lo", "hi", "count"}, path);
  if (obj.contains("lo")) g.lo = num_at(obj, "lo", path);
  if (obj.contains("hi")) g.hi = num_at(obj, "hi", path);
  if (obj.contains("count")) g.count = static_cast<int>(num_at(obj, "count", path));
  if (!(g.count >= 2)) throw ConfigError("key '" + path + "count' must be >= 2");
  if (!(g.lo < g.hi)) throw ConfigError("grid '" + path + "' needs lo < hi");
}

inline std::vector<double> num_list(const njson& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError("key '" + where + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number())
      throw ConfigError("key '" + where + "' must hold numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  using detail::njson;
  njson j;
  try {
    j = njson::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  detail::require_keys(
      j,
      {"command", "family", "preset", "params", "knots", "delta", "deltas",
       "w_scale", "tol", "quadrature", "grid", "eps_list", "scan", "mc",
       "threads"},
      "");
  RunConfig c;
  if (j.contains("command")) {
    if (!j["command"].is_string()) throw ConfigError("key 'command' must be a string");
    c.command = j["command"].get<std::string>();
  }
  if (j.contains("family")) {
    if (!j["family"].is_string()) throw ConfigError("key 'family' must be a string");
    c.family = j["family"].get<std::string>();
    if (c.family != "flat" && c.family != "ball")
      throw ConfigError("key 'family' must be \"flat\" or \"ball\"");
  }
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) throw ConfigError("key 'preset' must be a string");
    c.preset = j["preset"].get<std::string>();
    if (c.preset != "hardy" && c.preset != "mckean")
      throw ConfigError("key 'preset' must be \"hardy\" or \"mckean\"");
  }
  if (j.contains("params")) {
    const auto& pj = j["params"];
    if (!pj.is_object()) throw ConfigError("key 'params' must be an object");
    detail::require_keys(pj, {"n", "lambda", "eps", "kappa", "h", "p", "alpha"},
                         "params.");
    if (pj.contains("n")) c.params.n = static_cast<int>(detail::num_at(pj, "n", "params."));
    if (pj.contains("lambda")) c.params.lambda = detail::num_at(pj, "lambda", "params.");
    if (pj.contains("eps")) {
      c.params.eps = detail::num_at(pj, "eps", "params.");
      c.eps_given = true;
    }
    if (pj.contains("kappa")) c.params.kappa = detail::num_at(pj, "kappa", "params.");
    if (pj.contains("h")) c.params.h = detail::num_at(pj, "h", "params.");
    if (pj.contains("p")) c.p = detail::num_at(pj, "p", "params.");
    if (pj.contains("alpha")) c.alpha = detail::num_at(pj, "alpha", "params.");
  }
  if (j.contains("knots")) {
    c.knots = detail::num_list(j["knots"], "knots");
    if (c.knots.size() != 4) throw ConfigError("key 'knots' must hold exactly 4 numbers");
  }
  if (j.contains("delta")) c.delta = detail::num_at(j, "delta", "");
  if (j.contains("deltas")) c.deltas = detail::num_list(j["deltas"], "deltas");
  if (j.contains("w_scale")) {
    c.w_scale = detail::num_at(j, "w_scale", "");
    if (!(c.w_scale > 0.0)) throw ConfigError("key 'w_scale' must be positive");
  }
  if (j.contains("tol")) {
    c.tol = detail::num_at(j, "tol", "");
    if (!(c.tol > 0.0)) throw ConfigError("key 'tol' must be positive");
  }
  if (j.contains("quadrature")) {
    const auto& qj = j["quadrature"];
    if (!qj.is_object()) throw ConfigError("key 'quadrature' must be an object");
    detail::require_keys(qj, {"method", "abs_tol", "rel_tol", "max_subdivisions"},
                         "quadrature.");
    if (qj.contains("method")) {
      if (!qj["method"].is_string())
        throw ConfigError("key 'quadrature.method' must be a string");
      std::string m = qj["method"].get<std::string>();
      if (m == "gauss_kronrod") c.quad.method = QuadMethod::gauss_kronrod;
      else if (m == "adaptive_simpson") c.quad.method = QuadMethod::adaptive_simpson;
      else throw ConfigError("quadrature.method must be \"gauss_kronrod\" or \"adaptive_simpson\"");
    }
    if (qj.contains("abs_tol")) c.quad.abs_tol = detail::num_at(qj, "abs_tol", "quadrature.");
    if (qj.contains("rel_tol")) c.quad.rel_tol = detail::num_at(qj, "rel_tol", "quadrature.");
    if (qj.contains("max_subdivisions"))
      c.quad.max_subdivisions =
          static_cast<int>(detail::num_at(qj, "max_subdivisions", "quadrature."));
    if (!(c.quad.abs_tol > 0.0) || !(c.quad.rel_tol > 0.0) ||
        c.quad.max_subdivisions < 1)
      throw ConfigError("quadrature tolerances must be positive and max_subdivisions >= 1");
  }
  if (j.contains("grid")) {
    if (!j["grid"].is_object()) throw ConfigError("key 'grid' must be an object");
    detail::parse_grid(j["grid"], c.grid, "grid.");
  }
  if (j.contains("eps_list")) {
    c.eps_list = detail::num_list(j["eps_list"], "eps_list");
    for (double e : c.eps_list)
      if (!(e > 0.0)) throw ConfigError("key 'eps_list' must hold positive numbers");
  }
  if (j.contains("scan")) {
    if (!j["scan"].is_object()) throw ConfigError("key 'scan' must be an object");
    detail::parse_grid(j["scan"], c.scan, "scan.");
  }
  if (j.contains("mc")) {
    const auto& mj = j["mc"];
    if (!mj.is_object()) throw ConfigError("key 'mc' must be an object");
    detail::require_keys(mj, {"samples", "seed"}, "mc.");
    c.mc.enabled = true;
    if (mj.contains("samples"))
      c.mc.samples = static_cast<long>(detail::num_at(mj, "samples", "mc."));
    if (mj.contains("seed"))
      c.mc.seed = static_cast<std::uint64_t>(detail::num_at(mj, "seed", "mc."));
    if (c.mc.samples < 1) throw ConfigError("key 'mc.samples' must be >= 1");
  }
  if (j.contains("threads")) {
    c.threads = static_cast<int>(detail::num_at(j, "threads", ""));
    if (c.threads < 0) throw ConfigError("key 'threads' must be >= 0");
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace finsler

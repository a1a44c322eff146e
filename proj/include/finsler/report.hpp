#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/sharpness.hpp"

namespace finsler {

// Serialization helpers with pinned, reproducible formatting: numbers use
// %.17g (shortest round-trippable form is not stable across libcs), field
// order is fixed by construction, and non-finite values appear as the strings
// "inf", "-inf", "nan".

inline std::string format_number(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string escape_json(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// Append-only JSON builder that keeps insertion order and tracks commas.
class JsonBuilder {
 public:
  JsonBuilder& begin_object() { return open('{'); }
  JsonBuilder& end_object() { return close('}'); }
  JsonBuilder& begin_array() { return open('['); }
  JsonBuilder& end_array() { return close(']'); }

  JsonBuilder& key(const std::string& k) {
    comma();
    out_ += '"';
    out_ += escape_json(k);
    out_ += "\":";
    pending_value_ = true;
    return *this;
  }

  JsonBuilder& value(double v) { return raw(format_number(v)); }
  JsonBuilder& value(int v) { return raw(std::to_string(v)); }
  JsonBuilder& value(long v) { return raw(std::to_string(v)); }
  JsonBuilder& value(std::uint64_t v) { return raw(std::to_string(v)); }
  JsonBuilder& value(bool v) { return raw(v ? "true" : "false"); }
  JsonBuilder& value(const char* s) { return value(std::string(s)); }
  JsonBuilder& value(const std::string& s) {
    return raw("\"" + escape_json(s) + "\"");
  }

  JsonBuilder& field(const std::string& k, double v) { return key(k).value(v); }
  JsonBuilder& field(const std::string& k, int v) { return key(k).value(v); }
  JsonBuilder& field(const std::string& k, long v) { return key(k).value(v); }
  JsonBuilder& field(const std::string& k, bool v) { return key(k).value(v); }
  JsonBuilder& field(const std::string& k, const std::string& v) {
    return key(k).value(v);
  }
  JsonBuilder& field(const std::string& k, const char* v) {
    return key(k).value(v);
  }

  std::string str() const { return out_; }

 private:
  JsonBuilder& open(char c) {
    if (!pending_value_) comma();
    pending_value_ = false;
    out_ += c;
    first_.push_back(true);
    return *this;
  }
  JsonBuilder& close(char c) {
    out_ += c;
    first_.pop_back();
    return *this;
  }
  JsonBuilder& raw(const std::string& s) {
    if (!pending_value_) comma();
    pending_value_ = false;
    out_ += s;
    return *this;
  }
  void comma() {
    if (!first_.empty()) {
      if (!first_.back()) out_ += ',';
      first_.back() = false;
    }
  }
  std::string out_;
  std::vector<bool> first_;
  bool pending_value_ = false;
};

// Write-then-rename so readers never observe a torn file.
inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("write_atomic: cannot open " + tmp.string());
    f << content;
    if (!f) throw std::runtime_error("write_atomic: short write to " + tmp.string());
  }
  fs::rename(tmp, p);
}

inline void sweep_params_json(JsonBuilder& jb, const SweepConfig& cfg) {
  jb.key("params").begin_object();
  jb.field("n", cfg.n);
  jb.field("p", cfg.p);
  if (cfg.preset == "hardy") jb.field("alpha", cfg.alpha);
  if (cfg.preset == "mckean") {
    jb.field("kappa", cfg.kappa);
    jb.field("h", cfg.h);
  }
  jb.field("lambda", cfg.lambda);
  jb.field("w_scale", cfg.w_scale);
  jb.field("tol", cfg.tol);
  jb.end_object();
}

inline std::string sweep_report_json(const SweepReport& rep, bool with_timing) {
  JsonBuilder jb;
  jb.begin_object();
  jb.field("schema", "sweep_report");
  jb.field("version", 1);
  jb.field("preset", rep.config.preset);
  jb.field("family", rep.family);
  sweep_params_json(jb, rep.config);
  jb.key("rows").begin_array();
  for (const auto& r : rep.rows) {
    jb.begin_object();
    jb.field("delta", r.delta);
    jb.field("eps", r.eps);
    jb.field("k_eps", r.k_eps);
    jb.field("Q", r.Q);
    jb.field("Q_minus_1", r.Q_minus_1);
    jb.field("l0", r.l0);
    jb.field("l1", r.l1);
    jb.field("l2", r.l2);
    jb.field("quad_error", r.quad_error);
    jb.field("upper_bound", r.upper_bound);
    jb.field("bound_ok", r.bound_ok);
    jb.field("skipped", r.skipped);
    jb.field("ok", r.ok);
    jb.field("note", r.note);
    if (with_timing) jb.field("wall_time_s", r.wall_time_s);
    jb.end_object();
  }
  jb.end_array();
  jb.key("summary").begin_object();
  jb.field("all_above_one", rep.summary.all_above_one);
  jb.field("strictly_decreasing", rep.summary.strictly_decreasing);
  jb.field("terminal_gap", rep.summary.terminal_gap);
  jb.field("fit_constant", rep.summary.fit_constant);
  jb.field("fit_exponent", rep.summary.fit_exponent);
  jb.field("bound_chain_ok", rep.summary.bound_chain_ok);
  jb.field("l2_monotone", rep.summary.l2_monotone);
  jb.field("l0_quartering", rep.summary.l0_quartering);
  jb.field("stability", rep.summary.stability);
  jb.key("notes").begin_array();
  for (const auto& n : rep.summary.notes) jb.value(n);
  jb.end_array();
  jb.end_object();
  jb.end_object();
  return jb.str();
}

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

inline std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string sweep_report_csv(const SweepReport& rep, bool with_timing) {
  std::string out = "# sweep_report v1\n";
  out +=
      "delta,eps,k_eps,Q,Q_minus_1,l0,l1,l2,quad_error,upper_bound,bound_ok,"
      "skipped,ok,note";
  if (with_timing) out += ",wall_time_s";
  out += "\n";
  for (const auto& r : rep.rows) {
    out += csv_num(r.delta) + "," + csv_num(r.eps) + "," + csv_num(r.k_eps) +
           "," + csv_num(r.Q) + "," + csv_num(r.Q_minus_1) + "," +
           csv_num(r.l0) + "," + csv_num(r.l1) + "," + csv_num(r.l2) + "," +
           csv_num(r.quad_error) + "," + csv_num(r.upper_bound) + "," +
           (r.bound_ok ? "1" : "0") + "," + (r.skipped ? "1" : "0") + "," +
           (r.ok ? "1" : "0") + "," + csv_cell(r.note);
    if (with_timing) out += "," + csv_num(r.wall_time_s);
    out += "\n";
  }
  return out;
}

}  // namespace finsler

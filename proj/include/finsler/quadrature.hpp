#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace finsler {

// numeric failure distinct from config/domain errors (drives exit codes)
struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class QuadMethod { adaptive_simpson, gauss_kronrod };

struct QuadratureSpec {
  QuadMethod method = QuadMethod::gauss_kronrod;
  double abs_tol = 1e-12;
  double rel_tol = 1e-11;
  int max_subdivisions = 4000;    // panel budget (recursion depth for Simpson)
  bool log_substitution = false;  // integrate in s = log t (requires a > 0)
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimate
  bool converged = false;
  int panels = 0;
};

// Signed magnitude kept as (log|x|, sign): survives integrands whose scale
// exceeds double range. Addition is logsumexp.
struct LogVal {
  double lg = -std::numeric_limits<double>::infinity();
  double sign = 0.0;

  static LogVal zero() { return {}; }
  static LogVal from_value(double v) {
    if (v == 0.0) return {};
    return {std::log(std::fabs(v)), v > 0 ? 1.0 : -1.0};
  }
  static LogVal from_log(double lg_, double sign_ = 1.0) { return {lg_, sign_}; }
  bool is_zero() const { return sign == 0.0; }
  double value() const { return is_zero() ? 0.0 : sign * std::exp(lg); }
};

inline LogVal operator*(const LogVal& x, const LogVal& y) {
  if (x.is_zero() || y.is_zero()) return {};
  return {x.lg + y.lg, x.sign * y.sign};
}
inline LogVal operator/(const LogVal& x, const LogVal& y) {
  if (x.is_zero()) return {};
  return {x.lg - y.lg, x.sign * y.sign};
}
inline LogVal operator+(const LogVal& x, const LogVal& y) {
  if (x.is_zero()) return y;
  if (y.is_zero()) return x;
  const LogVal& hi = (x.lg >= y.lg) ? x : y;
  const LogVal& lo = (x.lg >= y.lg) ? y : x;
  double t = lo.sign * hi.sign * std::exp(lo.lg - hi.lg);
  double m = 1.0 + t;
  if (m <= 0.0) {
    if (m == 0.0) return {};
    return {hi.lg + std::log(-m), -hi.sign};
  }
  return {hi.lg + std::log(m), hi.sign};
}
inline LogVal operator-(const LogVal& x, const LogVal& y) { return x + LogVal{y.lg, -y.sign}; }
inline LogVal pow_int(const LogVal& x, double p) {
  if (x.is_zero()) return {};
  if (x.sign > 0) return {x.lg * p, 1.0};
  // Negative base: the sign is well defined only for integer exponents.
  double ip = 0.0;
  if (std::modf(p, &ip) != 0.0) return {x.lg * p, std::nan("")};
  bool odd = std::fmod(std::fabs(ip), 2.0) == 1.0;
  return {x.lg * p, odd ? -1.0 : 1.0};
}

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
void gk15(F&& f, double a, double b, double& val, double& err) {
  double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    double x = hw * kXgk[j];
    double f1 = f(c - x), f2 = f(c + x);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  val = resk * hw;
  err = std::fabs((resk - resg) * hw);
}

struct Segment {
  double a, b, val, err;
};

template <class F>
QuadResult adaptive_gk(F&& f, double a, double b, const QuadratureSpec& spec) {
  std::vector<Segment> segs;
  Segment s0{a, b, 0, 0};
  gk15(f, a, b, s0.val, s0.err);
  segs.push_back(s0);
  QuadResult r;
  for (;;) {
    double total = 0, errtot = 0;
    for (const auto& s : segs) { total += s.val; errtot += s.err; }
    double tol = std::max(spec.abs_tol, spec.rel_tol * std::fabs(total));
    if (errtot <= tol) {
      r.value = total; r.error = errtot; r.converged = true; r.panels = (int)segs.size();
      return r;
    }
    if ((int)segs.size() >= spec.max_subdivisions) {
      r.value = total; r.error = errtot; r.converged = false; r.panels = (int)segs.size();
      return r;
    }
    size_t worst = 0;
    for (size_t i = 1; i < segs.size(); ++i)
      if (segs[i].err > segs[worst].err) worst = i;
    Segment s = segs[worst];
    double m = 0.5 * (s.a + s.b);
    Segment l{s.a, m, 0, 0}, rg{m, s.b, 0, 0};
    gk15(f, l.a, l.b, l.val, l.err);
    gk15(f, rg.a, rg.b, rg.val, rg.err);
    segs[worst] = l;
    segs.push_back(rg);
  }
}

template <class F>
double simpson_rec(F&& f, double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth, bool& ok, int& panels) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  ++panels;
  if (depth <= 0) {
    ok = false;
    return left + right + delta / 15.0;
  }
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, ok, panels) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, ok, panels);
}

template <class F>
QuadResult adaptive_simpson(F&& f, double a, double b, const QuadratureSpec& spec) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double tol = std::max(spec.abs_tol, spec.rel_tol * std::fabs(whole));
  bool ok = true;
  int panels = 1;
  int depth = std::min(spec.max_subdivisions, 48);
  QuadResult r;
  r.value = simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth, ok, panels);
  r.error = tol;
  r.converged = ok;
  r.panels = panels;
  return r;
}

}  // namespace detail

// integral of f over [a,b]
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  if (!(b >= a)) throw std::domain_error("integrate: requires b >= a");
  if (a == b) return {0.0, 0.0, true, 0};
  if (spec.log_substitution) {
    if (!(a > 0.0)) throw std::domain_error("integrate: log substitution requires a > 0");
    auto g = [&f](double s) {
      double t = std::exp(s);
      return f(t) * t;
    };
    if (spec.method == QuadMethod::adaptive_simpson)
      return detail::adaptive_simpson(g, std::log(a), std::log(b), spec);
    return detail::adaptive_gk(g, std::log(a), std::log(b), spec);
  }
  if (spec.method == QuadMethod::adaptive_simpson) return detail::adaptive_simpson(f, a, b, spec);
  return detail::adaptive_gk(f, a, b, spec);
}

struct LogQuadResult {
  LogVal value;
  double rel_error = 0.0;
  bool converged = false;
  int panels = 0;
};

// integral of exp(log_f) over [a,b] for a nonnegative integrand given in log
// form (-inf where it vanishes). Panels are evaluated in a per-panel scaled
// frame, so the result survives magnitudes far beyond double range.
template <class F>
LogQuadResult integrate_log(F&& log_f, double a, double b, const QuadratureSpec& spec = {}) {
  if (!(b >= a)) throw std::domain_error("integrate_log: requires b >= a");
  if (a == b) return {LogVal::zero(), 0.0, true, 0};
  struct Seg {
    double a, b, lg_val, lg_err;
  };
  const double ninf = -std::numeric_limits<double>::infinity();
  auto eval_seg = [&](double sa, double sb) -> Seg {
    double c = 0.5 * (sa + sb), hw = 0.5 * (sb - sa);
    double l0 = log_f(c);
    double lx[15], vx[15];
    lx[14] = l0;
    for (int j = 0; j < 7; ++j) {
      double x = hw * detail::kXgk[j];
      lx[2 * j] = log_f(c - x);
      lx[2 * j + 1] = log_f(c + x);
    }
    double lmax = ninf;
    for (double v : lx) lmax = std::max(lmax, v);
    if (lmax == ninf) return {sa, sb, ninf, ninf};
    for (int i = 0; i < 15; ++i) vx[i] = std::exp(lx[i] - lmax);
    double resk = vx[14] * detail::kWgk[7];
    double resg = vx[14] * detail::kWg[3];
    for (int j = 0; j < 7; ++j) {
      resk += detail::kWgk[j] * (vx[2 * j] + vx[2 * j + 1]);
      if (j % 2 == 1) resg += detail::kWg[j / 2] * (vx[2 * j] + vx[2 * j + 1]);
    }
    double lg_val = lmax + std::log(resk * hw);
    double ediff = std::fabs(resk - resg) * hw;
    double lg_err = (ediff > 0.0) ? lmax + std::log(ediff) : ninf;
    return {sa, sb, lg_val, lg_err};
  };
  std::vector<Seg> segs{eval_seg(a, b)};
  LogQuadResult r;
  for (;;) {
    LogVal total = LogVal::zero(), errtot = LogVal::zero();
    for (const auto& s : segs) {
      if (s.lg_val != ninf) total = total + LogVal::from_log(s.lg_val);
      if (s.lg_err != ninf) errtot = errtot + LogVal::from_log(s.lg_err);
    }
    double rel = (total.is_zero() || errtot.is_zero()) ? 0.0 : std::exp(errtot.lg - total.lg);
    if (total.is_zero()) {
      r.value = total; r.rel_error = 0.0; r.converged = true; r.panels = (int)segs.size();
      return r;
    }
    if (rel <= spec.rel_tol) {
      r.value = total; r.rel_error = rel; r.converged = true; r.panels = (int)segs.size();
      return r;
    }
    if ((int)segs.size() >= spec.max_subdivisions) {
      r.value = total; r.rel_error = rel; r.converged = false; r.panels = (int)segs.size();
      return r;
    }
    size_t worst = 0;
    for (size_t i = 1; i < segs.size(); ++i)
      if (segs[i].lg_err > segs[worst].lg_err) worst = i;
    Seg s = segs[worst];
    double m = 0.5 * (s.a + s.b);
    segs[worst] = eval_seg(s.a, m);
    segs.push_back(eval_seg(m, s.b));
  }
}

}  // namespace finsler

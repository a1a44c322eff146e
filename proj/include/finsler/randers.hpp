#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "finsler/dual.hpp"
#include "finsler/linalg.hpp"
#include "finsler/rng.hpp"

namespace finsler {

// ---------------------------------------------------------------------------
// Domains

struct FullSpace {};
struct BallDomain {
  double radius = 1.0;
};
using Domain = std::variant<FullSpace, BallDomain>;

inline constexpr double kBallGuard = 1e-9;

inline bool domain_contains(const Domain& dom, const std::vector<double>& x) {
  if (std::holds_alternative<FullSpace>(dom)) return true;
  double R = std::get<BallDomain>(dom).radius;
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  return std::sqrt(r2) < R * (1.0 - kBallGuard);
}

inline void require_in_domain(const Domain& dom, const std::vector<double>& x,
                              const char* what) {
  if (!domain_contains(dom, x))
    throw std::domain_error(std::string(what) + ": point outside metric domain");
}

// ---------------------------------------------------------------------------
// Concrete metrics with constant data. A metric type supplies
//   int dim() const, Domain domain() const,
//   template<class T> std::vector<T> a_matrix(const std::vector<T>& x) const
//   template<class T> std::vector<T> b_form(const std::vector<T>& x) const
// (a row-major n*n symmetric positive definite, b a covector with |b|_a < 1).

struct EuclideanMetric {
  int n = 2;
  int dim() const { return n; }
  Domain domain() const { return FullSpace{}; }
  template <class T>
  std::vector<T> a_matrix(const std::vector<T>&) const {
    std::vector<T> a(n * n, T(0.0));
    for (int i = 0; i < n; ++i) a[i * n + i] = T(1.0);
    return a;
  }
  template <class T>
  std::vector<T> b_form(const std::vector<T>&) const {
    return std::vector<T>(n, T(0.0));
  }
};

struct ConstantRanders {
  std::vector<double> a;  // row-major n*n
  std::vector<double> b;  // length n
  int dim() const { return (int)b.size(); }
  Domain domain() const { return FullSpace{}; }
  template <class T>
  std::vector<T> a_matrix(const std::vector<T>&) const {
    return std::vector<T>(a.begin(), a.end());
  }
  template <class T>
  std::vector<T> b_form(const std::vector<T>&) const {
    return std::vector<T>(b.begin(), b.end());
  }
};

// ---------------------------------------------------------------------------
// Pointwise evaluation

template <class T>
T quad_form(const std::vector<T>& a, const std::vector<T>& y, int n) {
  T s(0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s = s + a[i * n + j] * y[i] * y[j];
  return s;
}

// F(x,y) = sqrt(y a y) + b.y
template <class M, class T>
T finsler_norm(const M& m, const std::vector<T>& x, const std::vector<T>& y) {
  int n = m.dim();
  auto a = m.a_matrix(x);
  auto b = m.b_form(x);
  T alpha = sqrt(quad_form(a, y, n));
  T beta(0.0);
  for (int i = 0; i < n; ++i) beta = beta + b[i] * y[i];
  return alpha + beta;
}

// |b|_a^2 = b a^{-1} b at x; must be < 1 for a positive definite norm
template <class M, class T>
T b_norm_sq_t(const M& m, const std::vector<T>& x) {
  int n = m.dim();
  auto a = m.a_matrix(x);
  auto b = m.b_form(x);
  std::vector<T> v(n);
  spd_solve(a, n, b, v, "b_norm_sq");
  return dot_n(b, v, n);
}

template <class M>
double b_norm_sq(const M& m, const std::vector<double>& x) {
  return b_norm_sq_t(m, x);
}

template <class M>
void require_positive(const M& m, const std::vector<double>& x, const char* what) {
  double s = b_norm_sq(m, x);
  if (!(s < 1.0))
    throw std::domain_error(std::string(what) +
                            ": drift one-form reaches unit length, norm degenerates");
}

// F*(x,xi) = sup_{y != 0} <xi,y>/F(x,y), in closed form:
//   with v = a^{-1} b, s = b.v, u = a^{-1} xi,
//   F* = (sqrt((1-s) xi.u + (v.xi)^2) - v.xi) / (1-s)
template <class M, class T>
T dual_norm(const M& m, const std::vector<T>& x, const std::vector<T>& xi) {
  int n = m.dim();
  auto a = m.a_matrix(x);
  auto b = m.b_form(x);
  std::vector<T> v(n), u(n);
  spd_solve(a, n, b, v, "dual_norm");
  spd_solve(a, n, xi, u, "dual_norm");
  T s = dot_n(b, v, n);
  T xu = dot_n(xi, u, n);
  T vxi = dot_n(v, xi, n);
  T one_s = T(1.0) - s;
  return (sqrt(one_s * xu + vxi * vxi) - vxi) / one_s;
}

// Dual metric data: F*(xi) = sqrt(xi A* xi) + b*.xi
template <class M, class T>
void dual_metric_data(const M& m, const std::vector<T>& x, std::vector<T>& a_star,
                      std::vector<T>& b_star) {
  int n = m.dim();
  auto a = m.a_matrix(x);
  auto b = m.b_form(x);
  std::vector<T> v(n);
  spd_solve(a, n, b, v, "dual_metric_data");
  T s = dot_n(b, v, n);
  T one_s = T(1.0) - s;
  // a^{-1} column by column
  std::vector<T> ainv(n * n);
  std::vector<T> e(n, T(0.0)), col(n);
  for (int j = 0; j < n; ++j) {
    e.assign(n, T(0.0));
    e[j] = T(1.0);
    spd_solve(a, n, e, col, "dual_metric_data");
    for (int i = 0; i < n; ++i) ainv[i * n + j] = col[i];
  }
  a_star.assign(n * n, T(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a_star[i * n + j] = (one_s * ainv[i * n + j] + v[i] * v[j]) / (one_s * one_s);
  b_star.assign(n, T(0.0));
  for (int i = 0; i < n; ++i) b_star[i] = T(0.0) - v[i] / one_s;
}

// Search-based dual norm: maximize <xi,y>/F(x,y) over directions. Slow,
// deterministic; exists to cross-check the closed form.
template <class M>
double dual_norm_search(const M& m, const std::vector<double>& x,
                        const std::vector<double>& xi, std::uint64_t seed = 12345) {
  int n = m.dim();
  auto a = m.a_matrix(x);
  auto b = m.b_form(x);
  auto ratio = [&](const std::vector<double>& y) {
    double alpha = std::sqrt(quad_form(a, y, n));
    double beta = dot_n(b, y, n);
    double num = dot_n(xi, y, n);
    return num / (alpha + beta);
  };
  auto grad_ratio = [&](const std::vector<double>& y, std::vector<double>& g) {
    double alpha = std::sqrt(quad_form(a, y, n));
    double F = alpha + dot_n(b, y, n);
    double num = dot_n(xi, y, n);
    for (int i = 0; i < n; ++i) {
      double ay = 0.0;
      for (int j = 0; j < n; ++j) ay += a[i * n + j] * y[j];
      double dF = ay / alpha + b[i];
      g[i] = xi[i] / F - num / (F * F) * dF;
    }
  };
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> ybest(n, 0.0);
  auto consider = [&](std::vector<double> y) {
    double nrm = std::sqrt(dot_n(y, y, n));
    if (nrm == 0.0) return;
    for (auto& c : y) c /= nrm;
    double v = ratio(y);
    if (v > best) {
      best = v;
      ybest = y;
    }
  };
  if (n == 2) {
    int grid = 20000;
    for (int k = 0; k < grid; ++k) {
      double t = 2.0 * std::numbers::pi * k / grid;
      consider({std::cos(t), std::sin(t)});
    }
  } else {
    Rng rng(seed);
    int grid = (n == 3) ? 40000 : 100000;
    std::vector<double> y(n);
    for (int k = 0; k < grid; ++k) {
      for (int i = 0; i < n; ++i) y[i] = rng.normal();
      consider(y);
    }
  }
  // projected gradient ascent on the sphere
  std::vector<double> g(n), y = ybest;
  double step = 0.1;
  for (int it = 0; it < 400 && step > 1e-15; ++it) {
    grad_ratio(y, g);
    double gy = dot_n(g, y, n);
    for (int i = 0; i < n; ++i) g[i] -= gy * y[i];
    std::vector<double> cand(n);
    for (int i = 0; i < n; ++i) cand[i] = y[i] + step * g[i];
    double nrm = std::sqrt(dot_n(cand, cand, n));
    for (auto& c : cand) c /= nrm;
    if (ratio(cand) > best) {
      best = ratio(cand);
      y = cand;
    } else {
      step *= 0.5;
    }
  }
  return best;
}

// Legendre transform l(x,y) = (1/2) d(F^2)/dy = F(x,y) dF/dy, a covector
template <class M, class T>
std::vector<T> legendre(const M& m, const std::vector<T>& x, const std::vector<T>& y) {
  int n = m.dim();
  double ynrm = 0.0;
  for (const T& c : y) ynrm += fval(c) * fval(c);
  if (!(ynrm > 0.0)) throw std::domain_error("legendre: y must be nonzero");
  auto a = m.a_matrix(x);
  auto b = m.b_form(x);
  T alpha = sqrt(quad_form(a, y, n));
  T F = alpha + dot_n(b, y, n);
  if (fval(F) < 1e-12 * std::sqrt(ynrm))
    throw std::domain_error("legendre: norm vanishes along y, metric data invalid");
  std::vector<T> l(n);
  for (int i = 0; i < n; ++i) {
    T ay(0.0);
    for (int j = 0; j < n; ++j) ay += a[i * n + j] * y[j];
    l[i] = F * (ay / alpha + b[i]);
  }
  return l;
}

// Inverse Legendre l*(x,xi) = F*(x,xi) dF*/dxi, a vector; l*(l(y)) = y
template <class M, class T>
std::vector<T> legendre_dual(const M& m, const std::vector<T>& x, const std::vector<T>& xi) {
  int n = m.dim();
  double xnrm = 0.0;
  for (const T& c : xi) xnrm += fval(c) * fval(c);
  if (!(xnrm > 0.0)) throw std::domain_error("legendre_dual: xi must be nonzero");
  std::vector<T> a_star, b_star;
  dual_metric_data(m, x, a_star, b_star);
  T alpha = sqrt(quad_form(a_star, xi, n));
  T Fs = alpha + dot_n(b_star, xi, n);
  std::vector<T> y(n);
  for (int i = 0; i < n; ++i) {
    T ax(0.0);
    for (int j = 0; j < n; ++j) ax += a_star[i * n + j] * xi[j];
    y[i] = Fs * (ax / alpha + b_star[i]);
  }
  return y;
}

// sup_y F(x,-y)/F(x,y) = (1+|b|_a)/(1-|b|_a)
template <class M>
double reversibility(const M& m, const std::vector<double>& x) {
  double q = std::sqrt(b_norm_sq(m, x));
  if (!(q < 1.0)) throw std::domain_error("reversibility: drift reaches unit length");
  return (1.0 + q) / (1.0 - q);
}

template <class M>
double reversibility_search(const M& m, const std::vector<double>& x,
                            std::uint64_t seed = 777) {
  int n = m.dim();
  auto a = m.a_matrix(x);
  auto b = m.b_form(x);
  auto rat = [&](const std::vector<double>& y) {
    double alpha = std::sqrt(quad_form(a, y, n));
    double beta = dot_n(b, y, n);
    return (alpha - beta) / (alpha + beta);
  };
  double best = 1.0;
  if (n == 2) {
    for (int k = 0; k < 20000; ++k) {
      double t = 2.0 * std::numbers::pi * k / 20000;
      best = std::max(best, rat({std::cos(t), std::sin(t)}));
    }
  } else {
    Rng rng(seed);
    std::vector<double> y(n);
    for (int k = 0; k < 100000; ++k) {
      for (int i = 0; i < n; ++i) y[i] = rng.normal();
      best = std::max(best, rat(y));
    }
  }
  return best;
}

// Busemann-Hausdorff volume density:
//   sigma(x) = vol(euclidean unit ball) / vol{y : F(x,y) < 1}
//            = sqrt(det a) (1 - |b|_a^2)^{(n+1)/2}
template <class M, class T>
T bh_density_t(const M& m, const std::vector<T>& x) {
  int n = m.dim();
  auto a = m.a_matrix(x);
  T s = b_norm_sq_t(m, x);
  if (!(fval(s) < 1.0)) throw std::domain_error("bh_density: drift reaches unit length");
  T det = spd_det(a, n, "bh_density");
  return sqrt(det) * pow(T(1.0) - s, 0.5 * (n + 1));
}

template <class M>
double bh_density(const M& m, const std::vector<double>& x) {
  return bh_density_t(m, x);
}

inline double euclidean_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long long samples = 0;
};

// Monte Carlo volume of {F(x,.) < 1} inside its bounding box, then
// sigma = vol(B^n)/vol. Cross-check for bh_density.
template <class M>
McEstimate bh_density_monte_carlo(const M& m, const std::vector<double>& x,
                                  long long samples, std::uint64_t seed) {
  int n = m.dim();
  auto a = m.a_matrix(x);
  auto b = m.b_form(x);
  double s = b_norm_sq(m, x);
  std::vector<double> acopy = a;
  double lam_min = sym_eigen_min(acopy, n);
  // F(y) >= alpha(y)(1-|b|_a) >= sqrt(lam_min)|y|(1-|b|_a)
  double R = 1.0 / (std::sqrt(lam_min) * (1.0 - std::sqrt(s)));
  Rng rng(seed);
  long long hits = 0;
  std::vector<double> y(n);
  for (long long k = 0; k < samples; ++k) {
    for (int i = 0; i < n; ++i) y[i] = rng.uniform(-R, R);
    double alpha = std::sqrt(quad_form(a, y, n));
    if (alpha + dot_n(b, y, n) < 1.0) ++hits;
  }
  double box = std::pow(2.0 * R, n);
  double p = (double)hits / (double)samples;
  double vol = p * box;
  double vol_se = box * std::sqrt(p * (1.0 - p) / (double)samples);
  double omega = euclidean_ball_volume(n);
  McEstimate e;
  e.value = omega / vol;
  e.std_error = omega / (vol * vol) * vol_se;  // delta method
  e.samples = samples;
  return e;
}

}  // namespace finsler

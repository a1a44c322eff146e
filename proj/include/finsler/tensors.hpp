#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "finsler/dual.hpp"
#include "finsler/linalg.hpp"
#include "finsler/randers.hpp"

namespace finsler {

// F^2 as one expression (sqrt composed away nowhere; fine for y != 0)
template <class M, class T>
T norm_sq(const M& m, const std::vector<T>& x, const std::vector<T>& y) {
  T F = finsler_norm(m, x, y);
  return F * F;
}

template <class T>
void require_nonzero_vec(const std::vector<T>& y, const char* what) {
  double s = 0.0;
  for (const T& c : y) s += fval(c) * fval(c);
  if (!(s > 0.0)) throw std::domain_error(std::string(what) + ": y must be nonzero");
}

// g_ij(x,y) = 1/2 d^2(F^2)/dy^i dy^j via two nested dual levels
template <class M, class T>
std::vector<T> fundamental_tensor(const M& m, const std::vector<T>& x,
                                  const std::vector<T>& y) {
  int n = m.dim();
  require_nonzero_vec(y, "fundamental_tensor");
  using S = Dual<T>;
  using TT = Dual<S>;
  std::vector<TT> xx(n);
  for (int k = 0; k < n; ++k) xx[k] = TT(S(x[k], T(0.0)), S(T(0.0), T(0.0)));
  std::vector<T> g(n * n);
  std::vector<TT> yy(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = 0; k < n; ++k)
        yy[k] = TT(S(y[k], T(k == j ? 1.0 : 0.0)), S(T(k == i ? 1.0 : 0.0), T(0.0)));
      TT E = norm_sq(m, xx, yy);
      g[i * n + j] = E.b.b * 0.5;
      g[j * n + i] = g[i * n + j];
    }
  }
  return g;
}

// same by central finite differences (cross-check oracle)
template <class M>
std::vector<double> fundamental_tensor_fd(const M& m, const std::vector<double>& x,
                                          const std::vector<double>& y) {
  int n = m.dim();
  auto E = [&](const std::vector<double>& yv) { return norm_sq(m, x, yv); };
  std::vector<double> g(n * n);
  for (int i = 0; i < n; ++i) {
    double hi = fd_step(y[i]);
    for (int j = i; j < n; ++j) {
      double v;
      if (i == j) {
        auto yp = y, ym = y;
        yp[i] += hi;
        ym[i] -= hi;
        v = (E(yp) - 2.0 * E(y) + E(ym)) / (hi * hi);
      } else {
        double hj = fd_step(y[j]);
        auto ypp = y, ypm = y, ymp = y, ymm = y;
        ypp[i] += hi; ypp[j] += hj;
        ypm[i] += hi; ypm[j] -= hj;
        ymp[i] -= hi; ymp[j] += hj;
        ymm[i] -= hi; ymm[j] -= hj;
        v = (E(ypp) - E(ypm) - E(ymp) + E(ymm)) / (4.0 * hi * hj);
      }
      g[i * n + j] = 0.5 * v;
      g[j * n + i] = g[i * n + j];
    }
  }
  return g;
}

// Geodesic spray coefficients,
//   G^i = 1/4 g^{il} ( y^k d^2(F^2)/dx^k dy^l - d(F^2)/dx^l )
template <class M, class T>
std::vector<T> spray(const M& m, const std::vector<T>& x, const std::vector<T>& y) {
  int n = m.dim();
  require_nonzero_vec(y, "spray");
  auto g = fundamental_tensor(m, x, y);
  using S = Dual<T>;
  using TT = Dual<S>;
  std::vector<T> rhs(n);
  std::vector<TT> xx(n), yy(n);
  std::vector<S> x1(n), y1(n);
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      // outer seed: x moves along y; inner seed: y_l
      xx[k] = TT(S(x[k], T(0.0)), S(y[k], T(0.0)));
      yy[k] = TT(S(y[k], T(k == l ? 1.0 : 0.0)), S(T(0.0), T(0.0)));
    }
    TT E2 = norm_sq(m, xx, yy);
    for (int k = 0; k < n; ++k) {
      x1[k] = S(x[k], T(k == l ? 1.0 : 0.0));
      y1[k] = S(y[k], T(0.0));
    }
    S E1 = norm_sq(m, x1, y1);
    rhs[l] = (E2.b.b - E1.b) * 0.25;
  }
  std::vector<T> G(n);
  spd_solve(g, n, rhs, G, "spray");
  return G;
}

// max_i |G^i|: zero when geodesics are straight lines in these coordinates
template <class M>
double flatness_residual(const M& m, const std::vector<double>& x,
                         const std::vector<double>& y) {
  auto G = spray(m, x, y);
  double r = 0.0;
  for (double gi : G) r = std::max(r, std::fabs(gi));
  return r;
}

// P(x,y) = y^k dF/dx^k / (2F); for a projectively flat metric G^i = P y^i
template <class M, class T>
T projective_factor(const M& m, const std::vector<T>& x, const std::vector<T>& y) {
  int n = m.dim();
  require_nonzero_vec(y, "projective_factor");
  using S = Dual<T>;
  std::vector<S> xx(n), yy(n);
  for (int k = 0; k < n; ++k) {
    xx[k] = S(x[k], y[k]);
    yy[k] = S(y[k], T(0.0));
  }
  S F = finsler_norm(m, xx, yy);
  return F.b / (F.a * 2.0);
}

// max_i |G^i - P y^i|
template <class M>
double projective_flatness_residual(const M& m, const std::vector<double>& x,
                                    const std::vector<double>& y) {
  auto G = spray(m, x, y);
  double P = projective_factor(m, x, y);
  double r = 0.0;
  for (int i = 0; i < (int)y.size(); ++i) r = std::max(r, std::fabs(G[i] - P * y[i]));
  return r;
}

// Straight-line geodesics test, first-order form:
//   max_i | y^k d^2F/dx^k dy^i - dF/dx^i |
template <class M>
double check_projective_flatness(const M& m, const std::vector<double>& x,
                                 const std::vector<double>& y) {
  int n = m.dim();
  require_nonzero_vec(y, "check_projective_flatness");
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<D2> xx(n), yy(n);
    for (int k = 0; k < n; ++k) {
      xx[k] = D2(D1(x[k], y[k]), D1(0.0, 0.0));
      yy[k] = D2(D1(y[k], 0.0), D1(k == i ? 1.0 : 0.0, 0.0));
    }
    D2 F2 = finsler_norm(m, xx, yy);
    std::vector<D1> x1(n), y1(n);
    for (int k = 0; k < n; ++k) {
      x1[k] = D1(x[k], k == i ? 1.0 : 0.0);
      y1[k] = D1(y[k], 0.0);
    }
    D1 F1 = finsler_norm(m, x1, y1);
    r = std::max(r, std::fabs(F2.b.b - F1.b));
  }
  return r;
}

// Flag curvature for a projectively flat metric: K = (P^2 - y^k dP/dx^k) / F^2
template <class M>
double flag_curvature_projective(const M& m, const std::vector<double>& x,
                                 const std::vector<double>& y) {
  int n = m.dim();
  std::vector<D1> xx(n), yy(n);
  for (int k = 0; k < n; ++k) {
    xx[k] = D1(x[k], y[k]);
    yy[k] = D1(y[k], 0.0);
  }
  D1 P = projective_factor(m, xx, yy);
  double F = finsler_norm(m, x, y);
  return (P.a * P.a - P.b) / (F * F);
}

// same with the outer derivative by finite differences
template <class M>
double flag_curvature_projective_fd(const M& m, const std::vector<double>& x,
                                    const std::vector<double>& y) {
  int n = m.dim();
  auto Pf = [&](double t) {
    std::vector<double> xt(n);
    for (int k = 0; k < n; ++k) xt[k] = x[k] + t * y[k];
    return projective_factor(m, xt, y);
  };
  double P = Pf(0.0);
  double dP = richardson_diff(Pf, 0.0);
  double F = finsler_norm(m, x, y);
  return (P * P - dP) / (F * F);
}

// Riemann curvature endomorphism R^i_k of the spray, then the flag curvature
// of the flag (y, V):
//   R^i_k = 2 dG^i/dx^k - y^j d^2G^i/dx^j dy^k + 2 G^j d^2G^i/dy^j dy^k
//           - dG^i/dy^j dG^j/dy^k
//   K(y,V) = V^i (g_ij R^j_k) V^k / (F^2 g(V,V) - g(y,V)^2)
template <class M>
std::vector<double> riemann_endomorphism(const M& m, const std::vector<double>& x,
                                         const std::vector<double>& y) {
  int n = m.dim();
  std::vector<double> G(n);
  {
    auto g0 = spray(m, x, y);
    for (int i = 0; i < n; ++i) G[i] = g0[i];
  }
  std::vector<double> dGdx(n * n), dGdy(n * n), mix(n * n), yy2(n * n);
  std::vector<D1> x1(n), y1(n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      x1[j] = D1(x[j], j == k ? 1.0 : 0.0);
      y1[j] = D1(y[j], 0.0);
    }
    auto Gk = spray(m, x1, y1);
    for (int i = 0; i < n; ++i) dGdx[i * n + k] = Gk[i].b;
    for (int j = 0; j < n; ++j) {
      x1[j] = D1(x[j], 0.0);
      y1[j] = D1(y[j], j == k ? 1.0 : 0.0);
    }
    Gk = spray(m, x1, y1);
    for (int i = 0; i < n; ++i) dGdy[i * n + k] = Gk[i].b;
  }
  std::vector<D2> x2(n), y2(n);
  for (int k = 0; k < n; ++k) {
    // y^j d^2 G^i/dx^j dy^k: outer seed x along y, inner seed y_k
    for (int j = 0; j < n; ++j) {
      x2[j] = D2(D1(x[j], 0.0), D1(y[j], 0.0));
      y2[j] = D2(D1(y[j], j == k ? 1.0 : 0.0), D1(0.0, 0.0));
    }
    auto Gk = spray(m, x2, y2);
    for (int i = 0; i < n; ++i) mix[i * n + k] = Gk[i].b.b;
    // G^j d^2 G^i/dy^j dy^k: outer seed y along G, inner seed y_k
    for (int j = 0; j < n; ++j) {
      x2[j] = D2(D1(x[j], 0.0), D1(0.0, 0.0));
      y2[j] = D2(D1(y[j], j == k ? 1.0 : 0.0), D1(G[j], 0.0));
    }
    Gk = spray(m, x2, y2);
    for (int i = 0; i < n; ++i) yy2[i * n + k] = Gk[i].b.b;
  }
  std::vector<double> R(n * n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double s = 2.0 * dGdx[i * n + k] - mix[i * n + k] + 2.0 * yy2[i * n + k];
      for (int j = 0; j < n; ++j) s -= dGdy[i * n + j] * dGdy[j * n + k];
      R[i * n + k] = s;
    }
  return R;
}

template <class M>
double flag_curvature_general(const M& m, const std::vector<double>& x,
                              const std::vector<double>& y, const std::vector<double>& V) {
  int n = m.dim();
  auto R = riemann_endomorphism(m, x, y);
  auto g = fundamental_tensor(m, x, y);
  double F = finsler_norm(m, x, y);
  double gVV = quad_form(g, V, n);
  double gyV = 0.0, num = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gyV += g[i * n + j] * y[i] * V[j];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) num += V[i] * g[i * n + j] * R[j * n + k] * V[k];
  double den = F * F * gVV - gyV * gyV;
  if (!(std::fabs(den) > 1e-12 * F * F * gVV))
    throw std::domain_error("flag_curvature_general: flag vector parallel to y");
  return num / den;
}

// Volume density used for divergence-type operators. Metrics may carry a
// weighted measure by exposing a member log_density(x); otherwise the
// Busemann-Hausdorff density derived from (a, b) is used.
template <class M, class T>
T log_density_t(const M& m, const std::vector<T>& x) {
  if constexpr (requires { { m.log_density(x) } -> std::convertible_to<T>; }) {
    return m.log_density(x);
  } else {
    return log(bh_density_t(m, x));
  }
}

// S-curvature with respect to the metric's volume density:
//   S(x,y) = dG^i/dy^i - y^i d(log sigma)/dx^i
template <class M>
double s_curvature(const M& m, const std::vector<double>& x, const std::vector<double>& y) {
  int n = m.dim();
  double tr = 0.0;
  std::vector<D1> x1(n), y1(n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      x1[j] = D1(x[j], 0.0);
      y1[j] = D1(y[j], j == k ? 1.0 : 0.0);
    }
    auto Gk = spray(m, x1, y1);
    tr += Gk[k].b;
  }
  for (int j = 0; j < n; ++j) x1[j] = D1(x[j], y[j]);
  D1 sig = log_density_t(m, x1);
  return tr - sig.b;
}

template <class M>
double s_curvature_fd(const M& m, const std::vector<double>& x,
                      const std::vector<double>& y) {
  int n = m.dim();
  double tr = 0.0;
  for (int k = 0; k < n; ++k) {
    auto Gk = [&](double t) {
      auto yt = y;
      yt[k] = t;
      return spray(m, x, yt)[k];
    };
    tr += richardson_diff(Gk, y[k]);
  }
  auto logsig = [&](double t) {
    std::vector<double> xt(n);
    for (int j = 0; j < n; ++j) xt[j] = x[j] + t * y[j];
    return log_density_t(m, xt);
  };
  return tr - richardson_diff(logsig, 0.0);
}

// S(x,y)/F(x,y): the scale-free form quoted for the model families
template <class M>
double reduced_s_curvature(const M& m, const std::vector<double>& x,
                           const std::vector<double>& y) {
  return s_curvature(m, x, y) / finsler_norm(m, x, y);
}

// Finsler Laplacian of a scalar field u (functor templated on the scalar):
//   grad u = l*(x, du),  lap u = div_sigma(grad u)
//          = sum_i dV^i/dx^i + V^i d(log sigma)/dx^i
template <class M, class U>
double finsler_laplacian(const M& m, const U& u, const std::vector<double>& x) {
  int n = m.dim();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    // outer dual: x_i; inner dual: gradient components of u
    std::vector<D1> xo(n);
    for (int j = 0; j < n; ++j) xo[j] = D1(x[j], j == i ? 1.0 : 0.0);
    std::vector<D1> du(n);
    for (int j = 0; j < n; ++j) {
      std::vector<D2> xs(n);
      for (int k = 0; k < n; ++k)
        xs[k] = D2(D1(x[k], k == i ? 1.0 : 0.0), D1(k == j ? 1.0 : 0.0, 0.0));
      D2 uv = u(xs);
      du[j] = uv.b;  // du/dx_j carrying d/dx_i in .b
    }
    auto V = legendre_dual(m, xo, du);
    D1 sig = log_density_t(m, xo);
    acc += V[i].b + fval(V[i]) * sig.b;
  }
  return acc;
}

// divergence form by finite differences (cross-check)
template <class M, class U>
double finsler_laplacian_fd(const M& m, const U& u, const std::vector<double>& x) {
  int n = m.dim();
  auto gradfield = [&](const std::vector<double>& p) {
    std::vector<double> du(n);
    for (int j = 0; j < n; ++j) {
      std::vector<D1> xs(n);
      for (int k = 0; k < n; ++k) xs[k] = D1(p[k], k == j ? 1.0 : 0.0);
      du[j] = u(xs).b;
    }
    return legendre_dual(m, p, du);
  };
  auto density = [&](const std::vector<double>& p) { return std::exp(log_density_t(m, p)); };
  double sig0 = density(x);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    auto Wi = [&](double t) {
      auto xt = x;
      xt[i] = t;
      return density(xt) * gradfield(xt)[i];
    };
    acc += richardson_diff(Wi, x[i]);
  }
  return acc / sig0;
}

// ---------------------------------------------------------------------------
// Geodesics: x'' = -2G(x,x'), integrated with classic RK4 together with the
// arc length s' = F(x,x').

struct GeodesicResult {
  std::vector<double> x_end;
  std::vector<double> y_end;
  double length = 0.0;
  std::vector<std::vector<double>> path;  // sampled points including endpoints
};

template <class M>
GeodesicResult geodesic_integrate(const M& m, const std::vector<double>& x0,
                                  const std::vector<double>& y0, double t_end, int steps,
                                  int path_samples = 0) {
  int n = m.dim();
  std::vector<double> x = x0, y = y0;
  double s = 0.0;
  double h = t_end / steps;
  GeodesicResult out;
  out.path.push_back(x);
  int stride = path_samples > 0 ? std::max(1, steps / path_samples) : steps + 1;
  auto rhs = [&](const std::vector<double>& xs, const std::vector<double>& ys,
                 std::vector<double>& dx, std::vector<double>& dy, double& ds) {
    auto G = spray(m, xs, ys);
    for (int i = 0; i < n; ++i) {
      dx[i] = ys[i];
      dy[i] = -2.0 * G[i];
    }
    ds = finsler_norm(m, xs, ys);
  };
  std::vector<double> k1x(n), k1y(n), k2x(n), k2y(n), k3x(n), k3y(n), k4x(n), k4y(n);
  std::vector<double> xt(n), yt(n);
  double k1s, k2s, k3s, k4s;
  for (int it = 0; it < steps; ++it) {
    rhs(x, y, k1x, k1y, k1s);
    for (int i = 0; i < n; ++i) { xt[i] = x[i] + 0.5 * h * k1x[i]; yt[i] = y[i] + 0.5 * h * k1y[i]; }
    rhs(xt, yt, k2x, k2y, k2s);
    for (int i = 0; i < n; ++i) { xt[i] = x[i] + 0.5 * h * k2x[i]; yt[i] = y[i] + 0.5 * h * k2y[i]; }
    rhs(xt, yt, k3x, k3y, k3s);
    for (int i = 0; i < n; ++i) { xt[i] = x[i] + h * k3x[i]; yt[i] = y[i] + h * k3y[i]; }
    rhs(xt, yt, k4x, k4y, k4s);
    for (int i = 0; i < n; ++i) {
      x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
      y[i] += h / 6.0 * (k1y[i] + 2.0 * k2y[i] + 2.0 * k3y[i] + k4y[i]);
    }
    s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
    if ((it + 1) % stride == 0 && it + 1 < steps) out.path.push_back(x);
  }
  out.path.push_back(x);
  out.x_end = x;
  out.y_end = y;
  out.length = s;
  return out;
}

}  // namespace finsler

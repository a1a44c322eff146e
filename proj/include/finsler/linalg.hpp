#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "finsler/dual.hpp"

namespace finsler {

// Dense symmetric n*n matrices stored row-major in std::vector<T>.
// n stays small (space dimension), so O(n^3) direct methods throughout.

inline constexpr double kConditionGuard = 1e12;

template <class T>
T dot_n(const T* x, const T* y, int n) {
  T s(0.0);
  for (int i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

template <class T>
T dot_n(const std::vector<T>& x, const std::vector<T>& y, int n) {
  return dot_n(x.data(), y.data(), n);
}

// In-place lower Cholesky A = L L^T. Returns false on a non-positive pivot
// (value part). Works on nested duals.
template <class T>
bool cholesky_factor(std::vector<T>& m, int n) {
  for (int j = 0; j < n; ++j) {
    T d = m[j * n + j];
    for (int k = 0; k < j; ++k) d -= m[j * n + k] * m[j * n + k];
    if (!(fval(d) > 0.0)) return false;
    T l = sqrt(d);
    m[j * n + j] = l;
    for (int i = j + 1; i < n; ++i) {
      T s = m[i * n + j];
      for (int k = 0; k < j; ++k) s -= m[i * n + k] * m[j * n + k];
      m[i * n + j] = s / l;
    }
  }
  return true;
}

// crude condition estimate from the Cholesky diagonal
template <class T>
double cholesky_condition(const std::vector<T>& l, int n) {
  double lo = fval(l[0]), hi = fval(l[0]);
  for (int i = 1; i < n; ++i) {
    double d = fval(l[i * n + i]);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  double r = hi / lo;
  return r * r;
}

template <class T>
void cholesky_solve(const std::vector<T>& l, int n, const T* b, T* x) {
  for (int i = 0; i < n; ++i) {
    T s = b[i];
    for (int k = 0; k < i; ++k) s -= l[i * n + k] * x[k];
    x[i] = s / l[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    T s = x[i];
    for (int k = i + 1; k < n; ++k) s -= l[k * n + i] * x[k];
    x[i] = s / l[i * n + i];
  }
}

// Factors a copy and solves; throws on indefiniteness or a condition number
// beyond the guard.
template <class T>
void spd_solve(std::vector<T> a, int n, const T* b, T* x, const char* what) {
  if (!cholesky_factor(a, n)) throw std::domain_error(std::string(what) + ": matrix not positive definite");
  if (cholesky_condition(a, n) > kConditionGuard)
    throw std::runtime_error(std::string(what) + ": condition number beyond guard");
  cholesky_solve(a, n, b, x);
}

template <class T>
void spd_solve(const std::vector<T>& a, int n, const std::vector<T>& b, std::vector<T>& x,
               const char* what) {
  x.resize(n);
  spd_solve(a, n, b.data(), x.data(), what);
}

template <class T>
T spd_det(std::vector<T> a, int n, const char* what) {
  if (!cholesky_factor(a, n)) throw std::domain_error(std::string(what) + ": matrix not positive definite");
  T d(1.0);
  for (int i = 0; i < n; ++i) d = d * a[i * n + i];
  return d * d;
}

// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi (double only;
// used by positivity assertions in tests).
inline double sym_eigen_min(std::vector<double> m, int n) {
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += m[p * n + q] * m[p * n + q];
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        double apq = m[p * n + q];
        if (std::fabs(apq) < 1e-300) continue;
        double theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          double mkp = m[k * n + p], mkq = m[k * n + q];
          m[k * n + p] = c * mkp - s * mkq;
          m[k * n + q] = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          double mpk = m[p * n + k], mqk = m[q * n + k];
          m[p * n + k] = c * mpk - s * mqk;
          m[q * n + k] = s * mpk + c * mqk;
        }
      }
  }
  double lo = m[0];
  for (int i = 1; i < n; ++i) lo = std::min(lo, m[i * n + i]);
  return lo;
}

}  // namespace finsler

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <type_traits>

namespace finsler {

// Forward-mode dual number. Nest (Dual<Dual<double>>, ...) for higher
// derivatives; each level tracks one seeded direction.
template <class T>
struct Dual {
  T a{};  // value
  T b{};  // derivative along the seeded direction

  Dual() = default;
  Dual(double v) : a(v), b() {}
  Dual(T v, T d) : a(std::move(v)), b(std::move(d)) {}

  Dual& operator+=(const Dual& o) { a += o.a; b += o.b; return *this; }
  Dual& operator-=(const Dual& o) { a -= o.a; b -= o.b; return *this; }
};

// full (innermost) value of a possibly nested dual
inline double fval(double x) { return x; }
template <class T>
double fval(const Dual<T>& x) { return fval(x.a); }

template <class T>
Dual<T> seeded(const T& v) { return Dual<T>(v, T(1.0)); }

template <class T> Dual<T> operator-(const Dual<T>& x) { return {-x.a, -x.b}; }
template <class T> Dual<T> operator+(const Dual<T>& x) { return x; }

template <class T> Dual<T> operator+(const Dual<T>& x, const Dual<T>& y) { return {x.a + y.a, x.b + y.b}; }
template <class T> Dual<T> operator-(const Dual<T>& x, const Dual<T>& y) { return {x.a - y.a, x.b - y.b}; }
template <class T> Dual<T> operator*(const Dual<T>& x, const Dual<T>& y) { return {x.a * y.a, x.a * y.b + x.b * y.a}; }
template <class T> Dual<T> operator/(const Dual<T>& x, const Dual<T>& y) {
  T q = x.a / y.a;
  return {q, (x.b - q * y.b) / y.a};
}

template <class T> Dual<T> operator+(const Dual<T>& x, double r) { return {x.a + r, x.b}; }
template <class T> Dual<T> operator+(double r, const Dual<T>& x) { return {x.a + r, x.b}; }
template <class T> Dual<T> operator-(const Dual<T>& x, double r) { return {x.a - r, x.b}; }
template <class T> Dual<T> operator-(double r, const Dual<T>& x) { return {r - x.a, -x.b}; }
template <class T> Dual<T> operator*(const Dual<T>& x, double r) { return {x.a * r, x.b * r}; }
template <class T> Dual<T> operator*(double r, const Dual<T>& x) { return {x.a * r, x.b * r}; }
template <class T> Dual<T> operator/(const Dual<T>& x, double r) { return {x.a / r, x.b / r}; }
template <class T> Dual<T> operator/(double r, const Dual<T>& x) {
  T q = r / x.a;
  return {q, -q * x.b / x.a};
}

template <class T> Dual<T>& operator+=(Dual<T>& x, const Dual<T>& y) { x = x + y; return x; }
template <class T> Dual<T>& operator-=(Dual<T>& x, const Dual<T>& y) { x = x - y; return x; }
template <class T> Dual<T>& operator*=(Dual<T>& x, const Dual<T>& y) { x = x * y; return x; }
template <class T> Dual<T>& operator/=(Dual<T>& x, const Dual<T>& y) { x = x / y; return x; }

using std::atanh;
using std::cosh;
using std::exp;
using std::log;
using std::pow;
using std::sinh;
using std::sqrt;
using std::tanh;

template <class T> Dual<T> sqrt(const Dual<T>& x) {
  T s = sqrt(x.a);
  return {s, x.b / (2.0 * s)};
}
template <class T> Dual<T> exp(const Dual<T>& x) {
  T e = exp(x.a);
  return {e, x.b * e};
}
template <class T> Dual<T> log(const Dual<T>& x) { return {log(x.a), x.b / x.a}; }
template <class T> Dual<T> sinh(const Dual<T>& x) { return {sinh(x.a), x.b * cosh(x.a)}; }
template <class T> Dual<T> cosh(const Dual<T>& x) { return {cosh(x.a), x.b * sinh(x.a)}; }
template <class T> Dual<T> tanh(const Dual<T>& x) {
  T t = tanh(x.a);
  return {t, x.b * (1.0 - t * t)};
}
template <class T> Dual<T> atanh(const Dual<T>& x) { return {atanh(x.a), x.b / (1.0 - x.a * x.a)}; }
template <class T> Dual<T> pow(const Dual<T>& x, double c) {
  return {pow(x.a, c), x.b * (c * pow(x.a, c - 1.0))};
}

using D1 = Dual<double>;
using D2 = Dual<Dual<double>>;
using D3 = Dual<Dual<Dual<double>>>;
using D4 = Dual<D3>;

// Central finite differences (cross-check oracle for the dual-number path).
inline double fd_step(double x) { return 1e-5 * std::max(1.0, std::fabs(x)); }

template <class F>
double central_diff(F&& f, double x) {
  double h = fd_step(x);
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// one Richardson extrapolation level on the central difference
template <class F>
double richardson_diff(F&& f, double x) {
  double h = fd_step(x);
  double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
  double d2 = (f(x + h / 2.0) - f(x - h / 2.0)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace finsler

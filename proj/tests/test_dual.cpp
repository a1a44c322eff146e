#include <catch_amalgamated.hpp>

#include <cmath>

#include "finsler/dual.hpp"

using namespace finsler;

TEST_CASE("first and second derivatives of a smooth composite") {
  // f(t) = exp(sinh t): f' = cosh t e^{sinh t},
  //                     f'' = (sinh t + cosh^2 t) e^{sinh t}
  double t = 0.7;
  D2 x(D1(t, 1.0), D1(1.0, 0.0));
  D2 f = exp(sinh(x));
  double es = std::exp(std::sinh(t));
  CHECK(fval(f) == Catch::Approx(es).epsilon(1e-14));
  CHECK(f.a.b == Catch::Approx(std::cosh(t) * es).epsilon(1e-14));
  CHECK(f.b.b ==
        Catch::Approx((std::sinh(t) + std::cosh(t) * std::cosh(t)) * es)
            .epsilon(1e-13));
}

TEST_CASE("fourth-order seed recovers the fourth derivative") {
  // f(t) = t^4 has f'''' = 24 everywhere
  double t = 1.3;
  D4 x = seeded(seeded(seeded(seeded(t))));
  D4 f = x * x * x * x;
  CHECK(f.b.b.b.b == Catch::Approx(24.0).epsilon(1e-12));
}

TEST_CASE("library functions against Richardson finite differences") {
  auto f = [](double t) {
    return std::sqrt(t) * std::log(t) + std::atanh(t / 4.0) - std::tanh(t) +
           std::pow(t, 1.7) + std::sinh(t / 3.0) + std::cosh(t / 5.0);
  };
  for (double t : {0.3, 0.9, 1.8, 3.1}) {
    D1 x(t, 1.0);
    D1 y = sqrt(x) * log(x) + atanh(x / 4.0) - tanh(x) + pow(x, 1.7) +
           sinh(x / 3.0) + cosh(x / 5.0);
    double fd = richardson_diff(f, t);
    CHECK(y.b == Catch::Approx(fd).epsilon(1e-8));
    CHECK(fval(y) == Catch::Approx(f(t)).epsilon(1e-14));
  }
}

TEST_CASE("division and compound assignment") {
  D1 x(2.0, 1.0);
  D1 y = D1(1.0, 0.0) / x;  // y = 1/t, y' = -1/t^2
  CHECK(fval(y) == Catch::Approx(0.5));
  CHECK(y.b == Catch::Approx(-0.25));
  D1 z(3.0, 2.0);
  z *= x;
  CHECK(fval(z) == Catch::Approx(6.0));
  CHECK(z.b == Catch::Approx(2.0 * 2.0 + 3.0 * 1.0));
  z += y;
  CHECK(fval(z) == Catch::Approx(6.5));
}

TEST_CASE("central difference helper is second order") {
  auto f = [](double t) { return std::exp(t); };
  CHECK(central_diff(f, 0.0) == Catch::Approx(1.0).epsilon(1e-9));
  CHECK(richardson_diff(f, 0.0) == Catch::Approx(1.0).epsilon(1e-11));
}

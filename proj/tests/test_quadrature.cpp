#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "finsler/quadrature.hpp"

using namespace finsler;

TEST_CASE("polynomial and logarithmic integrands") {
  auto sq = [](double t) { return t * t; };
  QuadratureSpec gk;
  auto r = integrate(sq, 0.0, 1.0, gk);
  CHECK(r.converged);
  CHECK(r.value == Catch::Approx(1.0 / 3.0).epsilon(1e-14));

  QuadratureSpec simp;
  simp.method = QuadMethod::adaptive_simpson;
  auto rs = integrate(sq, 0.0, 1.0, simp);
  CHECK(rs.converged);
  CHECK(rs.value == Catch::Approx(1.0 / 3.0).epsilon(1e-12));

  auto inv = [](double t) { return 1.0 / t; };
  QuadratureSpec logged;
  logged.log_substitution = true;
  auto rl = integrate(inv, 1.0, std::exp(1.0), logged);
  CHECK(rl.value == Catch::Approx(1.0).epsilon(1e-12));

  auto osc = [](double t) { return std::sin(t) * std::sin(t); };
  auto ro = integrate(osc, 0.0, 2.0 * std::numbers::pi, gk);
  CHECK(ro.value == Catch::Approx(std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("log substitution handles many decades") {
  // integral of t^{-2} over [1, 1e12] = 1 - 1e-12
  auto f = [](double t) { return 1.0 / (t * t); };
  QuadratureSpec s;
  s.log_substitution = true;
  auto r = integrate(f, 1.0, 1e12, s);
  CHECK(r.converged);
  CHECK(r.value == Catch::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("domain guards") {
  auto f = [](double t) { return t; };
  CHECK_THROWS_AS(integrate(f, 1.0, 0.5, QuadratureSpec{}), std::domain_error);
  QuadratureSpec s;
  s.log_substitution = true;
  CHECK_THROWS_AS(integrate(f, 0.0, 1.0, s), std::domain_error);
}

TEST_CASE("log-domain integration keeps extreme scales") {
  // integral of t e^{1000} over [1, 2]: value e^{1000} * 1.5
  auto log_f = [](double t) { return 1000.0 + std::log(t); };
  auto r = integrate_log(log_f, 1.0, 2.0, QuadratureSpec{});
  CHECK(r.converged);
  CHECK(r.value.lg == Catch::Approx(1000.0 + std::log(1.5)).epsilon(1e-13));
  CHECK(r.value.sign == 1);

  // integral of e^t over [0, 700] = e^700 - 1
  auto g = [](double t) { return t; };
  auto rg = integrate_log(g, 0.0, 700.0, QuadratureSpec{});
  CHECK(rg.converged);
  CHECK(rg.value.lg == Catch::Approx(700.0).epsilon(1e-10));
}

TEST_CASE("log-domain values support arithmetic") {
  LogVal a = LogVal::from_log(10.0, 1);
  LogVal b = LogVal::from_log(9.0, 1);
  CHECK((a + b).value() == Catch::Approx(std::exp(10.0) + std::exp(9.0)));
  CHECK((a - b).value() == Catch::Approx(std::exp(10.0) - std::exp(9.0)));
  CHECK((a * b).lg == Catch::Approx(19.0));
  CHECK((a / b).value() == Catch::Approx(std::exp(1.0)));
  LogVal z = LogVal::zero();
  CHECK(z.is_zero());
  CHECK((z + a).value() == Catch::Approx(std::exp(10.0)));
  LogVal c = LogVal::from_value(-2.0);
  CHECK(c.sign == -1);
  CHECK(c.value() == Catch::Approx(-2.0));
  CHECK(pow_int(c, 2).value() == Catch::Approx(4.0));
  CHECK(pow_int(c, 3).value() == Catch::Approx(-8.0));
}

TEST_CASE("integrate_log matches linear integration where both work") {
  auto f = [](double t) { return std::exp(-t) * (1.0 + std::sin(t) * 0.2); };
  auto log_f = [&](double t) { return std::log(f(t)); };
  auto lin = integrate(f, 0.5, 40.0, QuadratureSpec{});
  auto lg = integrate_log(log_f, 0.5, 40.0, QuadratureSpec{});
  CHECK(lg.value.value() == Catch::Approx(lin.value).epsilon(1e-10));
}

#include <catch_amalgamated.hpp>

#include <cmath>

#include "finsler/riccati.hpp"

using namespace finsler;

TEST_CASE("power-weight preset satisfies its differential inequality exactly") {
  RiccatiPair pr = preset_hardy(3, 2.0, 0.0);
  CHECK(pr.p_conj() == Catch::Approx(2.0));
  CHECK(pr.constant == Catch::Approx(0.25).epsilon(1e-15));
  CHECK(pr.w(2.0) == Catch::Approx(1.0));
  CHECK(pr.L(2.0) == Catch::Approx(1.0));
  CHECK(pr.G(2.0) == Catch::Approx(0.25));  // c^{1/2} / t
  auto scan = riccati_residual_scan(pr, 0.1, 10.0, 10000);
  CHECK(scan.max_abs_residual < 1e-12);
  CHECK_THROWS_AS(riccati_residual(pr, 0.0), std::domain_error);
  CHECK_THROWS_AS(preset_hardy(2, 2.0, 0.0), std::invalid_argument);  // n+a-p > 0
  CHECK_THROWS_AS(preset_hardy(3, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("constant-gap preset satisfies its inequality exactly") {
  RiccatiPair pr = preset_mckean(2, 2.0, 1.0, 0.0);
  CHECK(pr.constant == Catch::Approx(0.25).epsilon(1e-15));
  CHECK(pr.W(7.0) == Catch::Approx(0.25));
  CHECK(pr.L(7.0) == Catch::Approx(1.0));
  auto scan = riccati_residual_scan(pr, 0.1, 100.0, 10000);
  CHECK(scan.max_abs_residual < 1e-12);
  CHECK_THROWS_AS(preset_mckean(2, 2.0, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(preset_mckean(1, 2.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("inflating the potential breaks the inequality pointwise") {
  RiccatiPair hardy = preset_hardy(3, 2.0, 0.0);
  RiccatiPair doubled = scale_W(hardy, 2.0);
  // residual of the scaled pair is exactly -(s-1) W = -c t^{-p}
  CHECK(riccati_residual(doubled, 2.0) ==
        Catch::Approx(-0.25 / 4.0).margin(1e-12));
  auto scan = riccati_residual_scan(doubled, 0.5, 50.0, 2000);
  CHECK(scan.min_residual < 0.0);
  CHECK(scan.max_abs_residual > 0.0);

  RiccatiPair mk = scale_W(preset_mckean(2, 2.0, 1.0, 0.0), 1.05);
  CHECK(riccati_residual(mk, 3.0) == Catch::Approx(-0.05 * 0.25).margin(1e-12));
  CHECK(mk.constant == Catch::Approx(0.25 * 1.05).epsilon(1e-15));
}

TEST_CASE("limit functions: closed forms and quadrature agree") {
  RiccatiPair hardy = preset_hardy(3, 2.0, 0.0);
  LimitFunction lf = limit_function(hardy);
  // v(t) = t^{-(n+alpha-p)/p} = t^{-1/2}, anchored at v(1) = 1
  CHECK(lf.v(1.0) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(lf.v(4.0) == Catch::Approx(0.5).epsilon(1e-14));
  CHECK(lf.neg_dlog(4.0) == Catch::Approx(0.125).epsilon(1e-14));
  CHECK(lf.dv(4.0) == Catch::Approx(-0.0625).epsilon(1e-13));

  RiccatiPair generic = hardy;
  generic.name = "custom";  // forces the quadrature path
  LimitFunction lg = limit_function(generic);
  for (double t : {1.5, 2.0, 5.0, 10.0, 50.0})
    CHECK(lg.v(t) == Catch::Approx(lf.v(t)).epsilon(1e-8));

  RiccatiPair mk = preset_mckean(2, 2.0, 1.0, 0.0);
  LimitFunction lm = limit_function(mk);
  CHECK(lm.v(1.0) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(lm.v(3.0) == Catch::Approx(std::exp(-1.0)).epsilon(1e-14));
  RiccatiPair mg = mk;
  mg.name = "custom";
  LimitFunction lmg = limit_function(mg);
  for (double t : {1.5, 2.0, 5.0, 10.0})
    CHECK(lmg.v(t) == Catch::Approx(lm.v(t)).epsilon(1e-8));
}

TEST_CASE("comparison drift coefficients") {
  CHECK(comparison_L_flat(3, 2.0) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(comparison_L_ball(2, 1.0, 0.0, 1.0) ==
        Catch::Approx(1.3130352854993312).epsilon(1e-14));
  // large-distance limit: (n-1)(kappa - h)
  CHECK(comparison_L_ball(2, 1.0, 0.3, 40.0) ==
        Catch::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("knot validation and truncated test function") {
  Knots bad{2.0, 1.0, 3.0, 4.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  Knots kn{1.0, 2.0, 6.0, 8.0};
  RiccatiPair hardy = preset_hardy(3, 2.0, 0.0);
  LimitFunction lf = limit_function(hardy);
  Truncation tr = make_truncation(lf, kn);
  CHECK(tr.value(0.5) == 0.0);
  CHECK(tr.value(9.0) == 0.0);
  CHECK(tr.value(2.0) == Catch::Approx(lf.v(2.0)).epsilon(1e-14));
  CHECK(tr.value(1.5) == Catch::Approx(0.5 * lf.v(2.0)).epsilon(1e-14));
  CHECK(tr.value(7.0) == Catch::Approx(0.5 * lf.v(6.0)).epsilon(1e-14));
  CHECK(tr.derivative(1.5) == Catch::Approx(lf.v(2.0)).epsilon(1e-14));
  CHECK(tr.derivative(4.0) == Catch::Approx(lf.dv(4.0)).epsilon(1e-14));
  CHECK(tr.derivative(7.5) == Catch::Approx(-0.5 * lf.v(6.0)).epsilon(1e-14));
  // interior-side convention at the knots
  CHECK(tr.derivative(2.0) == Catch::Approx(lf.dv(2.0)).epsilon(1e-14));
  CHECK(tr.derivative(6.0) == Catch::Approx(lf.dv(6.0)).epsilon(1e-14));
}

TEST_CASE("residual scan locates the violation of a broken pair") {
  // perturb G so the inequality fails near t = 1
  RiccatiPair pr = preset_hardy(3, 2.0, 0.0);
  RiccatiPair broken = pr;
  broken.name = "custom";
  broken.dGw = nullptr;
  auto G0 = pr.G;
  broken.G = [G0](double t) { return G0(t) * (1.0 + 0.5 * std::exp(-(t - 1.0) * (t - 1.0))); };
  auto scan = riccati_residual_scan(broken, 0.2, 5.0, 4000);
  CHECK(scan.min_residual < 0.0);
  CHECK(scan.argmin > 0.2);
  CHECK(scan.argmin < 5.0);
}

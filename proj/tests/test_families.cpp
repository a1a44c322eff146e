#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "finsler/families.hpp"
#include "finsler/randers.hpp"
#include "finsler/rng.hpp"

using namespace finsler;

namespace {

FlatFamily flat(int n, double lambda, double eps) {
  FamilyParams fp;
  fp.n = n;
  fp.lambda = lambda;
  fp.eps = eps;
  return FlatFamily(fp);
}

BallFamily ball(int n, double lambda, double eps, double kappa = 1.0,
                double h = 0.0) {
  FamilyParams fp;
  fp.n = n;
  fp.lambda = lambda;
  fp.eps = eps;
  fp.kappa = kappa;
  fp.h = h;
  return BallFamily(fp);
}

}  // namespace

TEST_CASE("parameter validation") {
  FamilyParams fp;
  fp.n = 3;
  fp.lambda = 1.0;  // reversible limit is rejected
  fp.eps = 1.0;
  CHECK_THROWS_AS(FlatFamily(fp), std::invalid_argument);
  fp.lambda = 2.0;
  fp.eps = 0.0;
  CHECK_THROWS_AS(FlatFamily(fp), std::invalid_argument);
  fp.eps = 1.0;
  fp.n = 1;
  CHECK_THROWS_AS(FlatFamily(fp), std::invalid_argument);
  fp.n = 2;
  fp.kappa = 1.0;
  fp.h = 1.0;  // requires h < kappa
  CHECK_THROWS_AS(BallFamily(fp), std::invalid_argument);
  fp.h = 0.5;
  CHECK_NOTHROW(BallFamily(fp));
  CHECK(fp.theta() == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("flat family frozen rational values at eps=1, lambda=2, r=1") {
  auto fam = flat(3, 2.0, 1.0);
  std::vector<double> x{1.0, 0.0, 0.0};
  std::vector<double> er{1.0, 0.0, 0.0};
  CHECK(fam.q_profile_t(1.0) == Catch::Approx(0.25).epsilon(1e-15));
  CHECK(finsler_norm(fam, x, er) == Catch::Approx(0.75).epsilon(1e-14));
  CHECK(fam.rho_t(1.0) == Catch::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(fam.rho_of_x(x) == Catch::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(fam.rho_reverse(1.0) == Catch::Approx(2.0 - 5.0 / 6.0).epsilon(1e-15));
  CHECK(fam.reversibility_radial(1.0) == Catch::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(fam.h_profile(1.0) == Catch::Approx(0.6).epsilon(1e-15));
  CHECK(fam.density_radial(1.0) ==
        Catch::Approx(std::pow(15.0 / 16.0, 2)).epsilon(1e-14));
  CHECK(fam.flag_radial(1.0) == Catch::Approx(-32.0 / 243.0).epsilon(1e-15));
  CHECK(fam.flag_inward(1.0) == Catch::Approx(64.0 / 1875.0).epsilon(1e-15));
  CHECK(fam.sbar_radial(1.0) == Catch::Approx(-8.0 / 45.0).epsilon(1e-15));
  CHECK(fam.flag_radial(0.0) == Catch::Approx(-2.0 / 3.0).epsilon(1e-15));
  // reduced density at t = rho(1): psi(5/6) = 75/64, phi'(5/6) = 4/3
  CHECK(fam.phi(5.0 / 6.0) == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(fam.phi_prime(5.0 / 6.0) == Catch::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(fam.psi(5.0 / 6.0) == Catch::Approx(75.0 / 64.0).epsilon(1e-13));
  CHECK(fam.h_of_t(2.0) == Catch::Approx(0.52888814135773832).epsilon(1e-14));
}

TEST_CASE("flat family structural identities") {
  auto fam = flat(3, 2.0, 0.7);
  // rho + reversed rho = 2r, reversed rho <= lambda * rho
  for (double r : {0.2, 0.9, 3.7, 22.0}) {
    CHECK(fam.rho_t(r) + fam.rho_reverse(r) == Catch::Approx(2.0 * r).epsilon(1e-14));
    CHECK(fam.rho_reverse(r) <= 2.0 * fam.rho_t(r) * (1.0 + 1e-14));
    CHECK(fam.phi(fam.rho_t(r)) == Catch::Approx(r).epsilon(1e-12));
    double rp = 1.0 / fam.phi_prime(fam.rho_t(r));
    double drho = richardson_diff([&](double s) { return fam.rho_t(s); }, r);
    CHECK(rp == Catch::Approx(drho).epsilon(1e-9));
    // reversal profile is the dual norm ratio on radial covectors
    CHECK(fam.h_profile(r) ==
          Catch::Approx((1.0 - fam.q_profile_t(r)) / (1.0 + fam.q_profile_t(r)))
              .epsilon(1e-14));
  }
}

TEST_CASE("flat eikonal identity and gradient normalisation") {
  Rng rng(5);
  for (double eps : {0.1, 1.0}) {
    auto fam = flat(3, 2.0, eps);
    for (int k = 0; k < 10; ++k) {
      std::vector<double> x(3);
      for (auto& c : x) c = rng.uniform(-3.0, 3.0);
      if (std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) < 0.05) x[0] += 1.0;
      auto dr = fam.d_rho(x);
      CHECK(dual_norm(fam, x, dr) == Catch::Approx(1.0).epsilon(1e-12));
      auto gr = fam.grad_rho(x);
      CHECK(finsler_norm(fam, x, gr) == Catch::Approx(1.0).epsilon(1e-12));
      double pairing = dr[0] * gr[0] + dr[1] * gr[1] + dr[2] * gr[2];
      CHECK(pairing == Catch::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("flat reduced density envelope") {
  auto fam = flat(3, 2.0, 1.0);
  double c = fam.psi_lower_const();
  double C = fam.psi_upper_const();
  CHECK(c == Catch::Approx(0.79012345679012341).epsilon(1e-14));
  CHECK(C == Catch::Approx(3.375).epsilon(1e-14));
  CHECK(C / c == Catch::Approx(4.2714843749999982).epsilon(1e-14));
  for (double t = 1e-3; t < 1e5; t *= 3.7) {
    double ratio = fam.psi(t) / std::pow(t, 2);
    CHECK(ratio >= c * (1.0 - 1e-12));
    CHECK(ratio <= C * (1.0 + 1e-12));
  }
}

TEST_CASE("calibration of the ball family scale") {
  double theta = 1.0 / 3.0;
  CHECK(calib_eps0(theta) == Catch::Approx(0.8660254037844386).epsilon(1e-15));
  CHECK(calibrate_k_eps(1.0, theta, 0.1).k_eps ==
        Catch::Approx(1.0008357758287847).epsilon(1e-14));
  CHECK(calibrate_k_eps(1.0, theta, 0.05).k_eps ==
        Catch::Approx(1.0002084854287188).epsilon(1e-14));
  CHECK(calibrate_k_eps(1.0, theta, 0.433).k_eps ==
        Catch::Approx(1.0165676108926145).epsilon(1e-14));
  auto cb = calibrate_k_eps(1.0, theta, 0.1);
  CHECK(cb.K_eps0 == Catch::Approx(30.074074074074076).epsilon(1e-13));
  CHECK(cb.K_eps == Catch::Approx(0.99833054157334722).epsilon(1e-13));
  CHECK(cb.branch == "interior");
  // beyond eps0 the interior candidate disappears
  auto far = calibrate_k_eps(1.0, theta, 0.9);
  CHECK(std::isinf(far.K_eps));
  CHECK(far.branch == "origin");
  // the scale candidate kappa is never strictly dominant
  for (double th : {0.2, 1.0 / 3.0, 0.6}) {
    for (double e = 0.02; e < 1.5; e *= 1.9) {
      auto c2 = calibrate_k_eps(1.0, th, e);
      CHECK(c2.k_eps >= 1.0 - 1e-12);
      CHECK(std::min({c2.K_eps0, c2.K_eps, 1.0}) <= 1.0 + 1e-12);
      CHECK(c2.branch != "scale");
    }
  }
}

TEST_CASE("ball family frozen values at n=2, lambda=2, kappa=1, eps=0.1") {
  auto fam = ball(2, 2.0, 0.1);
  CHECK(fam.k_eps() == Catch::Approx(1.0008357758287847).epsilon(1e-14));
  CHECK(fam.q_profile_t(1.0) == Catch::Approx(40.0 / 121.0).epsilon(1e-14));
  CHECK(fam.phi(1.0) == Catch::Approx(0.95557254170932138).epsilon(1e-13));
  CHECK(fam.phi_prime(1.0) == Catch::Approx(0.99636469864306987).epsilon(1e-13));
  CHECK(fam.psi(1.0) == Catch::Approx(2.0847537575563955).epsilon(1e-12));
  CHECK(fam.h_of_t(1.0) == Catch::Approx(0.50337311088341552).epsilon(1e-13));
}

TEST_CASE("ball family identities and eikonal") {
  auto fam = ball(2, 2.0, 0.1);
  for (double rb : {0.3, 1.0, 2.5, 6.0}) {
    CHECK(fam.phi(fam.rho_t(rb)) == Catch::Approx(rb).epsilon(1e-11));
    std::vector<double> x{std::tanh(rb), 0.0};
    // Recovering rb = atanh(|x|) amplifies the 1-ulp error in tanh(rb) by
    // cosh(rb)^2, so the round-trip tolerance scales with that factor.
    CHECK(fam.rho_of_x(x) ==
          Catch::Approx(fam.rho_t(rb)).epsilon(1e-15 * std::cosh(rb) *
                                               std::cosh(rb) + 1e-13));
    auto dr = fam.d_rho(x);
    CHECK(dual_norm(fam, x, dr) == Catch::Approx(1.0).epsilon(1e-11));
    auto gr = fam.grad_rho(x);
    CHECK(finsler_norm(fam, x, gr) == Catch::Approx(1.0).epsilon(1e-11));
  }
  // psi from its polar factorisation in the chart:
  // psi = sigma(R) R^{n-1} dR/dt with R = coords_radius
  for (double t : {0.5, 1.0, 3.0}) {
    double f = fam.phi(t);
    double R = fam.coords_radius(t);
    double viaparts = fam.density_radial(f) *
                      std::pow(R, fam.params().n - 1) *
                      fam.coords_radius_prime(t);
    CHECK(fam.psi(t) == Catch::Approx(viaparts).epsilon(1e-12));
  }
}

TEST_CASE("ball family curvature and S-curvature bounds on a profile grid") {
  for (double eps : {0.05, 0.1, 0.3}) {
    auto fam = ball(2, 2.0, eps);
    double ke = fam.k_eps();
    for (double rb = 0.0; rb <= 25.0; rb += 0.5) {
      CHECK(fam.flag_radial(rb) <= -1.0 + 1e-9);
      CHECK(fam.sbar_radial(rb) <= 0.0 + 1e-9);
      CHECK(fam.reversibility_radial(rb) <= 2.0 + 1e-9);
    }
    double kmin = std::min(
        {fam.calibration().K_eps0, fam.calibration().K_eps, 1.0});
    CHECK(fam.flag_radial(0.0) ==
          Catch::Approx(-ke * ke * fam.calibration().K_eps0).epsilon(1e-12));
    CHECK(-ke * ke * kmin <= -1.0 + 1e-12);
  }
  // with drift: Sbar stays below (n-1) h and approaches it
  auto drifted = ball(2, 2.0, 0.1, 1.0, 0.4);
  double cap = 1.0 * 0.4;
  for (double rb = 0.0; rb <= 30.0; rb += 0.5)
    CHECK(drifted.sbar_radial(rb) <= cap + 1e-12);
  CHECK(drifted.sbar_radial(30.0) == Catch::Approx(cap).margin(1e-4));
}

TEST_CASE("sinh-form envelope of the ball reduced density") {
  SinhBounds sb = compute_sinh_bounds(2, 1.0, 1.0 / 3.0, 0.1);
  CHECK(sb.eps_bar == Catch::Approx(0.4330127018922193).epsilon(1e-12));
  CHECK(sb.kappa_bar == Catch::Approx(1.0165686442586876).epsilon(1e-12));
  CHECK(sb.c1_tilde == Catch::Approx(0.3042620604344366).epsilon(1e-12));
  CHECK(sb.c2_tilde == Catch::Approx(0.48850585015090148).epsilon(1e-12));
  CHECK(sb.c_tilde == Catch::Approx(sb.c1_tilde).epsilon(1e-15));
  CHECK(sb.eps_tilde == Catch::Approx(sb.eps_bar).epsilon(1e-15));
  CHECK(sb.c_lower == Catch::Approx(0.38216196038812661).epsilon(1e-12));
  CHECK(sb.C_upper == Catch::Approx(2.2481210747455456).epsilon(1e-12));
  CHECK(sb.C_upper / sb.c_lower ==
        Catch::Approx(5.8826395815594434).epsilon(1e-12));

  auto fam = ball(2, 2.0, 0.1);
  for (double t = 1.0; t <= 300.0; t *= 1.7) {
    double lr = fam.log_psi(t) + fam.log_e_weight(t) - fam.log_model_weight(t);
    CHECK(lr >= std::log(sb.c_lower) - 1e-10);
    CHECK(lr <= std::log(sb.C_upper) + 1e-10);
  }
  // upper envelope also holds below t_tilde
  for (double t : {0.05, 0.3, 0.8}) {
    double lr = fam.log_psi(t) + fam.log_e_weight(t) - fam.log_model_weight(t);
    CHECK(lr <= std::log(sb.C_upper) + 1e-10);
  }
}

TEST_CASE("radial profile rows") {
  auto fam = flat(3, 2.0, 1.0);
  std::vector<double> grid{0.0, 0.5, 1.0, 2.0};
  auto rows = radial_profiles(fam, grid);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].psi == 0.0);
  CHECK(rows[2].rho == Catch::Approx(5.0 / 6.0));
  CHECK(rows[2].rev == Catch::Approx(5.0 / 3.0));
  auto bfam = ball(2, 2.0, 0.1);
  auto brows = radial_profiles(bfam, grid);
  REQUIRE(brows.size() == 4);
  CHECK(brows[3].K <= -1.0 + 1e-9);
}

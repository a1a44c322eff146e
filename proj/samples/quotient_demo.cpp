// Evaluates one truncated quotient for the flat family and prints the panel
// decomposition next to the bound-chain quantities.

#include <cstdio>

#include "finsler/hardy.hpp"
#include "finsler/sharpness.hpp"

int main() {
  using namespace finsler;

  double delta = 10.0;
  FamilyParams fp;
  fp.n = 3;
  fp.lambda = 2.0;
  fp.eps = 1.0 / delta;
  FlatFamily fam(fp);
  RadialModel model = make_radial_model(fam);

  RiccatiPair pair = preset_hardy(fp.n, 2.0, 0.0);
  LimitFunction lf = limit_function(pair);
  Knots kn = hardy_knots(delta);

  QuotientBreakdown qb = hardy_quotient_radial(model, pair, lf, kn);
  qb.l0 = compute_l0(model, pair, lf, kn);
  qb.l1 = compute_l1(pair, kn.t2, kn.t3);
  qb.l2 = compute_l2(model, kn.t2);

  std::printf("knots: (%g, %g, %g, %g), eps = %g\n", kn.t1, kn.t2, kn.t3,
              kn.t4, fp.eps);
  std::printf("I panels: left %.9f  middle %.9f  right %.9f\n", qb.I_ramp_left,
              qb.I_middle, qb.I_ramp_right);
  std::printf("J panels: left %.9f  middle %.9f  right %.9f\n", qb.J_ramp_left,
              qb.J_middle, qb.J_ramp_right);
  std::printf("Q = lambda^p I / J = %.12f\n", qb.Q);
  double bound = qb.lambda_p * qb.l2 * qb.l2 * qb.l1 +
                 qb.lambda_p * model.C_over_c * qb.l0;
  std::printf("chain: l0 = %.9f  l1 = %.9f  l2 = %.9f  bound = %.6f\n", qb.l0,
              qb.l1, qb.l2, bound);
  std::printf("Q <= bound: %s\n", qb.Q <= bound + 1e-8 ? "yes" : "no");

  McQuotient mc = hardy_quotient_montecarlo(fam, pair, lf, kn, 20000, 2024);
  std::printf("monte-carlo: Q = %.6f +- %.6f (%ld samples)\n", mc.Q,
              mc.std_error, mc.samples);
  return 0;
}

// Prints radial curvature and density profiles for one member of each family.

#include <cstdio>

#include "finsler/families.hpp"

int main() {
  using namespace finsler;

  FamilyParams fp;
  fp.n = 3;
  fp.lambda = 2.0;
  fp.eps = 1.0;
  FlatFamily flat(fp);

  std::printf("flat family, n=%d lambda=%g eps=%g\n", fp.n, fp.lambda, fp.eps);
  std::printf("%8s %10s %12s %12s %10s %10s\n", "r", "rho", "K", "Sbar", "rev",
              "h_eps");
  for (double r : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    std::printf("%8.3f %10.6f %12.6f %12.6f %10.6f %10.6f\n", r, flat.rho_t(r),
                flat.flag_radial(r), flat.sbar_radial(r),
                flat.reversibility_radial(r), flat.h_profile(r));
  }

  FamilyParams bp;
  bp.n = 2;
  bp.lambda = 2.0;
  bp.eps = 0.1;
  bp.kappa = 1.0;
  bp.h = 0.0;
  BallFamily ball(bp);
  std::printf("\nball family, n=%d lambda=%g eps=%g kappa=%g h=%g\n", bp.n,
              bp.lambda, bp.eps, bp.kappa, bp.h);
  std::printf("calibration: k_eps=%.12f branch=%s\n", ball.k_eps(),
              ball.calibration().branch.c_str());
  std::printf("%8s %10s %12s %12s %10s %10s\n", "rbar", "rho", "K", "Sbar",
              "rev", "h_eps");
  for (double rb : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    std::printf("%8.3f %10.6f %12.6f %12.6f %10.6f %10.6f\n", rb,
                ball.rho_t(rb), ball.flag_radial(rb), ball.sbar_radial(rb),
                ball.reversibility_radial(rb), ball.h_profile(rb));
  }
  return 0;
}

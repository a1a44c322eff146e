// Runs a short sharpness sweep for each preset and prints the verdict lines.

#include <cstdio>

#include "finsler/sharpness.hpp"

static void show(const finsler::SweepReport& rep) {
  std::printf("preset=%s family=%s\n", rep.config.preset.c_str(),
              rep.family.c_str());
  std::printf("%10s %14s %14s %12s %12s\n", "delta", "Q", "Q-1", "l0", "l2");
  for (const auto& r : rep.rows) {
    if (!r.ok) {
      std::printf("%10.4g %s\n", r.delta, r.note.c_str());
      continue;
    }
    std::printf("%10.4g %14.9f %14.6e %12.4e %12.8f\n", r.delta, r.Q,
                r.Q_minus_1, r.l0, r.l2);
  }
  std::printf(
      "all_above_one=%s strictly_decreasing=%s bound_chain_ok=%s "
      "terminal_gap=%.6f\n\n",
      rep.summary.all_above_one ? "yes" : "no",
      rep.summary.strictly_decreasing ? "yes" : "no",
      rep.summary.bound_chain_ok ? "yes" : "no", rep.summary.terminal_gap);
}

int main() {
  using namespace finsler;

  SweepConfig hc;
  hc.preset = "hardy";
  hc.deltas = {10.0, 100.0, 1000.0};
  show(run_sweep(hc));

  SweepConfig mc;
  mc.preset = "mckean";
  mc.n = 2;
  mc.deltas = {10.0, 20.0, 40.0};
  show(run_sweep(mc));
  return 0;
}

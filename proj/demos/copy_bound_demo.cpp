// Splits an equal-superposition clock with a covariant broadcast and prints
// both sides of the copy inequality as the energy scale grows.

#include <cstdio>

#include "qclock/qclock.hpp"

int main() {
  using namespace qclock;
  const ClockSystem clock = equal_superposition_clock(4, 1.0);
  const Hamiltonian h1 = Hamiltonian::ladder(2);
  const Hamiltonian h2 = Hamiltonian::ladder(2);
  const Hamiltonian ht = total_hamiltonian(h1, h2);
  const QuantumChannel broadcast = covariant_twirl(random_channel(4, 4, 2, 7), clock.hamiltonian(), ht);

  std::printf("%8s %12s %12s %12s %12s %12s\n", "scale", "F_in", "F1", "F2", "lhs", "rhs");
  for (double scale : {1.0, 2.0, 4.0, 8.0}) {
    const ClockSystem scaled(clock.state(), clock.hamiltonian().scaled(scale));
    const CopyBoundReport r = copy_bound_check(scaled, broadcast, h1.scaled(scale), h2.scaled(scale));
    std::printf("%8.1f %12.6g %12.6g %12.6g %12.6g %12.6g %s\n", scale, r.f_in, r.f1, r.f2, r.lhs, r.rhs,
                r.satisfied ? "ok" : "VIOLATED");
  }
  return 0;
}

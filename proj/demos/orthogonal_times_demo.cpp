// Orthogonal times of the equal-superposition clock shrink as the level count grows.

#include <cstdio>

#include "qclock/qclock.hpp"

int main() {
  using namespace qclock;
  for (Index n : {2, 4, 8, 16}) {
    const ClockSystem clock = equal_superposition_clock(n, 1.0);
    const auto times = orthogonal_times(n, 1.0);
    const double overlap = max_pairwise_overlap(equal_superposition_vector(n), clock.hamiltonian(), times);
    const EnergyMoments m = energy_moments(clock);
    std::printf("n=%2ld  spacing=%.6f  <E>=%.2f  max overlap=%.2e\n", static_cast<long>(n), times[1], m.mean, overlap);
  }
  return 0;
}

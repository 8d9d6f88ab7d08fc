// Minimal tour of the homogeneous solver: build the reference task, compare
// the closed form against the count-space oracle, and print the tradeoff
// curve along the cache axis.

#include <cstdio>

#include "vr3c/homogeneous.hpp"
#include "vr3c/model.hpp"

int main() {
  using namespace vr3c;

  const ProjectionTask task(25e6, 50e6, 10.0, 0.02);  // 25 Mbit 2D FOV, 20 ms deadline
  const double f_cross = crossover_frequency(task);
  std::printf("MEC rate        : %.4g bit/s\n", rate_mec(task));
  std::printf("crossover freq  : %.4g cycle/s\n", f_cross);
  std::printf("optimal freq    : %.4g cycle/s (%.4f x crossover)\n",
              homogeneous::optimal_frequency(task),
              homogeneous::optimal_frequency(task) / f_cross);

  const std::int64_t n = 60000;
  const double fv = 0.7 * f_cross;
  const double k = 1e-27;
  const double energy = 18000.0 * k * fv * fv * task.cycles() / static_cast<double>(n);
  homogeneous::HomogeneousInstance inst(task, n, 18000, DeviceCapability(0, energy, fv, k));

  const auto closed = homogeneous::closed_form(inst);
  std::printf("closed form     : %.6g bit/s (3d=%lld, 2d=%lld, compute=%lld, %s)\n", closed.rate,
              static_cast<long long>(closed.counts.n_cache3d),
              static_cast<long long>(closed.counts.n_cache2d),
              static_cast<long long>(closed.counts.n_compute),
              homogeneous::to_string(closed.regime));

  // The exhaustive count oracle at a scale it can enumerate.
  homogeneous::HomogeneousInstance small(
      task, 600, 180, DeviceCapability(0, 180.0 * k * fv * fv * task.cycles() / 600.0, fv, k));
  std::printf("N=600 closed    : %.6g bit/s\n", homogeneous::closed_form(small).rate);
  std::printf("N=600 oracle    : %.6g bit/s\n", homogeneous::brute_force_problem2(small).rate);

  homogeneous::SweepAxes axes;
  for (int c = 0; c <= 10; ++c) axes.cache_fraction.push_back(c / 10.0);
  std::printf("\n  C/N    rate [bit/s]\n");
  for (const auto& row : homogeneous::sweep(inst, axes)) {
    std::printf("  %.1f    %.6g\n", row.axis[0], row.rate);
  }
  return 0;
}

// Heterogeneous end-to-end walk: generate an instance, solve it with
// multi-start CCCP, compare against the greedy baselines, and replay the
// winning policy through the request simulator.

#include <cstdio>
#include <vector>

#include "vr3c/heterogeneous.hpp"
#include "vr3c/io.hpp"
#include "vr3c/sim.hpp"

int main() {
  using namespace vr3c;

  io::GeneratorConfig gen;
  gen.n = 100;
  gen.seed = 1;
  const io::Instance inst = io::generate_instance(gen);
  const auto mmkp = heterogeneous::build_mmkp(inst.viewpoints, inst.device);

  heterogeneous::CccpConfig cfg;
  cfg.rng_seed = 1;
  const auto report = heterogeneous::multi_start(mmkp, cfg);

  const double all_mec = mmkp.total_mec_rate;
  const double g3d = heterogeneous::policy_rate(
      mmkp, heterogeneous::greedy_3d_caching(inst.viewpoints, inst.device));
  const double gcc = heterogeneous::policy_rate(
      mmkp, heterogeneous::greedy_caching_computing(inst.viewpoints, inst.device));

  std::printf("all-MEC rate            : %.4g bit/s\n", all_mec);
  std::printf("greedy 3D caching       : %.4g bit/s (gain %.1f%%)\n", g3d,
              100 * (1 - g3d / all_mec));
  std::printf("greedy caching+computing: %.4g bit/s (gain %.1f%%)\n", gcc,
              100 * (1 - gcc / all_mec));
  std::printf("multi-start CCCP        : %.4g bit/s (gain %.1f%%, winner %d)\n", report.best_rate,
              100 * (1 - report.best_rate / all_mec), report.best_restart);

  std::vector<double> pops;
  for (const auto& vp : inst.viewpoints) pops.push_back(vp.popularity);
  const auto stream = sim::generate_stream(pops, 200000, 7);
  const auto sim_res = sim::simulate(report.best_policy, inst.viewpoints, inst.device, stream);
  std::printf("simulated mean rate     : %.4g bit/s over %zu requests\n",
              sim_res.empirical_avg_rate, stream.length());
  std::printf("deadline violations     : %llu, mean energy %.3g J (budget %.3g J)\n",
              static_cast<unsigned long long>(sim_res.deadline_violations), sim_res.mean_energy,
              inst.device.energy_budget);
  return 0;
}

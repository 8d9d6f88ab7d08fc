#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vr3c/errors.hpp"
#include "vr3c/model.hpp"

// Homogeneous scenario: every viewpoint shares one projection task and the
// uniform popularity 1/N, so policies collapse to three counts (cached 3D
// FOVs, cached 2D FOVs, local projections). This module provides the
// closed-form optimum, the count-to-vector expansion, a brute-force oracle
// over the count space, the rate-minimizing CPU frequency, and grid sweeps.

namespace vr3c::homogeneous {

// Which resource limits the local-computing gain at the device's frequency.
enum class Regime {
  LocalComputeLimited,  // f_V below the crossover: route 3 is rate-unprofitable
  MecComputeLimited,    // f_V at or above the crossover
};

inline const char* to_string(Regime r) {
  return r == Regime::LocalComputeLimited ? "local-compute-limited" : "mec-compute-limited";
}

// N identical viewpoints, an integer cache size of C 2D-FOV units, and the
// device's energy/compute envelope.
struct HomogeneousInstance {
  ProjectionTask task;
  std::int64_t n;            // number of viewpoints
  std::int64_t cache_units;  // C; cache size is C * d_in bits
  DeviceCapability dev;

  HomogeneousInstance(ProjectionTask t, std::int64_t n_, std::int64_t cache_units_,
                      DeviceCapability dev_)
      : task(t), n(n_), cache_units(cache_units_), dev(dev_) {
    if (n <= 0) throw ConfigError("homogeneous instance needs n > 0");
    if (cache_units < 0) throw ConfigError("cache_units must be nonnegative");
    if (compute_cap() < 0) throw ConfigError("compute capability must be nonnegative");
    if (static_cast<double>(cache_units) / task.alpha() +
            static_cast<double>(compute_cap()) >
        static_cast<double>(n) * (1.0 + 1e-12)) {
      std::cerr << "vr3c: warning: C/alpha + compute capability exceeds N ("
                << static_cast<double>(cache_units) / task.alpha() << " + " << compute_cap()
                << " > " << n << "); results leave the paper's design envelope\n";
    }
  }

  // Maximum number of projections the energy budget sustains per N requests:
  // floor(N*E / (k f^2 D^I w)), snapped to nearby integers first.
  std::int64_t compute_cap() const {
    const double per_projection = local_compute_energy(task, dev);
    if (!(per_projection > 0)) {
      // Zero k_eff or zero frequency: energy never binds, the index space does.
      return n;
    }
    const double cap = static_cast<double>(n) * dev.energy_budget / per_projection;
    if (cap >= 9e18) return std::numeric_limits<std::int64_t>::max() / 4;
    return vr3c::detail::snap_floor(cap);
  }

  double cache_bits() const { return static_cast<double>(cache_units) * task.d_in(); }
};

// Count-form joint policy.
struct CountPolicy {
  std::int64_t n_cache3d = 0;  // c^O
  std::int64_t n_cache2d = 0;  // c^I
  std::int64_t n_compute = 0;  // d

  friend bool operator==(const CountPolicy&, const CountPolicy&) = default;
};

// Cache constraint in bits (c^I D^I + c^O alpha D^I <= C D^I) plus the energy
// cap; evaluated with a 1e-12 relative slack.
inline bool counts_feasible(const HomogeneousInstance& inst, const CountPolicy& c) {
  if (c.n_cache3d < 0 || c.n_cache2d < 0 || c.n_compute < 0) return false;
  const double bits = static_cast<double>(c.n_cache2d) * inst.task.d_in() +
                      static_cast<double>(c.n_cache3d) * inst.task.d_out();
  if (bits > inst.cache_bits() * (1.0 + 1e-12)) return false;
  return c.n_compute <= inst.compute_cap();
}

// Objective of the count-form problem at a given count triple. The route-3
// rate only enters when d exceeds the number of cached 2D FOVs.
inline double count_objective(const HomogeneousInstance& inst, const CountPolicy& c) {
  const double rs = rate_mec(inst.task);
  const double n = static_cast<double>(inst.n);
  const double matched = static_cast<double>(std::min(c.n_cache2d, c.n_compute));
  const double unmatched = static_cast<double>(c.n_compute) - matched;
  double rate = rs - rs / n * static_cast<double>(c.n_cache3d) - rs / n * matched;
  if (unmatched > 0) {
    rate -= (rs - rate_local_compute(inst.task, inst.dev)) / n * unmatched;
  }
  return rate;
}

struct ClosedFormResult {
  CountPolicy counts;
  double rate = 0.0;
  Regime regime = Regime::MecComputeLimited;
  // Cache bits left unused because alpha does not divide C - c^I.
  double cache_remainder_bits = 0.0;
};

namespace detail {

// Clamp a count triple so the canonical index layout fits into 1..N:
// c^O + max(c^I, d) <= N. A no-op whenever C <= N and cap <= N.
inline void clamp_to_index_space(std::int64_t n, std::int64_t& c3d, std::int64_t& c2d,
                                 std::int64_t& d) {
  c2d = std::min(c2d, n);
  d = std::min(d, n);
  c3d = std::clamp<std::int64_t>(c3d, 0, n - std::max(c2d, d));
}

}  // namespace detail

// Optimal counts and minimum rate. Local computing with a cached 2D FOV is
// filled first (min of cache and compute capability); uncached local
// computing is added only at or above the crossover frequency; leftover cache
// holds 3D FOVs at alpha units each, remainder floored away.
inline ClosedFormResult closed_form(const HomogeneousInstance& inst) {
  const double fv = inst.dev.cpu_freq;
  const double f_cross = crossover_frequency(inst.task);
  const Regime regime =
      fv < f_cross ? Regime::LocalComputeLimited : Regime::MecComputeLimited;

  const std::int64_t cap = inst.compute_cap();
  std::int64_t c2d = std::min(inst.cache_units, cap);
  std::int64_t d = regime == Regime::LocalComputeLimited ? c2d : cap;
  std::int64_t c3d = vr3c::detail::snap_floor(
      static_cast<double>(inst.cache_units - c2d) / inst.task.alpha());
  detail::clamp_to_index_space(inst.n, c3d, c2d, d);

  if (d > 0 && !local_compute_feasible(inst.task, inst.dev)) {
    throw InfeasibleCompute("optimal policy assigns local projections but f_V cannot meet tau");
  }

  ClosedFormResult out;
  out.counts = {c3d, c2d, d};
  out.regime = regime;
  out.rate = count_objective(inst, out.counts);
  out.cache_remainder_bits =
      inst.cache_bits() - static_cast<double>(c2d) * inst.task.d_in() -
      static_cast<double>(c3d) * inst.task.d_out();
  if (out.cache_remainder_bits < 0) out.cache_remainder_bits = 0;
  return out;
}

// Lays the counts out over concrete viewpoint indices: 3D-cached FOVs first,
// then 2D-cached ones, with local projections covering the 2D-cached block
// and continuing past it when d exceeds c^I.
inline JointPolicy expand_counts(const CountPolicy& counts, std::int64_t n) {
  if (counts.n_cache3d < 0 || counts.n_cache2d < 0 || counts.n_compute < 0) {
    throw CountsExceedN("counts must be nonnegative");
  }
  if (counts.n_cache3d + std::max(counts.n_cache2d, counts.n_compute) > n) {
    throw CountsExceedN("count policy does not fit into " + std::to_string(n) + " viewpoints");
  }
  if (counts.n_cache2d > counts.n_compute) {
    throw InvalidPolicy("cached 2D FOVs exceed local projections; the cached copies would be dead");
  }
  JointPolicy policy(static_cast<std::size_t>(n));
  std::int64_t i = 0;
  for (std::int64_t k = 0; k < counts.n_cache3d; ++k) policy.cache3d[i++] = 1;
  for (std::int64_t k = 0; k < counts.n_compute; ++k, ++i) {
    policy.compute_local[i] = 1;
    if (k < counts.n_cache2d) policy.cache2d[i] = 1;
  }
  return policy;
}

// Uniform-popularity viewpoint list plus the device with the instance's cache
// size in bits, for feeding count policies through the vector-space API.
inline std::vector<ViewpointParams> uniform_viewpoints(const HomogeneousInstance& inst) {
  std::vector<ViewpointParams> out;
  out.reserve(static_cast<std::size_t>(inst.n));
  const double p = 1.0 / static_cast<double>(inst.n);
  for (std::int64_t i = 0; i < inst.n; ++i) out.emplace_back(inst.task, p);
  return out;
}

inline DeviceCapability device_with_cache_bits(const HomogeneousInstance& inst) {
  DeviceCapability dev = inst.dev;
  dev.cache_bits = inst.cache_bits();
  return dev;
}

struct OracleResult {
  CountPolicy counts;
  double rate = 0.0;
};

// Exhaustive minimum over the count space: c^I in 0..C, c^O the floored
// remainder, d in 0..cap. Ties resolve toward smaller d, then smaller c^O.
// Candidates that would need an infeasible local projection are skipped, so
// the oracle reports the best policy that can actually be served.
inline OracleResult brute_force_problem2(const HomogeneousInstance& inst) {
  const std::int64_t cap = std::min(inst.compute_cap(), inst.n);
  const std::int64_t c_max = std::min(inst.cache_units, inst.n);
  const double points = (static_cast<double>(c_max) + 1) * (static_cast<double>(cap) + 1);
  if (points > 1e8) {
    throw EnumerationTooLarge("count enumeration would visit " + std::to_string(points) +
                              " points");
  }
  const bool can_compute = local_compute_feasible(inst.task, inst.dev);

  std::optional<OracleResult> best;
  CountPolicy c;
  for (std::int64_t c2d = 0; c2d <= c_max; ++c2d) {
    for (std::int64_t d = 0; d <= cap; ++d) {
      if (d > 0 && !can_compute) break;
      std::int64_t c3d = vr3c::detail::snap_floor(
          static_cast<double>(inst.cache_units - c2d) / inst.task.alpha());
      std::int64_t c2d_ = c2d, d_ = d;
      detail::clamp_to_index_space(inst.n, c3d, c2d_, d_);
      c = {c3d, c2d_, d_};
      const double rate = count_objective(inst, c);
      if (!best || rate < best->rate ||
          (rate == best->rate &&
           (c.n_compute < best->counts.n_compute ||
            (c.n_compute == best->counts.n_compute && c.n_cache3d < best->counts.n_cache3d)))) {
        best = {c, rate};
      }
    }
  }
  return *best;
}

// CPU frequency minimizing the optimal rate when the device has no cache and
// sits in the MEC-computing-limited regime. Depends only on the projection
// parameters: f*/F = (1 - 1/(4a)) + sqrt((1 - 1/(4a))^2 - (a-1)/a).
inline double optimal_frequency(const ProjectionTask& task) {
  const double alpha = task.alpha();
  if (!(alpha > 1.0)) throw AlphaDegenerate("optimal frequency undefined for alpha <= 1");
  const double f_cross = crossover_frequency(task);
  const double a = 1.0 - task.d_in() / (4.0 * rate_mec(task) * task.deadline());
  const double radicand = a * a * f_cross * f_cross -
                          task.d_in() * task.cycles_per_bit() / task.deadline() * f_cross;
  if (radicand < 0) {
    throw NegativeDiscriminant("optimal-frequency radicand negative; alpha too close to 1");
  }
  return a * f_cross + std::sqrt(radicand);
}

// One sweep axis is a list of grid values; absent axes fall back to the
// template instance. Cache and energy axes are fractions of N:
// cache_fraction = C/N, energy_fraction = E/(k f^2 D^I w), the per-request
// compute capability.
struct SweepAxes {
  std::vector<double> cache_fraction;
  std::vector<double> energy_fraction;
  std::vector<double> cpu_freq;
};

struct SweepRow {
  std::vector<double> axis;  // active axis values, in (cache, energy, freq) order
  double rate = 0.0;
  Regime regime = Regime::MecComputeLimited;
  CountPolicy counts;
  std::string status = "ok";  // "ok" or the error that felled this row
};

// Row-major sweep over the active axes via closed_form. Errors land in the
// row's status column instead of aborting the grid.
inline std::vector<SweepRow> sweep(const HomogeneousInstance& base, const SweepAxes& axes) {
  const std::vector<double> one{std::nan("")};  // sentinel: keep template value
  const auto& cache_axis = axes.cache_fraction.empty() ? one : axes.cache_fraction;
  const auto& energy_axis = axes.energy_fraction.empty() ? one : axes.energy_fraction;
  const auto& freq_axis = axes.cpu_freq.empty() ? one : axes.cpu_freq;

  std::vector<SweepRow> rows;
  rows.reserve(cache_axis.size() * energy_axis.size() * freq_axis.size());
  for (double cf : cache_axis) {
    for (double ef : energy_axis) {
      for (double fv : freq_axis) {
        SweepRow row;
        if (!axes.cache_fraction.empty()) row.axis.push_back(cf);
        if (!axes.energy_fraction.empty()) row.axis.push_back(ef);
        if (!axes.cpu_freq.empty()) row.axis.push_back(fv);
        try {
          DeviceCapability dev = base.dev;
          if (!axes.cpu_freq.empty()) dev.cpu_freq = fv;
          std::int64_t cache_units = base.cache_units;
          if (!axes.cache_fraction.empty()) {
            cache_units = static_cast<std::int64_t>(
                std::llround(cf * static_cast<double>(base.n)));
          }
          if (!axes.energy_fraction.empty()) {
            dev.energy_budget = ef * local_compute_energy(base.task, dev);
          }
          HomogeneousInstance inst(base.task, base.n, cache_units, dev);
          const ClosedFormResult res = closed_form(inst);
          row.rate = res.rate;
          row.regime = res.regime;
          row.counts = res.counts;
        } catch (const Error& e) {
          row.status = std::string("error: ") + e.what();
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace vr3c::homogeneous

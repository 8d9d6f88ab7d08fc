#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "vr3c/errors.hpp"
#include "vr3c/lp.hpp"
#include "vr3c/model.hpp"
#include "vr3c/rng.hpp"

// Heterogeneous scenario: one route per viewpoint under a cache-bits and an
// average-energy knapsack. The binary problem is an NP-hard 4-choice
// 2-dimensional knapsack; this module builds that instance, relaxes it with
// an exact quadratic penalty, and minimizes the penalized objective by the
// concave-convex procedure (a sequence of LPs), restarted from many random
// feasible points. Greedy baselines and a small-N exhaustive oracle round out
// the toolbox.

namespace vr3c::heterogeneous {

// Profit stand-in for a route the device cannot serve within its deadline.
// Large enough to lose every comparison, small enough to keep LP arithmetic
// sane next to profits (~1e9) and penalties (~1e5 per variable).
inline constexpr double kRouteDisabled = -1e15;

inline constexpr std::array<ServiceRoute, 4> kRoutes = {
    ServiceRoute::Local3dCache, ServiceRoute::LocalComputeWith2dCache,
    ServiceRoute::LocalComputeNoCache, ServiceRoute::MecCompute};

// Multiple-choice knapsack form: per viewpoint i and route j, a rate gain
// over pure MEC computing, a cache cost in bits and an average energy cost in
// joules. Routes are indexed 0..3 here (paper's j = 1..4).
struct MmkpInstance {
  std::size_t n = 0;
  std::vector<std::array<double, 4>> profit;       // v
  std::vector<std::array<double, 4>> cache_cost;   // w^1, bits
  std::vector<std::array<double, 4>> energy_cost;  // w^2, joules
  double cache_budget = 0.0;                       // C'
  double energy_budget = 0.0;                      // E-bar
  double total_mec_rate = 0.0;                     // sum of P_i R_i^S

  bool route_enabled(std::size_t i, std::size_t j) const {
    return profit[i][j] > kRouteDisabled / 2;
  }
};

namespace detail {

inline bool over_budget(double used, double budget) {
  return used > budget + 1e-9 * std::max(1.0, budget);
}

}  // namespace detail

// Builds the knapsack matrices from viewpoint parameters. Viewpoints whose
// local projection cannot meet the deadline get their local-computing routes
// disabled rather than failing the build; their energy columns stay finite.
inline MmkpInstance build_mmkp(std::span<const ViewpointParams> viewpoints,
                               const DeviceCapability& dev) {
  MmkpInstance inst;
  inst.n = viewpoints.size();
  inst.cache_budget = dev.cache_bits;
  inst.energy_budget = dev.energy_budget;
  inst.profit.resize(inst.n);
  inst.cache_cost.resize(inst.n);
  inst.energy_cost.resize(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i) {
    const ViewpointParams& vp = viewpoints[i];
    const double rs = rate_mec(vp.task);
    const double energy = vp.popularity * local_compute_energy(vp.task, dev);
    const bool computable = dev.cpu_freq > 0 && local_compute_feasible(vp.task, dev);

    inst.profit[i] = {vp.popularity * rs, vp.popularity * rs, kRouteDisabled, 0.0};
    if (computable) {
      inst.profit[i][2] = vp.popularity * (rs - rate_local_compute(vp.task, dev));
    } else {
      inst.profit[i][1] = kRouteDisabled;  // cached-2D route also computes locally
    }
    inst.cache_cost[i] = {vp.task.d_out(), vp.task.d_in(), 0.0, 0.0};
    inst.energy_cost[i] = {0.0, energy, energy, 0.0};
    inst.total_mec_rate += vp.popularity * rs;
  }
  return inst;
}

// Fractional route assignment: x[i*4 + j] in [0,1], rows summing to one.
struct RelaxedAssignment {
  std::size_t n = 0;
  std::vector<double> x;

  RelaxedAssignment() = default;
  explicit RelaxedAssignment(std::size_t n_) : n(n_), x(4 * n_, 0.0) {}

  double at(std::size_t i, std::size_t j) const { return x[i * 4 + j]; }
  double& at(std::size_t i, std::size_t j) { return x[i * 4 + j]; }
};

// Largest constraint violation in normalized units (knapsack rows divided by
// their budgets, so 1e-9 means one part in 1e9 of the budget).
inline double relaxed_feasibility_error(const RelaxedAssignment& x, const MmkpInstance& inst) {
  if (x.n != inst.n || x.x.size() != 4 * inst.n) {
    throw ShapeMismatch("assignment shape does not match the instance");
  }
  double worst = 0.0;
  double cache = 0.0, energy = 0.0, cache_scale = 0.0, energy_scale = 0.0;
  for (std::size_t i = 0; i < inst.n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      const double v = x.at(i, j);
      worst = std::max(worst, std::max(-v, v - 1.0));  // box
      row_sum += v;
      cache += inst.cache_cost[i][j] * v;
      energy += inst.energy_cost[i][j] * v;
      cache_scale = std::max(cache_scale, inst.cache_cost[i][j]);
      energy_scale = std::max(energy_scale, inst.energy_cost[i][j]);
    }
    worst = std::max(worst, std::abs(row_sum - 1.0));
  }
  cache_scale = inst.cache_budget > 0 ? inst.cache_budget : std::max(cache_scale, 1.0);
  energy_scale = inst.energy_budget > 0 ? inst.energy_budget : std::max(energy_scale, 1.0);
  worst = std::max(worst, (cache - inst.cache_budget) / cache_scale);
  worst = std::max(worst, (energy - inst.energy_budget) / energy_scale);
  return std::max(worst, 0.0);
}

// Relaxation objective: sum of -v_ij x_ij. For binary x this is minus the
// total rate gain, so average rate = total_mec_rate + objective.
inline double objective(const RelaxedAssignment& x, const MmkpInstance& inst) {
  if (x.n != inst.n || x.x.size() != 4 * inst.n) {
    throw ShapeMismatch("assignment shape does not match the instance");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < inst.n; ++i)
    for (std::size_t j = 0; j < 4; ++j) total += -inst.profit[i][j] * x.at(i, j);
  return total;
}

// Quadratic penalty term sum x(x-1); zero exactly at binary points, strictly
// negative anywhere fractional.
inline double binarity_deficit(const RelaxedAssignment& x) {
  double s = 0.0;
  for (double v : x.x) s += v * (v - 1.0);
  return s;
}

// Penalized objective of the exact-penalty problem.
inline double penalized_objective(const RelaxedAssignment& x, const MmkpInstance& inst,
                                  double mu) {
  return objective(x, inst) - mu * binarity_deficit(x);
}

struct CccpConfig {
  // Penalty weight against profits normalized to a 1e6 reference (see
  // effective_penalty). The default keeps the penalty at a tenth of the
  // largest profit whatever the rate units, which is where restart diversity
  // actually pays off.
  double mu = 1e5;
  double delta = 1e-3;  // stop when the surrogate decrease falls below this
  int max_iters = 200;  // LP solves per start
  int restarts = 100;
  std::uint64_t rng_seed = 1;
  int threads = -1;  // -1: VR3C_THREADS env var (0 or unset: hardware)
};

// Largest enabled profit magnitude; the instance's natural objective scale.
inline double profit_scale(const MmkpInstance& inst) {
  double s = 0.0;
  for (std::size_t i = 0; i < inst.n; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (inst.route_enabled(i, j)) s = std::max(s, std::abs(inst.profit[i][j]));
  return s > 0 ? s : 1.0;
}

// The penalty weight in the instance's rate units. cfg.mu is read against
// profits scaled so the largest is 1e6; this keeps the configured default
// meaningful whether rates arrive in bit/s or Mbit/s.
inline double effective_penalty(const MmkpInstance& inst, double mu) {
  return mu * profit_scale(inst) / 1e6;
}

// The relaxation polytope as a linear program: two normalized knapsack rows
// and one choice row per viewpoint. Costs are placeholders; CCCP supplies
// fresh ones each iteration.
inline lp::LinearProgram make_relaxation_lp(const MmkpInstance& inst) {
  lp::LinearProgram prog;
  prog.num_vars = 4 * inst.n;
  prog.costs.assign(prog.num_vars, 0.0);

  double cache_scale = 0.0, energy_scale = 0.0;
  for (std::size_t i = 0; i < inst.n; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      cache_scale = std::max(cache_scale, inst.cache_cost[i][j]);
      energy_scale = std::max(energy_scale, inst.energy_cost[i][j]);
    }
  }
  cache_scale = inst.cache_budget > 0 ? inst.cache_budget : std::max(cache_scale, 1.0);
  energy_scale = inst.energy_budget > 0 ? inst.energy_budget : std::max(energy_scale, 1.0);

  std::vector<double> cache_row(prog.num_vars, 0.0), energy_row(prog.num_vars, 0.0);
  for (std::size_t i = 0; i < inst.n; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      cache_row[i * 4 + j] = inst.cache_cost[i][j] / cache_scale;
      energy_row[i * 4 + j] = inst.energy_cost[i][j] / energy_scale;
    }
  }
  prog.ineq_rows.push_back(std::move(cache_row));
  prog.ineq_rhs.push_back(inst.cache_budget / cache_scale);
  prog.ineq_rows.push_back(std::move(energy_row));
  prog.ineq_rhs.push_back(inst.energy_budget / energy_scale);

  for (std::size_t i = 0; i < inst.n; ++i) {
    std::vector<double> row(prog.num_vars, 0.0);
    for (std::size_t j = 0; j < 4; ++j) row[i * 4 + j] = 1.0;
    prog.eq_rows.push_back(std::move(row));
    prog.eq_rhs.push_back(1.0);
  }
  return prog;
}

struct CccpTrace {
  std::vector<double> penalized;  // penalized objective at x0 and each iterate
  std::vector<double> surrogate;  // linearized objective per LP solve
  int iterations = 0;             // LP solves
  bool converged = false;         // stopped by delta rather than max_iters
  double max_duality_gap = 0.0;   // worst relative gap across the LP solves
};

struct CccpResult {
  RelaxedAssignment x;
  CccpTrace trace;
};

// Concave-convex procedure on the penalized relaxation: linearize the concave
// part at the current point and hand the resulting LP to the solver, until
// the surrogate objective stops improving by more than delta. The solver must
// be built over make_relaxation_lp(inst).
inline CccpResult cccp_solve(const MmkpInstance& inst, const RelaxedAssignment& x0,
                             const CccpConfig& cfg, lp::SimplexSolver& solver) {
  if (solver.program().num_vars != 4 * inst.n) {
    throw ShapeMismatch("solver polytope does not match the instance");
  }
  if (relaxed_feasibility_error(x0, inst) > 1e-6) {
    throw ConfigError("initial point violates the relaxation constraints");
  }

  const double mu = effective_penalty(inst, cfg.mu);
  CccpResult res;
  res.x = x0;
  res.trace.penalized.push_back(penalized_objective(x0, inst, mu));

  std::vector<double> costs(4 * inst.n);
  double prev_surrogate = 0.0;
  for (int t = 0; t < cfg.max_iters; ++t) {
    // Linearized cost: -v - mu (2 x^t - 1).
    for (std::size_t k = 0; k < costs.size(); ++k) {
      const std::size_t i = k / 4, j = k % 4;
      costs[k] = -inst.profit[i][j] - mu * (2.0 * res.x.x[k] - 1.0);
    }
    double sq = 0.0;
    for (double v : res.x.x) sq += v * v;

    const lp::LpSolution sol = solver.solve(costs);
    if (sol.status != lp::LpStatus::Optimal) {
      throw LpFailure("iteration " + std::to_string(t) + ": LP came back " +
                      std::string(lp::to_string(sol.status)));
    }
    res.trace.max_duality_gap = std::max(res.trace.max_duality_gap, sol.duality_gap);

    RelaxedAssignment next(inst.n);
    next.x = sol.x;
    const double surrogate = sol.objective + mu * sq;
    const double penalized = penalized_objective(next, inst, mu);
    const double prev_penalized = res.trace.penalized.back();
    const double slack =
        1e-9 * std::max({1.0, std::abs(prev_penalized), inst.total_mec_rate});
    if (penalized > prev_penalized + slack) {
      throw NonDecreasingObjective("penalized objective rose from " +
                                   std::to_string(prev_penalized) + " to " +
                                   std::to_string(penalized) + " at iteration " +
                                   std::to_string(t));
    }
    res.x = std::move(next);
    res.trace.penalized.push_back(penalized);
    res.trace.surrogate.push_back(surrogate);
    res.trace.iterations = t + 1;
    if (t > 0 && prev_surrogate - surrogate <= cfg.delta) {
      res.trace.converged = true;
      break;
    }
    prev_surrogate = surrogate;
  }
  return res;
}

namespace detail {

// Demote the worst profit-per-violating-cost viewpoint to MEC computing until
// both budgets hold. Routes are 0-based (3 = MEC).
inline void repair_routes(std::vector<int>& routes, const MmkpInstance& inst) {
  while (true) {
    double cache = 0.0, energy = 0.0;
    for (std::size_t i = 0; i < inst.n; ++i) {
      cache += inst.cache_cost[i][routes[i]];
      energy += inst.energy_cost[i][routes[i]];
    }
    int dim;  // 0 = cache, 1 = energy
    if (over_budget(cache, inst.cache_budget)) {
      dim = 0;
    } else if (over_budget(energy, inst.energy_budget)) {
      dim = 1;
    } else {
      return;
    }
    std::size_t victim = inst.n;
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < inst.n; ++i) {
      if (routes[i] == 3) continue;
      const double cost = dim == 0 ? inst.cache_cost[i][routes[i]]
                                   : inst.energy_cost[i][routes[i]];
      if (cost <= 0.0) continue;
      const double ratio = inst.profit[i][routes[i]] / cost;
      if (victim == inst.n || ratio < worst_ratio) {
        victim = i;
        worst_ratio = ratio;
      }
    }
    if (victim == inst.n) return;  // nothing contributes to the violated budget
    routes[victim] = 3;
  }
}

inline JointPolicy routes_to_policy(const std::vector<int>& routes) {
  JointPolicy policy(routes.size());
  for (std::size_t i = 0; i < routes.size(); ++i) {
    policy.set_route(i, kRoutes[static_cast<std::size_t>(routes[i])]);
  }
  return policy;
}

}  // namespace detail

// Total rate gain of a binary policy under the instance's profit matrix.
inline double policy_gain(const MmkpInstance& inst, const JointPolicy& policy) {
  if (policy.size() != inst.n) throw ShapeMismatch("policy size does not match the instance");
  double gain = 0.0;
  for (std::size_t i = 0; i < inst.n; ++i) {
    gain += inst.profit[i][static_cast<std::size_t>(static_cast<int>(policy.route(i)) - 1)];
  }
  return gain;
}

// Average transmission rate implied by a binary policy: MEC-everything rate
// minus the policy's rate gain.
inline double policy_rate(const MmkpInstance& inst, const JointPolicy& policy) {
  return inst.total_mec_rate - policy_gain(inst, policy);
}

// Per-row argmax (ties to the lowest route index, disabled routes excluded),
// then budget repair by demoting the smallest profit-to-violating-cost
// viewpoint to MEC computing. MEC computing costs nothing, so repair always
// terminates feasible.
inline JointPolicy round_and_repair(const RelaxedAssignment& x, const MmkpInstance& inst) {
  if (x.n != inst.n) throw ShapeMismatch("assignment shape does not match the instance");
  std::vector<int> routes(inst.n, 3);
  for (std::size_t i = 0; i < inst.n; ++i) {
    int best = 3;
    double best_x = -1.0;
    for (int j = 0; j < 4; ++j) {
      if (!inst.route_enabled(i, static_cast<std::size_t>(j))) continue;
      if (x.at(i, static_cast<std::size_t>(j)) > best_x + 1e-12) {
        best_x = x.at(i, static_cast<std::size_t>(j));
        best = j;
      }
    }
    routes[i] = best;
  }
  detail::repair_routes(routes, inst);
  return detail::routes_to_policy(routes);
}

// Random binary start: a uniform route draw per viewpoint, repaired to the
// budgets the same way round_and_repair does. Binary points satisfy the
// relaxation constraints by construction.
inline RelaxedAssignment initial_feasible_point(const MmkpInstance& inst, CounterRng& rng) {
  std::vector<int> routes(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i) {
    routes[i] = static_cast<int>(rng.uniform_int(4));
  }
  detail::repair_routes(routes, inst);
  RelaxedAssignment x(inst.n);
  for (std::size_t i = 0; i < inst.n; ++i) x.at(i, static_cast<std::size_t>(routes[i])) = 1.0;
  return x;
}

// Greedy baseline: fill the cache with 3D FOVs in descending popularity-rate
// per cached bit, stopping at the first FOV that would overflow.
inline JointPolicy greedy_3d_caching(std::span<const ViewpointParams> viewpoints,
                                     const DeviceCapability& dev) {
  std::vector<std::size_t> order(viewpoints.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ra = viewpoints[a].popularity * rate_mec(viewpoints[a].task) /
                      viewpoints[a].task.d_out();
    const double rb = viewpoints[b].popularity * rate_mec(viewpoints[b].task) /
                      viewpoints[b].task.d_out();
    return ra > rb;
  });
  JointPolicy policy(viewpoints.size());
  double cache = 0.0;
  for (std::size_t idx : order) {
    const double next = cache + viewpoints[idx].task.d_out();
    if (detail::over_budget(next, dev.cache_bits)) break;
    policy.set_route(idx, ServiceRoute::Local3dCache);
    cache = next;
  }
  return policy;
}

// Two-phase greedy baseline: pack cached-2D local computing by rate per joint
// cache+energy cost until either budget splits, then spend whichever budget
// remains (cache -> 3D caching, energy -> uncached local computing with
// positive gain only).
inline JointPolicy greedy_caching_computing(std::span<const ViewpointParams> viewpoints,
                                            const DeviceCapability& dev) {
  const std::size_t n = viewpoints.size();
  JointPolicy policy(n);
  std::vector<bool> taken(n, false);

  const auto energy_of = [&](std::size_t i) {
    return viewpoints[i].popularity * local_compute_energy(viewpoints[i].task, dev);
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto key = [&](std::size_t i) {
      return viewpoints[i].popularity * rate_mec(viewpoints[i].task) /
             (viewpoints[i].task.d_in() + energy_of(i));
    };
    return key(a) > key(b);
  });

  double cache = 0.0, energy = 0.0;
  for (std::size_t idx : order) {
    if (!(dev.cpu_freq > 0) || !local_compute_feasible(viewpoints[idx].task, dev)) continue;
    const double nc = cache + viewpoints[idx].task.d_in();
    const double ne = energy + energy_of(idx);
    if (detail::over_budget(nc, dev.cache_bits) || detail::over_budget(ne, dev.energy_budget)) {
      break;  // split index: first item either budget rejects
    }
    policy.set_route(idx, ServiceRoute::LocalComputeWith2dCache);
    taken[idx] = true;
    cache = nc;
    energy = ne;
  }

  if (cache < dev.cache_bits) {
    // Cache leftover: 3D-cache the rest greedily.
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i)
      if (!taken[i]) rest.push_back(i);
    std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
      const auto key = [&](std::size_t i) {
        return viewpoints[i].popularity * rate_mec(viewpoints[i].task) /
               viewpoints[i].task.d_out();
      };
      return key(a) > key(b);
    });
    for (std::size_t idx : rest) {
      const double nc = cache + viewpoints[idx].task.d_out();
      if (detail::over_budget(nc, dev.cache_bits)) break;
      policy.set_route(idx, ServiceRoute::Local3dCache);
      cache = nc;
    }
  } else if (energy < dev.energy_budget) {
    // Energy leftover: uncached local computing where it actually gains rate.
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      if (!(dev.cpu_freq > 0) || !local_compute_feasible(viewpoints[i].task, dev)) continue;
      if (rate_mec(viewpoints[i].task) <= rate_local_compute(viewpoints[i].task, dev)) continue;
      rest.push_back(i);
    }
    std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
      const auto key = [&](std::size_t i) {
        return viewpoints[i].popularity *
               (rate_mec(viewpoints[i].task) - rate_local_compute(viewpoints[i].task, dev)) /
               energy_of(i);
      };
      return key(a) > key(b);
    });
    for (std::size_t idx : rest) {
      const double ne = energy + energy_of(idx);
      if (detail::over_budget(ne, dev.energy_budget)) break;
      policy.set_route(idx, ServiceRoute::LocalComputeNoCache);
      energy = ne;
    }
  }
  return policy;
}

struct OracleResult {
  JointPolicy policy;
  double rate = 0.0;
  double gain = 0.0;
};

// Exhaustive search over route assignments, viable up to n = 14. Ties resolve
// to the lexicographically smallest route vector; disabled routes are pruned.
inline OracleResult brute_force_mmkp(const MmkpInstance& inst) {
  if (inst.n > 14) {
    throw EnumerationTooLarge("route enumeration is 4^" + std::to_string(inst.n) + " points");
  }
  std::vector<int> routes(inst.n, 3), best_routes(inst.n, 3);
  double best_gain = -std::numeric_limits<double>::infinity();

  const auto dfs = [&](auto&& self, std::size_t i, double gain, double cache,
                       double energy) -> void {
    if (i == inst.n) {
      if (gain > best_gain) {
        best_gain = gain;
        best_routes = routes;
      }
      return;
    }
    for (int j = 0; j < 4; ++j) {
      if (!inst.route_enabled(i, static_cast<std::size_t>(j))) continue;
      const double nc = cache + inst.cache_cost[i][j];
      const double ne = energy + inst.energy_cost[i][j];
      if (detail::over_budget(nc, inst.cache_budget) ||
          detail::over_budget(ne, inst.energy_budget)) {
        continue;
      }
      routes[i] = j;
      self(self, i + 1, gain + inst.profit[i][j], nc, ne);
    }
    routes[i] = 3;
  };
  dfs(dfs, 0, 0.0, 0.0, 0.0);

  OracleResult out;
  out.policy = detail::routes_to_policy(best_routes);
  out.gain = best_gain;
  out.rate = inst.total_mec_rate - best_gain;
  return out;
}

struct RestartStat {
  double final_objective = 0.0;  // penalized objective at the last iterate
  int iterations = 0;
  bool converged = false;
  double rounded_rate = 0.0;
  double duality_gap = 0.0;
  std::string error;  // nonempty if this restart failed
};

struct SolveReport {
  JointPolicy best_policy;
  double best_rate = 0.0;
  // Winning candidate: restart index, -1 for the all-MEC fallback, -2 for the
  // rounded optimum of the unpenalized relaxation.
  int best_restart = -1;
  double relaxation_rounded_rate = 0.0;
  std::vector<RestartStat> restarts;
  double max_duality_gap = 0.0;
};

// Parallelism cap: explicit config wins, then VR3C_THREADS, then hardware.
inline unsigned resolve_threads(int configured) {
  long v = configured;
  if (v < 0) {
    const char* env = std::getenv("VR3C_THREADS");
    v = env != nullptr ? std::strtol(env, nullptr, 10) : 0;
  }
  if (v <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
  }
  return static_cast<unsigned>(v);
}

// Multi-start CCCP: independent restarts from random feasible points. Each
// restart contributes two binary candidates, its repaired random start and
// its rounded final iterate; the best candidate by (rate, restart index)
// wins, with all-MEC as the unconditional fallback. Every restart builds its
// own solver from the shared program, so reports are byte-identical for any
// thread count.
inline SolveReport multi_start(const MmkpInstance& inst, const CccpConfig& cfg) {
  const int restarts = std::max(cfg.restarts, 0);
  SolveReport report;
  report.restarts.resize(static_cast<std::size_t>(restarts));
  std::vector<JointPolicy> policies(static_cast<std::size_t>(restarts));

  const lp::LinearProgram prog = make_relaxation_lp(inst);
  const auto run_range = [&](unsigned worker, unsigned stride) {
    for (int r = static_cast<int>(worker); r < restarts; r += static_cast<int>(stride)) {
      RestartStat& stat = report.restarts[static_cast<std::size_t>(r)];
      try {
        CounterRng rng(cfg.rng_seed, static_cast<std::uint64_t>(r) + 1);
        const RelaxedAssignment x0 = initial_feasible_point(inst, rng);
        lp::SimplexSolver solver(prog);
        const CccpResult res = cccp_solve(inst, x0, cfg, solver);
        JointPolicy candidate = round_and_repair(res.x, inst);
        double rate = policy_rate(inst, candidate);
        const JointPolicy start_policy = round_and_repair(x0, inst);
        const double start_rate = policy_rate(inst, start_policy);
        if (start_rate < rate) {
          candidate = start_policy;
          rate = start_rate;
        }
        policies[static_cast<std::size_t>(r)] = std::move(candidate);
        stat.final_objective = res.trace.penalized.back();
        stat.iterations = res.trace.iterations;
        stat.converged = res.trace.converged;
        stat.rounded_rate = rate;
        stat.duality_gap = res.trace.max_duality_gap;
      } catch (const Error& e) {
        stat.error = e.what();
      }
    }
  };

  const unsigned threads =
      std::min<unsigned>(resolve_threads(cfg.threads),
                         std::max(1u, static_cast<unsigned>(restarts)));
  if (threads <= 1 || restarts <= 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(run_range, w, threads);
    for (auto& th : pool) th.join();
  }

  // All-MEC fallback first, then the rounded vertex of the unpenalized
  // relaxation, then the best successful restart by (rate, index).
  report.best_policy = JointPolicy(inst.n);
  report.best_rate = inst.total_mec_rate;
  try {
    lp::SimplexSolver solver(prog);
    std::vector<double> costs(4 * inst.n);
    for (std::size_t i = 0; i < inst.n; ++i)
      for (std::size_t j = 0; j < 4; ++j) costs[i * 4 + j] = -inst.profit[i][j];
    const lp::LpSolution sol = solver.solve(costs);
    if (sol.status == lp::LpStatus::Optimal) {
      RelaxedAssignment relaxed(inst.n);
      relaxed.x = sol.x;
      JointPolicy rounded = round_and_repair(relaxed, inst);
      report.relaxation_rounded_rate = policy_rate(inst, rounded);
      report.max_duality_gap = std::max(report.max_duality_gap, sol.duality_gap);
      if (report.relaxation_rounded_rate < report.best_rate) {
        report.best_rate = report.relaxation_rounded_rate;
        report.best_policy = std::move(rounded);
        report.best_restart = -2;
      }
    }
  } catch (const Error&) {
    report.relaxation_rounded_rate = inst.total_mec_rate;
  }
  for (int r = 0; r < restarts; ++r) {
    const RestartStat& stat = report.restarts[static_cast<std::size_t>(r)];
    if (!stat.error.empty()) continue;
    report.max_duality_gap = std::max(report.max_duality_gap, stat.duality_gap);
    if (stat.rounded_rate < report.best_rate) {
      report.best_rate = stat.rounded_rate;
      report.best_policy = policies[static_cast<std::size_t>(r)];
      report.best_restart = r;
    }
  }
  return report;
}

}  // namespace vr3c::heterogeneous

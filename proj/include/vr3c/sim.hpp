#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vr3c/errors.hpp"
#include "vr3c/model.hpp"
#include "vr3c/rng.hpp"

// Request-stream simulator under the independent reference model: draw
// viewpoints i.i.d. from the popularity distribution, serve each request over
// the route its policy dictates at that route's minimum rate, and measure
// what the closed-form averages promise.

namespace vr3c::sim {

struct RequestStream {
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> indices;  // 0-based viewpoint per request

  std::size_t length() const { return indices.size(); }
};

// Inverse-CDF sampling over the cumulative popularity vector; reproducible
// from the seed alone.
inline RequestStream generate_stream(std::span<const double> popularities, std::size_t length,
                                     std::uint64_t seed) {
  if (popularities.empty() || length == 0) {
    throw BadDistribution("need at least one viewpoint and one request");
  }
  std::vector<double> cdf(popularities.size());
  double total = 0.0;
  for (std::size_t i = 0; i < popularities.size(); ++i) {
    if (!(popularities[i] >= 0.0) || !(popularities[i] <= 1.0)) {
      throw BadDistribution("popularity " + std::to_string(popularities[i]) +
                            " outside [0,1] at index " + std::to_string(i));
    }
    total += popularities[i];
    cdf[i] = total;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw BadDistribution("popularities sum to " + std::to_string(total) + ", not 1");
  }
  cdf.back() = 1.0;

  RequestStream stream;
  stream.seed = seed;
  stream.indices.resize(length);
  CounterRng rng(seed);
  for (std::size_t t = 0; t < length; ++t) {
    const double u = rng.next_double();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    stream.indices[t] =
        static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                            static_cast<std::ptrdiff_t>(cdf.size()) - 1));
  }
  return stream;
}

struct SimResult {
  double empirical_avg_rate = 0.0;   // mean of per-request minimum rates, bit/s
  std::array<std::uint64_t, 4> route_counts{};  // requests served per route 1..4
  double mean_energy = 0.0;          // joules per request
  std::uint64_t deadline_violations = 0;
  double max_latency = 0.0;          // seconds
};

// Replays the stream against a fixed policy. Each request is charged exactly
// its route's minimum rate, the latency that rate implies, and the local
// computation energy if any. Latency within 1e-9 relative of the deadline
// counts as met (route 3 lands on the deadline by construction, up to
// rounding). Throws InfeasibleRoute if the policy asks an infeasible local
// projection of some viewpoint.
inline SimResult simulate(const JointPolicy& policy,
                          std::span<const ViewpointParams> viewpoints,
                          const DeviceCapability& dev, const RequestStream& stream) {
  detail::require_policy_shape(policy, viewpoints.size());

  struct PerViewpoint {
    int route;
    double rate, latency, energy;
  };
  std::vector<PerViewpoint> table(viewpoints.size());
  for (std::size_t i = 0; i < viewpoints.size(); ++i) {
    const ProjectionTask& task = viewpoints[i].task;
    const ServiceRoute route = policy.route(i);
    PerViewpoint row{static_cast<int>(route) - 1, 0.0, 0.0, 0.0};
    switch (route) {
      case ServiceRoute::Local3dCache:
        break;  // served from cache: nothing moves, nothing computes
      case ServiceRoute::LocalComputeWith2dCache:
        if (!(dev.cpu_freq > 0) || !local_compute_feasible(task, dev)) {
          throw InfeasibleRoute("viewpoint " + std::to_string(i) +
                                ": cached-2D local projection misses its deadline");
        }
        row.latency = compute_latency(task, dev);
        row.energy = local_compute_energy(task, dev);
        break;
      case ServiceRoute::LocalComputeNoCache: {
        if (!(dev.cpu_freq > 0) || !local_compute_feasible(task, dev)) {
          throw InfeasibleRoute("viewpoint " + std::to_string(i) +
                                ": uncached local projection misses its deadline");
        }
        row.rate = rate_local_compute(task, dev);
        row.latency = task.d_in() / row.rate + compute_latency(task, dev);
        row.energy = local_compute_energy(task, dev);
        break;
      }
      case ServiceRoute::MecCompute:
        row.rate = rate_mec(task);
        row.latency = task.d_out() / row.rate;
        break;
    }
    table[i] = row;
  }

  SimResult result;
  double rate_sum = 0.0;
  double energy_sum = 0.0;
  for (const std::uint32_t idx : stream.indices) {
    if (idx >= table.size()) {
      throw ShapeMismatch("stream index " + std::to_string(idx) + " outside the viewpoint set");
    }
    const PerViewpoint& row = table[idx];
    rate_sum += row.rate;
    energy_sum += row.energy;
    result.route_counts[static_cast<std::size_t>(row.route)] += 1;
    result.max_latency = std::max(result.max_latency, row.latency);
    const double deadline = viewpoints[idx].task.deadline();
    if (row.latency > deadline * (1.0 + 1e-9)) {
      result.deadline_violations += 1;
    }
  }
  const double t = static_cast<double>(stream.length());
  result.empirical_avg_rate = rate_sum / t;
  result.mean_energy = energy_sum / t;
  return result;
}

}  // namespace vr3c::sim

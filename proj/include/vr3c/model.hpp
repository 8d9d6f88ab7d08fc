#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "vr3c/errors.hpp"

// Domain model of MEC-based mobile VR delivery: projection tasks, device
// capabilities, joint caching/computing policies and the minimum-rate
// arithmetic of the four service routes. All quantities are double-precision
// SI values (bits, seconds, joules, cycles); no unit scaling inside formulas.

namespace vr3c {

namespace detail {

// floor() with a relative snap: values within `rel` of an integer are treated
// as that integer before flooring. Quantities like N*E/(k f^2 D w) are
// integers by construction in most experiments but arrive through a chain of
// floating-point products.
inline std::int64_t snap_floor(double x, double rel = 1e-9) {
  const double r = std::round(x);
  if (std::abs(x - r) <= rel * std::max(1.0, std::abs(x))) {
    return static_cast<std::int64_t>(r);
  }
  return static_cast<std::int64_t>(std::floor(x));
}

inline bool nearly_equal(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace detail

// One 2D->3D field-of-view projection workload: input/output sizes in bits,
// computation load in cycles per input bit, service deadline in seconds.
class ProjectionTask {
 public:
  ProjectionTask(double d_in, double d_out, double cycles_per_bit, double deadline)
      : d_in_(d_in), d_out_(d_out), cycles_per_bit_(cycles_per_bit), deadline_(deadline) {
    if (!(d_in > 0) || !(d_out > 0) || !(cycles_per_bit > 0) || !(deadline > 0)) {
      throw ConfigError("projection task fields must be positive");
    }
    if (!(alpha() > 1.0)) {
      throw AlphaDegenerate("3D/2D size ratio must exceed 1, got " + std::to_string(alpha()));
    }
    if (alpha() < 2.0) {
      std::cerr << "vr3c: warning: 3D/2D size ratio " << alpha()
                << " < 2; stereoscopic output is normally at least twice the input\n";
    }
  }

  double d_in() const { return d_in_; }
  double d_out() const { return d_out_; }
  double cycles_per_bit() const { return cycles_per_bit_; }
  double deadline() const { return deadline_; }

  // Output-to-input size ratio.
  double alpha() const { return d_out_ / d_in_; }

  // Total CPU cycles of one projection.
  double cycles() const { return d_in_ * cycles_per_bit_; }

  friend bool operator==(const ProjectionTask&, const ProjectionTask&) = default;

 private:
  double d_in_;
  double d_out_;
  double cycles_per_bit_;
  double deadline_;
};

// Caching, energy and compute resources of the VR device. k_eff is the
// power-efficiency constant: energy per cycle at frequency f is k_eff * f^2.
struct DeviceCapability {
  double cache_bits = 0;
  double energy_budget = 0;
  double cpu_freq = 0;
  double k_eff = 0;

  DeviceCapability() = default;
  DeviceCapability(double cache_bits_, double energy_budget_, double cpu_freq_, double k_eff_)
      : cache_bits(cache_bits_), energy_budget(energy_budget_), cpu_freq(cpu_freq_), k_eff(k_eff_) {
    if (cache_bits < 0 || energy_budget < 0 || cpu_freq < 0 || k_eff < 0) {
      throw ConfigError("device capability fields must be nonnegative");
    }
  }

  friend bool operator==(const DeviceCapability&, const DeviceCapability&) = default;
};

// One viewpoint of a heterogeneous instance: its projection task plus request
// probability. Popularities must sum to 1 across an instance.
struct ViewpointParams {
  ProjectionTask task;
  double popularity = 0;

  ViewpointParams(ProjectionTask t, double p) : task(t), popularity(p) {
    if (!(p >= 0.0) || !(p <= 1.0)) {
      throw BadDistribution("popularity must lie in [0,1], got " + std::to_string(p));
    }
  }
};

// The four ways a viewpoint request can be served.
enum class ServiceRoute : int {
  Local3dCache = 1,          // 3D FOV in device cache; no transmission, no compute
  LocalComputeWith2dCache = 2,  // 2D FOV cached, projection on the device
  LocalComputeNoCache = 3,      // 2D FOV downloaded, projection on the device
  MecCompute = 4,               // 3D FOV downloaded from the MEC server
};

inline const char* to_string(ServiceRoute r) {
  switch (r) {
    case ServiceRoute::Local3dCache: return "local-3d-cache";
    case ServiceRoute::LocalComputeWith2dCache: return "local-compute-2d-cache";
    case ServiceRoute::LocalComputeNoCache: return "local-compute-no-cache";
    case ServiceRoute::MecCompute: return "mec-compute";
  }
  return "?";
}

// Per-viewpoint binary decisions: cache the 3D FOV, cache the 2D FOV, run the
// projection locally. Structural invariants (checked by validate_policy and
// enforced by average_rate):
//   cache3d[i] + compute_local[i] <= 1   and   cache2d[i] <= compute_local[i].
struct JointPolicy {
  std::vector<std::uint8_t> cache3d;
  std::vector<std::uint8_t> cache2d;
  std::vector<std::uint8_t> compute_local;

  JointPolicy() = default;
  explicit JointPolicy(std::size_t n) : cache3d(n, 0), cache2d(n, 0), compute_local(n, 0) {}

  std::size_t size() const { return cache3d.size(); }

  bool shape_consistent() const {
    return cache2d.size() == cache3d.size() && compute_local.size() == cache3d.size();
  }

  ServiceRoute route(std::size_t i) const {
    if (cache3d[i]) return ServiceRoute::Local3dCache;
    if (compute_local[i]) {
      return cache2d[i] ? ServiceRoute::LocalComputeWith2dCache
                        : ServiceRoute::LocalComputeNoCache;
    }
    return ServiceRoute::MecCompute;
  }

  void set_route(std::size_t i, ServiceRoute r) {
    cache3d[i] = (r == ServiceRoute::Local3dCache);
    compute_local[i] = (r == ServiceRoute::LocalComputeWith2dCache ||
                        r == ServiceRoute::LocalComputeNoCache);
    cache2d[i] = (r == ServiceRoute::LocalComputeWith2dCache);
  }

  friend bool operator==(const JointPolicy&, const JointPolicy&) = default;
};

// Minimum rate when the projection runs at the MEC server: the 3D FOV must
// cross the link within the deadline.
inline double rate_mec(const ProjectionTask& task) {
  return task.d_out() / task.deadline();
}

// Latency of one local projection.
inline double compute_latency(const ProjectionTask& task, const DeviceCapability& dev) {
  if (!(dev.cpu_freq > 0)) {
    throw InfeasibleCompute("local computing requires cpu_freq > 0");
  }
  return task.cycles() / dev.cpu_freq;
}

inline bool local_compute_feasible(const ProjectionTask& task, const DeviceCapability& dev) {
  return dev.cpu_freq > 0 && compute_latency(task, dev) < task.deadline();
}

// Minimum rate when the 2D FOV is downloaded and projected locally: the
// transmission must fit into whatever deadline the computation leaves over.
// Equality of compute latency and deadline counts as infeasible.
inline double rate_local_compute(const ProjectionTask& task, const DeviceCapability& dev) {
  const double lat = compute_latency(task, dev);
  if (!(lat < task.deadline())) {
    std::ostringstream os;
    os << "local projection takes " << lat << " s against a deadline of " << task.deadline()
       << " s at f_V = " << dev.cpu_freq;
    throw InfeasibleCompute(os.str());
  }
  return task.d_in() / (task.deadline() - lat);
}

// CPU frequency at which the local-compute rate equals the MEC rate. Below
// it, downloading the 2D FOV and computing locally needs more rate than
// downloading the 3D FOV outright.
inline double crossover_frequency(const ProjectionTask& task) {
  const double a = task.alpha();
  if (!(a > 1.0)) {
    throw AlphaDegenerate("crossover frequency undefined for alpha <= 1");
  }
  return task.d_out() * task.cycles_per_bit() / ((a - 1.0) * task.deadline());
}

// Energy drawn by one local projection of `task` at the device's frequency.
inline double local_compute_energy(const ProjectionTask& task, const DeviceCapability& dev) {
  return dev.k_eff * dev.cpu_freq * dev.cpu_freq * task.cycles();
}

namespace detail {

inline void require_policy_shape(const JointPolicy& policy, std::size_t n) {
  if (!policy.shape_consistent() || policy.size() != n) {
    throw ShapeMismatch("policy bit-vectors must all have one entry per viewpoint");
  }
}

}  // namespace detail

// Popularity-weighted minimum average transmission rate of a policy. Throws
// InvalidPolicy on a structural violation and InfeasibleCompute if any
// locally-computed viewpoint cannot meet its deadline.
inline double average_rate(const JointPolicy& policy,
                           std::span<const ViewpointParams> viewpoints,
                           const DeviceCapability& dev) {
  detail::require_policy_shape(policy, viewpoints.size());
  double total = 0.0;
  for (std::size_t i = 0; i < viewpoints.size(); ++i) {
    const bool c3 = policy.cache3d[i];
    const bool c2 = policy.cache2d[i];
    const bool d = policy.compute_local[i];
    if (c3 && d) {
      throw InvalidPolicy("viewpoint " + std::to_string(i) + ": 3D cached and locally computed");
    }
    if (c2 && !d) {
      throw InvalidPolicy("viewpoint " + std::to_string(i) + ": 2D cached without local compute");
    }
    if (c3) continue;  // rate 0
    const ProjectionTask& task = viewpoints[i].task;
    double rate = 0.0;
    if (!d) {
      rate = rate_mec(task);
    } else if (!c2) {
      rate = rate_local_compute(task, dev);  // throws InfeasibleCompute if late
    } else if (!local_compute_feasible(task, dev)) {
      throw InfeasibleCompute("viewpoint " + std::to_string(i) +
                              ": cached-2D projection misses its deadline");
    }
    total += viewpoints[i].popularity * rate;
  }
  return total;
}

// A single violated constraint, with how far over budget the policy sits.
struct PolicyViolation {
  enum class Kind { CacheOverflow, EnergyOverflow, Property1, Property3 };

  Kind kind;
  double overflow = 0.0;     // resource overshoot for budget kinds, 0 otherwise
  std::int64_t viewpoint = -1;  // offending index for structural kinds
  std::string message;
};

inline const char* to_string(PolicyViolation::Kind k) {
  switch (k) {
    case PolicyViolation::Kind::CacheOverflow: return "cache-overflow";
    case PolicyViolation::Kind::EnergyOverflow: return "energy-overflow";
    case PolicyViolation::Kind::Property1: return "property-1";
    case PolicyViolation::Kind::Property3: return "property-3";
  }
  return "?";
}

// Checks the cache-size and average-energy constraints plus the structural
// properties. Returns every violation, not just the first; an empty result
// means the policy is feasible. Violations are data, not errors.
inline std::vector<PolicyViolation> validate_policy(const JointPolicy& policy,
                                                    std::span<const ViewpointParams> viewpoints,
                                                    const DeviceCapability& dev) {
  detail::require_policy_shape(policy, viewpoints.size());
  std::vector<PolicyViolation> out;

  double cache_used = 0.0;
  double energy_used = 0.0;
  for (std::size_t i = 0; i < viewpoints.size(); ++i) {
    const ProjectionTask& task = viewpoints[i].task;
    if (policy.cache2d[i]) cache_used += task.d_in();
    if (policy.cache3d[i]) cache_used += task.d_out();  // alpha_i * d_in
    if (policy.compute_local[i]) {
      energy_used += viewpoints[i].popularity * local_compute_energy(task, dev);
    }
    if (policy.cache3d[i] && policy.cache2d[i]) {
      out.push_back({PolicyViolation::Kind::Property1, 0.0, static_cast<std::int64_t>(i),
                     "viewpoint " + std::to_string(i) + ": both 2D and 3D FOV cached"});
    }
    if (policy.cache3d[i] + policy.compute_local[i] > 1 ||
        policy.cache2d[i] > policy.compute_local[i]) {
      out.push_back({PolicyViolation::Kind::Property3, 0.0, static_cast<std::int64_t>(i),
                     "viewpoint " + std::to_string(i) + ": route bits " +
                         std::to_string(int(policy.cache3d[i])) + "/" +
                         std::to_string(int(policy.cache2d[i])) + "/" +
                         std::to_string(int(policy.compute_local[i])) + " are inconsistent"});
    }
  }

  // 1e-9 relative slack (absolute floor 1e-9) absorbs summation roundoff.
  const auto over = [](double used, double budget) {
    return used > budget + 1e-9 * std::max(1.0, budget);
  };
  if (over(cache_used, dev.cache_bits)) {
    out.push_back({PolicyViolation::Kind::CacheOverflow, cache_used - dev.cache_bits, -1,
                   "cache use " + std::to_string(cache_used) + " bits exceeds " +
                       std::to_string(dev.cache_bits)});
  }
  if (over(energy_used, dev.energy_budget)) {
    out.push_back({PolicyViolation::Kind::EnergyOverflow, energy_used - dev.energy_budget, -1,
                   "average energy " + std::to_string(energy_used) + " J exceeds " +
                       std::to_string(dev.energy_budget)});
  }
  return out;
}

}  // namespace vr3c

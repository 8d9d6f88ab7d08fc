#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "vr3c/errors.hpp"
#include "vr3c/heterogeneous.hpp"
#include "vr3c/homogeneous.hpp"
#include "vr3c/model.hpp"
#include "vr3c/rng.hpp"
#include "vr3c/sim.hpp"

// Instance files, the seeded instance generator, and JSON/CSV serialization
// of solver reports. One instance schema feeds every solver:
//
//   { "viewpoints": [ {"d_in":..., "d_out":..., "cycles_per_bit":...,
//                      "deadline":..., "popularity":...}, ... ],
//     "device": {"cache_bits":..., "energy_budget":..., "cpu_freq":..., "k_eff":...},
//     "zipf": {"gamma":..., "n":...} }            // optional, replaces popularities
//
// With a zipf block, n must equal the viewpoint count and per-viewpoint
// popularity entries are ignored in favor of P_i proportional to 1/i^gamma.

namespace vr3c::io {

using nlohmann::json;

struct Instance {
  std::vector<ViewpointParams> viewpoints;
  DeviceCapability device;
};

inline std::vector<double> zipf_popularities(double gamma, std::size_t n) {
  if (n == 0) throw BadDistribution("zipf expansion needs n >= 1");
  std::vector<double> p(n);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = std::pow(static_cast<double>(i + 1), -gamma);
    norm += p[i];
  }
  for (double& v : p) v /= norm;
  // Nudge the largest entry so the sum is exactly 1 in double arithmetic.
  double total = 0.0;
  for (double v : p) total += v;
  p[0] += 1.0 - total;
  return p;
}

namespace detail {

inline double require_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw InstanceParseError(where + ": missing or non-numeric field '" + key + "'");
  }
  return j[key].get<double>();
}

// Shortest round-trip decimal form, scientific notation permitted.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline Instance instance_from_json(const json& j) {
  if (!j.contains("viewpoints") || !j["viewpoints"].is_array() || j["viewpoints"].empty()) {
    throw InstanceParseError("instance: 'viewpoints' must be a nonempty array");
  }
  if (!j.contains("device") || !j["device"].is_object()) {
    throw InstanceParseError("instance: missing 'device' object");
  }

  std::vector<double> popularity;
  const std::size_t n = j["viewpoints"].size();
  if (j.contains("zipf")) {
    const json& z = j["zipf"];
    const double gamma = detail::require_number(z, "gamma", "zipf");
    const auto zn = static_cast<std::size_t>(detail::require_number(z, "n", "zipf"));
    if (zn != n) {
      throw InstanceParseError("zipf: n = " + std::to_string(zn) + " but the instance has " +
                               std::to_string(n) + " viewpoints");
    }
    popularity = zipf_popularities(gamma, n);
  }

  Instance inst;
  inst.viewpoints.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const json& v = j["viewpoints"][i];
    const std::string where = "viewpoint " + std::to_string(i);
    try {
      ProjectionTask task(detail::require_number(v, "d_in", where),
                          detail::require_number(v, "d_out", where),
                          detail::require_number(v, "cycles_per_bit", where),
                          detail::require_number(v, "deadline", where));
      const double p = popularity.empty() ? detail::require_number(v, "popularity", where)
                                          : popularity[i];
      inst.viewpoints.emplace_back(task, p);
    } catch (const InstanceParseError&) {
      throw;
    } catch (const Error& e) {
      throw InstanceParseError(where + ": " + e.what());
    }
  }

  const json& d = j["device"];
  try {
    inst.device = DeviceCapability(detail::require_number(d, "cache_bits", "device"),
                                   detail::require_number(d, "energy_budget", "device"),
                                   detail::require_number(d, "cpu_freq", "device"),
                                   detail::require_number(d, "k_eff", "device"));
  } catch (const InstanceParseError&) {
    throw;
  } catch (const Error& e) {
    throw InstanceParseError(std::string("device: ") + e.what());
  }

  double total = 0.0;
  for (const auto& vp : inst.viewpoints) total += vp.popularity;
  if (std::abs(total - 1.0) > 1e-12) {
    throw InstanceParseError("popularities sum to " + std::to_string(total) + ", not 1");
  }
  return inst;
}

inline json instance_to_json(const Instance& inst) {
  json out;
  out["viewpoints"] = json::array();
  for (const auto& vp : inst.viewpoints) {
    out["viewpoints"].push_back({{"d_in", vp.task.d_in()},
                                 {"d_out", vp.task.d_out()},
                                 {"cycles_per_bit", vp.task.cycles_per_bit()},
                                 {"deadline", vp.task.deadline()},
                                 {"popularity", vp.popularity}});
  }
  out["device"] = {{"cache_bits", inst.device.cache_bits},
                   {"energy_budget", inst.device.energy_budget},
                   {"cpu_freq", inst.device.cpu_freq},
                   {"k_eff", inst.device.k_eff}};
  return out;
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceParseError("cannot open instance file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InstanceParseError(path + ": " + e.what());
  }
  try {
    return instance_from_json(j);
  } catch (const InstanceParseError& e) {
    throw InstanceParseError(path + ": " + e.what());
  }
}

inline void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << '\n';
}

// Heterogeneous instance in the style of the paper's evaluation setup: 2D FOV
// sizes drawn from [d_in_min, d_in_max], fixed size ratio and computation
// load, Zipf-distributed popularity, cache sized as a fraction of the total
// 2D footprint and energy as a fraction of the popularity-weighted projection
// energy.
struct GeneratorConfig {
  std::size_t n = 100;
  std::uint64_t seed = 1;
  double d_in_min = 1e6;
  double d_in_max = 25e6;
  double alpha = 2.0;
  double cycles_per_bit = 10.0;
  double deadline = 0.02;
  double zipf_gamma = 0.8;
  double cache_fraction = 0.3;    // C' as a fraction of sum_i D_i^I
  double energy_fraction = 0.25;  // E as a fraction of k w f^2 sum_i P_i D_i^I
  double cpu_freq = 5e10;
  double k_eff = 1e-27;
  std::string d_in_dist = "uniform";  // or "loguniform"
};

inline Instance generate_instance(const GeneratorConfig& cfg) {
  if (cfg.n == 0) throw ConfigError("generator needs n >= 1");
  if (!(cfg.d_in_min > 0) || cfg.d_in_max < cfg.d_in_min) {
    throw ConfigError("generator needs 0 < d_in_min <= d_in_max");
  }
  if (cfg.d_in_dist != "uniform" && cfg.d_in_dist != "loguniform") {
    throw ConfigError("unknown d_in distribution '" + cfg.d_in_dist + "'");
  }

  CounterRng rng(cfg.seed);
  const std::vector<double> pop = zipf_popularities(cfg.zipf_gamma, cfg.n);

  Instance inst;
  inst.viewpoints.reserve(cfg.n);
  double total_din = 0.0;
  double weighted_din = 0.0;
  for (std::size_t i = 0; i < cfg.n; ++i) {
    double d_in;
    if (cfg.d_in_dist == "uniform") {
      d_in = rng.uniform(cfg.d_in_min, cfg.d_in_max);
    } else {
      d_in = std::exp(rng.uniform(std::log(cfg.d_in_min), std::log(cfg.d_in_max)));
    }
    ProjectionTask task(d_in, cfg.alpha * d_in, cfg.cycles_per_bit, cfg.deadline);
    inst.viewpoints.emplace_back(task, pop[i]);
    total_din += d_in;
    weighted_din += pop[i] * d_in;
  }
  const double f2 = cfg.cpu_freq * cfg.cpu_freq;
  inst.device = DeviceCapability(
      cfg.cache_fraction * total_din,
      cfg.energy_fraction * cfg.k_eff * cfg.cycles_per_bit * f2 * weighted_din, cfg.cpu_freq,
      cfg.k_eff);
  return inst;
}

inline bool is_homogeneous(const Instance& inst) {
  const double n = static_cast<double>(inst.viewpoints.size());
  for (const auto& vp : inst.viewpoints) {
    if (!(vp.task == inst.viewpoints.front().task)) return false;
    if (std::abs(vp.popularity * n - 1.0) > 1e-9) return false;
  }
  return true;
}

// Collapses a uniform instance to count form. The cache size must be a whole
// number of 2D-FOV units (within rounding slack).
inline homogeneous::HomogeneousInstance to_homogeneous(const Instance& inst) {
  if (!is_homogeneous(inst)) {
    throw ConfigError(
        "instance is not homogeneous (tasks or popularities differ across viewpoints)");
  }
  const ProjectionTask& task = inst.viewpoints.front().task;
  const double units = inst.device.cache_bits / task.d_in();
  const std::int64_t c = vr3c::detail::snap_floor(units);
  return homogeneous::HomogeneousInstance(task, static_cast<std::int64_t>(inst.viewpoints.size()),
                                          c, inst.device);
}

inline json policy_to_json(const JointPolicy& policy) {
  json out;
  out["cache3d"] = policy.cache3d;
  out["cache2d"] = policy.cache2d;
  out["compute_local"] = policy.compute_local;
  return out;
}

inline JointPolicy policy_from_json(const json& j) {
  JointPolicy policy;
  try {
    policy.cache3d = j.at("cache3d").get<std::vector<std::uint8_t>>();
    policy.cache2d = j.at("cache2d").get<std::vector<std::uint8_t>>();
    policy.compute_local = j.at("compute_local").get<std::vector<std::uint8_t>>();
  } catch (const json::exception& e) {
    throw InstanceParseError(std::string("policy: ") + e.what());
  }
  if (!policy.shape_consistent()) {
    throw InstanceParseError("policy: bit-vector lengths differ");
  }
  return policy;
}

// Schema v1 of the heterogeneous solve report.
inline json solve_report_to_json(const heterogeneous::SolveReport& report) {
  json out;
  out["schema"] = "v1";
  out["policy"] = policy_to_json(report.best_policy);
  out["average_rate"] = report.best_rate;
  out["best_restart"] = report.best_restart;
  out["max_duality_gap"] = report.max_duality_gap;
  out["restarts"] = json::array();
  for (const auto& r : report.restarts) {
    json jr = {{"final_objective", r.final_objective},
               {"iterations", r.iterations},
               {"converged", r.converged},
               {"rate", r.rounded_rate}};
    if (!r.error.empty()) jr["error"] = r.error;
    out["restarts"].push_back(std::move(jr));
  }
  return out;
}

inline json sim_result_to_json(const sim::SimResult& result) {
  return json{{"empirical_avg_rate", result.empirical_avg_rate},
              {"route_counts", result.route_counts},
              {"mean_energy", result.mean_energy},
              {"deadline_violations", result.deadline_violations},
              {"max_latency", result.max_latency}};
}

// Sweep table as CSV: active axis columns first, then rate/regime/counts and
// the per-row status. Deterministic row order is the sweep's own.
inline std::string sweep_to_csv(const std::vector<homogeneous::SweepRow>& rows) {
  std::ostringstream os;
  if (rows.empty()) return "rate,regime,c3d,c2d,d,status\n";
  for (std::size_t a = 0; a < rows.front().axis.size(); ++a) os << "axis" << (a + 1) << ',';
  os << "rate,regime,c3d,c2d,d,status\n";
  for (const auto& row : rows) {
    for (double v : row.axis) os << detail::format_double(v) << ',';
    os << detail::format_double(row.rate) << ',' << homogeneous::to_string(row.regime) << ','
       << row.counts.n_cache3d << ',' << row.counts.n_cache2d << ',' << row.counts.n_compute
       << ',' << row.status << '\n';
  }
  return os.str();
}

}  // namespace vr3c::io

// Experiment runner: parses an instance + config, dispatches to the solvers,
// and emits result.json plus mode-specific CSV tables. Identical inputs and
// seed produce byte-identical outputs.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vr3c/heterogeneous.hpp"
#include "vr3c/homogeneous.hpp"
#include "vr3c/io.hpp"
#include "vr3c/lp.hpp"
#include "vr3c/model.hpp"
#include "vr3c/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vr3c;

namespace {

struct RunOptions {
  std::string config_path;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> restarts;
  std::optional<double> mu;
  bool lp_debug = false;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Axis spec: either an explicit array of values or {start, stop, count}.
std::vector<double> parse_axis(const json& j, const std::string& name) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
  }
  if (j.is_object() && j.contains("start") && j.contains("stop") && j.contains("count")) {
    const double start = j["start"].get<double>();
    const double stop = j["stop"].get<double>();
    const auto count = j["count"].get<std::int64_t>();
    if (count < 1) throw ConfigError("sweep axis '" + name + "': count must be >= 1");
    for (std::int64_t i = 0; i < count; ++i) {
      out.push_back(count == 1 ? start
                               : start + (stop - start) * static_cast<double>(i) /
                                     static_cast<double>(count - 1));
    }
    return out;
  }
  throw ConfigError("sweep axis '" + name + "' must be an array or {start,stop,count}");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

json policy_counts(const JointPolicy& policy) {
  json counts = json::array();
  std::array<std::uint64_t, 4> per_route{};
  for (std::size_t i = 0; i < policy.size(); ++i)
    per_route[static_cast<std::size_t>(static_cast<int>(policy.route(i)) - 1)]++;
  for (auto c : per_route) counts.push_back(c);
  return counts;
}

struct Experiment {
  std::string mode;
  std::uint64_t seed = 1;
  fs::path out_dir = ".";
  io::Instance instance;
  heterogeneous::CccpConfig cccp;
  homogeneous::SweepAxes axes;
  std::size_t sim_requests = 1000000;
  std::string sim_policy = "auto";  // closed-form | cccp | all-mec | auto
  std::string sim_policy_path;
  bool want_oracle = false;
  bool lp_debug = false;
};

Experiment build_experiment(const RunOptions& opt) {
  const json cfg = load_json(opt.config_path);
  Experiment exp;

  exp.mode = opt.mode ? *opt.mode : cfg.value("mode", std::string());
  if (exp.mode.empty()) throw ConfigError("no mode given (config 'mode' or --mode)");

  exp.seed = opt.seed ? *opt.seed : cfg.value("seed", std::uint64_t{1});
  exp.out_dir = opt.out_dir ? *opt.out_dir : cfg.value("out", std::string("."));

  if (!cfg.contains("instance")) throw ConfigError("config is missing 'instance'");
  fs::path instance_path = cfg["instance"].get<std::string>();
  if (instance_path.is_relative()) {
    instance_path = fs::path(opt.config_path).parent_path() / instance_path;
  }
  exp.instance = io::load_instance(instance_path.string());

  if (cfg.contains("cccp")) {
    const json& c = cfg["cccp"];
    exp.cccp.mu = c.value("mu", exp.cccp.mu);
    exp.cccp.delta = c.value("delta", exp.cccp.delta);
    exp.cccp.max_iters = c.value("max_iters", exp.cccp.max_iters);
    exp.cccp.restarts = c.value("restarts", exp.cccp.restarts);
  }
  exp.cccp.rng_seed = exp.seed;
  if (opt.restarts) exp.cccp.restarts = *opt.restarts;
  if (opt.mu) exp.cccp.mu = *opt.mu;

  if (cfg.contains("sweep")) {
    const json& s = cfg["sweep"];
    if (s.contains("cache_fraction"))
      exp.axes.cache_fraction = parse_axis(s["cache_fraction"], "cache_fraction");
    if (s.contains("energy_fraction"))
      exp.axes.energy_fraction = parse_axis(s["energy_fraction"], "energy_fraction");
    if (s.contains("cpu_freq")) exp.axes.cpu_freq = parse_axis(s["cpu_freq"], "cpu_freq");
  }
  if (cfg.contains("sim")) {
    const json& s = cfg["sim"];
    exp.sim_requests = s.value("requests", exp.sim_requests);
    exp.sim_policy = s.value("policy", exp.sim_policy);
    exp.sim_policy_path = s.value("policy_path", exp.sim_policy_path);
  }
  exp.want_oracle = cfg.value("oracle", false);
  exp.lp_debug = opt.lp_debug;
  return exp;
}

json counts_to_json(const homogeneous::CountPolicy& c) {
  return {{"cache3d", c.n_cache3d}, {"cache2d", c.n_cache2d}, {"compute", c.n_compute}};
}

int run_mode(const Experiment& exp) {
  fs::create_directories(exp.out_dir);
  json result;
  result["schema"] = "v1";
  result["mode"] = exp.mode;
  result["seed"] = exp.seed;

  if (exp.mode == "homog-closed-form" || exp.mode == "homog-oracle") {
    const auto homog = io::to_homogeneous(exp.instance);
    const auto closed = homogeneous::closed_form(homog);
    result["closed_form"] = {{"rate", closed.rate},
                             {"regime", homogeneous::to_string(closed.regime)},
                             {"counts", counts_to_json(closed.counts)},
                             {"cache_remainder_bits", closed.cache_remainder_bits}};
    if (exp.mode == "homog-oracle") {
      const auto oracle = homogeneous::brute_force_problem2(homog);
      result["oracle"] = {{"rate", oracle.rate}, {"counts", counts_to_json(oracle.counts)}};
      result["closed_form_minus_oracle"] = closed.rate - oracle.rate;
    }
  } else if (exp.mode == "homog-sweep") {
    const auto homog = io::to_homogeneous(exp.instance);
    const auto rows = homogeneous::sweep(homog, exp.axes);
    write_text(exp.out_dir / "sweep.csv", io::sweep_to_csv(rows));
    std::size_t ok_rows = 0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
      if (row.status != "ok") continue;
      ++ok_rows;
      best = std::min(best, row.rate);
    }
    result["sweep"] = {{"rows", rows.size()},
                       {"ok_rows", ok_rows},
                       {"min_rate", ok_rows > 0 ? json(best) : json()}};
  } else if (exp.mode == "hetero-cccp") {
    const auto mmkp = heterogeneous::build_mmkp(exp.instance.viewpoints, exp.instance.device);
    if (exp.lp_debug) {
      lp::SimplexSolver solver(heterogeneous::make_relaxation_lp(mmkp));
      std::vector<double> zero(4 * mmkp.n, 0.0);
      solver.solve(zero);
      std::ofstream dump(exp.out_dir / "lp_debug.txt");
      solver.dump_tableau(dump);
    }
    const auto report = heterogeneous::multi_start(mmkp, exp.cccp);
    result.update(io::solve_report_to_json(report));
    result["route_counts"] = policy_counts(report.best_policy);
    result["baselines"] = {
        {"all_mec", mmkp.total_mec_rate},
        {"greedy_3d",
         heterogeneous::policy_rate(mmkp, heterogeneous::greedy_3d_caching(
                                              exp.instance.viewpoints, exp.instance.device))},
        {"greedy_caching_computing",
         heterogeneous::policy_rate(mmkp, heterogeneous::greedy_caching_computing(
                                              exp.instance.viewpoints, exp.instance.device))}};
    if (exp.want_oracle && mmkp.n <= 14) {
      result["oracle_rate"] = heterogeneous::brute_force_mmkp(mmkp).rate;
    }
  } else if (exp.mode == "hetero-baselines") {
    const auto mmkp = heterogeneous::build_mmkp(exp.instance.viewpoints, exp.instance.device);
    const auto g3d = heterogeneous::greedy_3d_caching(exp.instance.viewpoints, exp.instance.device);
    const auto gcc =
        heterogeneous::greedy_caching_computing(exp.instance.viewpoints, exp.instance.device);
    const double r_mec = mmkp.total_mec_rate;
    const double r_g3d = heterogeneous::policy_rate(mmkp, g3d);
    const double r_gcc = heterogeneous::policy_rate(mmkp, gcc);
    result["baselines"] = {{"all_mec", r_mec},
                           {"greedy_3d", r_g3d},
                           {"greedy_caching_computing", r_gcc}};
    std::string csv = "policy,rate\n";
    csv += "all_mec," + io::detail::format_double(r_mec) + "\n";
    csv += "greedy_3d," + io::detail::format_double(r_g3d) + "\n";
    csv += "greedy_caching_computing," + io::detail::format_double(r_gcc) + "\n";
    write_text(exp.out_dir / "baselines.csv", csv);
  } else if (exp.mode == "hetero-oracle") {
    const auto mmkp = heterogeneous::build_mmkp(exp.instance.viewpoints, exp.instance.device);
    const auto oracle = heterogeneous::brute_force_mmkp(mmkp);
    result["oracle"] = {{"rate", oracle.rate},
                        {"gain", oracle.gain},
                        {"policy", io::policy_to_json(oracle.policy)}};
  } else if (exp.mode == "simulate") {
    JointPolicy policy;
    std::string source = exp.sim_policy;
    if (!exp.sim_policy_path.empty()) {
      policy = io::policy_from_json(load_json(exp.sim_policy_path).at("policy"));
      source = "file:" + exp.sim_policy_path;
    } else {
      std::string kind = exp.sim_policy;
      if (kind == "auto") kind = io::is_homogeneous(exp.instance) ? "closed-form" : "cccp";
      if (kind == "closed-form") {
        const auto homog = io::to_homogeneous(exp.instance);
        policy = homogeneous::expand_counts(homogeneous::closed_form(homog).counts, homog.n);
      } else if (kind == "cccp") {
        const auto mmkp =
            heterogeneous::build_mmkp(exp.instance.viewpoints, exp.instance.device);
        policy = heterogeneous::multi_start(mmkp, exp.cccp).best_policy;
      } else if (kind == "all-mec") {
        policy = JointPolicy(exp.instance.viewpoints.size());
      } else {
        throw ConfigError("unknown sim policy '" + kind + "'");
      }
      source = kind;
    }
    if (policy.size() != exp.instance.viewpoints.size()) {
      throw ConfigError("policy size does not match the instance");
    }
    std::vector<double> pops;
    for (const auto& vp : exp.instance.viewpoints) pops.push_back(vp.popularity);
    const auto stream = sim::generate_stream(pops, exp.sim_requests, exp.seed);
    const auto sim_res = sim::simulate(policy, exp.instance.viewpoints, exp.instance.device, stream);
    result["sim"] = io::sim_result_to_json(sim_res);
    result["policy_source"] = source;
    result["analytic_avg_rate"] =
        average_rate(policy, exp.instance.viewpoints, exp.instance.device);
    std::string csv = "route,requests\n";
    const char* names[4] = {"local-3d-cache", "local-compute-2d-cache", "local-compute-no-cache",
                            "mec-compute"};
    for (int j = 0; j < 4; ++j) {
      csv += std::string(names[j]) + "," +
             std::to_string(sim_res.route_counts[static_cast<std::size_t>(j)]) + "\n";
    }
    write_text(exp.out_dir / "routes.csv", csv);
  } else {
    throw ConfigError("unknown mode '" + exp.mode + "'");
  }

  io::save_json((exp.out_dir / "result.json").string(), result);
  return 0;
}

int run_generate(const io::GeneratorConfig& cfg, const std::string& out_path) {
  const io::Instance inst = io::generate_instance(cfg);
  io::save_json(out_path, io::instance_to_json(inst));
  return 0;
}

json error_record(const char* type, const std::string& message) {
  return {{"schema", "v1"}, {"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint caching and computing policies for MEC-based VR delivery"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  run->add_option("--config", run_opt.config_path, "Experiment config JSON")->required();
  std::string mode_flag, out_flag;
  std::uint64_t seed_flag = 0;
  int restarts_flag = -1;
  double mu_flag = -1;
  run->add_option("--mode", mode_flag, "Override the config's mode");
  run->add_option("--seed", seed_flag, "Override the config's seed");
  run->add_option("--out", out_flag, "Override the output directory");
  run->add_option("--restarts", restarts_flag, "Override CCCP restart count");
  run->add_option("--mu", mu_flag, "Override the CCCP penalty parameter");
  run->add_flag("--lp-debug", run_opt.lp_debug, "Dump the relaxation tableau to lp_debug.txt");

  io::GeneratorConfig gen_cfg;
  std::string gen_out = "instance.json";
  auto* gen = app.add_subcommand("generate", "Generate a heterogeneous instance file");
  gen->add_option("--out", gen_out, "Output instance path");
  gen->add_option("--n", gen_cfg.n, "Number of viewpoints");
  gen->add_option("--seed", gen_cfg.seed, "Generator seed");
  gen->add_option("--din-min", gen_cfg.d_in_min, "Smallest 2D FOV, bits");
  gen->add_option("--din-max", gen_cfg.d_in_max, "Largest 2D FOV, bits");
  gen->add_option("--din-dist", gen_cfg.d_in_dist, "2D size distribution: uniform|loguniform");
  gen->add_option("--alpha", gen_cfg.alpha, "3D/2D size ratio");
  gen->add_option("--w", gen_cfg.cycles_per_bit, "Computation load, cycles/bit");
  gen->add_option("--tau", gen_cfg.deadline, "Service deadline, seconds");
  gen->add_option("--gamma", gen_cfg.zipf_gamma, "Zipf popularity exponent");
  gen->add_option("--cache-frac", gen_cfg.cache_fraction, "Cache budget as a fraction of sum D^I");
  gen->add_option("--energy-frac", gen_cfg.energy_fraction,
                  "Energy budget as a fraction of k w f^2 sum P_i D_i^I");
  gen->add_option("--fv", gen_cfg.cpu_freq, "Device CPU frequency, cycles/s");
  gen->add_option("--k", gen_cfg.k_eff, "Power-efficiency constant");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_generate(gen_cfg, gen_out);
    if (mode_flag != "") run_opt.mode = mode_flag;
    if (run->count("--seed") > 0) run_opt.seed = seed_flag;
    if (out_flag != "") run_opt.out_dir = out_flag;
    if (restarts_flag >= 0) run_opt.restarts = restarts_flag;
    if (mu_flag >= 0) run_opt.mu = mu_flag;
    return run_mode(build_experiment(run_opt));
  } catch (const ConfigError& e) {
    std::cerr << error_record("config", e.what()).dump() << "\n";
    return 2;
  } catch (const InstanceParseError& e) {
    std::cerr << error_record("instance-parse", e.what()).dump() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << error_record("solver", e.what()).dump() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << error_record("internal", e.what()).dump() << "\n";
    return 5;
  }
}

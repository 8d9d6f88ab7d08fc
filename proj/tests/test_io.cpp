#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "vr3c/heterogeneous.hpp"
#include "vr3c/io.hpp"

using namespace vr3c;
using namespace vr3c::io;

TEST_CASE("zipf expansion") {
  const auto p = zipf_popularities(0.8, 100);
  REQUIRE(p.size() == 100);
  double total = 0;
  for (double v : p) total += v;
  CHECK(std::abs(total - 1.0) <= 1e-15);
  CHECK_THAT(p[0] / p[1], Catch::Matchers::WithinRel(std::pow(2.0, 0.8), 1e-12));
  CHECK_THAT(p[0] / p[9], Catch::Matchers::WithinRel(std::pow(10.0, 0.8), 1e-12));
}

TEST_CASE("generated instances round-trip through JSON exactly") {
  GeneratorConfig cfg;
  cfg.n = 40;
  cfg.seed = 5;
  const Instance inst = generate_instance(cfg);
  const Instance back = instance_from_json(instance_to_json(inst));
  REQUIRE(back.viewpoints.size() == inst.viewpoints.size());
  for (std::size_t i = 0; i < inst.viewpoints.size(); ++i) {
    CHECK(back.viewpoints[i].task == inst.viewpoints[i].task);
    CHECK(back.viewpoints[i].popularity == inst.viewpoints[i].popularity);
  }
  CHECK(back.device == inst.device);

  // Byte-level determinism of the serialized form.
  CHECK(instance_to_json(inst).dump(2) == instance_to_json(generate_instance(cfg)).dump(2));
}

TEST_CASE("generator budgets match their definitions") {
  GeneratorConfig cfg;
  cfg.n = 64;
  cfg.seed = 9;
  cfg.cache_fraction = 0.3;
  cfg.energy_fraction = 0.25;
  const Instance inst = generate_instance(cfg);
  double total_din = 0, weighted = 0;
  for (const auto& vp : inst.viewpoints) {
    total_din += vp.task.d_in();
    weighted += vp.popularity * vp.task.d_in();
    CHECK(vp.task.d_in() >= cfg.d_in_min);
    CHECK(vp.task.d_in() <= cfg.d_in_max);
    CHECK_THAT(vp.task.alpha(), Catch::Matchers::WithinRel(2.0, 1e-12));
  }
  CHECK_THAT(inst.device.cache_bits, Catch::Matchers::WithinRel(0.3 * total_din, 1e-12));
  const double f2 = cfg.cpu_freq * cfg.cpu_freq;
  CHECK_THAT(inst.device.energy_budget,
             Catch::Matchers::WithinRel(0.25 * cfg.k_eff * cfg.cycles_per_bit * f2 * weighted,
                                        1e-12));
}

TEST_CASE("zipf block replaces explicit popularities") {
  json j;
  j["viewpoints"] = json::array();
  for (int i = 0; i < 4; ++i) {
    j["viewpoints"].push_back(
        {{"d_in", 1e6}, {"d_out", 2e6}, {"cycles_per_bit", 10}, {"deadline", 0.02}});
  }
  j["device"] = {{"cache_bits", 0}, {"energy_budget", 0}, {"cpu_freq", 1e10}, {"k_eff", 1e-27}};

  SECTION("matching n expands") {
    j["zipf"] = {{"gamma", 0.8}, {"n", 4}};
    const Instance inst = instance_from_json(j);
    const auto expected = zipf_popularities(0.8, 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(inst.viewpoints[i].popularity == expected[i]);
  }
  SECTION("mismatched n is rejected") {
    j["zipf"] = {{"gamma", 0.8}, {"n", 5}};
    CHECK_THROWS_AS(instance_from_json(j), InstanceParseError);
  }
  SECTION("without zipf, missing popularity is an error") {
    CHECK_THROWS_AS(instance_from_json(j), InstanceParseError);
  }
}

TEST_CASE("instance validation errors carry context") {
  json j;
  j["viewpoints"] = json::array();
  j["viewpoints"].push_back({{"d_in", 1e6},
                             {"d_out", 2e6},
                             {"cycles_per_bit", 10},
                             {"deadline", 0.02},
                             {"popularity", 0.6}});
  j["device"] = {{"cache_bits", 0}, {"energy_budget", 0}, {"cpu_freq", 1e10}, {"k_eff", 1e-27}};
  SECTION("popularity sum enforced") {
    CHECK_THROWS_AS(instance_from_json(j), InstanceParseError);
  }
  SECTION("device fields validated") {
    j["viewpoints"][0]["popularity"] = 1.0;
    j["device"]["cache_bits"] = -1.0;
    CHECK_THROWS_AS(instance_from_json(j), InstanceParseError);
  }
  SECTION("task fields validated") {
    j["viewpoints"][0]["popularity"] = 1.0;
    j["viewpoints"][0]["d_out"] = 0.5e6;  // alpha < 1
    CHECK_THROWS_AS(instance_from_json(j), InstanceParseError);
  }
}

TEST_CASE("homogeneous collapse") {
  SECTION("uniform instances collapse to count form") {
    json j;
    j["viewpoints"] = json::array();
    for (int i = 0; i < 5; ++i) {
      j["viewpoints"].push_back({{"d_in", 25e6},
                                 {"d_out", 50e6},
                                 {"cycles_per_bit", 10},
                                 {"deadline", 0.02},
                                 {"popularity", 0.2}});
    }
    j["device"] = {
        {"cache_bits", 3 * 25e6}, {"energy_budget", 1.0}, {"cpu_freq", 1.75e10}, {"k_eff", 1e-27}};
    const Instance inst = instance_from_json(j);
    REQUIRE(is_homogeneous(inst));
    const auto homog = to_homogeneous(inst);
    CHECK(homog.n == 5);
    CHECK(homog.cache_units == 3);
  }
  SECTION("non-uniform instances are rejected") {
    GeneratorConfig cfg;
    cfg.n = 8;
    const Instance inst = generate_instance(cfg);
    CHECK_FALSE(is_homogeneous(inst));
    CHECK_THROWS_AS(to_homogeneous(inst), ConfigError);
  }
}

TEST_CASE("policy serialization round-trips") {
  JointPolicy policy(5);
  policy.set_route(0, ServiceRoute::Local3dCache);
  policy.set_route(2, ServiceRoute::LocalComputeWith2dCache);
  policy.set_route(4, ServiceRoute::LocalComputeNoCache);
  const JointPolicy back = policy_from_json(policy_to_json(policy));
  CHECK(back == policy);
}

TEST_CASE("solve report schema v1") {
  GeneratorConfig cfg;
  cfg.n = 12;
  cfg.seed = 3;
  const Instance parsed = generate_instance(cfg);
  const auto inst = heterogeneous::build_mmkp(parsed.viewpoints, parsed.device);
  heterogeneous::CccpConfig ccfg;
  ccfg.restarts = 3;
  const auto report = heterogeneous::multi_start(inst, ccfg);
  const json j = solve_report_to_json(report);
  CHECK(j.at("schema") == "v1");
  CHECK(j.contains("policy"));
  CHECK(j.at("policy").contains("cache3d"));
  CHECK(j.at("average_rate").get<double>() == report.best_rate);
  CHECK(j.at("restarts").size() == 3);
  for (const auto& r : j.at("restarts")) {
    CHECK(r.contains("final_objective"));
    CHECK(r.contains("iterations"));
    CHECK(r.contains("converged"));
  }
}

TEST_CASE("sweep CSV shape") {
  const ProjectionTask task(25e6, 50e6, 10, 0.02);
  const DeviceCapability dev(0, 0.05, 1.75e10, 1e-27);
  homogeneous::HomogeneousInstance base(task, 100, 0, dev);
  homogeneous::SweepAxes axes;
  axes.cache_fraction = {0.0, 0.1};
  axes.energy_fraction = {0.0, 0.3};
  const auto rows = homogeneous::sweep(base, axes);
  const std::string csv = sweep_to_csv(rows);
  CHECK(csv.rfind("axis1,axis2,rate,regime,c3d,c2d,d,status\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  // Row-major: cache axis outer, energy inner.
  CHECK(csv.find("0.1,0\n") == std::string::npos);  // axis values come first on each line
  const std::string line1 = csv.substr(csv.find('\n') + 1, 8);
  CHECK(line1.rfind("0,0,", 0) == 0);
}

TEST_CASE("loguniform generator stays in range") {
  GeneratorConfig cfg;
  cfg.n = 32;
  cfg.d_in_dist = "loguniform";
  const Instance inst = generate_instance(cfg);
  for (const auto& vp : inst.viewpoints) {
    CHECK(vp.task.d_in() >= cfg.d_in_min);
    CHECK(vp.task.d_in() <= cfg.d_in_max);
  }
  GeneratorConfig bad = cfg;
  bad.d_in_dist = "gaussian";
  CHECK_THROWS_AS(generate_instance(bad), ConfigError);
}

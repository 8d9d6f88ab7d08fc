#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "vr3c/homogeneous.hpp"
#include "vr3c/model.hpp"
#include "vr3c/rng.hpp"

#include "helpers.hpp"

using namespace vr3c;
using namespace vr3c::homogeneous;

namespace {

const ProjectionTask kFig3Task(25e6, 50e6, 10.0, 0.02);

// Device tuned so the compute capability is exactly `cap` projections.
DeviceCapability device_with_cap(const ProjectionTask& task, std::int64_t n, std::int64_t cap,
                                 double fv) {
  const double k = 1e-27;
  const double per = k * fv * fv * task.cycles();
  return DeviceCapability(0, static_cast<double>(cap) * per / static_cast<double>(n), fv, k);
}

}  // namespace

TEST_CASE("closed form reproduces the reference operating points") {
  const double f_cross = crossover_frequency(kFig3Task);

  SECTION("cache and compute balanced at 30%") {
    HomogeneousInstance inst(kFig3Task, 60000, 18000,
                             device_with_cap(kFig3Task, 60000, 18000, 0.7 * f_cross));
    REQUIRE(inst.compute_cap() == 18000);
    const auto res = closed_form(inst);
    CHECK(res.regime == Regime::LocalComputeLimited);
    CHECK(res.counts == CountPolicy{0, 18000, 18000});
    CHECK_THAT(res.rate, Catch::Matchers::WithinRel(1.75e9, 1e-12));
    CHECK(res.cache_remainder_bits == 0.0);
  }

  SECTION("compute capability below cache size") {
    HomogeneousInstance inst(kFig3Task, 60000, 18000,
                             device_with_cap(kFig3Task, 60000, 6000, 0.7 * f_cross));
    const auto res = closed_form(inst);
    CHECK(res.counts == CountPolicy{6000, 6000, 6000});
    CHECK_THAT(res.rate, Catch::Matchers::WithinRel(2.0e9, 1e-12));
  }

  SECTION("no local resources means pure MEC") {
    HomogeneousInstance inst(kFig3Task, 60000, 0,
                             device_with_cap(kFig3Task, 60000, 0, 0.7 * f_cross));
    const auto res = closed_form(inst);
    CHECK(res.counts == CountPolicy{0, 0, 0});
    CHECK(res.rate == 2.5e9);
  }

  SECTION("above the crossover, computing runs to the energy cap") {
    const double fv = 1.2 * f_cross;
    HomogeneousInstance inst(kFig3Task, 60000, 0,
                             device_with_cap(kFig3Task, 60000, 18000, fv));
    const auto res = closed_form(inst);
    CHECK(res.regime == Regime::MecComputeLimited);
    CHECK(res.counts == CountPolicy{0, 0, 18000});
    // Independent evaluation: R_S - (R_S - R_V) * cap / N.
    const double rv = 25e6 / (0.02 - 25e7 / fv);
    const double expected = 2.5e9 - (2.5e9 - rv) * 18000.0 / 60000.0;
    CHECK_THAT(res.rate, Catch::Matchers::WithinRel(expected, 1e-12));
    CHECK_THAT(res.rate, Catch::Matchers::WithinRel(2.3929e9, 1e-4));
  }

  SECTION("local projections required but infeasible") {
    // f_V below D^I w / tau cannot finish any projection in time.
    const double fv = 0.9 * kFig3Task.cycles() / kFig3Task.deadline();
    HomogeneousInstance inst(kFig3Task, 60000, 18000,
                             device_with_cap(kFig3Task, 60000, 1000, fv));
    CHECK_THROWS_AS(closed_form(inst), InfeasibleCompute);
  }
}

TEST_CASE("closed form flags the cache remainder when alpha does not divide") {
  HomogeneousInstance inst(kFig3Task, 100, 5,
                           device_with_cap(kFig3Task, 100, 0, 1.75e10));
  const auto res = closed_form(inst);
  CHECK(res.counts == CountPolicy{2, 0, 0});
  CHECK_THAT(res.cache_remainder_bits, Catch::Matchers::WithinRel(kFig3Task.d_in(), 1e-12));
}

TEST_CASE("count expansion lays indices out canonically") {
  SECTION("spec layout, equal cache2d and compute") {
    const JointPolicy p = expand_counts({2, 3, 3}, 6);
    CHECK(p.cache3d == std::vector<std::uint8_t>{1, 1, 0, 0, 0, 0});
    CHECK(p.cache2d == std::vector<std::uint8_t>{0, 0, 1, 1, 1, 0});
    CHECK(p.compute_local == std::vector<std::uint8_t>{0, 0, 1, 1, 1, 0});
  }
  SECTION("all zero") {
    const JointPolicy p = expand_counts({0, 0, 0}, 4);
    CHECK(p.cache3d == std::vector<std::uint8_t>{0, 0, 0, 0});
    CHECK(p.cache2d == std::vector<std::uint8_t>{0, 0, 0, 0});
    CHECK(p.compute_local == std::vector<std::uint8_t>{0, 0, 0, 0});
  }
  SECTION("compute extends past the cached block") {
    const JointPolicy p = expand_counts({1, 1, 2}, 4);
    CHECK(p.cache3d == std::vector<std::uint8_t>{1, 0, 0, 0});
    CHECK(p.cache2d == std::vector<std::uint8_t>{0, 1, 0, 0});
    CHECK(p.compute_local == std::vector<std::uint8_t>{0, 1, 1, 0});
  }
  SECTION("rejections") {
    CHECK_THROWS_AS(expand_counts({2, 3, 3}, 4), CountsExceedN);
    CHECK_THROWS_AS(expand_counts({0, 2, 1}, 8), InvalidPolicy);  // dead cached 2D FOVs
    CHECK_THROWS_AS(expand_counts({-1, 0, 0}, 8), CountsExceedN);
  }
}

TEST_CASE("expanded policies satisfy the vector-space contracts", "[property]") {
  CounterRng rng(46);
  for (int trial = 0; trial < 200; ++trial) {
    const auto draw = testutil::random_divisible_instance(rng);
    ClosedFormResult res;
    try {
      res = closed_form(draw.inst);
    } catch (const InfeasibleCompute&) {
      continue;
    }
    const JointPolicy policy = expand_counts(res.counts, draw.inst.n);
    const auto vps = uniform_viewpoints(draw.inst);
    const DeviceCapability dev = device_with_cache_bits(draw.inst);
    CHECK(validate_policy(policy, vps, dev).empty());
    CHECK_THAT(average_rate(policy, vps, dev), Catch::Matchers::WithinRel(res.rate, 1e-9));
  }
}

TEST_CASE("oracle equals the closed form on divisible instances", "[property]") {
  CounterRng rng(47);
  int compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto draw = testutil::random_divisible_instance(rng);
    const auto cf = closed_form(draw.inst);
    const auto bf = brute_force_problem2(draw.inst);
    CHECK(cf.counts == bf.counts);
    CHECK_THAT(cf.rate, Catch::Matchers::WithinRel(bf.rate, 1e-9));
    ++compared;
  }
  CHECK(compared == 300);
}

TEST_CASE("oracle never exceeds the closed form") {
  CounterRng rng(48);
  for (int trial = 0; trial < 200; ++trial) {
    // Unrestricted cache draw: divisibility may fail, the oracle may find
    // a strictly better floored layout.
    const std::int64_t n = 2 + static_cast<std::int64_t>(rng.uniform_int(120));
    const ProjectionTask task = testutil::random_task(rng, rng.uniform_int(2) ? 3.0 : 2.0);
    const double fv = rng.uniform(1.05, 2.5) * crossover_frequency(task);
    const auto cap = static_cast<std::int64_t>(rng.uniform_int(n / 2 + 1));
    const auto c_units = static_cast<std::int64_t>(rng.uniform_int(n + 1));
    HomogeneousInstance inst(task, n, c_units, device_with_cap(task, n, cap, fv));
    const auto cf = closed_form(inst);
    const auto bf = brute_force_problem2(inst);
    CHECK(bf.rate <= cf.rate + 1e-9 * std::max(1.0, cf.rate));
  }
}

TEST_CASE("oracle handles the no-cache axis") {
  const double f_cross = crossover_frequency(kFig3Task);
  SECTION("below crossover nothing is computed") {
    HomogeneousInstance inst(kFig3Task, 100, 0, device_with_cap(kFig3Task, 100, 30, 0.8 * f_cross));
    const auto bf = brute_force_problem2(inst);
    CHECK(bf.counts == CountPolicy{0, 0, 0});
    CHECK(bf.rate == rate_mec(kFig3Task));
  }
  SECTION("above crossover computing runs to the cap") {
    HomogeneousInstance inst(kFig3Task, 100, 0, device_with_cap(kFig3Task, 100, 30, 1.3 * f_cross));
    const auto bf = brute_force_problem2(inst);
    CHECK(bf.counts == CountPolicy{0, 0, 30});
  }
  SECTION("hand-checkable four-unit cache") {
    // C = 4, alpha = 2, cap = 1 below the crossover. Caching two 3D FOVs and
    // the 2D-compute pairing (1,1,1) tie at 0.8 R_S; the stated tie-break
    // (least compute, then least 3D cache) picks the computing-free layout.
    HomogeneousInstance inst(kFig3Task, 10, 4, device_with_cap(kFig3Task, 10, 1, 0.8 * f_cross));
    const auto bf = brute_force_problem2(inst);
    CHECK(bf.counts == CountPolicy{2, 0, 0});
    CHECK_THAT(bf.rate, Catch::Matchers::WithinRel(0.8 * rate_mec(kFig3Task), 1e-12));
    // Same rate as the theorem layout, which uses strictly more resources.
    CHECK_THAT(closed_form(inst).rate, Catch::Matchers::WithinRel(bf.rate, 1e-12));
  }
}

TEST_CASE("oracle rejects oversized enumerations") {
  HomogeneousInstance inst(kFig3Task, 24001, 12000,
                           device_with_cap(kFig3Task, 24001, 12000, 1.75e10));
  CHECK_THROWS_AS(brute_force_problem2(inst), EnumerationTooLarge);
}

TEST_CASE("optimal frequency matches the alpha-only form") {
  // For alpha = 2 the ratio f*/F is 0.875 + sqrt(0.875^2 - 0.5).
  const double ratio = 0.875 + std::sqrt(0.875 * 0.875 - 0.5);
  const double f_star = optimal_frequency(kFig3Task);
  CHECK_THAT(f_star, Catch::Matchers::WithinRel(ratio * crossover_frequency(kFig3Task), 1e-12));
  CHECK_THAT(f_star, Catch::Matchers::WithinRel(3.476e10, 1e-3));

  // The ratio depends on alpha alone.
  const ProjectionTask other(4e6, 8e6, 17.0, 0.013);
  CHECK_THAT(optimal_frequency(other) / crossover_frequency(other),
             Catch::Matchers::WithinRel(ratio, 1e-12));
}

TEST_CASE("optimal frequency minimizes the no-cache rate over a grid") {
  // Independent oracle: evaluate the zero-cache rate with the continuous
  // compute capability E/(k f^2 D^I w) and scan [F, 4F].
  const double f_cross = crossover_frequency(kFig3Task);
  const double k = 1e-27;
  const double energy = 0.3 * k * (0.7 * f_cross) * (0.7 * f_cross) * kFig3Task.cycles();
  const auto rate_at = [&](double fv) {
    const DeviceCapability dev(0, energy, fv, k);
    const double capacity = energy / (k * fv * fv * kFig3Task.cycles());
    return rate_mec(kFig3Task) -
           (rate_mec(kFig3Task) - rate_local_compute(kFig3Task, dev)) * capacity;
  };
  const double f_star = optimal_frequency(kFig3Task);
  const double r_star = rate_at(f_star);
  double best_f = f_cross;
  double best_r = rate_at(f_cross);
  const int points = 10000;
  for (int g = 0; g <= points; ++g) {
    const double fv = f_cross + (4.0 * f_cross - f_cross) * g / points;
    const double r = rate_at(fv);
    CHECK(r_star <= r + 1e-6 * std::abs(r));
    if (r < best_r) {
      best_r = r;
      best_f = fv;
    }
  }
  CHECK(std::abs(best_f - f_star) <= 3.0 * f_cross / points + 1e-6);
}

TEST_CASE("sweep rows follow the closed form") {
  const double f_cross = crossover_frequency(kFig3Task);
  HomogeneousInstance base(kFig3Task, 200, 0, device_with_cap(kFig3Task, 200, 60, 0.7 * f_cross));

  SECTION("single point equals closed_form") {
    SweepAxes axes;
    axes.cache_fraction = {0.3};
    const auto rows = sweep(base, axes);
    REQUIRE(rows.size() == 1);
    HomogeneousInstance point(kFig3Task, 200, 60, base.dev);
    CHECK(rows[0].rate == closed_form(point).rate);
    CHECK(rows[0].status == "ok");
  }

  SECTION("cache axis is piecewise linear with the published slopes") {
    SweepAxes axes;
    for (int c = 0; c <= 200; ++c) axes.cache_fraction.push_back(c / 200.0);
    const auto rows = sweep(base, axes);
    REQUIRE(rows.size() == 201);
    const double rs = rate_mec(kFig3Task);
    for (int c = 0; c + 1 <= 60; ++c) {
      CHECK_THAT(rows[c + 1].rate - rows[c].rate,
                 Catch::Matchers::WithinRel(-rs / 200.0, 1e-9));
    }
    for (int c = 60; c + 2 <= 200; c += 2) {
      CHECK_THAT((rows[c + 2].rate - rows[c].rate) / 2.0,
                 Catch::Matchers::WithinRel(-rs / (2.0 * 200.0), 1e-9));
    }
  }

  SECTION("rate is non-increasing in cache and energy") {
    SweepAxes axes;
    for (int c = 0; c <= 40; ++c) axes.cache_fraction.push_back(c / 40.0);
    for (int e = 0; e <= 10; ++e) axes.energy_fraction.push_back(e / 10.0);
    const auto rows = sweep(base, axes);
    REQUIRE(rows.size() == 41 * 11);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i % 11 != 10) CHECK(rows[i + 1].rate <= rows[i].rate + 1e-6);   // energy step
      if (i + 11 < rows.size()) CHECK(rows[i + 11].rate <= rows[i].rate + 1e-6);  // cache step
    }
  }

  SECTION("frequency axis dips at the optimal frequency") {
    HomogeneousInstance nocache(kFig3Task, 60000, 0,
                                device_with_cap(kFig3Task, 60000, 18000, 1.2 * f_cross));
    SweepAxes axes;
    const int points = 400;
    for (int g = 0; g <= points; ++g)
      axes.cpu_freq.push_back(f_cross + 3.0 * f_cross * g / points);
    const auto rows = sweep(nocache, axes);
    std::size_t argmin = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i].rate < rows[argmin].rate) argmin = i;
    CHECK(argmin > 0);
    CHECK(argmin < rows.size() - 1);
    CHECK(std::abs(axes.cpu_freq[argmin] - optimal_frequency(kFig3Task)) <
          0.05 * f_cross);
  }

  SECTION("errors land in the status column") {
    SweepAxes axes;
    axes.cache_fraction = {0.5};  // forces local projections at the optimum
    axes.energy_fraction = {0.5};
    axes.cpu_freq = {0.5 * kFig3Task.cycles() / kFig3Task.deadline()};  // infeasible compute
    const auto rows = sweep(base, axes);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].status != "ok");
  }
}

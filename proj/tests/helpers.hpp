#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "vr3c/homogeneous.hpp"
#include "vr3c/lp.hpp"
#include "vr3c/model.hpp"
#include "vr3c/rng.hpp"

// Shared generators and independent oracles for the test suites. Everything
// here must stay independent of the implementation paths it checks: the LP
// oracle enumerates active sets and solves dense linear systems on its own.

namespace testutil {

inline vr3c::ProjectionTask random_task(vr3c::CounterRng& rng, double alpha) {
  const double d_in = rng.uniform(1e6, 30e6);
  const double w = rng.uniform(5.0, 20.0);
  const double tau = rng.uniform(0.01, 0.05);
  return vr3c::ProjectionTask(d_in, alpha * d_in, w, tau);
}

struct HomogeneousDraw {
  vr3c::homogeneous::HomogeneousInstance inst;
  std::int64_t cap;
};

// Random homogeneous instance with alpha in {2,3}, f_V on either side of the
// crossover (but always compute-feasible), cap <= N, and C built as
// c_I* + alpha*k so that alpha divides C - c_I* at the optimum. Stays inside
// the design envelope C/alpha + cap <= N.
inline HomogeneousDraw random_divisible_instance(vr3c::CounterRng& rng) {
  const std::int64_t alpha_i = rng.uniform_int(2) == 0 ? 2 : 3;
  const double alpha = static_cast<double>(alpha_i);
  const std::int64_t n = 2 + static_cast<std::int64_t>(rng.uniform_int(199));
  const vr3c::ProjectionTask task = random_task(rng, alpha);
  const double f_cross = vr3c::crossover_frequency(task);
  // Local compute becomes infeasible below F*(alpha-1)/alpha; stay above it.
  const double mult = rng.uniform_int(2) == 0 ? rng.uniform(0.75, 0.95) : rng.uniform(1.05, 3.0);
  const double fv = mult * f_cross;

  const auto cap = static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(n) + 1));
  // Keep C/alpha + cap <= N so the draw stays inside the design envelope.
  const std::int64_t ci_max = std::min(cap, alpha_i * (n - cap));
  const auto ci =
      static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(ci_max) + 1));
  const std::int64_t headroom = std::max<std::int64_t>(0, (n - cap - ci) / alpha_i);
  const auto k3d = static_cast<std::int64_t>(
      rng.uniform_int(static_cast<std::uint64_t>(headroom) + 1));
  std::int64_t c_units = ci + alpha_i * k3d;
  std::int64_t cap_target = cap;
  if (std::min(c_units, cap_target) != ci) cap_target = ci;  // keep c_I* = ci

  const double k_eff = 1e-27;
  const double per_projection = k_eff * fv * fv * task.cycles();
  const double energy =
      static_cast<double>(cap_target) * per_projection / static_cast<double>(n);
  vr3c::DeviceCapability dev(0.0, energy, fv, k_eff);
  return {vr3c::homogeneous::HomogeneousInstance(task, n, c_units, dev), cap_target};
}

// ---------------------------------------------------------------------------
// Vertex-enumeration LP oracle: minimize c'x over {Ax <= b, Ex = f, 0<=x<=1}
// by trying every active set (all equalities + a subset of inequalities and
// bounds), solving the square system, and keeping the best feasible point.

namespace detail {

// Dense Gaussian elimination with partial pivoting; nullopt when singular.
inline std::optional<std::vector<double>> solve_square(std::vector<double> a,
                                                       std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (std::abs(a[piv * n + c]) < 1e-11) return std::nullopt;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[piv * n + j], a[c * n + j]);
      std::swap(b[piv], b[c]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r * n + c] / a[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = 0; c < n; ++c) b[c] /= a[c * n + c];
  return b;
}

}  // namespace detail

struct VertexOracleResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> x;
};

inline VertexOracleResult vertex_enumeration_oracle(const vr3c::lp::LinearProgram& p) {
  const std::size_t n = p.num_vars;
  // Candidate active constraints: each inequality row, and each bound (lower
  // and upper per variable). Equalities are always active.
  struct Constraint {
    std::vector<double> row;
    double rhs;
  };
  std::vector<Constraint> optional_active;
  for (std::size_t r = 0; r < p.ineq_rows.size(); ++r)
    optional_active.push_back({p.ineq_rows[r], p.ineq_rhs[r]});
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> lo(n, 0.0), hi(n, 0.0);
    lo[j] = 1.0;
    hi[j] = 1.0;
    optional_active.push_back({lo, 0.0});
    optional_active.push_back({hi, 1.0});
  }

  const std::size_t need = n - std::min(n, p.eq_rows.size());
  VertexOracleResult best;

  std::vector<std::size_t> pick;
  const auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j)
      if (x[j] < -1e-7 || x[j] > 1.0 + 1e-7) return false;
    for (std::size_t r = 0; r < p.ineq_rows.size(); ++r) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += p.ineq_rows[r][j] * x[j];
      if (s > p.ineq_rhs[r] + 1e-7 * std::max(1.0, std::abs(p.ineq_rhs[r]))) return false;
    }
    for (std::size_t r = 0; r < p.eq_rows.size(); ++r) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += p.eq_rows[r][j] * x[j];
      if (std::abs(s - p.eq_rhs[r]) > 1e-7 * std::max(1.0, std::abs(p.eq_rhs[r]))) return false;
    }
    return true;
  };

  const auto try_active_set = [&]() {
    std::vector<double> a;
    std::vector<double> b;
    a.reserve(n * n);
    for (const auto& e : p.eq_rows) a.insert(a.end(), e.begin(), e.end());
    for (double v : p.eq_rhs) b.push_back(v);
    for (std::size_t idx : pick) {
      a.insert(a.end(), optional_active[idx].row.begin(), optional_active[idx].row.end());
      b.push_back(optional_active[idx].rhs);
    }
    if (b.size() != n) return;
    auto x = detail::solve_square(std::move(a), std::move(b));
    if (!x || !feasible(*x)) return;
    double obj = 0;
    for (std::size_t j = 0; j < n; ++j) obj += p.costs[j] * (*x)[j];
    if (!best.feasible || obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.x = *x;
    }
  };

  const auto recurse = [&](auto&& self, std::size_t start, std::size_t left) -> void {
    if (left == 0) {
      try_active_set();
      return;
    }
    for (std::size_t i = start; i + left <= optional_active.size(); ++i) {
      pick.push_back(i);
      self(self, i + 1, left - 1);
      pick.pop_back();
    }
  };
  recurse(recurse, 0, need);
  return best;
}

// Random box LP with nonnegative inequality budgets, for oracle comparison.
inline vr3c::lp::LinearProgram random_lp(vr3c::CounterRng& rng, std::size_t max_vars = 6) {
  vr3c::lp::LinearProgram p;
  p.num_vars = 2 + rng.uniform_int(max_vars - 1);
  for (std::size_t j = 0; j < p.num_vars; ++j) p.costs.push_back(rng.uniform(-1.0, 1.0));
  const std::size_t mi = rng.uniform_int(3);
  for (std::size_t r = 0; r < mi; ++r) {
    std::vector<double> row;
    for (std::size_t j = 0; j < p.num_vars; ++j) row.push_back(rng.uniform(0.0, 1.0));
    p.ineq_rows.push_back(std::move(row));
    p.ineq_rhs.push_back(rng.uniform(0.0, static_cast<double>(p.num_vars) * 0.6));
  }
  const std::size_t me = rng.uniform_int(std::min<std::size_t>(3, p.num_vars));
  for (std::size_t r = 0; r < me; ++r) {
    std::vector<double> row;
    double hi = 0.0;
    for (std::size_t j = 0; j < p.num_vars; ++j) {
      row.push_back(rng.uniform(0.0, 1.0));
      hi += std::max(0.0, row.back());
    }
    p.eq_rows.push_back(std::move(row));
    // Right-hand side inside [0, row sum] so feasibility is common but not
    // guaranteed.
    p.eq_rhs.push_back(rng.uniform(0.0, hi * 1.1));
  }
  return p;
}

}  // namespace testutil

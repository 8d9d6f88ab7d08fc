#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "vr3c/errors.hpp"

// Dense bounded-variable primal simplex for the CCCP subproblems: minimize
// c'x over { Ax <= b, Ex = f, 0 <= x <= 1 }. Variables carry their [0,1]
// bounds natively (nonbasic variables rest at either bound), so the problem
// keeps its natural size: one column per variable plus one slack per
// inequality row. Bland's rule guarantees termination under degeneracy, with
// an iteration cap as the numerical backstop.

namespace vr3c::lp {

struct LinearProgram {
  std::size_t num_vars = 0;                    // structural variables, box [0,1]
  std::vector<double> costs;                   // length num_vars
  std::vector<std::vector<double>> ineq_rows;  // a.x <= ineq_rhs, rhs >= 0
  std::vector<double> ineq_rhs;
  std::vector<std::vector<double>> eq_rows;    // e.x == eq_rhs
  std::vector<double> eq_rhs;

  void check_shape() const {
    if (costs.size() != num_vars) throw ShapeMismatch("costs length != num_vars");
    if (ineq_rows.size() != ineq_rhs.size()) throw ShapeMismatch("ineq rows/rhs mismatch");
    if (eq_rows.size() != eq_rhs.size()) throw ShapeMismatch("eq rows/rhs mismatch");
    for (const auto& r : ineq_rows)
      if (r.size() != num_vars) throw ShapeMismatch("ineq row length != num_vars");
    for (const auto& r : eq_rows)
      if (r.size() != num_vars) throw ShapeMismatch("eq row length != num_vars");
    for (double v : ineq_rhs) {
      if (!std::isfinite(v)) throw ShapeMismatch("ineq rhs must be finite");
      if (v < 0) throw ShapeMismatch("inequality budgets must be nonnegative");
    }
    for (double v : eq_rhs)
      if (!std::isfinite(v)) throw ShapeMismatch("eq rhs must be finite");
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;              // structural variables only
  double objective = 0.0;
  std::vector<double> dual_rows;      // row multipliers, ineq rows then eq rows
  std::vector<double> reduced_costs;  // structural reduced costs at the optimum
  double dual_objective = 0.0;
  // |primal - dual| / max(1, |primal|, |dual|).
  double duality_gap = 0.0;
  int iterations = 0;
};

// Simplex workspace over one constraint structure. The first solve runs
// phase 1 from scratch; later solves with fresh costs reuse the final basis,
// which stays feasible because the polytope is unchanged.
class SimplexSolver {
 public:
  explicit SimplexSolver(LinearProgram program, double tol = 1e-9)
      : lp_(std::move(program)), tol_(tol) {
    lp_.check_shape();
    build();
  }

  const LinearProgram& program() const { return lp_; }

  LpSolution solve() { return solve(lp_.costs); }

  LpSolution solve(const std::vector<double>& costs) {
    if (costs.size() != lp_.num_vars) throw ShapeMismatch("cost vector length != num_vars");
    if (!basis_valid_) {
      if (!phase1()) {
        LpSolution sol;
        sol.status = LpStatus::Infeasible;
        return sol;
      }
    } else {
      refactor();  // wash out drift accumulated by earlier pivot sequences
    }
    return phase2(costs);
  }

  // Plain-text dump of the working tableau, for chasing degenerate pivots.
  void dump_tableau(std::ostream& os) const {
    os << "m=" << m_ << " cols=" << cols_ << "\nbasis:";
    for (std::size_t r = 0; r < m_; ++r) os << ' ' << basis_[r];
    os << "\nstate:";
    for (std::size_t j = 0; j < cols_; ++j)
      os << (state_[j] == VarState::Basic ? " B" : state_[j] == VarState::AtLower ? " L" : " U");
    os << '\n';
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t j = 0; j < cols_; ++j) os << tab_[r * cols_ + j] << ' ';
      os << "| " << beta_[r] << '\n';
    }
  }

 private:
  enum class VarState : std::uint8_t { AtLower, AtUpper, Basic };

  static constexpr double kInf = std::numeric_limits<double>::infinity();

  LinearProgram lp_;
  double tol_;

  std::size_t m_ = 0;     // rows
  std::size_t n_ = 0;     // structural columns
  std::size_t cols_ = 0;  // structural + slack + artificial columns
  std::size_t slack0_ = 0;
  std::size_t art0_ = 0;

  // Working system: equality rows are sign-flipped so every artificial enters
  // with +1 and a nonnegative right-hand side.
  std::vector<double> work_;  // m_ x cols_
  std::vector<double> work_rhs_;
  std::vector<double> lower_, upper_;

  std::vector<double> tab_;   // current B^-1 * work_, m_ x cols_
  std::vector<double> beta_;  // current basic-variable values
  std::vector<std::size_t> basis_;
  std::vector<VarState> state_;
  bool basis_valid_ = false;
  int pivots_since_refactor_ = 0;

  double* row(std::size_t r) { return tab_.data() + r * cols_; }
  const double* row(std::size_t r) const { return tab_.data() + r * cols_; }

  void build() {
    const std::size_t mi = lp_.ineq_rows.size();
    const std::size_t me = lp_.eq_rows.size();
    m_ = mi + me;
    n_ = lp_.num_vars;
    slack0_ = n_;
    art0_ = n_ + mi;
    cols_ = n_ + mi + me;

    work_.assign(m_ * cols_, 0.0);
    work_rhs_.resize(m_);
    lower_.assign(cols_, 0.0);
    upper_.assign(cols_, 1.0);
    for (std::size_t j = n_; j < cols_; ++j) upper_[j] = kInf;

    for (std::size_t r = 0; r < mi; ++r) {
      std::copy(lp_.ineq_rows[r].begin(), lp_.ineq_rows[r].end(), work_.begin() + r * cols_);
      work_[r * cols_ + slack0_ + r] = 1.0;
      work_rhs_[r] = lp_.ineq_rhs[r];
    }
    for (std::size_t r = 0; r < me; ++r) {
      const std::size_t rr = mi + r;
      const double sign = lp_.eq_rhs[r] >= 0 ? 1.0 : -1.0;
      for (std::size_t j = 0; j < n_; ++j) work_[rr * cols_ + j] = sign * lp_.eq_rows[r][j];
      work_[rr * cols_ + art0_ + r] = 1.0;
      work_rhs_[rr] = sign * lp_.eq_rhs[r];
    }
  }

  // Trivial basis: slacks on inequality rows, artificials on equality rows,
  // every structural at its lower bound.
  void reset_basis() {
    const std::size_t mi = lp_.ineq_rows.size();
    tab_ = work_;
    beta_ = work_rhs_;
    basis_.resize(m_);
    state_.assign(cols_, VarState::AtLower);
    for (std::size_t r = 0; r < mi; ++r) basis_[r] = slack0_ + r;
    for (std::size_t r = mi; r < m_; ++r) basis_[r] = art0_ + (r - mi);
    for (std::size_t r = 0; r < m_; ++r) state_[basis_[r]] = VarState::Basic;
    pivots_since_refactor_ = 0;
  }

  // Rebuild tab_ and beta_ from the untouched working matrix and the current
  // basis: Gauss-Jordan on [B | work_ | rhs_eff], pivot row moved into the
  // basis position so basis_[r] stays row r's variable.
  void refactor() {
    std::vector<double> B(m_ * m_);
    for (std::size_t r = 0; r < m_; ++r)
      for (std::size_t c = 0; c < m_; ++c) B[r * m_ + c] = work_[r * cols_ + basis_[c]];

    std::vector<double> rhs(work_rhs_);
    for (std::size_t j = 0; j < cols_; ++j) {
      if (state_[j] != VarState::AtUpper || upper_[j] == 0.0) continue;
      for (std::size_t r = 0; r < m_; ++r) rhs[r] -= work_[r * cols_ + j] * upper_[j];
    }

    tab_ = work_;
    beta_ = std::move(rhs);
    for (std::size_t c = 0; c < m_; ++c) {
      // Partial pivoting over the rows not yet assigned.
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < m_; ++r)
        if (std::abs(B[r * m_ + c]) > std::abs(B[piv * m_ + c])) piv = r;
      if (std::abs(B[piv * m_ + c]) < 1e-12) {
        throw NumericalBreakdown("singular basis during refactorization");
      }
      if (piv != c) {
        for (std::size_t j = 0; j < m_; ++j) std::swap(B[piv * m_ + j], B[c * m_ + j]);
        for (std::size_t j = 0; j < cols_; ++j)
          std::swap(tab_[piv * cols_ + j], tab_[c * cols_ + j]);
        std::swap(beta_[piv], beta_[c]);
      }
      const double inv = 1.0 / B[c * m_ + c];
      for (std::size_t j = 0; j < m_; ++j) B[c * m_ + j] *= inv;
      for (std::size_t j = 0; j < cols_; ++j) tab_[c * cols_ + j] *= inv;
      beta_[c] *= inv;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double factor = B[r * m_ + c];
        if (factor == 0.0) continue;
        for (std::size_t j = 0; j < m_; ++j) B[r * m_ + j] -= factor * B[c * m_ + j];
        for (std::size_t j = 0; j < cols_; ++j)
          tab_[r * cols_ + j] -= factor * tab_[c * cols_ + j];
        beta_[r] -= factor * beta_[c];
      }
    }
    pivots_since_refactor_ = 0;
  }

  std::vector<double> reduced_costs(const std::vector<double>& cost_full) const {
    // d = c - c_B * tab_ (tab_ holds B^-1 * work_).
    std::vector<double> d(cost_full);
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost_full[basis_[r]];
      if (cb == 0.0) continue;
      const double* tr = row(r);
      for (std::size_t j = 0; j < cols_; ++j) d[j] -= cb * tr[j];
    }
    for (std::size_t r = 0; r < m_; ++r) d[basis_[r]] = 0.0;
    return d;
  }

  struct StepResult {
    bool moved = false;
    bool unbounded = false;
  };

  // One simplex step under Bland's rule. `frozen` marks columns barred from
  // entering (phase-2 artificials).
  StepResult pivot_step(std::vector<double>& d, const std::vector<bool>& frozen) {
    // Entering variable: smallest-index improving nonbasic column.
    std::size_t q = cols_;
    int dir = 0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (state_[j] == VarState::Basic || frozen[j]) continue;
      if (state_[j] == VarState::AtLower && d[j] < -tol_) {
        q = j;
        dir = +1;
        break;
      }
      if (state_[j] == VarState::AtUpper && d[j] > tol_) {
        q = j;
        dir = -1;
        break;
      }
    }
    if (q == cols_) return {};  // priced out: optimal for these costs

    // Ratio test: x_q moves until a basic variable hits a bound or x_q
    // reaches its own opposite bound. Ties go to the smallest leaving index.
    double t_max = upper_[q] - lower_[q];
    std::size_t leave_row = m_;
    int leave_to_upper = 0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double phi = dir * row(r)[q];
      double t;
      int to_upper;
      if (phi > 1e-11) {
        t = (beta_[r] - lower_[basis_[r]]) / phi;
        to_upper = 0;
      } else if (phi < -1e-11) {
        if (upper_[basis_[r]] == kInf) continue;
        t = (upper_[basis_[r]] - beta_[r]) / (-phi);
        to_upper = 1;
      } else {
        continue;
      }
      if (t < 0.0) t = 0.0;  // roundoff pushed a basic value past its bound
      if (t < t_max - 1e-13 ||
          (t <= t_max + 1e-13 && leave_row != m_ && basis_[r] < basis_[leave_row])) {
        t_max = std::min(t, t_max);
        leave_row = r;
        leave_to_upper = to_upper;
      }
    }

    if (t_max == kInf) return {.moved = false, .unbounded = true};

    if (t_max != 0.0) {
      for (std::size_t r = 0; r < m_; ++r) beta_[r] -= dir * t_max * row(r)[q];
    }

    if (leave_row == m_) {
      // Bound flip: x_q runs to its other bound, basis unchanged.
      state_[q] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
      return {.moved = true};
    }

    // Pivot: q enters on leave_row, the old basic leaves to the bound it hit.
    const std::size_t p = basis_[leave_row];
    const double x_q = (dir > 0 ? lower_[q] : upper_[q]) + dir * t_max;
    state_[p] = leave_to_upper ? VarState::AtUpper : VarState::AtLower;
    state_[q] = VarState::Basic;
    basis_[leave_row] = q;
    beta_[leave_row] = x_q;

    double* pr = row(leave_row);
    const double inv = 1.0 / pr[q];
    for (std::size_t j = 0; j < cols_; ++j) pr[j] *= inv;
    pr[q] = 1.0;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == leave_row) continue;
      double* rr = row(r);
      const double factor = rr[q];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) rr[j] -= factor * pr[j];
      rr[q] = 0.0;
    }
    const double dq = d[q];
    if (dq != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) d[j] -= dq * pr[j];
      d[q] = 0.0;
    }
    ++pivots_since_refactor_;
    return {.moved = true};
  }

  int iteration_cap() const { return static_cast<int>(50 * (cols_ + m_)); }

  // Runs pivots to optimality. Returns iterations used, or -(used+1) when the
  // entering column was unbounded. Long pivot sequences are interrupted by a
  // refactorization to keep the tableau near machine precision.
  int iterate(const std::vector<double>& cost_full, std::vector<double>& d,
              const std::vector<bool>& frozen) {
    const int cap = iteration_cap();
    int used = 0;
    while (true) {
      if (used > cap) {
        throw NumericalBreakdown("simplex exceeded its cap of " + std::to_string(cap) +
                                 " pivots");
      }
      if (pivots_since_refactor_ >= 512) {
        refactor();
        d = reduced_costs(cost_full);
      }
      const StepResult res = pivot_step(d, frozen);
      if (res.unbounded) return -(used + 1);
      if (!res.moved) return used;
      ++used;
    }
  }

  bool phase1() {
    reset_basis();
    const std::size_t me = lp_.eq_rows.size();
    if (me > 0) {
      std::vector<double> cost(cols_, 0.0);
      for (std::size_t j = art0_; j < cols_; ++j) cost[j] = 1.0;
      std::vector<double> d = reduced_costs(cost);
      std::vector<bool> frozen(cols_, false);
      if (iterate(cost, d, frozen) < 0) {
        throw NumericalBreakdown("phase 1 reported unbounded; basis lost validity");
      }
      double infeas = 0.0;
      for (std::size_t r = 0; r < m_; ++r)
        if (basis_[r] >= art0_) infeas += beta_[r];
      if (infeas > tol_ * std::max<double>(1.0, static_cast<double>(m_))) {
        basis_valid_ = false;
        return false;
      }
    }
    // Lock artificials at zero. A basic artificial pinned to [0,0] forces a
    // degenerate pivot the moment any move would disturb it.
    for (std::size_t j = art0_; j < cols_; ++j) upper_[j] = 0.0;
    basis_valid_ = true;
    return true;
  }

  LpSolution phase2(const std::vector<double>& costs) {
    // Normalize costs so the pricing tolerance is scale-free.
    double scale = 0.0;
    for (double c : costs) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) scale = 1.0;

    std::vector<double> cost(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost[j] = costs[j] / scale;

    std::vector<bool> frozen(cols_, false);
    for (std::size_t j = art0_; j < cols_; ++j) frozen[j] = true;

    std::vector<double> d = reduced_costs(cost);
    const int iters = iterate(cost, d, frozen);
    if (iters < 0) {
      basis_valid_ = false;
      LpSolution sol;
      sol.status = LpStatus::Unbounded;
      sol.iterations = -iters - 1;
      return sol;
    }

    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.iterations = iters;
    sol.x.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (state_[j] == VarState::AtUpper) sol.x[j] = upper_[j];
    }
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) sol.x[basis_[r]] = beta_[r];
    }
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) sol.objective += costs[j] * sol.x[j];

    // Row duals read off the witness columns: the slack of inequality row r
    // (or the artificial of an equality row, modulo the build-time sign flip)
    // entered the working system as +e_r, so its reduced cost is -y_r.
    const std::size_t mi = lp_.ineq_rows.size();
    sol.dual_rows.resize(m_);
    for (std::size_t r = 0; r < mi; ++r) sol.dual_rows[r] = -d[slack0_ + r] * scale;
    for (std::size_t r = mi; r < m_; ++r) {
      const double sign = lp_.eq_rhs[r - mi] >= 0 ? 1.0 : -1.0;
      sol.dual_rows[r] = -sign * d[art0_ + (r - mi)] * scale;
    }
    sol.reduced_costs.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) sol.reduced_costs[j] = d[j] * scale;

    // Dual objective: y'b plus the bound terms of variables pinned at 1.
    double dual = 0.0;
    for (std::size_t r = 0; r < mi; ++r) dual += sol.dual_rows[r] * lp_.ineq_rhs[r];
    for (std::size_t r = 0; r < lp_.eq_rows.size(); ++r)
      dual += sol.dual_rows[mi + r] * lp_.eq_rhs[r];
    for (std::size_t j = 0; j < n_; ++j) {
      if (state_[j] == VarState::AtUpper) dual += sol.reduced_costs[j] * upper_[j];
    }
    sol.dual_objective = dual;
    sol.duality_gap = std::abs(sol.objective - dual) /
                      std::max({1.0, std::abs(sol.objective), std::abs(dual)});
    return sol;
  }
};

// One-shot solve on a fresh workspace.
inline LpSolution solve_lp(const LinearProgram& program, double tol = 1e-9) {
  SimplexSolver solver(program, tol);
  return solver.solve();
}

}  // namespace vr3c::lp

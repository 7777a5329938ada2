#pragma once

// Shared helpers for the test suites: seeded generators for random LPs and
// random multistage programs, plus the independent oracles the tests check
// the library against (basis enumeration for the simplex kernel, a
// scenario-variable deterministic equivalent for the tree compiler, and a
// subtree value oracle for recourse functions).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "cutplane/engine.hpp"
#include "cutplane/lp.hpp"
#include "cutplane/program.hpp"
#include "cutplane/rng.hpp"

namespace testsupport {

using cutplane::LinearProgram;
using cutplane::Matrix;
using cutplane::RowKind;
using cutplane::Scenario;
using cutplane::SplitMix64;
using cutplane::StageRealization;
using cutplane::StochasticProgram;
using cutplane::Vector;

// Random LP with a bounded feasible region: box rows keep every variable
// below a random cap, extra random <= and = rows cut the box. Feasibility
// is not guaranteed (callers exercise Infeasible too).
inline LinearProgram random_lp(SplitMix64& rng, int num_vars, int num_eq,
                               int num_ineq, bool with_free_vars = false) {
  LinearProgram lp;
  lp.objective = Vector::Zero(num_vars);
  for (int i = 0; i < num_vars; ++i) lp.objective(i) = 2.0 * rng.next_double() - 1.0;

  const int box_rows = num_vars;
  lp.ineq_lhs = Matrix::Zero(box_rows + num_ineq, num_vars);
  lp.ineq_rhs = Vector::Zero(box_rows + num_ineq);
  for (int i = 0; i < num_vars; ++i) {
    lp.ineq_lhs(i, i) = 1.0;
    lp.ineq_rhs(i) = 1.0 + 4.0 * rng.next_double();
  }
  for (int r = 0; r < num_ineq; ++r) {
    for (int i = 0; i < num_vars; ++i)
      lp.ineq_lhs(box_rows + r, i) = 2.0 * rng.next_double() - 1.0;
    lp.ineq_rhs(box_rows + r) = 2.0 * rng.next_double();
  }
  lp.eq_lhs = Matrix::Zero(num_eq, num_vars);
  lp.eq_rhs = Vector::Zero(num_eq);
  for (int r = 0; r < num_eq; ++r) {
    double row_sum = 0.0;
    for (int i = 0; i < num_vars; ++i) {
      lp.eq_lhs(r, i) = rng.next_double();
      row_sum += lp.eq_lhs(r, i);
    }
    // rhs reachable from the box interior, so equality rows rarely cut
    // feasibility away entirely
    lp.eq_rhs(r) = 0.3 * row_sum;
  }
  if (with_free_vars) {
    lp.free_vars.assign(static_cast<std::size_t>(num_vars), 0);
    for (int i = 0; i < num_vars; ++i)
      if (rng.next_double() < 0.3) {
        lp.free_vars[static_cast<std::size_t>(i)] = 1;
        // keep boundedness: add a lower box row -x_i <= cap
      }
    // bound free vars from below too
    int n_free = 0;
    for (char f : lp.free_vars) n_free += (f != 0);
    if (n_free > 0) {
      Matrix extra = Matrix::Zero(lp.ineq_lhs.rows() + n_free, num_vars);
      Vector extra_rhs = Vector::Zero(lp.ineq_rhs.size() + n_free);
      extra.topRows(lp.ineq_lhs.rows()) = lp.ineq_lhs;
      extra_rhs.head(lp.ineq_rhs.size()) = lp.ineq_rhs;
      int row = static_cast<int>(lp.ineq_lhs.rows());
      for (int i = 0; i < num_vars; ++i)
        if (lp.free_vars[static_cast<std::size_t>(i)]) {
          extra(row, i) = -1.0;
          extra_rhs(row) = 1.0 + 4.0 * rng.next_double();
          ++row;
        }
      lp.ineq_lhs = std::move(extra);
      lp.ineq_rhs = std::move(extra_rhs);
    }
  }
  return lp;
}

// Brute-force optimum by enumerating every basis of the standard form:
// for each row-count subset of columns, solve B x_B = b and keep feasible
// points. Returns nullopt when no feasible basic point exists. Only for
// desk-size LPs.
inline std::optional<double> enumerate_vertex_optimum(const LinearProgram& lp) {
  const cutplane::StandardForm sf = cutplane::to_standard_form(lp);
  const int m = sf.rows();
  const int n = sf.cols();
  if (m == 0) {
    double v = 0.0;  // x = 0 is the only vertex
    return v;
  }
  std::vector<int> pick(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) pick[static_cast<std::size_t>(i)] = i;
  std::optional<double> best;
  while (true) {
    Matrix basis(m, m);
    for (int k = 0; k < m; ++k)
      basis.col(k) = sf.lhs.col(pick[static_cast<std::size_t>(k)]);
    Eigen::FullPivLU<Matrix> lu(basis);
    if (lu.isInvertible()) {
      Vector xb = lu.solve(sf.rhs);
      if ((basis * xb - sf.rhs).lpNorm<Eigen::Infinity>() <= 1e-7 &&
          xb.minCoeff() >= -1e-9) {
        double value = 0.0;
        for (int k = 0; k < m; ++k)
          value += sf.cost(pick[static_cast<std::size_t>(k)]) * xb(k);
        if (!best || value < *best) best = value;
      }
    }
    // next combination
    int pos = m - 1;
    while (pos >= 0 && pick[static_cast<std::size_t>(pos)] == n - m + pos) --pos;
    if (pos < 0) break;
    ++pick[static_cast<std::size_t>(pos)];
    for (int k = pos + 1; k < m; ++k)
      pick[static_cast<std::size_t>(k)] = pick[static_cast<std::size_t>(k - 1)] + 1;
  }
  return best;
}

// Random multistage program with relatively complete recourse by
// construction: x = 0 is feasible for every realization whatever the
// previous decision (coupling enters only through nonnegative carry-over
// coefficients on <= rows), and box rows bound every stage.
inline StochasticProgram random_program(SplitMix64& rng, int num_stages,
                                        int num_realizations, int dim) {
  StochasticProgram p;
  p.num_stages = num_stages;
  p.initial_state = Vector::Zero(dim);
  for (int i = 0; i < dim; ++i) p.initial_state(i) = rng.next_double();

  for (int t = 1; t <= num_stages; ++t) {
    const int count = t == 1 ? 1 : num_realizations;
    std::vector<StageRealization> reals;
    // share probabilities that sum to one
    Vector probs = Vector::Zero(count);
    double total = 0.0;
    for (int j = 0; j < count; ++j) {
      probs(j) = 0.2 + rng.next_double();
      total += probs(j);
    }
    probs /= total;
    for (int j = 0; j < count; ++j) {
      StageRealization r;
      r.probability = probs(j);
      r.cost = Vector::Zero(dim);
      for (int i = 0; i < dim; ++i) r.cost(i) = 2.0 * rng.next_double() - 1.0;
      const int rows = dim + 1;  // box rows + one coupled budget row
      r.A = Matrix::Zero(rows, dim);
      r.B = Matrix::Zero(rows, dim);
      r.rhs = Vector::Zero(rows);
      r.row_kinds.assign(static_cast<std::size_t>(rows), RowKind::LessEq);
      for (int i = 0; i < dim; ++i) {
        r.A(i, i) = 1.0;
        r.rhs(i) = 0.5 + rng.next_double();
      }
      for (int i = 0; i < dim; ++i) {
        r.A(dim, i) = 0.2 + rng.next_double();
        r.B(dim, i) = -rng.next_double();  // larger previous state relaxes the row
      }
      r.rhs(dim) = 0.5 + rng.next_double();
      reals.push_back(std::move(r));
    }
    p.stages.push_back(std::move(reals));
  }

  // Valid floors: stage costs are bounded below by the most negative cost
  // over the box, accumulated over the remaining stages.
  p.recourse_lower_bounds = Vector::Zero(std::max(0, num_stages - 1));
  double tail = 0.0;
  for (int t = num_stages; t >= 2; --t) {
    double worst = 0.0;
    for (const StageRealization& r : p.stages[static_cast<std::size_t>(t - 1)]) {
      double stage_worst = 0.0;
      for (int i = 0; i < dim; ++i)
        stage_worst += std::min(0.0, r.cost(i)) * r.rhs(i);
      worst = std::min(worst, stage_worst);
    }
    tail += worst;
    p.recourse_lower_bounds(t - 2) = tail;
  }
  return p;
}

// Independent deterministic-equivalent construction: one variable block
// per (scenario, stage) with explicit nonanticipativity rows gluing blocks
// that share a history. Algebraically different from the tree compiler.
inline LinearProgram scenario_form_lp(const StochasticProgram& p) {
  const std::vector<Scenario> scenarios = cutplane::enumerate_scenarios(p);
  const int S = static_cast<int>(scenarios.size());
  const int T = p.num_stages;

  std::vector<int> offsets;
  int total = 0;
  for (int s = 0; s < S; ++s)
    for (int t = 1; t <= T; ++t) {
      offsets.push_back(total);
      total += p.stage_dim(t);
    }
  auto offset = [&](int s, int t) {
    return offsets[static_cast<std::size_t>(s * T + (t - 1))];
  };
  auto scenario_prob = [&](const Scenario& sc) {
    double prob = 1.0;
    for (int t = 2; t <= T; ++t)
      prob *= p.realization(t, sc.at_stage(t)).probability;
    return prob;
  };

  int n_eq = 0, n_ineq = 0;
  for (int s = 0; s < S; ++s)
    for (int t = 1; t <= T; ++t) {
      const auto& real =
          p.realization(t, t == 1 ? 0 : scenarios[static_cast<std::size_t>(s)].at_stage(t));
      for (RowKind k : real.row_kinds) (k == RowKind::Equality ? n_eq : n_ineq)++;
    }
  // nonanticipativity: scenario s is glued to the previous scenario when
  // both share realizations up to stage t
  for (int s = 1; s < S; ++s)
    for (int t = 1; t <= T; ++t) {
      bool shared = true;
      for (int u = 2; u <= t; ++u)
        if (scenarios[static_cast<std::size_t>(s)].at_stage(u) !=
            scenarios[static_cast<std::size_t>(s - 1)].at_stage(u)) {
          shared = false;
          break;
        }
      if (shared) n_eq += p.stage_dim(t);
    }

  LinearProgram lp;
  lp.objective = Vector::Zero(total);
  lp.eq_lhs = Matrix::Zero(n_eq, total);
  lp.eq_rhs = Vector::Zero(n_eq);
  lp.ineq_lhs = Matrix::Zero(n_ineq, total);
  lp.ineq_rhs = Vector::Zero(n_ineq);
  lp.free_vars.assign(static_cast<std::size_t>(total), 0);

  int e = 0, q = 0;
  for (int s = 0; s < S; ++s) {
    const Scenario& sc = scenarios[static_cast<std::size_t>(s)];
    const double prob = scenario_prob(sc);
    for (int t = 1; t <= T; ++t) {
      const int j = t == 1 ? 0 : sc.at_stage(t);
      const auto& real = p.realization(t, j);
      const int dim = real.decision_dim();
      lp.objective.segment(offset(s, t), dim) += prob * real.cost;
      if (t == T && p.terminal_cost.size() != 0)
        lp.objective.segment(offset(s, t), dim) += prob * p.terminal_cost;
      if (!real.free_vars.empty())
        for (int i = 0; i < dim; ++i)
          if (real.free_vars[static_cast<std::size_t>(i)])
            lp.free_vars[static_cast<std::size_t>(offset(s, t) + i)] = 1;
      for (int r = 0; r < real.num_rows(); ++r) {
        const bool eq = real.row_kinds[static_cast<std::size_t>(r)] == RowKind::Equality;
        Matrix& lhs = eq ? lp.eq_lhs : lp.ineq_lhs;
        Vector& rhs = eq ? lp.eq_rhs : lp.ineq_rhs;
        const int row = eq ? e++ : q++;
        lhs.row(row).segment(offset(s, t), dim) = real.A.row(r);
        if (t == 1) {
          rhs(row) = real.rhs(r) - real.B.row(r).dot(p.initial_state);
        } else {
          lhs.row(row).segment(offset(s, t - 1), real.prev_dim()) = real.B.row(r);
          rhs(row) = real.rhs(r);
        }
      }
    }
  }
  for (int s = 1; s < S; ++s)
    for (int t = 1; t <= T; ++t) {
      bool shared = true;
      for (int u = 2; u <= t; ++u)
        if (scenarios[static_cast<std::size_t>(s)].at_stage(u) !=
            scenarios[static_cast<std::size_t>(s - 1)].at_stage(u)) {
          shared = false;
          break;
        }
      if (!shared) continue;
      for (int i = 0; i < p.stage_dim(t); ++i) {
        lp.eq_lhs(e, offset(s, t) + i) = 1.0;
        lp.eq_lhs(e, offset(s - 1, t) + i) = -1.0;
        lp.eq_rhs(e) = 0.0;
        ++e;
      }
    }
  return lp;
}

// Exact recourse value Q_t(x_prev, realization j): deterministic
// equivalent of the subtree rooted at (t, j).
inline double recourse_value(const StochasticProgram& p, int t, int j,
                             const Vector& x_prev) {
  StochasticProgram sub;
  sub.num_stages = p.num_stages - t + 1;
  sub.initial_state = x_prev;
  StageRealization root = p.realization(t, j);
  root.probability = 1.0;
  sub.stages.push_back({std::move(root)});
  for (int u = t + 1; u <= p.num_stages; ++u)
    sub.stages.push_back(p.stages[static_cast<std::size_t>(u - 1)]);
  sub.terminal_cost = p.terminal_cost;
  const cutplane::ExtensiveForm ef = cutplane::extensive_form(sub);
  const cutplane::LpSolution sol = cutplane::solve(ef.lp);
  if (sol.status != cutplane::LpStatus::Optimal)
    throw cutplane::Error("recourse oracle: subtree not solvable");
  return sol.objective_value;
}

// Expected recourse at stage t (mixing all realizations).
inline double expected_recourse_value(const StochasticProgram& p, int t,
                                      const Vector& x_prev) {
  double total = 0.0;
  for (int j = 0; j < p.realization_count(t); ++j)
    total += p.realization(t, j).probability * recourse_value(p, t, j, x_prev);
  return total;
}

inline double spearman_correlation(const std::vector<double>& xs,
                                   const std::vector<double>& ys) {
  const int n = static_cast<int>(xs.size());
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return v[static_cast<std::size_t>(a)] < v[static_cast<std::size_t>(b)]; });
    std::vector<double> r(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n; ++pos)
      r[static_cast<std::size_t>(idx[static_cast<std::size_t>(pos)])] = pos;
    return r;
  };
  const std::vector<double> rx = ranks(xs), ry = ranks(ys);
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += rx[static_cast<std::size_t>(i)];
    my += ry[static_cast<std::size_t>(i)];
  }
  mx /= n;
  my /= n;
  double num = 0, dx = 0, dy = 0;
  for (int i = 0; i < n; ++i) {
    const double a = rx[static_cast<std::size_t>(i)] - mx;
    const double b = ry[static_cast<std::size_t>(i)] - my;
    num += a * b;
    dx += a * a;
    dy += b * b;
  }
  if (dx == 0 || dy == 0) return 0.0;
  return num / std::sqrt(dx * dy);
}

// Wilson-Hilferty approximation of the chi-square quantile; good enough
// for goodness-of-fit gates.
inline double chi2_quantile(int df, double p) {
  const double z = cutplane::normal_quantile(p);
  const double a = 2.0 / (9.0 * df);
  const double v = 1.0 - a + z * std::sqrt(a);
  return df * v * v * v;
}

}  // namespace testsupport

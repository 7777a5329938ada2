#include "cutplane/program.hpp"

#include <cmath>
#include <sstream>

namespace cutplane {

namespace {

void add_diag(std::vector<Diagnostic>& out, int stage, int realization,
              const std::string& msg) {
  out.push_back(Diagnostic{msg, stage, realization});
}

// Myopic stage LP: min cost . x_t over X_t(x_prev, realization). No
// recourse term; used only for the H2 spot check below.
LinearProgram myopic_stage_lp(const StageRealization& real, const Vector& x_prev) {
  LinearProgram lp;
  const int n = real.decision_dim();
  lp.objective = real.cost;
  lp.free_vars = real.free_vars;
  const Vector shifted = real.rhs - real.B * x_prev;
  int n_eq = 0, n_ineq = 0;
  for (RowKind k : real.row_kinds) (k == RowKind::Equality ? n_eq : n_ineq)++;
  lp.eq_lhs = Matrix::Zero(n_eq, n);
  lp.eq_rhs = Vector::Zero(n_eq);
  lp.ineq_lhs = Matrix::Zero(n_ineq, n);
  lp.ineq_rhs = Vector::Zero(n_ineq);
  int e = 0, q = 0;
  for (int r = 0; r < real.num_rows(); ++r) {
    if (real.row_kinds[static_cast<std::size_t>(r)] == RowKind::Equality) {
      lp.eq_lhs.row(e) = real.A.row(r);
      lp.eq_rhs(e++) = shifted(r);
    } else {
      lp.ineq_lhs.row(q) = real.A.row(r);
      lp.ineq_rhs(q++) = shifted(r);
    }
  }
  return lp;
}

}  // namespace

std::vector<Diagnostic> validate(const StochasticProgram& program,
                                 int spot_check_scenarios, std::uint64_t seed) {
  std::vector<Diagnostic> out;
  const int T = program.num_stages;
  if (T < 1) {
    add_diag(out, 0, -1, "program must have at least one stage");
    return out;
  }
  if (static_cast<int>(program.stages.size()) != T) {
    std::ostringstream os;
    os << "stage list has " << program.stages.size() << " entries, expected "
       << T;
    add_diag(out, 0, -1, os.str());
    return out;
  }
  if (program.initial_state.size() == 0)
    add_diag(out, 0, -1, "initial state is empty");

  bool structure_ok = true;
  for (int t = 1; t <= T; ++t) {
    const auto& reals = program.stages[static_cast<std::size_t>(t - 1)];
    if (reals.empty()) {
      add_diag(out, t, -1, "stage has no realizations");
      structure_ok = false;
      continue;
    }
    if (t == 1 && reals.size() != 1) {
      std::ostringstream os;
      os << "stage 1 must be deterministic (one realization), found "
         << reals.size();
      add_diag(out, 1, -1, os.str());
    }
    const int dim = reals[0].decision_dim();
    const int prev_dim = program.stage_dim(t - 1);
    double psum = 0.0;
    for (int j = 0; j < static_cast<int>(reals.size()); ++j) {
      const auto& r = reals[static_cast<std::size_t>(j)];
      if (r.decision_dim() != dim)
        add_diag(out, t, j, "decision dimension differs within the stage"),
            structure_ok = false;
      if (r.A.rows() != r.num_rows() || r.B.rows() != r.num_rows())
        add_diag(out, t, j, "A/B/rhs row counts differ"), structure_ok = false;
      if (static_cast<int>(r.A.cols()) != r.decision_dim())
        add_diag(out, t, j, "A column count differs from cost dimension"),
            structure_ok = false;
      if (r.prev_dim() != prev_dim)
        add_diag(out, t, j, "B column count differs from previous stage dimension"),
            structure_ok = false;
      if (static_cast<int>(r.row_kinds.size()) != r.num_rows())
        add_diag(out, t, j, "row_kinds size differs from row count"),
            structure_ok = false;
      if (!r.free_vars.empty() &&
          static_cast<int>(r.free_vars.size()) != r.decision_dim())
        add_diag(out, t, j, "free_vars size differs from decision dimension"),
            structure_ok = false;
      if (!(r.probability > 0.0))
        add_diag(out, t, j, "realization probability must be positive");
      if (!r.A.allFinite() || !r.B.allFinite() || !r.rhs.allFinite() ||
          !r.cost.allFinite())
        add_diag(out, t, j, "non-finite entry in stage data"), structure_ok = false;
      psum += r.probability;
    }
    if (std::fabs(psum - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "probabilities sum to " << psum << " at stage " << t;
      add_diag(out, t, -1, os.str());
    }
  }
  if (program.terminal_cost.size() != 0 && structure_ok &&
      static_cast<int>(program.terminal_cost.size()) != program.stage_dim(T))
    add_diag(out, T, -1, "terminal cost dimension differs from stage-T decision");
  if (program.recourse_lower_bounds.size() != 0 &&
      static_cast<int>(program.recourse_lower_bounds.size()) != T - 1)
    add_diag(out, 0, -1, "recourse_lower_bounds must have one entry per stage 2..T");

  if (!structure_ok || !out.empty()) return out;

  // Relatively-complete-recourse spot check along myopic trajectories.
  SplitMix64 rng = SplitMix64::stream(seed, 71);
  for (int s = 0; s < spot_check_scenarios; ++s) {
    Vector x_prev = program.initial_state;
    for (int t = 1; t <= T; ++t) {
      int j = 0;
      if (t > 1) {
        double u = rng.next_double(), acc = 0.0;
        const auto& reals = program.stages[static_cast<std::size_t>(t - 1)];
        for (int cand = 0; cand < static_cast<int>(reals.size()); ++cand) {
          acc += reals[static_cast<std::size_t>(cand)].probability;
          if (u < acc || cand + 1 == static_cast<int>(reals.size())) {
            j = cand;
            break;
          }
        }
      }
      const auto& real = program.realization(t, j);
      LpSolution sol = solve(myopic_stage_lp(real, x_prev));
      if (sol.status != LpStatus::Optimal) {
        std::ostringstream os;
        os << "recourse spot check: stage " << t << " realization " << j
           << " scenario " << s << " is "
           << (sol.status == LpStatus::Infeasible ? "infeasible" : "unbounded");
        add_diag(out, t, j, os.str());
        break;
      }
      x_prev = sol.primal;
    }
  }
  return out;
}

Scenario sample_scenario(const StochasticProgram& program, SplitMix64& rng) {
  Scenario sc;
  sc.indices.reserve(static_cast<std::size_t>(program.num_stages - 1));
  for (int t = 2; t <= program.num_stages; ++t) {
    const auto& reals = program.stages[static_cast<std::size_t>(t - 1)];
    const double u = rng.next_double();
    double acc = 0.0;
    int pick = static_cast<int>(reals.size()) - 1;
    for (int j = 0; j < static_cast<int>(reals.size()); ++j) {
      acc += reals[static_cast<std::size_t>(j)].probability;
      if (u < acc) {
        pick = j;
        break;
      }
    }
    sc.indices.push_back(pick);
  }
  return sc;
}

std::vector<Scenario> enumerate_scenarios(const StochasticProgram& program) {
  std::vector<Scenario> all;
  Scenario cur;
  cur.indices.assign(static_cast<std::size_t>(program.num_stages - 1), 0);
  while (true) {
    all.push_back(cur);
    int pos = static_cast<int>(cur.indices.size()) - 1;
    while (pos >= 0) {
      const int t = pos + 2;
      if (++cur.indices[static_cast<std::size_t>(pos)] <
          program.realization_count(t))
        break;
      cur.indices[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return all;
}

std::int64_t tree_node_count(const StochasticProgram& program,
                             std::int64_t cap) {
  std::int64_t total = 0, level = 1;
  for (int t = 1; t <= program.num_stages; ++t) {
    if (t > 1) level *= program.realization_count(t);
    total += level;
    if (total > cap) return cap + 1;
  }
  return total;
}

ExtensiveForm extensive_form(const StochasticProgram& program,
                             std::int64_t node_cap) {
  const std::int64_t count = tree_node_count(program, node_cap);
  if (count > node_cap) {
    std::ostringstream os;
    os << "scenario tree exceeds the node cap of " << node_cap;
    throw TreeTooLargeError(os.str());
  }

  ExtensiveForm ef;
  const int T = program.num_stages;
  std::vector<int> level_begin(static_cast<std::size_t>(T) + 1, 0);
  int var_total = 0;
  for (int t = 1; t <= T; ++t) {
    level_begin[static_cast<std::size_t>(t - 1)] =
        static_cast<int>(ef.nodes.size());
    if (t == 1) {
      ef.nodes.push_back(TreeNode{1, 0, -1, 1.0, var_total});
      var_total += program.stage_dim(1);
    } else {
      const int prev_begin = level_begin[static_cast<std::size_t>(t - 2)];
      const int prev_end = level_begin[static_cast<std::size_t>(t - 1)];
      for (int p = prev_begin; p < prev_end; ++p) {
        for (int j = 0; j < program.realization_count(t); ++j) {
          const double prob =
              ef.nodes[static_cast<std::size_t>(p)].probability *
              program.realization(t, j).probability;
          ef.nodes.push_back(TreeNode{t, j, p, prob, var_total});
          var_total += program.stage_dim(t);
        }
      }
    }
  }
  level_begin[static_cast<std::size_t>(T)] = static_cast<int>(ef.nodes.size());

  int n_eq = 0, n_ineq = 0;
  for (const TreeNode& node : ef.nodes) {
    const auto& real = program.realization(node.stage, node.realization);
    for (RowKind k : real.row_kinds) (k == RowKind::Equality ? n_eq : n_ineq)++;
  }

  LinearProgram& lp = ef.lp;
  lp.objective = Vector::Zero(var_total);
  lp.eq_lhs = Matrix::Zero(n_eq, var_total);
  lp.eq_rhs = Vector::Zero(n_eq);
  lp.ineq_lhs = Matrix::Zero(n_ineq, var_total);
  lp.ineq_rhs = Vector::Zero(n_ineq);
  lp.free_vars.assign(static_cast<std::size_t>(var_total), 0);

  int e = 0, q = 0;
  for (const TreeNode& node : ef.nodes) {
    const auto& real = program.realization(node.stage, node.realization);
    const int dim = real.decision_dim();
    lp.objective.segment(node.var_offset, dim) += node.probability * real.cost;
    if (node.stage == T && program.terminal_cost.size() != 0)
      lp.objective.segment(node.var_offset, dim) +=
          node.probability * program.terminal_cost;
    if (!real.free_vars.empty())
      for (int i = 0; i < dim; ++i)
        lp.free_vars[static_cast<std::size_t>(node.var_offset + i)] =
            real.free_vars[static_cast<std::size_t>(i)];

    const TreeNode* parent =
        node.parent >= 0 ? &ef.nodes[static_cast<std::size_t>(node.parent)] : nullptr;
    for (int r = 0; r < real.num_rows(); ++r) {
      const bool eq = real.row_kinds[static_cast<std::size_t>(r)] == RowKind::Equality;
      Matrix& lhs = eq ? lp.eq_lhs : lp.ineq_lhs;
      Vector& rhs = eq ? lp.eq_rhs : lp.ineq_rhs;
      const int row = eq ? e++ : q++;
      lhs.row(row).segment(node.var_offset, dim) = real.A.row(r);
      if (parent != nullptr) {
        lhs.row(row).segment(parent->var_offset, real.prev_dim()) = real.B.row(r);
        rhs(row) = real.rhs(r);
      } else {
        rhs(row) = real.rhs(r) - real.B.row(r).dot(program.initial_state);
      }
    }
  }
  return ef;
}

}  // namespace cutplane

#include "cutplane/engine.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "cutplane/stats.hpp"

namespace cutplane {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTightnessTol = 1e-6;

// Shortest round-trip decimal text for a double; keeps CSV output stable.
std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Runs fn(0..count-1), splitting across `workers` threads when asked.
// Results must be written to index-disjoint slots so the outcome does not
// depend on the worker count. The smallest-index exception wins.
void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  const int n_threads = std::min(workers, count);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n_threads));
  for (int w = 0; w < n_threads; ++w) {
    threads.emplace_back([&, w]() {
      for (int i = w; i < count; i += n_threads) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
}

}  // namespace

void MethodConfig::check_valid() const {
  if (forward_scenarios < 1) throw SpecInvalidError("forward_scenarios must be >= 1");
  if (policy_eval_scenarios < 2)
    throw SpecInvalidError("policy_eval_scenarios must be >= 2");
  if (!(alpha > 0.0 && alpha < 0.5))
    throw SpecInvalidError("alpha must lie in (0, 0.5)");
  if (!(epsilon > 0.0)) throw SpecInvalidError("epsilon must be positive");
  if (epsilon0 < 0.0) throw SpecInvalidError("epsilon0 must be nonnegative");
  if (max_iterations < 0) throw SpecInvalidError("max_iterations must be >= 0");
  if (upper_bound_period < 1) throw SpecInvalidError("upper_bound_period must be >= 1");
  if (workers < 1) throw SpecInvalidError("workers must be >= 1");
  if ((selection == SelectionStrategy::OldestPrefix ||
       selection == SelectionStrategy::NewestSuffix) &&
      selector_window < 1)
    throw SpecInvalidError("selector_window must be >= 1");
}

std::string MethodConfig::method_name() const {
  const bool single = aggregation == Aggregation::SingleCut;
  switch (selection) {
    case SelectionStrategy::KeepAll: return single ? "sddp" : "muda";
    case SelectionStrategy::Level1: return single ? "sddp-cs1" : "cusmuda-cs1";
    case SelectionStrategy::LimitedMemoryLevel1:
      return single ? "sddp-cs2" : "cusmuda-cs2";
    case SelectionStrategy::OldestPrefix:
      return (single ? std::string("sddp-oldest") : std::string("cusmuda-oldest")) +
             std::to_string(selector_window);
    case SelectionStrategy::NewestSuffix:
      return (single ? std::string("sddp-newest") : std::string("cusmuda-newest")) +
             std::to_string(selector_window);
  }
  return "?";
}

Selector MethodConfig::make_selector() const {
  switch (selection) {
    case SelectionStrategy::KeepAll: return Selector::keep_all();
    case SelectionStrategy::Level1: return Selector::level1();
    case SelectionStrategy::LimitedMemoryLevel1: return Selector::lml1();
    case SelectionStrategy::OldestPrefix: return Selector::oldest_prefix(selector_window);
    case SelectionStrategy::NewestSuffix:
      return Selector::newest_suffix_unsafe(selector_window);
  }
  return Selector::keep_all();
}

ApproxRecourse ApproxRecourse::create(const StochasticProgram& program,
                                      const MethodConfig& config) {
  ApproxRecourse approx;
  approx.aggregation = config.aggregation;
  const int T = program.num_stages;
  for (int t = 2; t <= T; ++t) {
    std::vector<CutPool> pools;
    const int state_dim = program.stage_dim(t - 1);
    const int count = config.aggregation == Aggregation::MultiCut
                          ? program.realization_count(t)
                          : 1;
    for (int j = 0; j < count; ++j)
      pools.emplace_back(state_dim, config.make_selector(), config.epsilon0);
    approx.pools_by_stage.push_back(std::move(pools));
    approx.floors.push_back(program.recourse_floor(t));
  }
  return approx;
}

double ApproxRecourse::evaluate_stage(const StochasticProgram& program, int t,
                                      const Vector& x, EvalMode mode) const {
  const double floor = floor_at(t);
  if (aggregation == Aggregation::SingleCut) {
    const CutPool& p = pool(t, 0);
    if (p.cuts().empty()) return floor;
    return std::max(floor, p.evaluate(x, mode));
  }
  double total = 0.0;
  for (int j = 0; j < program.realization_count(t); ++j) {
    const CutPool& p = pool(t, j);
    const double v =
        p.cuts().empty() ? floor : std::max(floor, p.evaluate(x, mode));
    total += program.realization(t, j).probability * v;
  }
  return total;
}

double ApproxRecourse::stage_selected_proportion(int t) const {
  long selected = 0, total = 0;
  for (const CutPool& p :
       pools_by_stage[static_cast<std::size_t>(t - 2)]) {
    const SelectionStats s = p.selection_stats();
    selected += s.num_selected;
    total += s.num_cuts;
  }
  return total == 0 ? 0.0 : static_cast<double>(selected) / static_cast<double>(total);
}

StageLp assemble_stage_lp(const StochasticProgram& program,
                          const ApproxRecourse& approx, int t, int j,
                          const Vector& x_prev, EvalMode mode) {
  const StageRealization& real = program.realization(t, j);
  const int T = program.num_stages;
  const int n = real.decision_dim();
  const bool has_recourse = t < T;
  const int n_epi = !has_recourse ? 0
                    : approx.aggregation == Aggregation::MultiCut
                        ? program.realization_count(t + 1)
                        : 1;

  StageLp slp;
  slp.stage = t;
  slp.realization = j;
  slp.decision_dim = n;
  slp.num_epigraph = n_epi;
  slp.x_prev = x_prev;

  // Count rows: coupling rows split by kind, one floor row per epigraph
  // variable plus its selected (or all) cut rows.
  int n_eq = 0, n_cineq = 0;
  for (RowKind k : real.row_kinds) (k == RowKind::Equality ? n_eq : n_cineq)++;
  int n_cutrows = 0;
  std::vector<std::vector<int>> active(static_cast<std::size_t>(n_epi));
  if (has_recourse) {
    for (int l = 0; l < n_epi; ++l) {
      const CutPool& p = approx.pool(t + 1, l);
      auto& list = active[static_cast<std::size_t>(l)];
      for (int c = 0; c < static_cast<int>(p.cuts().size()); ++c)
        if (mode == EvalMode::All || p.is_selected(c)) list.push_back(c);
      n_cutrows += 1 + static_cast<int>(list.size());  // floor + cuts
    }
  }

  const int cols = n + n_epi;
  LinearProgram& lp = slp.lp;
  lp.objective = Vector::Zero(cols);
  lp.objective.head(n) = real.cost;
  if (t == T && program.terminal_cost.size() != 0)
    lp.objective.head(n) += program.terminal_cost;
  if (has_recourse) {
    if (approx.aggregation == Aggregation::MultiCut) {
      for (int l = 0; l < n_epi; ++l)
        lp.objective(n + l) = program.realization(t + 1, l).probability;
    } else {
      lp.objective(n) = 1.0;
    }
  }
  lp.free_vars.assign(static_cast<std::size_t>(cols), 0);
  if (!real.free_vars.empty())
    for (int i = 0; i < n; ++i)
      lp.free_vars[static_cast<std::size_t>(i)] = real.free_vars[static_cast<std::size_t>(i)];
  for (int l = 0; l < n_epi; ++l)
    lp.free_vars[static_cast<std::size_t>(n + l)] = 1;  // floors bound them below

  lp.eq_lhs = Matrix::Zero(n_eq, cols);
  lp.eq_rhs = Vector::Zero(n_eq);
  lp.ineq_lhs = Matrix::Zero(n_cineq + n_cutrows, cols);
  lp.ineq_rhs = Vector::Zero(n_cineq + n_cutrows);

  const Vector shifted = real.rhs - real.B * x_prev;
  int e = 0, q = 0;
  for (int r = 0; r < real.num_rows(); ++r) {
    if (real.row_kinds[static_cast<std::size_t>(r)] == RowKind::Equality) {
      lp.eq_lhs.row(e).head(n) = real.A.row(r);
      lp.eq_rhs(e) = shifted(r);
      slp.coupling_duals.push_back({true, e});
      ++e;
    } else {
      lp.ineq_lhs.row(q).head(n) = real.A.row(r);
      lp.ineq_rhs(q) = shifted(r);
      slp.coupling_duals.push_back({false, q});
      ++q;
    }
  }
  if (has_recourse) {
    const double floor = approx.floor_at(t + 1);
    for (int l = 0; l < n_epi; ++l) {
      // floor row: -f_l <= -floor
      lp.ineq_lhs(q, n + l) = -1.0;
      lp.ineq_rhs(q) = -floor;
      slp.epigraph_rows.push_back({q, l, -1});
      ++q;
      const CutPool& p = approx.pool(t + 1, l);
      for (int c : active[static_cast<std::size_t>(l)]) {
        // cut row: gradient . x - f_l <= -intercept
        const Cut& cut = p.cuts()[static_cast<std::size_t>(c)];
        lp.ineq_lhs.row(q).head(n) = cut.gradient.transpose();
        lp.ineq_lhs(q, n + l) = -1.0;
        lp.ineq_rhs(q) = -cut.intercept;
        slp.epigraph_rows.push_back({q, l, c});
        ++q;
      }
    }
  }
  return slp;
}

Cut extract_cut(const StochasticProgram& program, const ApproxRecourse& approx,
                const StageLp& slp, const LpSolution& sol) {
  const StageRealization& real =
      program.realization(slp.stage, slp.realization);
  const int rows = real.num_rows();
  Vector coupling_duals(rows);
  for (int r = 0; r < rows; ++r) {
    const StageLp::DualLoc& loc = slp.coupling_duals[static_cast<std::size_t>(r)];
    coupling_duals(r) = loc.equality ? sol.duals_eq(loc.index)
                                     : sol.duals_ineq(loc.index);
  }
  Cut cut;
  cut.gradient = -real.B.transpose() * coupling_duals;
  double intercept = real.rhs.dot(coupling_duals);
  for (const StageLp::EpigraphRow& er : slp.epigraph_rows) {
    const double mult = -sol.duals_ineq(er.ineq_index);  // >= 0 at optimality
    if (mult == 0.0) continue;
    const double row_intercept =
        er.cut_index < 0
            ? approx.floor_at(slp.stage + 1)
            : approx.pool(slp.stage + 1, er.pool_j)
                  .cuts()[static_cast<std::size_t>(er.cut_index)]
                  .intercept;
    intercept += mult * row_intercept;
  }
  cut.intercept = intercept;

  const double at_prev = cut.value_at(slp.x_prev);
  const double scale = std::max(1.0, std::fabs(sol.objective_value));
  if (std::fabs(at_prev - sol.objective_value) > kTightnessTol * scale) {
    std::ostringstream os;
    os << "cut not tight at its trial point: stage " << slp.stage
       << " realization " << slp.realization << " cut value " << at_prev
       << " vs subproblem value " << sol.objective_value;
    throw DualExtractionError(os.str());
  }
  return cut;
}

namespace {

LpSolution solve_stage(const StochasticProgram& program,
                       const ApproxRecourse& approx, int t, int j,
                       const Vector& x_prev, EvalMode mode, StageLp* out_slp,
                       int scenario_index) {
  StageLp slp = assemble_stage_lp(program, approx, t, j, x_prev, mode);
  LpSolution sol = solve(slp.lp);
  if (sol.status != LpStatus::Optimal) {
    std::ostringstream os;
    os << "stage " << t << " realization " << j << " subproblem is "
       << (sol.status == LpStatus::Infeasible ? "infeasible" : "unbounded");
    if (scenario_index >= 0) os << " (scenario " << scenario_index << ")";
    throw SubproblemInfeasibleError(t, j, scenario_index, os.str());
  }
  if (out_slp != nullptr) *out_slp = std::move(slp);
  return sol;
}

}  // namespace

std::vector<Trajectory> forward_pass(const StochasticProgram& program,
                                     const ApproxRecourse& approx,
                                     const std::vector<Scenario>& scenarios,
                                     int workers, std::vector<long>* stage_solves) {
  const int T = program.num_stages;
  const int count = static_cast<int>(scenarios.size());
  std::vector<Trajectory> out(static_cast<std::size_t>(count));

  // Stage 1 is deterministic and shared by every scenario.
  LpSolution first = solve_stage(program, approx, 1, 0,
                                 program.initial_state, EvalMode::SelectedOnly,
                                 nullptr, -1);
  const Vector x1 = first.primal.head(program.stage_dim(1));
  const double stage1_cost = program.realization(1, 0).cost.dot(x1);

  parallel_for(count, workers, [&](int s) {
    Trajectory traj;
    traj.decisions.reserve(static_cast<std::size_t>(T));
    traj.realizations.reserve(static_cast<std::size_t>(T));
    traj.decisions.push_back(x1);
    traj.realizations.push_back(0);
    traj.cost = stage1_cost;
    Vector x_prev = x1;
    for (int t = 2; t <= T; ++t) {
      const int j = scenarios[static_cast<std::size_t>(s)].at_stage(t);
      LpSolution sol = solve_stage(program, approx, t, j, x_prev,
                                   EvalMode::SelectedOnly, nullptr, s);
      Vector xt = sol.primal.head(program.stage_dim(t));
      traj.cost += program.realization(t, j).cost.dot(xt);
      traj.decisions.push_back(xt);
      traj.realizations.push_back(j);
      x_prev = std::move(xt);
    }
    if (program.terminal_cost.size() != 0)
      traj.cost += program.terminal_cost.dot(traj.decisions.back());
    out[static_cast<std::size_t>(s)] = std::move(traj);
  });
  if (stage_solves != nullptr) {
    (*stage_solves)[0] += 1;
    for (int t = 2; t <= T; ++t) (*stage_solves)[static_cast<std::size_t>(t - 1)] += count;
  }
  return out;
}

void backward_pass(const StochasticProgram& program, ApproxRecourse& approx,
                   const std::vector<Trajectory>& trajectories, int iteration,
                   int workers, std::vector<long>* stage_solves) {
  (void)iteration;  // pools keep their own cut counters
  const int T = program.num_stages;
  const int n_traj = static_cast<int>(trajectories.size());
  for (int t = T; t >= 2; --t) {
    const int m_t = program.realization_count(t);
    // All subproblems at this stage see the stage-(t+1) pools as updated by
    // this pass; solves are independent and may run in parallel.
    std::vector<Cut> cuts(static_cast<std::size_t>(n_traj * m_t));
    parallel_for(n_traj * m_t, workers, [&](int idx) {
      const int m = idx / m_t;
      const int j = idx % m_t;
      const Vector& x_prev =
          trajectories[static_cast<std::size_t>(m)].decisions[static_cast<std::size_t>(t - 2)];
      StageLp slp;
      LpSolution sol = solve_stage(program, approx, t, j, x_prev,
                                   EvalMode::SelectedOnly, &slp, m);
      cuts[static_cast<std::size_t>(idx)] =
          extract_cut(program, approx, slp, sol);
    });
    if (stage_solves != nullptr)
      (*stage_solves)[static_cast<std::size_t>(t - 1)] += n_traj * m_t;

    // Pool updates are serialized in trajectory order: the trial point is
    // registered first, then its cut, so selection bookkeeping sees them in
    // the same order the sequential algorithm would.
    for (int m = 0; m < n_traj; ++m) {
      const Vector& x_prev =
          trajectories[static_cast<std::size_t>(m)].decisions[static_cast<std::size_t>(t - 2)];
      if (approx.aggregation == Aggregation::MultiCut) {
        for (int j = 0; j < m_t; ++j) {
          CutPool& pool = approx.pool(t, j);
          pool.add_trial(x_prev);
          Cut cut = cuts[static_cast<std::size_t>(m * m_t + j)];
          cut.birth_iteration = static_cast<int>(pool.cuts().size()) + 1;
          pool.add_cut(std::move(cut));
        }
      } else {
        Cut agg;
        agg.intercept = 0.0;
        agg.gradient = Vector::Zero(program.stage_dim(t - 1));
        for (int j = 0; j < m_t; ++j) {
          const double p = program.realization(t, j).probability;
          const Cut& c = cuts[static_cast<std::size_t>(m * m_t + j)];
          agg.intercept += p * c.intercept;
          agg.gradient += p * c.gradient;
        }
        CutPool& pool = approx.pool(t, 0);
        pool.add_trial(x_prev);
        agg.birth_iteration = static_cast<int>(pool.cuts().size()) + 1;
        pool.add_cut(std::move(agg));
      }
    }
  }
}

double lower_bound(const StochasticProgram& program,
                   const ApproxRecourse& approx,
                   std::vector<long>* stage_solves) {
  LpSolution sol = solve_stage(program, approx, 1, 0, program.initial_state,
                               EvalMode::SelectedOnly, nullptr, -1);
  if (stage_solves != nullptr) ++(*stage_solves)[0];
  return sol.objective_value;
}

UpperBoundEstimate upper_bound(const StochasticProgram& program,
                               const ApproxRecourse& approx, int num_scenarios,
                               double alpha, SplitMix64& rng, int workers,
                               std::vector<long>* stage_solves) {
  std::vector<Scenario> scenarios;
  scenarios.reserve(static_cast<std::size_t>(num_scenarios));
  for (int s = 0; s < num_scenarios; ++s)
    scenarios.push_back(sample_scenario(program, rng));
  std::vector<Trajectory> trajs =
      forward_pass(program, approx, scenarios, workers, stage_solves);
  std::vector<double> costs;
  costs.reserve(trajs.size());
  for (const Trajectory& t : trajs) costs.push_back(t.cost);
  UpperBoundEstimate est;
  est.cost_mean = sample_mean(costs);
  est.cost_std = sample_std(costs, est.cost_mean);
  est.z_sup = est.cost_mean + est.cost_std /
                                  std::sqrt(static_cast<double>(num_scenarios)) *
                                  normal_quantile(1.0 - alpha);
  return est;
}

bool check_stop(double z_inf, double z_sup, double epsilon) {
  if (z_inf == 0.0 && z_sup <= epsilon) return true;
  return std::fabs(z_sup - z_inf) <= epsilon * std::max(1.0, std::fabs(z_sup));
}

std::string ConvergenceLog::csv_header() const {
  std::string h = "iteration,z_inf,z_sup,cost_mean,cost_std,elapsed_ms";
  for (int t = 2; t <= num_stages; ++t)
    h += ",selected_prop_t" + std::to_string(t);
  return h;
}

void ConvergenceLog::write_csv(std::ostream& out) const {
  out << csv_header() << "\n";
  for (const IterationRow& r : rows) {
    out << r.iteration << ',' << format_double(r.z_inf) << ','
        << format_double(r.z_sup) << ',' << format_double(r.cost_mean) << ','
        << format_double(r.cost_std) << ',' << format_double(r.elapsed_ms);
    for (double p : r.stage_proportions) out << ',' << format_double(p);
    out << "\n";
  }
}

void ConvergenceLog::write_summary(std::ostream& out) const {
  out << "method: " << config.method_name() << "\n";
  out << "aggregation: "
      << (config.aggregation == Aggregation::SingleCut ? "single-cut" : "multicut")
      << "\n";
  out << "selector: " << config.make_selector().name() << "\n";
  out << "seed: " << config.seed << "\n";
  out << "forward_scenarios: " << config.forward_scenarios << "\n";
  out << "policy_eval_scenarios: " << config.policy_eval_scenarios << "\n";
  out << "alpha: " << format_double(config.alpha) << "\n";
  out << "epsilon: " << format_double(config.epsilon) << "\n";
  out << "epsilon0: " << format_double(config.epsilon0) << "\n";
  out << "max_iterations: " << config.max_iterations << "\n";
  out << "exhaustive_forward: " << (config.exhaustive_forward ? "yes" : "no") << "\n";
  out << "iterations: " << (rows.empty() ? 0 : rows.back().iteration) << "\n";
  out << "stop_reason: " << stop_reason << "\n";
  out << "converged: " << (converged ? "yes" : "no") << "\n";
  out << "final_z_inf: " << format_double(final_z_inf()) << "\n";
  out << "final_z_sup: " << format_double(final_z_sup()) << "\n";
  out << "total_lp_solves: " << total_lp_solves << "\n";
  out << "total_wall_ms: " << format_double(total_wall_ms) << "\n";
  const std::vector<double> props = mean_stage_proportions();
  for (int t = 2; t <= num_stages; ++t)
    out << "mean_selected_prop_t" << t << ": "
        << format_double(props[static_cast<std::size_t>(t - 2)]) << "\n";
}

std::vector<double> ConvergenceLog::mean_stage_proportions() const {
  std::vector<double> mean(static_cast<std::size_t>(std::max(0, num_stages - 1)), 0.0);
  int counted = 0;
  for (const IterationRow& r : rows) {
    if (r.iteration == 0) continue;
    for (std::size_t i = 0; i < mean.size(); ++i)
      mean[i] += r.stage_proportions[i];
    ++counted;
  }
  if (counted > 0)
    for (double& m : mean) m /= counted;
  return mean;
}

void run(const StochasticProgram& program, const MethodConfig& config,
         ConvergenceLog& log) {
  config.check_valid();
  log = ConvergenceLog{};
  log.config = config;
  log.num_stages = program.num_stages;

  ApproxRecourse approx = ApproxRecourse::create(program, config);
  SplitMix64 rng = SplitMix64::stream(config.seed, 0);
  const auto run_start = std::chrono::steady_clock::now();

  auto stage_props = [&]() {
    std::vector<double> props;
    for (int t = 2; t <= program.num_stages; ++t)
      props.push_back(approx.stage_selected_proportion(t));
    return props;
  };

  try {
    std::vector<long> counts0(static_cast<std::size_t>(program.num_stages), 0);
    IterationRow row0;
    row0.iteration = 0;
    row0.z_inf = lower_bound(program, approx, &counts0);
    row0.z_sup = kInf;
    row0.cost_mean = std::numeric_limits<double>::quiet_NaN();
    row0.cost_std = std::numeric_limits<double>::quiet_NaN();
    row0.stage_proportions = stage_props();
    row0.stage_lp_counts = counts0;
    for (long c : counts0) log.total_lp_solves += c;
    row0.elapsed_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - run_start)
                          .count();
    log.rows.push_back(std::move(row0));

    double z_sup = kInf;
    double cost_mean = std::numeric_limits<double>::quiet_NaN();
    double cost_std = std::numeric_limits<double>::quiet_NaN();

    for (int it = 1; it <= config.max_iterations; ++it) {
      const auto iter_start = std::chrono::steady_clock::now();
      std::vector<long> solves(static_cast<std::size_t>(program.num_stages), 0);

      std::vector<Scenario> scenarios;
      if (config.exhaustive_forward) {
        scenarios = enumerate_scenarios(program);
      } else {
        scenarios.reserve(static_cast<std::size_t>(config.forward_scenarios));
        for (int s = 0; s < config.forward_scenarios; ++s)
          scenarios.push_back(sample_scenario(program, rng));
      }
      std::vector<Trajectory> trajs =
          forward_pass(program, approx, scenarios, config.workers, &solves);

      if ((it - 1) % config.upper_bound_period == 0) {
        UpperBoundEstimate est =
            upper_bound(program, approx, config.policy_eval_scenarios,
                        config.alpha, rng, config.workers, &solves);
        z_sup = est.z_sup;
        cost_mean = est.cost_mean;
        cost_std = est.cost_std;
      }

      backward_pass(program, approx, trajs, it, config.workers, &solves);
      const double z_inf = lower_bound(program, approx, &solves);

      IterationRow row;
      row.iteration = it;
      row.z_inf = z_inf;
      row.z_sup = z_sup;
      row.cost_mean = cost_mean;
      row.cost_std = cost_std;
      row.stage_proportions = stage_props();
      row.stage_lp_counts = solves;
      row.elapsed_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - iter_start)
                           .count();
      for (long c : solves) log.total_lp_solves += c;
      log.rows.push_back(std::move(row));

      if (std::isfinite(z_sup) && check_stop(z_inf, z_sup, config.epsilon)) {
        log.converged = true;
        log.stop_reason = "converged";
        break;
      }
    }
    if (!log.converged) log.stop_reason = "max_iterations";
  } catch (const std::exception& e) {
    log.aborted = true;
    log.stop_reason = std::string("aborted: ") + e.what();
    log.total_wall_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - run_start)
                            .count();
    throw;
  }
  log.total_wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - run_start)
                          .count();
}

ConvergenceLog run(const StochasticProgram& program, const MethodConfig& config) {
  ConvergenceLog log;
  run(program, config, log);
  return log;
}

}  // namespace cutplane

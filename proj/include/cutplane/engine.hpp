#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cutplane/cutpool.hpp"
#include "cutplane/program.hpp"

namespace cutplane {

/// Cut aggregation across realizations: SingleCut keeps one pool per stage
/// approximating the expected recourse function; MultiCut keeps one pool
/// per (stage, realization).
enum class Aggregation { SingleCut, MultiCut };

enum class SelectionStrategy {
  KeepAll,              // no cut selection
  Level1,
  LimitedMemoryLevel1,
  OldestPrefix,         // keep the `selector_window` oldest tied maximizers
  NewestSuffix,         // unsafe (not nested); gated behind an explicit flag
};

struct MethodConfig {
  Aggregation aggregation = Aggregation::MultiCut;
  SelectionStrategy selection = SelectionStrategy::KeepAll;
  int selector_window = 1;
  int forward_scenarios = 1;      // N: scenarios per forward pass
  int policy_eval_scenarios = 50; // S: scenarios per policy simulation
  double alpha = 0.025;           // one-sided confidence level
  double epsilon = 0.1;           // stopping tolerance
  double epsilon0 = 1e-6;         // cut comparison tolerance
  int max_iterations = 200;
  std::uint64_t seed = 0;
  int upper_bound_period = 1;     // simulate the policy every k iterations
  bool exhaustive_forward = false;  // enumerate every scenario instead of sampling
  int workers = 1;

  void check_valid() const;  // throws SpecInvalidError
  std::string method_name() const;  // sddp, sddp-cs1, ..., cusmuda-cs2
  Selector make_selector() const;
};

/// Lower approximations of the recourse functions: cut pools plus the
/// constant initial floors that keep every epigraph problem bounded.
struct ApproxRecourse {
  Aggregation aggregation = Aggregation::MultiCut;
  std::vector<std::vector<CutPool>> pools_by_stage;  // [t-2][j] (single cut: one entry)
  std::vector<double> floors;                        // [t-2], stage t = 2..T

  static ApproxRecourse create(const StochasticProgram& program,
                               const MethodConfig& config);

  int pool_count(int t) const {
    return static_cast<int>(pools_by_stage[static_cast<std::size_t>(t - 2)].size());
  }
  CutPool& pool(int t, int j) {
    return pools_by_stage[static_cast<std::size_t>(t - 2)][static_cast<std::size_t>(j)];
  }
  const CutPool& pool(int t, int j) const {
    return pools_by_stage[static_cast<std::size_t>(t - 2)][static_cast<std::size_t>(j)];
  }
  double floor_at(int t) const { return floors[static_cast<std::size_t>(t - 2)]; }

  /// Approximate expected recourse at stage t (2..T) for state x, i.e. the
  /// probability mix of per-pool maxima floored by the initial bound.
  double evaluate_stage(const StochasticProgram& program, int t, const Vector& x,
                        EvalMode mode) const;

  /// Selected cuts over stored cuts across the pools of stage t.
  double stage_selected_proportion(int t) const;
};

/// One epigraph LP for stage t realization j at incoming state x_prev:
/// decision block first, then one epigraph variable per next-stage pool.
/// Bookkeeping maps LP rows back to coupling rows and pool cuts so duals
/// can be reassembled into a new cut.
struct StageLp {
  LinearProgram lp;
  int stage = 1;
  int realization = 0;
  int decision_dim = 0;
  int num_epigraph = 0;
  Vector x_prev;

  // Per coupling row (in realization order): location of its dual.
  struct DualLoc {
    bool equality;
    int index;  // within duals_eq or duals_ineq
  };
  std::vector<DualLoc> coupling_duals;

  // Per epigraph inequality row: source of its intercept. cut_index == -1
  // marks the floor row.
  struct EpigraphRow {
    int ineq_index;
    int pool_j;
    int cut_index;
  };
  std::vector<EpigraphRow> epigraph_rows;
};

StageLp assemble_stage_lp(const StochasticProgram& program,
                          const ApproxRecourse& approx, int t, int j,
                          const Vector& x_prev, EvalMode mode);

/// New cut from the optimal duals of a solved stage LP:
///   gradient = -B^T (all coupling-row duals)
///   intercept = rhs . duals + sum over epigraph rows of their intercepts
///               weighted by the (nonnegated) epigraph multipliers.
/// Verifies tightness at x_prev within 1e-6 relative and throws
/// DualExtractionError when the check fails. The caller assigns
/// birth_iteration before inserting into a pool.
Cut extract_cut(const StochasticProgram& program, const ApproxRecourse& approx,
                const StageLp& slp, const LpSolution& sol);

struct Trajectory {
  std::vector<Vector> decisions;  // decisions[t-1] for t = 1..T
  std::vector<int> realizations;  // realizations[t-1] (stage 1 entry is 0)
  double cost = 0.0;              // stage costs plus terminal
};

/// Solves the stage chain for each scenario under the selected cuts and
/// records the visited extreme points. Throws SubproblemInfeasibleError.
std::vector<Trajectory> forward_pass(const StochasticProgram& program,
                                     const ApproxRecourse& approx,
                                     const std::vector<Scenario>& scenarios,
                                     int workers,
                                     std::vector<long>* stage_solves = nullptr);

/// Builds one cut per (stage, realization, trajectory) walking stages
/// T..2, with stage-(t+1) pools already updated within this pass.
/// MultiCut adds every per-realization cut; SingleCut adds the
/// probability-weighted aggregate.
void backward_pass(const StochasticProgram& program, ApproxRecourse& approx,
                   const std::vector<Trajectory>& trajectories, int iteration,
                   int workers, std::vector<long>* stage_solves = nullptr);

/// Optimal value of the first-stage problem under the current approximation.
double lower_bound(const StochasticProgram& program,
                   const ApproxRecourse& approx,
                   std::vector<long>* stage_solves = nullptr);

struct UpperBoundEstimate {
  double cost_mean = 0.0;
  double cost_std = 0.0;
  double z_sup = 0.0;
};

/// Simulates the current policy on `num_scenarios` fresh scenarios and
/// returns the one-sided confidence bound mean + std/sqrt(S) * q(1-alpha).
UpperBoundEstimate upper_bound(const StochasticProgram& program,
                               const ApproxRecourse& approx, int num_scenarios,
                               double alpha, SplitMix64& rng, int workers,
                               std::vector<long>* stage_solves = nullptr);

/// Stopping rule: true iff (z_inf == 0 and z_sup <= eps) or
/// |z_sup - z_inf| <= eps * max(1, |z_sup|).
bool check_stop(double z_inf, double z_sup, double epsilon);

struct IterationRow {
  int iteration = 0;
  double z_inf = 0.0;
  double z_sup = 0.0;
  double cost_mean = 0.0;
  double cost_std = 0.0;
  double elapsed_ms = 0.0;
  std::vector<double> stage_proportions;  // per stage t = 2..T
  std::vector<long> stage_lp_counts;      // per stage t = 1..T
};

struct ConvergenceLog {
  MethodConfig config;
  int num_stages = 0;
  std::vector<IterationRow> rows;
  bool converged = false;
  bool aborted = false;
  std::string stop_reason;
  long total_lp_solves = 0;
  double total_wall_ms = 0.0;

  double final_z_inf() const { return rows.empty() ? 0.0 : rows.back().z_inf; }
  double final_z_sup() const { return rows.empty() ? 0.0 : rows.back().z_sup; }

  std::string csv_header() const;
  void write_csv(std::ostream& out) const;
  void write_summary(std::ostream& out) const;
  /// Mean selected proportion per stage t = 2..T over iterations >= 1.
  std::vector<double> mean_stage_proportions() const;
};

/// Full driver: forward pass, policy evaluation, backward pass, bound
/// computation and stopping test each iteration. The log is filled in
/// place so a partial record survives when a pass throws.
void run(const StochasticProgram& program, const MethodConfig& config,
         ConvergenceLog& log);
ConvergenceLog run(const StochasticProgram& program, const MethodConfig& config);

}  // namespace cutplane

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cutplane/lp.hpp"
#include "cutplane/rng.hpp"

namespace cutplane {

enum class RowKind { Equality, LessEq };

/// One realization of the stage-t data. Rows couple the current decision
/// x_t to the previous one:
///
///   A x_t + B x_{t-1}  {=, <=}  rhs     (row_kinds picks the relation)
///
/// with stage cost `cost . x_t`. B has as many columns as the previous
/// stage's decision vector (for stage 1 that is the initial state).
struct StageRealization {
  Matrix A;
  Matrix B;
  Vector rhs;
  Vector cost;
  double probability = 1.0;
  std::vector<RowKind> row_kinds;
  std::vector<char> free_vars;  // empty: all decision variables >= 0

  int num_rows() const { return static_cast<int>(rhs.size()); }
  int decision_dim() const { return static_cast<int>(cost.size()); }
  int prev_dim() const { return static_cast<int>(B.cols()); }
};

/// Multistage stochastic linear program with stagewise-independent noise
/// over finite supports. stages[t-1] lists the realizations of stage t;
/// stage 1 always has exactly one (its data is deterministic).
struct StochasticProgram {
  int num_stages = 0;  // T
  Vector initial_state;
  std::vector<std::vector<StageRealization>> stages;
  Vector terminal_cost;           // over the stage-T decision; empty = none
  Vector recourse_lower_bounds;   // floor per stage t = 2..T; empty = zeros

  /// Decision dimension of stage t (1-based); t = 0 is the initial state.
  int stage_dim(int t) const {
    if (t == 0) return static_cast<int>(initial_state.size());
    return stages[static_cast<std::size_t>(t - 1)][0].decision_dim();
  }
  int realization_count(int t) const {
    return static_cast<int>(stages[static_cast<std::size_t>(t - 1)].size());
  }
  const StageRealization& realization(int t, int j) const {
    return stages[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(j)];
  }
  double recourse_floor(int t) const {
    if (recourse_lower_bounds.size() == 0) return 0.0;
    return recourse_lower_bounds(t - 2);
  }
};

/// Realization index per stage t = 2..T (0-based indices).
struct Scenario {
  std::vector<int> indices;
  int at_stage(int t) const { return indices[static_cast<std::size_t>(t - 2)]; }
};

struct Diagnostic {
  std::string message;
  int stage = 0;        // 1-based, 0 when not stage-specific
  int realization = -1; // 0-based, -1 when not applicable
};

/// Structural validation plus a sampled feasibility/boundedness spot check:
/// stage subproblems are solved myopically along `spot_check_scenarios`
/// random scenarios and any Infeasible/Unbounded status is reported. An
/// empty result means no problem was detected (it is not a proof that
/// every reachable subproblem is well posed).
std::vector<Diagnostic> validate(const StochasticProgram& program,
                                 int spot_check_scenarios = 8,
                                 std::uint64_t seed = 0);

/// Draws one realization index per stage t = 2..T, stage t index j with
/// probability p_tj. Fully reproducible from the generator state.
Scenario sample_scenario(const StochasticProgram& program, SplitMix64& rng);

/// Enumerates all scenarios in lexicographic index order.
std::vector<Scenario> enumerate_scenarios(const StochasticProgram& program);

struct TreeNode {
  int stage = 1;        // 1-based
  int realization = 0;  // 0-based
  int parent = -1;      // node index, -1 for the root
  double probability = 1.0;
  int var_offset = 0;   // first column of this node's decision block
};

/// Deterministic-equivalent LP over the full scenario tree. Its optimal
/// value equals the optimal expected cost of the program; used as the
/// ground-truth oracle for desk-scale instances.
struct ExtensiveForm {
  LinearProgram lp;
  std::vector<TreeNode> nodes;
};

constexpr std::int64_t kDefaultTreeNodeCap = 100000;

/// Throws TreeTooLargeError when the tree exceeds `node_cap` nodes.
ExtensiveForm extensive_form(const StochasticProgram& program,
                             std::int64_t node_cap = kDefaultTreeNodeCap);

/// Number of nodes of the scenario tree (saturates at node_cap + 1).
std::int64_t tree_node_count(const StochasticProgram& program,
                             std::int64_t cap = kDefaultTreeNodeCap);

}  // namespace cutplane

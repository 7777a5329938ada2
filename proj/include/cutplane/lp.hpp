#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cutplane/errors.hpp"

namespace cutplane {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Dense linear program
///
///   min  objective . x
///   s.t. eq_lhs   x  =  eq_rhs
///        ineq_lhs x  <= ineq_rhs
///        x_i >= 0, or x_i free where free_vars marks it.
struct LinearProgram {
  Vector objective;
  Matrix eq_lhs;
  Vector eq_rhs;
  Matrix ineq_lhs;
  Vector ineq_rhs;
  std::vector<char> free_vars;  // empty means all variables nonnegative

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_eq() const { return static_cast<int>(eq_rhs.size()); }
  int num_ineq() const { return static_cast<int>(ineq_rhs.size()); }
  bool is_free(int i) const {
    return !free_vars.empty() && free_vars[static_cast<std::size_t>(i)] != 0;
  }

  /// Throws InvalidProgramError on mismatched dimensions or non-finite data.
  void check_valid() const;
};

/// Result of solve(). Dual sign convention for minimization: equality-row
/// duals are unrestricted, <=-row duals are <= 0. The dual objective is
/// duals_eq . eq_rhs + duals_ineq . ineq_rhs.
struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  Vector primal;
  double objective_value = 0.0;
  Vector duals_eq;
  Vector duals_ineq;
  std::vector<int> basis;  // sorted basic column ids of the standard form
  int std_rows = 0;        // rows of the standard form (redundant rows removed)
};

/// Standard-form image of a LinearProgram:
///   min cost . z   s.t.  lhs z = rhs,  z >= 0
/// together with the column bookkeeping needed to map a standard-form
/// solution back to the original coordinates.
struct StandardForm {
  Matrix lhs;
  Vector rhs;
  Vector cost;
  std::vector<int> var_plus;   // per original var: column of its (+) part
  std::vector<int> var_minus;  // per original var: column of its (-) part, -1 if none
  std::vector<int> slack_col;  // per inequality row: column of its slack
  int orig_vars = 0;
  int orig_eq = 0;
  int orig_ineq = 0;

  int rows() const { return static_cast<int>(rhs.size()); }
  int cols() const { return static_cast<int>(cost.size()); }

  /// Original primal vector from a standard-form point.
  Vector restore_primal(const Vector& z) const;
};

StandardForm to_standard_form(const LinearProgram& lp);

/// Two-phase primal simplex on the dense standard form, Bland's rule
/// (smallest index entering, smallest basic index leaving). Deterministic:
/// identical inputs produce identical pivots, hence identical output.
/// Optimal solutions are extreme points of the feasible polyhedron.
LpSolution solve(const LinearProgram& lp);

}  // namespace cutplane

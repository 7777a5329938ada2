#include "cutplane/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cutplane {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-8;

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

void LinearProgram::check_valid() const {
  const int n = num_vars();
  if (n < 1) throw InvalidProgramError("objective must have at least one entry");
  if (num_eq() > 0 && eq_lhs.cols() != n)
    throw InvalidProgramError("equality rows have " +
                              std::to_string(eq_lhs.cols()) +
                              " columns, objective has " + std::to_string(n));
  if (eq_lhs.rows() != num_eq())
    throw InvalidProgramError("equality lhs/rhs row mismatch");
  if (num_ineq() > 0 && ineq_lhs.cols() != n)
    throw InvalidProgramError("inequality rows have " +
                              std::to_string(ineq_lhs.cols()) +
                              " columns, objective has " + std::to_string(n));
  if (ineq_lhs.rows() != num_ineq())
    throw InvalidProgramError("inequality lhs/rhs row mismatch");
  if (!free_vars.empty() && static_cast<int>(free_vars.size()) != n)
    throw InvalidProgramError("free_vars size mismatch");
  if (!all_finite(objective) || !all_finite(eq_lhs) || !all_finite(eq_rhs) ||
      !all_finite(ineq_lhs) || !all_finite(ineq_rhs))
    throw InvalidProgramError("non-finite entry in program data");
}

StandardForm to_standard_form(const LinearProgram& lp) {
  const int n = lp.num_vars();
  const int me = lp.num_eq();
  const int mi = lp.num_ineq();

  StandardForm sf;
  sf.orig_vars = n;
  sf.orig_eq = me;
  sf.orig_ineq = mi;
  sf.var_plus.resize(n);
  sf.var_minus.assign(n, -1);
  sf.slack_col.resize(mi);

  int cols = 0;
  for (int i = 0; i < n; ++i) sf.var_plus[i] = cols++;
  for (int i = 0; i < n; ++i)
    if (lp.is_free(i)) sf.var_minus[i] = cols++;
  for (int r = 0; r < mi; ++r) sf.slack_col[r] = cols++;

  const int m = me + mi;
  sf.lhs = Matrix::Zero(m, cols);
  sf.rhs = Vector::Zero(m);
  sf.cost = Vector::Zero(cols);

  for (int i = 0; i < n; ++i) {
    sf.cost(sf.var_plus[i]) = lp.objective(i);
    if (sf.var_minus[i] >= 0) sf.cost(sf.var_minus[i]) = -lp.objective(i);
  }
  for (int r = 0; r < me; ++r) {
    for (int i = 0; i < n; ++i) {
      const double a = lp.eq_lhs(r, i);
      if (a == 0.0) continue;
      sf.lhs(r, sf.var_plus[i]) = a;
      if (sf.var_minus[i] >= 0) sf.lhs(r, sf.var_minus[i]) = -a;
    }
    sf.rhs(r) = lp.eq_rhs(r);
  }
  for (int r = 0; r < mi; ++r) {
    const int row = me + r;
    for (int i = 0; i < n; ++i) {
      const double a = lp.ineq_lhs(r, i);
      if (a == 0.0) continue;
      sf.lhs(row, sf.var_plus[i]) = a;
      if (sf.var_minus[i] >= 0) sf.lhs(row, sf.var_minus[i]) = -a;
    }
    sf.lhs(row, sf.slack_col[r]) = 1.0;
    sf.rhs(row) = lp.ineq_rhs(r);
  }
  return sf;
}

Vector StandardForm::restore_primal(const Vector& z) const {
  Vector x(orig_vars);
  for (int i = 0; i < orig_vars; ++i) {
    double v = z(var_plus[i]);
    if (var_minus[i] >= 0) v -= z(var_minus[i]);
    x(i) = v;
  }
  return x;
}

namespace {

// Tableau state for the two-phase simplex. Columns: structural columns of
// the standard form followed by one artificial column per row that needs it.
struct Tableau {
  Matrix body;              // m x (total_cols)
  Vector rhs;               // m, kept >= 0
  std::vector<int> basis;   // basic column per row
  std::vector<int> orig_row;  // row -> original standard-form row id
  int struct_cols = 0;
  int total_cols = 0;

  int rows() const { return static_cast<int>(rhs.size()); }

  void pivot(int pr, int pc) {
    const double piv = body(pr, pc);
    body.row(pr) /= piv;
    rhs(pr) /= piv;
    for (int i = 0; i < rows(); ++i) {
      if (i == pr) continue;
      const double f = body(i, pc);
      if (f == 0.0) continue;
      body.row(i) -= f * body.row(pr);
      rhs(i) -= f * rhs(pr);
      body(i, pc) = 0.0;
    }
    basis[static_cast<std::size_t>(pr)] = pc;
  }
};

// Reduced costs for the given cost vector (artificials cost `art_cost`).
Vector reduced_costs(const Tableau& t, const Vector& cost, double art_cost) {
  Vector cbar(t.total_cols);
  for (int j = 0; j < t.total_cols; ++j)
    cbar(j) = (j < t.struct_cols) ? cost(j) : art_cost;
  for (int i = 0; i < t.rows(); ++i) {
    const int b = t.basis[static_cast<std::size_t>(i)];
    const double cb = (b < t.struct_cols) ? cost(b) : art_cost;
    if (cb != 0.0) cbar -= cb * t.body.row(i).transpose();
  }
  return cbar;
}

enum class IterateOutcome { Optimal, Unbounded };

// Bland's rule loop. `allowed` marks columns eligible to enter.
IterateOutcome iterate(Tableau& t, Vector& cbar, const std::vector<char>& allowed) {
  const long pivot_cap = 50000L + 200L * (t.rows() + t.total_cols);
  for (long count = 0;; ++count) {
    if (count > pivot_cap)
      throw Error("simplex pivot limit exceeded; possible numerical cycling");
    int enter = -1;
    for (int j = 0; j < t.total_cols; ++j) {
      if (!allowed[static_cast<std::size_t>(j)]) continue;
      if (cbar(j) < -kPivotTol) {
        enter = j;
        break;  // smallest index
      }
    }
    if (enter < 0) return IterateOutcome::Optimal;

    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < t.rows(); ++i) {
      const double a = t.body(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = t.rhs(i) / a;
      if (leave < 0 || ratio < best_ratio - kPivotTol ||
          (std::fabs(ratio - best_ratio) <= kPivotTol &&
           t.basis[static_cast<std::size_t>(i)] <
               t.basis[static_cast<std::size_t>(leave)])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave < 0) return IterateOutcome::Unbounded;

    const double step = cbar(enter);
    t.pivot(leave, enter);
    cbar -= step * t.body.row(leave).transpose();
    cbar(enter) = 0.0;
  }
}

}  // namespace

LpSolution solve(const LinearProgram& lp) {
  lp.check_valid();
  const StandardForm sf = to_standard_form(lp);
  const int m = sf.rows();
  const int n = sf.cols();

  // Build the phase-1 tableau. Rows with negative rhs are flipped so the
  // artificial start is feasible; slack columns of unflipped inequality rows
  // serve as initial basics to keep the artificial count down.
  Tableau t;
  t.struct_cols = n;
  t.orig_row.resize(m);
  std::vector<int> art_of_row(m, -1);
  int n_art = 0;
  std::vector<bool> flipped(m, false);
  std::vector<int> slack_of_row(m, -1);
  for (int r = 0; r < sf.orig_ineq; ++r) slack_of_row[sf.orig_eq + r] = sf.slack_col[r];
  for (int r = 0; r < m; ++r) {
    t.orig_row[r] = r;
    flipped[r] = sf.rhs(r) < 0.0;
    if (!(slack_of_row[r] >= 0 && !flipped[r])) art_of_row[r] = n_art++;
  }
  t.total_cols = n + n_art;
  t.body = Matrix::Zero(m, t.total_cols);
  t.rhs = Vector::Zero(m);
  t.basis.resize(m);
  for (int r = 0; r < m; ++r) {
    const double s = flipped[r] ? -1.0 : 1.0;
    t.body.row(r).head(n) = s * sf.lhs.row(r);
    t.rhs(r) = s * sf.rhs(r);
    if (art_of_row[r] >= 0) {
      t.body(r, n + art_of_row[r]) = 1.0;
      t.basis[r] = n + art_of_row[r];
    } else {
      t.basis[r] = slack_of_row[r];
    }
  }

  LpSolution out;
  const double rhs_scale = (m > 0) ? std::max(1.0, sf.rhs.lpNorm<Eigen::Infinity>()) : 1.0;

  if (n_art > 0) {
    Vector zero_cost = Vector::Zero(n);
    Vector cbar = reduced_costs(t, zero_cost, 1.0);
    std::vector<char> allowed(static_cast<std::size_t>(t.total_cols), 1);
    for (int j = n; j < t.total_cols; ++j) allowed[static_cast<std::size_t>(j)] = 0;
    if (iterate(t, cbar, allowed) == IterateOutcome::Unbounded)
      throw Error("phase-1 objective unbounded; numerical failure");
    double infeas = 0.0;
    for (int i = 0; i < t.rows(); ++i)
      if (t.basis[static_cast<std::size_t>(i)] >= n) infeas += t.rhs(i);
    if (infeas > kFeasTol * rhs_scale) {
      out.status = LpStatus::Infeasible;
      return out;
    }
    // Pivot basic artificials out; rows with no structural entry are
    // redundant and get removed.
    std::vector<int> keep;
    for (int i = 0; i < t.rows(); ++i) {
      if (t.basis[static_cast<std::size_t>(i)] < n) {
        keep.push_back(i);
        continue;
      }
      int pc = -1;
      double best = 0.0;
      for (int j = 0; j < n; ++j) {
        const double a = std::fabs(t.body(i, j));
        if (a > kPivotTol && a > best) {
          best = a;
          pc = j;
        }
      }
      if (pc >= 0) {
        t.pivot(i, pc);
        keep.push_back(i);
      }
      // else: dependent row, dropped below
    }
    if (static_cast<int>(keep.size()) != t.rows()) {
      Tableau t2;
      t2.struct_cols = t.struct_cols;
      t2.total_cols = t.total_cols;
      t2.body = Matrix::Zero(static_cast<int>(keep.size()), t.total_cols);
      t2.rhs = Vector::Zero(static_cast<int>(keep.size()));
      for (std::size_t i = 0; i < keep.size(); ++i) {
        t2.body.row(static_cast<int>(i)) = t.body.row(keep[i]);
        t2.rhs(static_cast<int>(i)) = t.rhs(keep[i]);
        t2.basis.push_back(t.basis[static_cast<std::size_t>(keep[i])]);
        t2.orig_row.push_back(t.orig_row[static_cast<std::size_t>(keep[i])]);
      }
      t = std::move(t2);
    }
  }

  // Phase 2.
  {
    Vector cbar = reduced_costs(t, sf.cost, 0.0);
    std::vector<char> allowed(static_cast<std::size_t>(t.total_cols), 0);
    for (int j = 0; j < n; ++j) allowed[static_cast<std::size_t>(j)] = 1;
    if (iterate(t, cbar, allowed) == IterateOutcome::Unbounded) {
      out.status = LpStatus::Unbounded;
      return out;
    }
  }

  // Recover a clean primal/dual pair from the final basis using the
  // original (unflipped) standard form.
  const int mk = t.rows();
  Vector z = Vector::Zero(n);
  Vector y_std = Vector::Zero(m);
  out.basis.reserve(static_cast<std::size_t>(mk));
  for (int i = 0; i < mk; ++i) out.basis.push_back(t.basis[static_cast<std::size_t>(i)]);
  std::sort(out.basis.begin(), out.basis.end());
  if (mk > 0) {
    Matrix basis_cols(mk, mk);
    Vector b_kept(mk), cost_basic(mk);
    for (int i = 0; i < mk; ++i) {
      const int orow = t.orig_row[static_cast<std::size_t>(i)];
      b_kept(i) = sf.rhs(orow);
      for (int k = 0; k < mk; ++k)
        basis_cols(i, k) = sf.lhs(orow, out.basis[static_cast<std::size_t>(k)]);
    }
    for (int k = 0; k < mk; ++k)
      cost_basic(k) = sf.cost(out.basis[static_cast<std::size_t>(k)]);

    Eigen::PartialPivLU<Matrix> lu(basis_cols);
    Vector xb = lu.solve(b_kept);
    if ((basis_cols * xb - b_kept).lpNorm<Eigen::Infinity>() <=
        1e-7 * rhs_scale) {
      for (int k = 0; k < mk; ++k) z(out.basis[static_cast<std::size_t>(k)]) = xb(k);
    } else {
      // Fall back to the tableau values if the refactorization drifted.
      for (int i = 0; i < mk; ++i)
        z(t.basis[static_cast<std::size_t>(i)]) = t.rhs(i);
    }
    Eigen::PartialPivLU<Matrix> lut(basis_cols.transpose());
    Vector y_kept = lut.solve(cost_basic);
    for (int i = 0; i < mk; ++i) y_std(t.orig_row[static_cast<std::size_t>(i)]) = y_kept(i);
  }

  out.status = LpStatus::Optimal;
  out.std_rows = mk;
  out.primal = sf.restore_primal(z);
  out.objective_value = sf.cost.dot(z);
  out.duals_eq = y_std.head(sf.orig_eq);
  out.duals_ineq = y_std.tail(sf.orig_ineq);
  return out;
}

}  // namespace cutplane

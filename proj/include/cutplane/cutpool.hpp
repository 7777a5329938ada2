#pragma once

#include <string>
#include <vector>

#include "cutplane/lp.hpp"

namespace cutplane {

/// Affine minorant of a recourse function: intercept + gradient . x.
struct Cut {
  double intercept = 0.0;
  Vector gradient;
  int birth_iteration = 0;

  double value_at(const Vector& x) const { return intercept + gradient.dot(x); }
};

/// Per-trial-point bookkeeping: the running best cut value at the point
/// and the cut indices attaining it (ascending). A trial registered before
/// any cut exists holds the -inf sentinel with an empty argmax; the first
/// add_cut resolves it.
struct TrialRecord {
  Vector point;
  double best_value;
  std::vector<int> argmax;
};

enum class SelectorKind {
  KeepAll,             // no selection: every cut stays active
  Level1,              // keep every cut maximal at some trial point
  LimitedMemoryLevel1, // keep only the oldest maximal cut per trial point
  OldestPrefix,        // keep the `window` oldest of each argmax set
  NewestSuffix,        // keep the `window` newest; NOT nested, see below
};

/// Maps the size m of a (sorted ascending) argmax set to the subset of
/// positions to keep. Built-ins other than NewestSuffix are nested:
/// choose(m) is a subset of choose(m+1), the property the convergence
/// theory requires. NewestSuffix breaks nestedness and is only reachable
/// through the explicit unsafe constructor.
class Selector {
 public:
  static Selector keep_all() { return Selector(SelectorKind::KeepAll, 0); }
  static Selector level1() { return Selector(SelectorKind::Level1, 0); }
  static Selector lml1() { return Selector(SelectorKind::LimitedMemoryLevel1, 0); }
  static Selector oldest_prefix(int window);
  static Selector newest_suffix_unsafe(int window);

  SelectorKind kind() const { return kind_; }
  int window() const { return window_; }

  /// Positions (0-based) selected from an argmax set of size m.
  std::vector<int> choose(int m) const;

  /// Direct nestedness check choose(m) subset-of choose(m+1) for m <= horizon.
  bool is_nested(int horizon) const;

  std::string name() const;

 private:
  Selector(SelectorKind kind, int window) : kind_(kind), window_(window) {}
  SelectorKind kind_;
  int window_;
};

enum class EvalMode { SelectedOnly, All };

struct SelectionStats {
  int num_cuts = 0;
  int num_selected = 0;
  double proportion = 0.0;  // 0 for an empty pool
};

/// Append-only store of cuts and trial points for one approximated
/// function, maintaining the selected-cut mask under the pool's selector.
/// Cuts and trials are never deleted; only the mask changes.
///
/// Comparisons use the mixed absolute/relative tolerance
///   tie:     |v - m| <= epsilon0 * max(1, |m|)
///   above:    v > m + epsilon0 * max(1, |m|)
/// With epsilon0 = 0 this degrades to exact comparisons, which is known to
/// wrongly drop duplicate cuts produced by finite-precision solves; the
/// default 1e-6 keeps them.
class CutPool {
 public:
  CutPool(int state_dim, Selector selector, double epsilon0 = 1e-6);

  /// Registers a forward-pass state. Scans existing cuts to initialize the
  /// record (LML1 scans oldest-first and keeps a single incumbent; the
  /// other selectors track every within-tolerance maximizer). Returns the
  /// trial index.
  int add_trial(const Vector& point);

  /// Appends a cut and updates every trial record per the pool's selector,
  /// then refreshes the selected mask. O(#trials * state_dim).
  void add_cut(Cut cut);

  /// Max of cut values at `point` over the selected mask or over all cuts.
  /// Throws EmptyPoolError when no cut is stored. SelectedOnly over an
  /// empty mask (possible only while no trial exists) returns -inf.
  double evaluate(const Vector& point, EvalMode mode) const;

  SelectionStats selection_stats() const;

  /// From-scratch rebuild of all records and the mask by rescanning every
  /// cut at every trial; equals the incrementally maintained state.
  void recompute_selection();

  const std::vector<Cut>& cuts() const { return cuts_; }
  const std::vector<TrialRecord>& trials() const { return trials_; }
  const std::vector<char>& selected_mask() const { return selected_; }
  bool is_selected(int cut_index) const {
    return selected_[static_cast<std::size_t>(cut_index)] != 0;
  }
  int state_dim() const { return state_dim_; }
  double epsilon0() const { return epsilon0_; }
  const Selector& selector() const { return selector_; }

  /// Snapshot for checkpoint/restart and golden-file tests.
  std::string snapshot() const;
  static CutPool restore(const std::string& text);

 private:
  void scan_trial(TrialRecord& rec) const;  // full rescan of one record
  void apply_new_cut(TrialRecord& rec, int cut_index);
  void rebuild_mask();

  int state_dim_;
  Selector selector_;
  double epsilon0_;
  std::vector<Cut> cuts_;
  std::vector<TrialRecord> trials_;
  std::vector<char> selected_;
  int num_selected_ = 0;
};

}  // namespace cutplane

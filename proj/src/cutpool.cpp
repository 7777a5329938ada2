#include "cutplane/cutpool.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace cutplane {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double tol_band(double m, double eps0) {
  return eps0 * std::max(1.0, std::fabs(m));
}

inline bool strictly_above(double v, double m, double eps0) {
  if (m == kNegInf) return true;
  return v > m + tol_band(m, eps0);
}

inline bool tied(double v, double m, double eps0) {
  if (m == kNegInf) return false;
  return std::fabs(v - m) <= tol_band(m, eps0);
}

}  // namespace

Selector Selector::oldest_prefix(int window) {
  if (window < 1) throw Error("selector window must be >= 1");
  return Selector(SelectorKind::OldestPrefix, window);
}

Selector Selector::newest_suffix_unsafe(int window) {
  if (window < 1) throw Error("selector window must be >= 1");
  return Selector(SelectorKind::NewestSuffix, window);
}

std::vector<int> Selector::choose(int m) const {
  std::vector<int> out;
  if (m <= 0) return out;
  switch (kind_) {
    case SelectorKind::KeepAll:
    case SelectorKind::Level1:
      out.resize(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = i;
      break;
    case SelectorKind::LimitedMemoryLevel1:
      out.push_back(0);
      break;
    case SelectorKind::OldestPrefix: {
      const int k = std::min(m, window_);
      for (int i = 0; i < k; ++i) out.push_back(i);
      break;
    }
    case SelectorKind::NewestSuffix: {
      const int k = std::min(m, window_);
      for (int i = m - k; i < m; ++i) out.push_back(i);
      break;
    }
  }
  return out;
}

bool Selector::is_nested(int horizon) const {
  for (int m = 1; m < horizon; ++m) {
    const std::vector<int> a = choose(m);
    const std::vector<int> b = choose(m + 1);
    for (int idx : a)
      if (!std::binary_search(b.begin(), b.end(), idx)) return false;
  }
  return true;
}

std::string Selector::name() const {
  switch (kind_) {
    case SelectorKind::KeepAll: return "keep-all";
    case SelectorKind::Level1: return "level1";
    case SelectorKind::LimitedMemoryLevel1: return "lml1";
    case SelectorKind::OldestPrefix:
      return "oldest-" + std::to_string(window_);
    case SelectorKind::NewestSuffix:
      return "newest-" + std::to_string(window_) + "-unsafe";
  }
  return "?";
}

CutPool::CutPool(int state_dim, Selector selector, double epsilon0)
    : state_dim_(state_dim), selector_(selector), epsilon0_(epsilon0) {
  if (state_dim < 1) throw DimensionMismatchError("pool state dimension must be >= 1");
  if (epsilon0 < 0.0) throw Error("epsilon0 must be nonnegative");
}

void CutPool::scan_trial(TrialRecord& rec) const {
  rec.best_value = kNegInf;
  rec.argmax.clear();
  if (cuts_.empty()) return;
  const bool chain = selector_.kind() == SelectorKind::LimitedMemoryLevel1;
  rec.best_value = cuts_[0].value_at(rec.point);
  rec.argmax.push_back(0);
  for (int i = 1; i < static_cast<int>(cuts_.size()); ++i) {
    const double v = cuts_[static_cast<std::size_t>(i)].value_at(rec.point);
    if (strictly_above(v, rec.best_value, epsilon0_)) {
      rec.best_value = v;
      rec.argmax.assign(1, i);
    } else if (!chain && tied(v, rec.best_value, epsilon0_)) {
      rec.argmax.push_back(i);
    }
  }
}

void CutPool::apply_new_cut(TrialRecord& rec, int cut_index) {
  const double v = cuts_[static_cast<std::size_t>(cut_index)].value_at(rec.point);
  if (rec.argmax.empty()) {  // pending sentinel: first cut resolves it
    rec.best_value = v;
    rec.argmax.assign(1, cut_index);
    return;
  }
  if (strictly_above(v, rec.best_value, epsilon0_)) {
    rec.best_value = v;
    rec.argmax.assign(1, cut_index);
  } else if (selector_.kind() != SelectorKind::LimitedMemoryLevel1 &&
             tied(v, rec.best_value, epsilon0_)) {
    rec.argmax.push_back(cut_index);  // indices arrive ascending
  }
}

void CutPool::rebuild_mask() {
  selected_.assign(cuts_.size(), 0);
  if (selector_.kind() == SelectorKind::KeepAll) {
    std::fill(selected_.begin(), selected_.end(), static_cast<char>(1));
    num_selected_ = static_cast<int>(cuts_.size());
    return;
  }
  for (const TrialRecord& rec : trials_) {
    for (int pos : selector_.choose(static_cast<int>(rec.argmax.size())))
      selected_[static_cast<std::size_t>(
          rec.argmax[static_cast<std::size_t>(pos)])] = 1;
  }
  num_selected_ = 0;
  for (char c : selected_) num_selected_ += (c != 0);
}

int CutPool::add_trial(const Vector& point) {
  if (static_cast<int>(point.size()) != state_dim_)
    throw DimensionMismatchError("trial point dimension differs from pool state dimension");
  TrialRecord rec;
  rec.point = point;
  scan_trial(rec);
  trials_.push_back(std::move(rec));
  // A new trial can only select additional cuts; no unselection here.
  const TrialRecord& added = trials_.back();
  if (selector_.kind() != SelectorKind::KeepAll) {
    for (int pos : selector_.choose(static_cast<int>(added.argmax.size()))) {
      const int idx = added.argmax[static_cast<std::size_t>(pos)];
      if (!selected_[static_cast<std::size_t>(idx)]) {
        selected_[static_cast<std::size_t>(idx)] = 1;
        ++num_selected_;
      }
    }
  }
  return static_cast<int>(trials_.size()) - 1;
}

void CutPool::add_cut(Cut cut) {
  if (static_cast<int>(cut.gradient.size()) != state_dim_)
    throw DimensionMismatchError("cut gradient dimension differs from pool state dimension");
  if (!cuts_.empty() && cut.birth_iteration <= cuts_.back().birth_iteration)
    throw DimensionMismatchError("cut birth iterations must be strictly increasing");
  cuts_.push_back(std::move(cut));
  const int idx = static_cast<int>(cuts_.size()) - 1;
  for (TrialRecord& rec : trials_) apply_new_cut(rec, idx);
  rebuild_mask();
}

double CutPool::evaluate(const Vector& point, EvalMode mode) const {
  if (cuts_.empty()) throw EmptyPoolError("evaluate on a pool with no cuts");
  if (static_cast<int>(point.size()) != state_dim_)
    throw DimensionMismatchError("evaluation point dimension differs from pool state dimension");
  double best = kNegInf;
  for (std::size_t i = 0; i < cuts_.size(); ++i) {
    if (mode == EvalMode::SelectedOnly && !selected_[i]) continue;
    best = std::max(best, cuts_[i].value_at(point));
  }
  return best;
}

SelectionStats CutPool::selection_stats() const {
  SelectionStats s;
  s.num_cuts = static_cast<int>(cuts_.size());
  s.num_selected = num_selected_;
  s.proportion = s.num_cuts == 0
                     ? 0.0
                     : static_cast<double>(s.num_selected) / s.num_cuts;
  return s;
}

void CutPool::recompute_selection() {
  for (TrialRecord& rec : trials_) scan_trial(rec);
  rebuild_mask();
}

namespace {

nlohmann::json vec_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vec_from(const nlohmann::json& a) {
  Vector v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    v(static_cast<int>(i)) = a[i].get<double>();
  return v;
}

SelectorKind kind_from(const std::string& s) {
  if (s == "keep-all") return SelectorKind::KeepAll;
  if (s == "level1") return SelectorKind::Level1;
  if (s == "lml1") return SelectorKind::LimitedMemoryLevel1;
  if (s == "oldest-prefix") return SelectorKind::OldestPrefix;
  if (s == "newest-suffix") return SelectorKind::NewestSuffix;
  throw Error("unknown selector kind '" + s + "'");
}

std::string kind_tag(SelectorKind k) {
  switch (k) {
    case SelectorKind::KeepAll: return "keep-all";
    case SelectorKind::Level1: return "level1";
    case SelectorKind::LimitedMemoryLevel1: return "lml1";
    case SelectorKind::OldestPrefix: return "oldest-prefix";
    case SelectorKind::NewestSuffix: return "newest-suffix";
  }
  return "?";
}

}  // namespace

std::string CutPool::snapshot() const {
  nlohmann::json o;
  o["format"] = "cutplane-pool/1";
  o["state_dim"] = state_dim_;
  o["epsilon0"] = epsilon0_;
  o["selector"] = {{"kind", kind_tag(selector_.kind())},
                   {"window", selector_.window()}};
  nlohmann::json cuts = nlohmann::json::array();
  for (const Cut& c : cuts_)
    cuts.push_back({{"intercept", c.intercept},
                    {"gradient", vec_json(c.gradient)},
                    {"birth", c.birth_iteration}});
  o["cuts"] = std::move(cuts);
  nlohmann::json trials = nlohmann::json::array();
  for (const TrialRecord& r : trials_) {
    nlohmann::json tr;
    tr["point"] = vec_json(r.point);
    if (r.best_value == kNegInf)
      tr["best_value"] = nullptr;  // sentinel: no cut seen yet
    else
      tr["best_value"] = r.best_value;
    tr["argmax"] = r.argmax;
    trials.push_back(std::move(tr));
  }
  o["trials"] = std::move(trials);
  nlohmann::json mask = nlohmann::json::array();
  for (char c : selected_) mask.push_back(c != 0);
  o["selected"] = std::move(mask);
  return o.dump(2);
}

CutPool CutPool::restore(const std::string& text) {
  nlohmann::json o;
  try {
    o = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("pool snapshot parse error: ") + e.what());
  }
  if (!o.contains("format") || o["format"] != "cutplane-pool/1")
    throw Error("not a cutplane-pool/1 snapshot");
  const auto& sel = o.at("selector");
  const SelectorKind kind = kind_from(sel.at("kind").get<std::string>());
  Selector selector = Selector::level1();
  switch (kind) {
    case SelectorKind::KeepAll: selector = Selector::keep_all(); break;
    case SelectorKind::Level1: selector = Selector::level1(); break;
    case SelectorKind::LimitedMemoryLevel1: selector = Selector::lml1(); break;
    case SelectorKind::OldestPrefix:
      selector = Selector::oldest_prefix(sel.at("window").get<int>());
      break;
    case SelectorKind::NewestSuffix:
      selector = Selector::newest_suffix_unsafe(sel.at("window").get<int>());
      break;
  }
  CutPool pool(o.at("state_dim").get<int>(), selector,
               o.at("epsilon0").get<double>());
  for (const auto& c : o.at("cuts")) {
    Cut cut;
    cut.intercept = c.at("intercept").get<double>();
    cut.gradient = vec_from(c.at("gradient"));
    cut.birth_iteration = c.at("birth").get<int>();
    if (static_cast<int>(cut.gradient.size()) != pool.state_dim_)
      throw DimensionMismatchError("snapshot cut dimension mismatch");
    pool.cuts_.push_back(std::move(cut));
  }
  for (const auto& t : o.at("trials")) {
    TrialRecord rec;
    rec.point = vec_from(t.at("point"));
    rec.best_value =
        t.at("best_value").is_null() ? kNegInf : t.at("best_value").get<double>();
    rec.argmax = t.at("argmax").get<std::vector<int>>();
    pool.trials_.push_back(std::move(rec));
  }
  pool.selected_.clear();
  for (const auto& b : o.at("selected"))
    pool.selected_.push_back(b.get<bool>() ? 1 : 0);
  if (pool.selected_.size() != pool.cuts_.size())
    throw Error("snapshot mask size mismatch");
  pool.num_selected_ = 0;
  for (char c : pool.selected_) pool.num_selected_ += (c != 0);
  return pool;
}

}  // namespace cutplane

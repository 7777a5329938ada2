#include "cutplane/bench.hpp"

#include <cmath>

#include "cutplane/rng.hpp"

namespace cutplane {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void PortfolioSpec::check_valid() const {
  if (num_assets < 1) throw SpecInvalidError("portfolio needs at least one risky asset");
  if (num_stages < 1) throw SpecInvalidError("portfolio needs at least one stage");
  if (num_realizations < 1) throw SpecInvalidError("num_realizations must be >= 1");
  if (static_cast<int>(max_position.size()) != num_assets)
    throw SpecInvalidError("max_position must have one entry per risky asset");
  for (int i = 0; i < num_assets; ++i)
    if (!(max_position(i) > 0.0 && max_position(i) <= 1.0))
      throw SpecInvalidError("position limits must lie in (0, 1]");
  if (static_cast<int>(sell_cost.size()) != num_stages ||
      static_cast<int>(buy_cost.size()) != num_stages)
    throw SpecInvalidError("transaction cost tables must have one entry per stage");
  for (int t = 0; t < num_stages; ++t) {
    if (static_cast<int>(sell_cost[static_cast<std::size_t>(t)].size()) != num_assets ||
        static_cast<int>(buy_cost[static_cast<std::size_t>(t)].size()) != num_assets)
      throw SpecInvalidError("transaction cost vectors must have one entry per asset");
    if (sell_cost[static_cast<std::size_t>(t)].minCoeff() <= 0.0 ||
        buy_cost[static_cast<std::size_t>(t)].minCoeff() <= 0.0)
      throw SpecInvalidError("transaction costs must be positive");
  }
  if (static_cast<int>(returns.size()) != num_stages)
    throw SpecInvalidError("returns table must have one entry per stage");
  for (int t = 0; t < num_stages; ++t) {
    const auto& reals = returns[static_cast<std::size_t>(t)];
    const std::size_t expect = t == 0 ? 1 : static_cast<std::size_t>(num_realizations);
    if (reals.size() != expect)
      throw SpecInvalidError("wrong number of return realizations at a stage");
    for (const Vector& r : reals) {
      if (static_cast<int>(r.size()) != num_assets + 1)
        throw SpecInvalidError("return vectors must cover every asset plus cash");
      if (r.minCoeff() <= 0.0) throw SpecInvalidError("gross returns must be positive");
    }
  }
  if (static_cast<int>(initial_holdings.size()) != num_assets + 1)
    throw SpecInvalidError("initial holdings must cover every asset plus cash");
  if (initial_holdings.minCoeff() < 0.0)
    throw SpecInvalidError("initial holdings must be nonnegative");
  if (static_cast<int>(terminal_mean_return.size()) != num_assets + 1)
    throw SpecInvalidError("terminal mean return must cover every asset plus cash");
}

StochasticProgram build_portfolio(const PortfolioSpec& spec) {
  spec.check_valid();
  const int n = spec.num_assets;
  const int T = spec.num_stages;
  const int dim = 3 * n + 1;

  StochasticProgram p;
  p.num_stages = T;
  p.initial_state = spec.initial_holdings;

  for (int t = 1; t <= T; ++t) {
    const auto& stage_returns = spec.returns[static_cast<std::size_t>(t - 1)];
    const int prev_dim = t == 1 ? n + 1 : dim;
    const double prob = 1.0 / static_cast<double>(stage_returns.size());
    const Vector& eta = spec.sell_cost[static_cast<std::size_t>(t - 1)];
    const Vector& nu = spec.buy_cost[static_cast<std::size_t>(t - 1)];

    std::vector<StageRealization> reals;
    for (const Vector& xi : stage_returns) {
      StageRealization r;
      r.probability = prob;
      r.cost = Vector::Zero(dim);  // income shows up only past stage T
      const int rows = 2 * n + 1;
      r.A = Matrix::Zero(rows, dim);
      r.B = Matrix::Zero(rows, prev_dim);
      r.rhs = Vector::Zero(rows);
      r.row_kinds.assign(static_cast<std::size_t>(rows), RowKind::Equality);

      // Asset balance: x(i) + y(i) - z(i) = xi(i) x_prev(i), i = 1..n.
      for (int i = 0; i < n; ++i) {
        r.A(i, i) = 1.0;
        r.A(i, n + 1 + i) = 1.0;       // sale
        r.A(i, 2 * n + 1 + i) = -1.0;  // purchase
        r.B(i, i) = -xi(i);
      }
      // Cash balance: x(n+1) - sum (1-eta) y + sum (1+nu) z = xi(n+1) x_prev(n+1).
      r.A(n, n) = 1.0;
      for (int i = 0; i < n; ++i) {
        r.A(n, n + 1 + i) = -(1.0 - eta(i));
        r.A(n, 2 * n + 1 + i) = 1.0 + nu(i);
      }
      r.B(n, n) = -xi(n);
      // Position limits: x(i) <= u(i) * budget, budget = xi . x_prev.
      for (int i = 0; i < n; ++i) {
        const int row = n + 1 + i;
        r.A(row, i) = 1.0;
        for (int l = 0; l <= n; ++l) r.B(row, l) = -spec.max_position(i) * xi(l);
        r.row_kinds[static_cast<std::size_t>(row)] = RowKind::LessEq;
      }
      reals.push_back(std::move(r));
    }
    p.stages.push_back(std::move(reals));
  }

  p.terminal_cost = Vector::Zero(dim);
  p.terminal_cost.head(n + 1) = -spec.terminal_mean_return;

  // Constant floors: wealth compounds by at most the largest gross return
  // each stage, so the negated income is bounded below. Factor 2 keeps the
  // floor strictly slack once real cuts exist.
  const double budget = spec.returns[0][0].dot(spec.initial_holdings.head(n + 1));
  double growth = 1.0;
  for (int t = 2; t <= T; ++t) {
    double stage_max = 0.0;
    for (const Vector& xi : spec.returns[static_cast<std::size_t>(t - 1)])
      stage_max = std::max(stage_max, xi.maxCoeff());
    growth *= stage_max;
  }
  const double income_cap =
      2.0 * spec.terminal_mean_return.maxCoeff() * std::max(budget, 1e-12) * growth;
  p.recourse_lower_bounds = Vector::Constant(std::max(0, T - 1), -income_cap);
  return p;
}

Cut portfolio_cut_closedform(const LpSolution& sol, const PortfolioSpec& spec,
                             int t, int j) {
  const int n = spec.num_assets;
  const Vector& xi = spec.returns[static_cast<std::size_t>(t - 1)]
                                 [t == 1 ? 0 : static_cast<std::size_t>(j)];
  const Vector lambda = sol.duals_eq.head(n + 1);
  const Vector position_mult = -sol.duals_ineq.head(n);  // >= 0 at optimality
  const double weighted = spec.max_position.dot(position_mult);

  Cut cut;
  cut.intercept = 0.0;  // every row of this model has zero right-hand side
  cut.gradient = Vector::Zero(3 * n + 1);  // previous stage decision block
  for (int l = 0; l <= n; ++l)
    cut.gradient(l) = (lambda(l) - weighted) * xi(l);
  return cut;
}

void InventorySpec::check_valid() const {
  if (num_stages < 1) throw SpecInvalidError("inventory needs at least one stage");
  if (num_realizations < 1) throw SpecInvalidError("num_realizations must be >= 1");
  if (static_cast<int>(unit_cost.size()) != num_stages ||
      static_cast<int>(backorder_cost.size()) != num_stages ||
      static_cast<int>(holding_cost.size()) != num_stages)
    throw SpecInvalidError("cost vectors must have one entry per stage");
  if (unit_cost.minCoeff() < 0.0 || backorder_cost.minCoeff() < 0.0 ||
      holding_cost.minCoeff() < 0.0)
    throw SpecInvalidError("costs must be nonnegative");
  if (initial_stock < 0.0) throw SpecInvalidError("initial stock must be nonnegative");
  if (static_cast<int>(demands.size()) != num_stages)
    throw SpecInvalidError("demand table must have one entry per stage");
  for (int t = 0; t < num_stages; ++t) {
    const std::size_t expect = t == 0 ? 1 : static_cast<std::size_t>(num_realizations);
    if (demands[static_cast<std::size_t>(t)].size() != static_cast<int>(expect))
      throw SpecInvalidError("wrong number of demand realizations at a stage");
    if (demands[static_cast<std::size_t>(t)].minCoeff() < 0.0)
      throw SpecInvalidError("demands must be nonnegative");
  }
  if (!(order_cap > 0.0)) throw SpecInvalidError("order cap must be positive");
}

StochasticProgram build_inventory(const InventorySpec& spec) {
  spec.check_valid();
  const int T = spec.num_stages;
  constexpr int kStock = 0, kLevel = 1, kOverage = 2, kShortage = 3, kPurchase = 4;
  constexpr int dim = 5;

  StochasticProgram p;
  p.num_stages = T;
  p.initial_state = Vector::Constant(1, spec.initial_stock);

  for (int t = 1; t <= T; ++t) {
    const Vector& stage_demands = spec.demands[static_cast<std::size_t>(t - 1)];
    const int prev_dim = t == 1 ? 1 : dim;
    const double prob = 1.0 / static_cast<double>(stage_demands.size());
    std::vector<StageRealization> reals;
    for (int d = 0; d < static_cast<int>(stage_demands.size()); ++d) {
      const double demand = stage_demands(d);
      StageRealization r;
      r.probability = prob;
      r.cost = Vector::Zero(dim);
      r.cost(kOverage) = spec.holding_cost(t - 1);
      r.cost(kShortage) = spec.backorder_cost(t - 1);
      r.cost(kPurchase) = spec.unit_cost(t - 1);
      r.A = Matrix::Zero(4, dim);
      r.B = Matrix::Zero(4, prev_dim);
      r.rhs = Vector::Zero(4);
      r.row_kinds = {RowKind::Equality, RowKind::Equality, RowKind::Equality,
                     RowKind::LessEq};
      r.free_vars.assign(dim, 0);
      r.free_vars[kStock] = 1;  // backorders drive the stock negative

      // stock = level - demand
      r.A(0, kStock) = 1.0;
      r.A(0, kLevel) = -1.0;
      r.rhs(0) = -demand;
      // overage - shortage = level - demand
      r.A(1, kLevel) = -1.0;
      r.A(1, kOverage) = 1.0;
      r.A(1, kShortage) = -1.0;
      r.rhs(1) = -demand;
      // purchase = level - previous stock; purchase >= 0 is the ordering rule
      r.A(2, kPurchase) = 1.0;
      r.A(2, kLevel) = -1.0;
      r.B(2, kStock) = 1.0;
      r.rhs(2) = 0.0;
      // level <= order cap (keeps the reachable states in a box)
      r.A(3, kLevel) = 1.0;
      r.rhs(3) = spec.order_cap;

      reals.push_back(std::move(r));
    }
    p.stages.push_back(std::move(reals));
  }
  // Costs are nonnegative, so zero floors are valid.
  p.recourse_lower_bounds = Vector::Zero(std::max(0, T - 1));
  return p;
}

InventorySpec generate_inventory_instance(int num_stages, int num_realizations,
                                          std::uint64_t seed) {
  if (num_stages < 1 || num_realizations < 1)
    throw SpecInvalidError("inventory generator needs T >= 1 and M >= 1");
  InventorySpec spec;
  spec.num_stages = num_stages;
  spec.num_realizations = num_realizations;
  spec.unit_cost = Vector::Zero(num_stages);
  spec.backorder_cost = Vector::Constant(num_stages, 2.8);
  spec.holding_cost = Vector::Constant(num_stages, 0.2);
  spec.initial_stock = 10.0;
  SplitMix64 rng = SplitMix64::stream(seed, 11);
  double max_total_demand = 0.0;
  for (int t = 1; t <= num_stages; ++t) {
    spec.unit_cost(t - 1) = 1.5 + std::cos(kPi * t / 6.0);
    const double base = 5.0 + 0.5 * t;
    Vector d;
    if (t == 1) {
      d = Vector::Constant(1, base);
    } else {
      d = Vector::Zero(num_realizations);
      for (int j = 0; j < num_realizations; ++j)
        d(j) = base * (1.0 + 0.1 * rng.next_normal());
    }
    max_total_demand += d.maxCoeff();
    spec.demands.push_back(std::move(d));
  }
  spec.order_cap = spec.initial_stock + max_total_demand;
  return spec;
}

PortfolioSpec generate_portfolio_instance(int num_stages, int num_realizations,
                                          int num_assets, std::uint64_t seed) {
  if (num_stages < 1 || num_realizations < 1 || num_assets < 1)
    throw SpecInvalidError("portfolio generator needs T, M, n >= 1");
  PortfolioSpec spec;
  spec.num_stages = num_stages;
  spec.num_realizations = num_realizations;
  spec.num_assets = num_assets;
  spec.max_position = Vector::Ones(num_assets);

  SplitMix64 rng = SplitMix64::stream(seed, 23);
  spec.initial_holdings = Vector::Zero(num_assets + 1);
  for (int i = 0; i <= num_assets; ++i)
    spec.initial_holdings(i) = 10.0 * rng.next_double();

  // One transaction-cost draw per (stage, asset); buying equals selling.
  for (int t = 1; t <= num_stages; ++t) {
    Vector cost(num_assets);
    for (int i = 0; i < num_assets; ++i) {
      const int u = 1 + rng.next_below(num_stages);
      cost(i) = 0.08 + 0.06 * std::cos(2.0 * kPi * u / num_stages);
    }
    spec.sell_cost.push_back(cost);
    spec.buy_cost.push_back(cost);
  }

  // Log-normal daily-return surrogate: drift 0.03%, volatility 1%.
  constexpr double kDrift = 0.0003, kVol = 0.01, kRiskFree = 1.001;
  for (int t = 1; t <= num_stages; ++t) {
    const int count = t == 1 ? 1 : num_realizations;
    std::vector<Vector> reals;
    for (int j = 0; j < count; ++j) {
      Vector xi(num_assets + 1);
      for (int i = 0; i < num_assets; ++i)
        xi(i) = std::exp(kDrift + kVol * rng.next_normal());
      xi(num_assets) = kRiskFree;
      reals.push_back(std::move(xi));
    }
    spec.returns.push_back(std::move(reals));
  }

  spec.terminal_mean_return = Vector::Zero(num_assets + 1);
  for (const Vector& xi : spec.returns.back()) spec.terminal_mean_return += xi;
  spec.terminal_mean_return /= static_cast<double>(spec.returns.back().size());
  return spec;
}

}  // namespace cutplane

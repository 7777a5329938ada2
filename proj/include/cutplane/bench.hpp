#pragma once

#include <cstdint>
#include <vector>

#include "cutplane/cutpool.hpp"
#include "cutplane/program.hpp"

namespace cutplane {

/// Multistage portfolio rebalancing with proportional transaction costs.
/// Stage decision vector (dimension 3n+1):
///   [ holdings x(1..n+1) | sales y(1..n) | purchases z(1..n) ]
/// where asset n+1 is cash. The model maximizes expected terminal income;
/// it is compiled in negated (minimization) form, so the optimal mean
/// income is the opposite of the program's optimal value.
struct PortfolioSpec {
  int num_assets = 0;        // n risky assets
  int num_stages = 0;        // T
  int num_realizations = 0;  // M per stage t >= 2
  Vector max_position;       // u, size n, entries in (0, 1]
  std::vector<Vector> sell_cost;  // per stage, size n, > 0
  std::vector<Vector> buy_cost;   // per stage, size n, > 0
  std::vector<std::vector<Vector>> returns;  // [t-1][j], gross, size n+1
  Vector initial_holdings;        // size n+1, >= 0
  Vector terminal_mean_return;    // expected gross return past stage T, size n+1

  void check_valid() const;  // throws SpecInvalidError
};

/// Canonical row order per realization (portfolio_cut_closedform relies
/// on it): equalities are the n asset balance rows then the cash balance
/// row; inequalities start with the n position-limit rows.
StochasticProgram build_portfolio(const PortfolioSpec& spec);

/// Gradient of a backward-pass cut from the known closed form for this
/// model: (equality duals minus <u, position multipliers> on every slot)
/// componentwise times the realization's returns, zero-padded over the
/// sales/purchases block. Cross-validates the generic dual assembly; the
/// two must agree to 1e-8.
Cut portfolio_cut_closedform(const LpSolution& sol, const PortfolioSpec& spec,
                             int t, int j);

/// Single-product inventory with backorders. Stage decision vector
/// (dimension 5): [ stock (free) | level | overage | shortage | purchase ]
/// with rows stock = level - demand, overage - shortage = level - demand,
/// purchase = level - previous stock, and level <= order_cap. The ordering
/// constraint level >= previous stock is exactly purchase >= 0, and the
/// purchase cost enters the cuts through that row's previous-stage
/// coefficient.
struct InventorySpec {
  int num_stages = 0;        // T
  int num_realizations = 0;  // M per stage t >= 2
  Vector unit_cost;          // c_t, size T
  Vector backorder_cost;     // b_t, size T
  Vector holding_cost;       // h_t, size T
  double initial_stock = 0.0;
  std::vector<Vector> demands;  // [t-1]: size 1 for t = 1, else M
  double order_cap = 0.0;       // upper bound on the level; generators pick
                                // initial stock + total max demand so it
                                // never binds at an optimum

  void check_valid() const;
};

StochasticProgram build_inventory(const InventorySpec& spec);

/// Seeded instance following the published benchmark recipes:
/// unit cost 1.5 + cos(pi t / 6), backorder 2.8, holding 0.2, initial
/// stock 10, equiprobable demands sampled from (5 + 0.5 t)(1 + 0.1 eps)
/// with standard normal eps.
InventorySpec generate_inventory_instance(int num_stages, int num_realizations,
                                          std::uint64_t seed);

/// Seeded instance with position limits u = 1, initial holdings uniform on
/// [0, 10], risk-free gross return 1.001, equiprobable synthetic risky
/// returns (log-normal surrogate with daily drift 0.03% and volatility 1%,
/// replacing the historical feed), and transaction costs
/// 0.08 + 0.06 cos(2 pi U / T) with U uniform on {1..T}, one draw per
/// (stage, asset).
PortfolioSpec generate_portfolio_instance(int num_stages, int num_realizations,
                                          int num_assets, std::uint64_t seed);

}  // namespace cutplane

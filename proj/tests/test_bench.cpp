#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cutplane/bench.hpp"
#include "cutplane/engine.hpp"
#include "support.hpp"

using namespace cutplane;
using testsupport::recourse_value;
using testsupport::scenario_form_lp;

namespace {

InventorySpec tiny_inventory() {
  InventorySpec spec;
  spec.num_stages = 1;
  spec.num_realizations = 1;
  spec.unit_cost = Vector::Constant(1, 1.0);
  spec.backorder_cost = Vector::Constant(1, 2.8);
  spec.holding_cost = Vector::Constant(1, 0.2);
  spec.initial_stock = 0.0;
  spec.demands = {Vector::Constant(1, 5.0)};
  spec.order_cap = 5.0;
  return spec;
}

PortfolioSpec flat_portfolio() {
  // n = 1, T = 2, M = 1, every gross return 1, both costs 0.1
  PortfolioSpec spec;
  spec.num_assets = 1;
  spec.num_stages = 2;
  spec.num_realizations = 1;
  spec.max_position = Vector::Ones(1);
  spec.sell_cost = {Vector::Constant(1, 0.1), Vector::Constant(1, 0.1)};
  spec.buy_cost = spec.sell_cost;
  spec.initial_holdings = Vector::Zero(2);
  spec.initial_holdings << 4.0, 2.0;
  spec.returns = {{Vector::Ones(2)}, {Vector::Ones(2)}};
  spec.terminal_mean_return = Vector::Ones(2);
  return spec;
}

double tree_value(const StochasticProgram& p) {
  const LpSolution sol = solve(extensive_form(p).lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  return sol.objective_value;
}

}  // namespace

TEST_CASE("degenerate single-stage inventory") {
  const StochasticProgram p = build_inventory(tiny_inventory());
  CHECK(validate(p).empty());
  const ExtensiveForm ef = extensive_form(p);
  const LpSolution sol = solve(ef.lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(5.0).epsilon(1e-10));
  // order up to the demand: level 5, purchase 5, no overage or shortage
  CHECK(sol.primal(1) == doctest::Approx(5.0));
  CHECK(sol.primal(4) == doctest::Approx(5.0));
  CHECK(sol.primal(2) == doctest::Approx(0.0));
  CHECK(sol.primal(3) == doctest::Approx(0.0));
}

TEST_CASE("overage/shortage split linearizes the piecewise cost exactly") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const double level = 20.0 * rng.next_double() - 5.0;
    const double demand = 12.0 * rng.next_double();
    const double holding = 0.2, backorder = 2.8;
    LinearProgram lp;
    lp.objective = Vector::Zero(2);
    lp.objective << holding, backorder;  // overage, shortage
    lp.eq_lhs = Matrix::Zero(1, 2);
    lp.eq_lhs << 1.0, -1.0;
    lp.eq_rhs = Vector::Constant(1, level - demand);
    lp.ineq_lhs = Matrix::Zero(0, 2);
    lp.ineq_rhs = Vector::Zero(0);
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    const double direct = backorder * std::max(demand - level, 0.0) +
                          holding * std::max(level - demand, 0.0);
    CHECK(sol.objective_value == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("three-stage inventory value matches the deterministic equivalents") {
  const InventorySpec spec = generate_inventory_instance(3, 2, 5);
  const StochasticProgram p = build_inventory(spec);
  CHECK(validate(p).empty());
  const double tree = tree_value(p);
  const LpSolution flat = solve(scenario_form_lp(p));
  REQUIRE(flat.status == LpStatus::Optimal);
  CHECK(std::fabs(tree - flat.objective_value) <=
        1e-8 * std::max(1.0, std::fabs(tree)));
}

TEST_CASE("inventory generator follows the published recipe") {
  const InventorySpec spec = generate_inventory_instance(6, 40, 99);
  for (int t = 1; t <= 6; ++t)
    CHECK(spec.unit_cost(t - 1) ==
          doctest::Approx(1.5 + std::cos(3.14159265358979323846 * t / 6.0)));
  CHECK(spec.unit_cost(2) == doctest::Approx(1.5));  // cos(pi/2) = 0
  CHECK(spec.unit_cost(5) == doctest::Approx(0.5));  // cos(pi) = -1
  CHECK(spec.backorder_cost(0) == doctest::Approx(2.8));
  CHECK(spec.holding_cost(0) == doctest::Approx(0.2));
  CHECK(spec.initial_stock == doctest::Approx(10.0));
  CHECK(spec.demands[0](0) == doctest::Approx(5.5));
  // stage-t demand support means 5 + 0.5 t within three standard errors
  for (int t = 2; t <= 6; ++t) {
    const Vector& d = spec.demands[static_cast<std::size_t>(t - 1)];
    const double base = 5.0 + 0.5 * t;
    const double se = 0.1 * base / std::sqrt(static_cast<double>(d.size()));
    CHECK(std::fabs(d.mean() - base) <= 3.0 * se);
  }
  // determinism
  const InventorySpec again = generate_inventory_instance(6, 40, 99);
  for (int t = 0; t < 6; ++t)
    CHECK((spec.demands[static_cast<std::size_t>(t)] -
           again.demands[static_cast<std::size_t>(t)])
              .lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("flat portfolio reduces to holding the initial wealth") {
  const PortfolioSpec spec = flat_portfolio();
  const StochasticProgram p = build_portfolio(spec);
  CHECK(validate(p).empty());
  // with unit returns and positive costs, never trade: income = 6
  const double tree = tree_value(p);
  CHECK(tree == doctest::Approx(-6.0).epsilon(1e-10));
  const LpSolution flat = solve(scenario_form_lp(p));
  CHECK(std::fabs(tree - flat.objective_value) <= 1e-8 * 6.0);
}

TEST_CASE("portfolio generator follows the published recipe") {
  const PortfolioSpec spec = generate_portfolio_instance(5, 3, 4, 123);
  CHECK((spec.max_position - Vector::Ones(4)).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(spec.initial_holdings.minCoeff() >= 0.0);
  CHECK(spec.initial_holdings.maxCoeff() <= 10.0);
  for (int t = 0; t < 5; ++t) {
    CHECK((spec.sell_cost[static_cast<std::size_t>(t)] -
           spec.buy_cost[static_cast<std::size_t>(t)])
              .lpNorm<Eigen::Infinity>() == 0.0);
    for (int i = 0; i < 4; ++i) {
      const double c = spec.sell_cost[static_cast<std::size_t>(t)](i);
      CHECK(c >= 0.02 - 1e-12);
      CHECK(c <= 0.14 + 1e-12);
    }
    for (const Vector& xi : spec.returns[static_cast<std::size_t>(t)]) {
      CHECK(xi(4) == doctest::Approx(1.001));  // risk-free slot
      CHECK(xi.minCoeff() > 0.0);
    }
  }
  // terminal mean is the stage-T support average
  Vector mean = Vector::Zero(5);
  for (const Vector& xi : spec.returns[4]) mean += xi;
  mean /= 3.0;
  CHECK((spec.terminal_mean_return - mean).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("portfolio cuts carry no intercept and match the closed form") {
  const PortfolioSpec spec = generate_portfolio_instance(3, 2, 2, 2024);
  const StochasticProgram p = build_portfolio(spec);
  REQUIRE(validate(p).empty());

  MethodConfig cfg;
  cfg.aggregation = Aggregation::MultiCut;
  cfg.selection = SelectionStrategy::Level1;
  cfg.forward_scenarios = 1;
  cfg.policy_eval_scenarios = 2;
  cfg.upper_bound_period = 1000000;
  cfg.max_iterations = 4;
  cfg.exhaustive_forward = true;
  cfg.seed = 9;

  ApproxRecourse approx = ApproxRecourse::create(p, cfg);
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const auto trajs = forward_pass(p, approx, enumerate_scenarios(p), 1);
    backward_pass(p, approx, trajs, it, 1);

    // generic duals against the closed-form gradient at the latest trials
    for (int t = 2; t <= p.num_stages; ++t) {
      for (int j = 0; j < p.realization_count(t); ++j) {
        const Vector& x_prev = trajs[0].decisions[static_cast<std::size_t>(t - 2)];
        const StageLp slp =
            assemble_stage_lp(p, approx, t, j, x_prev, EvalMode::SelectedOnly);
        const LpSolution sol = solve(slp.lp);
        REQUIRE(sol.status == LpStatus::Optimal);
        const Cut generic = extract_cut(p, approx, slp, sol);
        const Cut closed = portfolio_cut_closedform(sol, spec, t, j);
        CHECK((generic.gradient - closed.gradient).lpNorm<Eigen::Infinity>() <=
              1e-8);
        CHECK(std::fabs(generic.intercept) <= 1e-10);
      }
    }
  }
  // every stored cut has zero intercept
  for (int t = 2; t <= p.num_stages; ++t)
    for (int j = 0; j < approx.pool_count(t); ++j)
      for (const Cut& cut : approx.pool(t, j).cuts())
        CHECK(std::fabs(cut.intercept) <= 1e-10);
}

TEST_CASE("forward trajectories respect every portfolio constraint") {
  const PortfolioSpec spec = generate_portfolio_instance(6, 2, 10, 14);
  const StochasticProgram p = build_portfolio(spec);
  MethodConfig cfg;
  cfg.aggregation = Aggregation::MultiCut;
  cfg.forward_scenarios = 1;
  cfg.seed = 14;
  ApproxRecourse approx = ApproxRecourse::create(p, cfg);
  SplitMix64 rng(14);
  std::vector<Scenario> scenarios = {sample_scenario(p, rng)};
  const auto trajs = forward_pass(p, approx, scenarios, 1);
  const Trajectory& traj = trajs[0];
  Vector x_prev = p.initial_state;
  for (int t = 1; t <= p.num_stages; ++t) {
    const int j = traj.realizations[static_cast<std::size_t>(t - 1)];
    const StageRealization& real = p.realization(t, j);
    const Vector& x = traj.decisions[static_cast<std::size_t>(t - 1)];
    const Vector residual = real.A * x + real.B * x_prev - real.rhs;
    for (int r = 0; r < real.num_rows(); ++r) {
      if (real.row_kinds[static_cast<std::size_t>(r)] == RowKind::Equality)
        CHECK(std::fabs(residual(r)) <= 1e-8);
      else
        CHECK(residual(r) <= 1e-8);
    }
    CHECK(x.minCoeff() >= -1e-9);
    x_prev = x;
  }
}

TEST_CASE("inventory recourse is convex along a segment") {
  const InventorySpec spec = generate_inventory_instance(3, 2, 7);
  const StochasticProgram p = build_inventory(spec);
  // three collinear previous-decision states (only the stock slot matters
  // downstream, but keep full 5-dim points)
  auto state = [](double stock) {
    Vector x = Vector::Zero(5);
    x(0) = stock;
    x(1) = std::max(stock, 0.0);
    return x;
  };
  const Vector a = state(-2.0), b = state(6.0), mid = state(2.0);
  for (int j = 0; j < p.realization_count(2); ++j) {
    const double qa = recourse_value(p, 2, j, a);
    const double qb = recourse_value(p, 2, j, b);
    const double qm = recourse_value(p, 2, j, mid);
    CHECK(qm <= 0.5 * qa + 0.5 * qb + 1e-9);
  }
}

TEST_CASE("spec validation rejects bad inputs") {
  InventorySpec inv = tiny_inventory();
  inv.order_cap = 0.0;
  CHECK_THROWS_AS(build_inventory(inv), SpecInvalidError);
  inv = tiny_inventory();
  inv.demands[0](0) = -1.0;
  CHECK_THROWS_AS(build_inventory(inv), SpecInvalidError);

  PortfolioSpec port = flat_portfolio();
  port.max_position(0) = 1.5;
  CHECK_THROWS_AS(build_portfolio(port), SpecInvalidError);
  port = flat_portfolio();
  port.returns[1][0](0) = 0.0;
  CHECK_THROWS_AS(build_portfolio(port), SpecInvalidError);
  port = flat_portfolio();
  port.sell_cost[0](0) = 0.0;
  CHECK_THROWS_AS(build_portfolio(port), SpecInvalidError);
}

TEST_CASE("generated inventory instances solve end to end") {
  const StochasticProgram p = build_inventory(generate_inventory_instance(3, 2, 21));
  const double oracle = tree_value(p);
  MethodConfig cfg;
  cfg.aggregation = Aggregation::MultiCut;
  cfg.selection = SelectionStrategy::LimitedMemoryLevel1;
  cfg.forward_scenarios = 1;
  cfg.policy_eval_scenarios = 2;
  cfg.upper_bound_period = 1000000;
  cfg.exhaustive_forward = true;
  cfg.epsilon = 1e-6;
  cfg.max_iterations = 40;
  cfg.seed = 3;
  const ConvergenceLog log = run(p, cfg);
  CHECK(std::fabs(log.final_z_inf() - oracle) <= 1e-5);
}

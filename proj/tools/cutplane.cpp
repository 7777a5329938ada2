// cutplane: solver front end for multistage stochastic linear programs.
//
// Subcommands:
//   run       solve a model with one decomposition method or all six
//   oracle    print the deterministic-equivalent optimal value
//   report    tabulate completed runs from an output directory
//   validate  structural + sampled recourse diagnostics for a model file
//
// Exit codes: 0 success/converged, 1 model or usage error,
//             2 iteration limit reached before convergence, 3 tree too large.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cutplane/bench.hpp"
#include "cutplane/engine.hpp"
#include "cutplane/model_io.hpp"

namespace fs = std::filesystem;
using namespace cutplane;

namespace {

constexpr const char* kMethodOrder[] = {"sddp",  "sddp-cs1",    "sddp-cs2",
                                        "muda",  "cusmuda-cs1", "cusmuda-cs2"};

struct ModelOptions {
  std::string model_path;
  std::string family;
  int stages = 5;
  int realizations = 4;
  int assets = 3;
  std::uint64_t seed = 0;
  std::string dump_path;
};

void add_model_options(CLI::App* cmd, ModelOptions& opts) {
  auto* model = cmd->add_option("--model", opts.model_path,
                                "Model file (cutplane-sp/1)");
  auto* family =
      cmd->add_option("--family", opts.family, "Generated family")
          ->check(CLI::IsMember({"inventory", "portfolio"}));
  cmd->add_option("--T", opts.stages, "Stages for generated families");
  cmd->add_option("--M", opts.realizations,
                  "Realizations per stage for generated families");
  cmd->add_option("--n", opts.assets, "Risky assets (portfolio family)");
  cmd->add_option("--dump-model", opts.dump_path,
                  "Write the model being solved to this path");
  model->excludes(family);
  family->excludes(model);
}

StochasticProgram make_model(const ModelOptions& opts) {
  if (!opts.model_path.empty()) return load_program(opts.model_path);
  if (opts.family == "inventory")
    return build_inventory(generate_inventory_instance(
        opts.stages, opts.realizations, opts.seed));
  if (opts.family == "portfolio")
    return build_portfolio(generate_portfolio_instance(
        opts.stages, opts.realizations, opts.assets, opts.seed));
  throw Error("pass either --model or --family");
}

bool parse_method(const std::string& name, bool allow_unsafe, MethodConfig& cfg) {
  cfg.selector_window = 1;
  if (name == "sddp" || name == "muda") {
    cfg.selection = SelectionStrategy::KeepAll;
  } else if (name == "sddp-cs1" || name == "cusmuda-cs1") {
    cfg.selection = SelectionStrategy::Level1;
  } else if (name == "sddp-cs2" || name == "cusmuda-cs2") {
    cfg.selection = SelectionStrategy::LimitedMemoryLevel1;
  } else {
    // expert selectors: {sddp|muda}-oldest<H> and {sddp|muda}-newest<H>
    auto parse_window = [&](const std::string& stem, SelectionStrategy sel) {
      if (name.rfind("sddp-" + stem, 0) != 0 && name.rfind("muda-" + stem, 0) != 0)
        return false;
      const std::size_t pos = name.find(stem) + stem.size();
      const int window = std::atoi(name.c_str() + pos);
      if (window < 1) return false;
      cfg.selection = sel;
      cfg.selector_window = window;
      cfg.aggregation = name.rfind("sddp", 0) == 0 ? Aggregation::SingleCut
                                                   : Aggregation::MultiCut;
      return true;
    };
    if (parse_window("oldest", SelectionStrategy::OldestPrefix)) return true;
    if (parse_window("newest", SelectionStrategy::NewestSuffix)) {
      if (!allow_unsafe) {
        std::cerr << "newest-window selectors break the nestedness the "
                     "convergence guarantee needs; pass --unsafe-selector "
                     "to use them anyway\n";
        return false;
      }
      return true;
    }
    return false;
  }
  cfg.aggregation = name.rfind("sddp", 0) == 0 ? Aggregation::SingleCut
                                               : Aggregation::MultiCut;
  return true;
}

int default_workers() {
  const char* env = std::getenv("CUTPLANE_WORKERS");
  if (env == nullptr) return 1;
  const int w = std::atoi(env);
  return w >= 1 ? w : 1;
}

int print_diagnostics(const std::vector<Diagnostic>& diags) {
  for (const Diagnostic& d : diags) {
    std::cerr << "model error";
    if (d.stage > 0) {
      std::cerr << " (stage " << d.stage;
      if (d.realization >= 0) std::cerr << ", realization " << d.realization;
      std::cerr << ")";
    }
    std::cerr << ": " << d.message << "\n";
  }
  return diags.empty() ? 0 : 1;
}

void write_artifacts(const fs::path& out_dir, const ConvergenceLog& log) {
  const std::string name = log.config.method_name();
  {
    std::ofstream csv(out_dir / (name + ".csv"));
    log.write_csv(csv);
  }
  {
    std::ofstream summary(out_dir / (name + "_summary.txt"));
    log.write_summary(summary);
  }
  {
    std::ofstream props(out_dir / (name + "_cut_proportions.csv"));
    props << "stage,mean_selected_proportion\n";
    const std::vector<double> mean = log.mean_stage_proportions();
    for (int t = 2; t <= log.num_stages; ++t) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g",
                    mean[static_cast<std::size_t>(t - 2)]);
      props << t << ',' << buf << "\n";
    }
  }
}

int cmd_run(const ModelOptions& model_opts, const std::string& method,
            bool allow_unsafe, MethodConfig base, const std::string& out_dir) {
  StochasticProgram program;
  try {
    program = make_model(model_opts);
  } catch (const Error& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 1;
  }
  if (!model_opts.dump_path.empty()) save_program(model_opts.dump_path, program);
  if (const int rc = print_diagnostics(validate(program)); rc != 0) return rc;

  std::vector<std::string> methods;
  if (method == "all-six")
    methods.assign(std::begin(kMethodOrder), std::end(kMethodOrder));
  else
    methods.push_back(method);

  fs::create_directories(out_dir);
  bool all_converged = true;
  for (const std::string& name : methods) {
    MethodConfig cfg = base;
    if (!parse_method(name, allow_unsafe, cfg)) {
      std::cerr << "unknown method '" << name << "'\n";
      return 1;
    }
    ConvergenceLog log;
    try {
      run(program, cfg, log);
    } catch (const SubproblemInfeasibleError& e) {
      write_artifacts(out_dir, log);
      std::cerr << "infeasible subproblem at stage " << e.stage
                << ", realization " << e.realization << ", scenario "
                << e.scenario << ": " << e.what() << "\n";
      return 1;
    }
    write_artifacts(out_dir, log);
    std::cout << name << ": " << log.stop_reason << " after "
              << (log.rows.empty() ? 0 : log.rows.back().iteration)
              << " iterations, z_inf=" << log.final_z_inf()
              << ", z_sup=" << log.final_z_sup() << "\n";
    if (!log.converged) all_converged = false;
  }
  return all_converged ? 0 : 2;
}

int cmd_oracle(const ModelOptions& model_opts, std::int64_t node_cap) {
  StochasticProgram program;
  try {
    program = make_model(model_opts);
  } catch (const Error& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 1;
  }
  if (!model_opts.dump_path.empty()) save_program(model_opts.dump_path, program);
  if (const int rc = print_diagnostics(validate(program)); rc != 0) return rc;
  ExtensiveForm ef;
  try {
    ef = extensive_form(program, node_cap);
  } catch (const TreeTooLargeError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  const LpSolution sol = solve(ef.lp);
  if (sol.status != LpStatus::Optimal) {
    std::cerr << "deterministic equivalent is "
              << (sol.status == LpStatus::Infeasible ? "infeasible" : "unbounded")
              << "\n";
    return 1;
  }
  std::printf("%.10g\n", sol.objective_value);
  return 0;
}

std::optional<std::map<std::string, std::string>> read_summary(const fs::path& p) {
  std::ifstream in(p);
  if (!in) return std::nullopt;
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t colon = line.find(": ");
    if (colon == std::string::npos) continue;
    kv[line.substr(0, colon)] = line.substr(colon + 2);
  }
  return kv;
}

int cmd_report(const std::string& dir) {
  std::vector<std::map<std::string, std::string>> summaries;
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) {
    std::cerr << "not a directory: " << dir << "\n";
    return 1;
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 12 && name.substr(name.size() - 12) == "_summary.txt")
      files.push_back(entry.path());
  }
  // canonical column order first, anything else after
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    auto rank = [](const fs::path& p) {
      const std::string stem = p.filename().string();
      for (std::size_t i = 0; i < std::size(kMethodOrder); ++i)
        if (stem == std::string(kMethodOrder[i]) + "_summary.txt")
          return static_cast<int>(i);
      return static_cast<int>(std::size(kMethodOrder));
    };
    const int ra = rank(a), rb = rank(b);
    return ra != rb ? ra < rb : a < b;
  });
  for (const fs::path& f : files)
    if (auto kv = read_summary(f)) summaries.push_back(std::move(*kv));
  if (summaries.empty()) {
    std::cerr << "no completed runs in " << dir << "\n";
    return 1;
  }

  std::printf("%-14s %10s %10s %14s %14s  %s\n", "method", "iters", "time_s",
              "z_inf", "z_sup", "mean selected proportion per stage");
  for (const auto& kv : summaries) {
    auto get = [&](const std::string& key) {
      const auto it = kv.find(key);
      return it == kv.end() ? std::string("-") : it->second;
    };
    const double wall_ms = std::atof(get("total_wall_ms").c_str());
    std::string props;
    for (int t = 2;; ++t) {
      const auto it = kv.find("mean_selected_prop_t" + std::to_string(t));
      if (it == kv.end()) break;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3f", std::atof(it->second.c_str()));
      if (!props.empty()) props += ' ';
      props += buf;
    }
    std::printf("%-14s %10s %10.2f %14s %14s  %s\n", get("method").c_str(),
                get("iterations").c_str(), wall_ms / 1000.0,
                get("final_z_inf").c_str(), get("final_z_sup").c_str(),
                props.c_str());
  }
  return 0;
}

int cmd_validate(const ModelOptions& model_opts) {
  StochasticProgram program;
  try {
    program = make_model(model_opts);
  } catch (const Error& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 1;
  }
  if (!model_opts.dump_path.empty()) save_program(model_opts.dump_path, program);
  const int rc = print_diagnostics(validate(program));
  if (rc == 0) std::cout << "ok\n";
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multistage stochastic LP solver: single-cut and multicut "
               "decomposition with Level 1 / limited-memory cut selection"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Solve with one method or all six");
  ModelOptions run_model;
  std::string method = "all-six";
  std::string out_dir = "runs";
  bool allow_unsafe = false;
  bool exhaustive = false;
  MethodConfig base;
  base.workers = default_workers();
  add_model_options(run_cmd, run_model);
  run_cmd->add_option("--method", method,
                      "sddp | sddp-cs1 | sddp-cs2 | muda | cusmuda-cs1 | "
                      "cusmuda-cs2 | all-six");
  run_cmd->add_option("--N", base.forward_scenarios, "Forward scenarios per iteration");
  run_cmd->add_option("--S", base.policy_eval_scenarios, "Policy-evaluation scenarios");
  run_cmd->add_option("--alpha", base.alpha, "Confidence level for the upper bound");
  run_cmd->add_option("--epsilon", base.epsilon, "Stopping tolerance");
  run_cmd->add_option("--epsilon0", base.epsilon0, "Cut comparison tolerance");
  run_cmd->add_option("--seed", base.seed, "Random seed");
  run_cmd->add_option("--max-iters", base.max_iterations, "Iteration cap");
  run_cmd->add_option("--ub-period", base.upper_bound_period,
                      "Evaluate the policy every k iterations");
  run_cmd->add_flag("--exhaustive", exhaustive,
                    "Enumerate every scenario in the forward pass");
  run_cmd->add_option("--workers", base.workers,
                      "Parallel LP solves (CUTPLANE_WORKERS as fallback)");
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_flag("--unsafe-selector", allow_unsafe,
                    "Allow newest-window selectors (no convergence guarantee)");

  auto* oracle_cmd =
      app.add_subcommand("oracle", "Deterministic-equivalent optimal value");
  ModelOptions oracle_model;
  std::int64_t node_cap = kDefaultTreeNodeCap;
  add_model_options(oracle_cmd, oracle_model);
  oracle_cmd->add_option("--seed", oracle_model.seed, "Seed for generated families");
  oracle_cmd->add_option("--node-cap", node_cap, "Scenario tree node cap");

  auto* report_cmd = app.add_subcommand("report", "Tabulate a run directory");
  std::string report_dir;
  report_cmd->add_option("dir", report_dir, "Run directory")->required();

  auto* validate_cmd = app.add_subcommand("validate", "Model diagnostics");
  ModelOptions validate_model;
  add_model_options(validate_cmd, validate_model);
  validate_cmd->add_option("--seed", validate_model.seed, "Seed for generated families");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      run_model.seed = base.seed;  // one seed drives generation and solving
      base.exhaustive_forward = exhaustive;
      return cmd_run(run_model, method, allow_unsafe, base, out_dir);
    }
    if (oracle_cmd->parsed()) return cmd_oracle(oracle_model, node_cap);
    if (report_cmd->parsed()) return cmd_report(report_dir);
    if (validate_cmd->parsed()) return cmd_validate(validate_model);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

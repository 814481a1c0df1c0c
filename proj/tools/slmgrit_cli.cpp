// slmgrit: command-line driver for single solves, iteration-count tables,
// Fourier estimates and the verification batteries.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <optional>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "slmgrit/experiment.hpp"
#include "slmgrit/verify.hpp"

namespace {

using namespace slmgrit;
using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;
constexpr int kExitVerifyFailed = 1;

// Raised for bad user input discovered after argument parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunFlags {
  std::string config_file;
  std::string out = "run";
  int dim = 1;
  std::string wave;
  int p = 1;
  int r = 1;
  int n_x = 0;
  int n_t = 0;
  double dt = 0.0;
  std::vector<int> m;
  int max_levels = 0;
  std::string kind, departures, gmres, relaxation;
  std::uint64_t seed = 0;
  double tol = 0.0;
  int max_iters = 0;
  int threads = 1;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write '" + path + "'");
  return os;
}

ExperimentConfig build_config(const RunFlags& f, const CLI::App& cmd) {
  ExperimentConfig cfg;
  cfg.seed = default_seed();
  if (!f.config_file.empty()) cfg = config_from_json(load_json(f.config_file), cfg);
  auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--dim")) cfg.dim = f.dim;
  if (given("--wave")) cfg.wave = f.wave;
  if (given("--p")) cfg.p = f.p;
  if (given("--r")) cfg.r = f.r;
  if (given("--nx")) cfg.n_x = f.n_x;
  if (given("--nt")) cfg.n_t = f.n_t;
  if (given("--dt")) cfg.dt = f.dt;
  if (given("--m")) cfg.coarsening = f.m;
  if (given("--max-levels")) cfg.max_levels = f.max_levels;
  if (given("--kind")) cfg.kind = parse_operator_kind(f.kind);
  if (given("--departures")) cfg.departures = parse_departure_policy(f.departures);
  if (given("--gmres")) cfg.gmres = parse_gmres_mode(f.gmres);
  if (given("--relaxation")) cfg.relaxation = parse_relaxation(f.relaxation);
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--tol")) cfg.tol = f.tol;
  if (given("--max-iters")) cfg.max_iters = f.max_iters;
  if (given("--threads")) cfg.threads = f.threads;
  validate(cfg);
  return cfg;
}

int cmd_run(const RunFlags& f, const CLI::App& cmd) {
  const ExperimentConfig cfg = build_config(f, cmd);
  const auto start = std::chrono::steady_clock::now();
  // Configuration problems (divisibility, dimensions) surface while building.
  std::optional<Hierarchy> h;
  try {
    h.emplace(Hierarchy::build(hierarchy_config(cfg)));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  RunOutcome out;
  out.report = solve(*h, solve_config(cfg)).report;
  out.levels = h->num_levels();
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  {
    auto os = open_out(f.out + ".json");
    os << report_json(cfg, out).dump(2) << '\n';
  }
  {
    auto os = open_out(f.out + ".csv");
    write_history_csv(os, out.report);
  }
  std::cout << "status=" << to_string(out.report.status) << " iterations=" << out.report.iterations
            << " levels=" << out.levels << " final_factor=" << out.report.final_factor << '\n';
  return 0;
}

int cmd_table(const std::string& id, const std::string& cap_text, const std::string& out,
              std::uint64_t seed, bool seed_given, int jobs) {
  TableSpec spec;
  long long cap = 0;
  try {
    spec = table_spec(id);
    cap = cap_text.empty() ? default_size_cap(spec) : parse_size(cap_text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (jobs < 1) throw UsageError("--jobs must be positive");
  const TablePlan plan = plan_table(spec, cap, seed_given ? seed : default_seed());
  for (const auto& c : plan.skipped)
    std::cerr << "skipped " << c.wave << " p=" << c.p << " m=" << c.m << " mesh=" << c.mesh.n_x
              << "^" << spec.dim << "x" << c.mesh.n_t << " (exceeds size cap " << cap << ")\n";
  const auto rows = run_table(spec, plan, jobs);
  if (out.empty()) {
    write_table_csv(std::cout, spec, rows);
  } else {
    auto os = open_out(out);
    write_table_csv(os, spec, rows);
  }
  return 0;
}

int cmd_lfa(int p, const std::vector<int>& m_list, const std::string& c_grid, const std::string& kind,
            const std::string& out) {
  std::vector<LfaRow> rows;
  try {
    rows = lfa_sweep(p, m_list, parse_c_grid(c_grid), parse_coarse_symbol(kind));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (out.empty()) {
    write_lfa_csv(std::cout, rows);
  } else {
    auto os = open_out(out);
    write_lfa_csv(os, rows);
  }
  return 0;
}

int cmd_verify(const std::string& suite, const std::string& out) {
  const auto suites = verify_suites();
  if (std::find(suites.begin(), suites.end(), suite) == suites.end())
    throw UsageError("unknown verify suite '" + suite + "'");
  const VerifyReport rep = run_verify(suite);
  const std::string text = verify_json(rep).dump(2);
  std::cout << text << '\n';
  if (!out.empty()) open_out(out) << text << '\n';
  return rep.passed() ? 0 : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-Lagrangian MGRIT experiments for periodic advection"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run = app.add_subcommand("run", "Solve one configuration; writes <out>.json and <out>.csv");
  run->add_option("--config", rf.config_file, "JSON config file (flags override it)");
  run->add_option("--out", rf.out, "Output basename")->capture_default_str();
  run->add_option("--dim", rf.dim, "Spatial dimension (1 or 2)");
  run->add_option("--wave", rf.wave, "Wave speed: C1..C5 or const:a[,b]");
  run->add_option("--p", rf.p, "Interpolation degree (1, 3, 5)");
  run->add_option("--r", rf.r, "ERK order for departure points (1, 3, 5); defaults to p");
  run->add_option("--nx", rf.n_x, "Spatial points per dimension");
  run->add_option("--nt", rf.n_t, "Fine time steps");
  run->add_option("--dt", rf.dt, "Fine time step (default 0.85 h)");
  run->add_option("--m", rf.m, "Coarsening factor(s); the last repeats")->delimiter(',');
  run->add_option("--max-levels", rf.max_levels, "Level cap (0 = coarsen fully, 2 = two-level)");
  run->add_option("--kind", rf.kind, "Coarse operator: corrected, rediscretized, forward_euler, ideal");
  run->add_option("--departures", rf.departures, "Coarse departures: backtrack, erk_rediscretized, erk_substeps");
  run->add_option("--gmres", rf.gmres, "GMRES mode: auto, fixed, tolerance");
  run->add_option("--relaxation", rf.relaxation, "FCF or F");
  run->add_option("--seed", rf.seed, "Random initial iterate seed (default $MGRIT_ADVECT_SEED or 1)");
  run->add_option("--tol", rf.tol, "Relative residual tolerance");
  run->add_option("--max-iters", rf.max_iters, "Iteration cap");
  run->add_option("--threads", rf.threads, "Threads for relaxation sweeps");

  std::string table_id, size_cap, table_out;
  std::uint64_t table_seed = 0;
  int jobs = 1;
  auto* table = app.add_subcommand("table", "Sweep an iteration-count table");
  table->add_option("id", table_id, "two_level_1d, multilevel_1d or multilevel_2d")->required();
  table->add_option("--size-cap", size_cap, "Largest n_x^dim * n_t to run, e.g. 2^8x2^10 (default: smallest mesh)");
  table->add_option("--out", table_out, "CSV file (default stdout)");
  auto* table_seed_opt = table->add_option("--seed", table_seed, "Random initial iterate seed");
  table->add_option("--jobs", jobs, "Cells run concurrently")->capture_default_str();

  int lfa_p = 1;
  std::vector<int> lfa_m{2, 4, 8, 16, 32};
  std::string c_grid = "0.5:1:0.01", lfa_kind = "corrected", lfa_out;
  auto* lfa = app.add_subcommand("lfa", "Fourier estimate of the two-level convergence factor");
  lfa->add_option("--p", lfa_p, "Interpolation degree")->capture_default_str();
  lfa->add_option("--m", lfa_m, "Coarsening factors")->delimiter(',')->capture_default_str();
  lfa->add_option("--c", c_grid, "CFL numbers: start:stop:step or a,b,c")->capture_default_str();
  lfa->add_option("--kind", lfa_kind, "corrected or rediscretized")->capture_default_str();
  lfa->add_option("--out", lfa_out, "CSV file (default stdout)");

  std::string suite, verify_out;
  auto* verify = app.add_subcommand("verify", "Run a verification battery (exit 1 if a check fails)");
  verify->add_option("suite", suite, "truncation, stability or footnote_equivalence")->required();
  verify->add_option("--out", verify_out, "Also write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(rf, *run);
    if (*table) return cmd_table(table_id, size_cap, table_out, table_seed, table_seed_opt->count() > 0, jobs);
    if (*lfa) return cmd_lfa(lfa_p, lfa_m, c_grid, lfa_kind, lfa_out);
    if (*verify) return cmd_verify(suite, verify_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

#include "slmgrit/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace slmgrit {

using nlohmann::json;

std::string_view to_string(GmresMode g) {
  switch (g) {
    case GmresMode::Auto: return "auto";
    case GmresMode::Fixed: return "fixed";
    case GmresMode::Tolerance: return "tolerance";
  }
  return "?";
}

GmresMode parse_gmres_mode(std::string_view s) {
  if (s == "auto") return GmresMode::Auto;
  if (s == "fixed") return GmresMode::Fixed;
  if (s == "tolerance") return GmresMode::Tolerance;
  throw std::invalid_argument("unknown GMRES mode '" + std::string(s) + "'");
}

SpatialGrid ExperimentConfig::grid() const {
  return dim == 2 ? SpatialGrid::square(n_x) : SpatialGrid::line(n_x);
}

double ExperimentConfig::time_step() const {
  return dt.value_or(kDefaultCflFactor * grid().h());
}

std::uint64_t default_seed() {
  const char* env = std::getenv("MGRIT_ADVECT_SEED");
  if (env == nullptr || *env == '\0') return 1;
  std::uint64_t v = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto [ptr, ec] = std::from_chars(env, end, v);
  if (ec != std::errc{} || ptr != end) return 1;
  return v;
}

namespace {

double parse_double(std::string_view s, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    throw std::invalid_argument(std::string("cannot parse ") + what + " '" + std::string(s) + "'");
  return v;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace

WaveSpeed make_wave(const std::string& id, int dim) {
  constexpr std::string_view prefix = "const:";
  if (id.rfind(prefix, 0) == 0) {
    const std::string body = id.substr(prefix.size());
    if (dim == 1) {
      const double a = parse_double(body, "constant speed");
      return WaveSpeed::custom(id, [a](double, double) { return a; }, true);
    }
    const auto comma = body.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("2D constant speed needs two components: const:a,b");
    const double a = parse_double(std::string_view(body).substr(0, comma), "constant speed");
    const double b = parse_double(std::string_view(body).substr(comma + 1), "constant speed");
    return WaveSpeed::custom(id, [a, b](double, double, double) { return Vec2{a, b}; }, true);
  }
  WaveSpeed ws = WaveSpeed::catalog(id);
  if (ws.dim() != dim)
    throw std::invalid_argument("wave speed '" + id + "' is " + std::to_string(ws.dim()) +
                                "D but the problem is " + std::to_string(dim) + "D");
  return ws;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.dim != 1 && cfg.dim != 2) throw std::invalid_argument("dim must be 1 or 2");
  check_degree(cfg.p);
  ErkScheme::of_order(cfg.erk_order());
  if (cfg.n_x < 2) throw std::invalid_argument("n_x must be at least 2");
  if (cfg.n_t < 1) throw std::invalid_argument("n_t must be positive");
  if (cfg.dt && !(*cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (cfg.coarsening.empty()) throw std::invalid_argument("coarsening schedule is empty");
  for (int m : cfg.coarsening)
    if (m < 2) throw std::invalid_argument("coarsening factors must be at least 2");
  if (cfg.max_levels < 0 || cfg.max_levels == 1)
    throw std::invalid_argument("max_levels must be 0 (no cap) or at least 2");
  if (cfg.kind == OperatorKind::FineSL)
    throw std::invalid_argument("'fine' is not a coarse operator kind");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be positive");
  if (cfg.threads < 1) throw std::invalid_argument("threads must be positive");
  make_wave(cfg.wave, cfg.dim);
}

HierarchyConfig hierarchy_config(const ExperimentConfig& cfg) {
  validate(cfg);
  HierarchyConfig h;
  h.grid = cfg.grid();
  h.wave = make_wave(cfg.wave, cfg.dim);
  h.p = cfg.p;
  h.r = cfg.erk_order();
  h.n_t = cfg.n_t;
  h.dt = cfg.time_step();
  h.coarsening = cfg.coarsening;
  h.max_levels = cfg.max_levels;
  h.coarse_kind = cfg.kind;
  h.departures = cfg.departures;
  GmresMode mode = cfg.gmres;
  if (mode == GmresMode::Auto) mode = cfg.max_levels == 2 ? GmresMode::Fixed : GmresMode::Tolerance;
  h.gmres = mode == GmresMode::Fixed ? GmresConfig::two_level() : GmresConfig::multilevel();
  return h;
}

SolveConfig solve_config(const ExperimentConfig& cfg) {
  SolveConfig s;
  s.max_iters = cfg.max_iters;
  s.rel_tol = cfg.tol;
  s.seed = cfg.seed;
  s.cycle.relaxation = cfg.relaxation;
  s.cycle.exec.threads = cfg.threads;
  return s;
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig cfg) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "dim") cfg.dim = v.get<int>();
      else if (key == "wave") cfg.wave = v.get<std::string>();
      else if (key == "p") cfg.p = v.get<int>();
      else if (key == "r") cfg.r = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
      else if (key == "n_x") cfg.n_x = v.get<int>();
      else if (key == "n_t") cfg.n_t = v.get<int>();
      else if (key == "dt") cfg.dt = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      else if (key == "coarsening")
        cfg.coarsening = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
      else if (key == "max_levels") cfg.max_levels = v.get<int>();
      else if (key == "kind") cfg.kind = parse_operator_kind(v.get<std::string>());
      else if (key == "departures") cfg.departures = parse_departure_policy(v.get<std::string>());
      else if (key == "gmres") cfg.gmres = parse_gmres_mode(v.get<std::string>());
      else if (key == "relaxation") cfg.relaxation = parse_relaxation(v.get<std::string>());
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "tol") cfg.tol = v.get<double>();
      else if (key == "max_iters") cfg.max_iters = v.get<int>();
      else if (key == "threads") cfg.threads = v.get<int>();
      else throw std::invalid_argument("unknown config key '" + key + "'");
    } catch (const json::exception& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
  }
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  return json{{"dim", cfg.dim},
              {"wave", cfg.wave},
              {"p", cfg.p},
              {"r", cfg.erk_order()},
              {"n_x", cfg.n_x},
              {"n_t", cfg.n_t},
              {"dt", cfg.time_step()},
              {"coarsening", cfg.coarsening},
              {"max_levels", cfg.max_levels},
              {"kind", to_string(cfg.kind)},
              {"departures", to_string(cfg.departures)},
              {"gmres", to_string(cfg.gmres)},
              {"relaxation", to_string(cfg.relaxation)},
              {"seed", cfg.seed},
              {"tol", cfg.tol},
              {"max_iters", cfg.max_iters},
              {"threads", cfg.threads}};
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Hierarchy h = Hierarchy::build(hierarchy_config(cfg));
  RunOutcome out;
  out.report = solve(h, solve_config(cfg)).report;
  out.levels = h.num_levels();
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

json report_json(const ExperimentConfig& cfg, const RunOutcome& out) {
  json hist = json::array();
  for (double r : out.report.history) hist.push_back(std::isfinite(r) ? json(r) : json(nullptr));
  return json{{"config", config_to_json(cfg)},
              {"levels", out.levels},
              {"iterations", out.report.iterations},
              {"status", to_string(out.report.status)},
              {"final_factor", out.report.final_factor},
              {"residual_history", hist},
              {"wall_time_seconds", out.wall_seconds}};
}

void write_history_csv(std::ostream& os, const ConvergenceReport& rep) {
  os << "iteration,residual,factor\n";
  for (std::size_t k = 0; k < rep.history.size(); ++k) {
    os << k << ',' << format_double(rep.history[k]) << ',';
    if (k > 0) os << format_double(rep.history[k] / rep.history[k - 1]);
    os << '\n';
  }
}

std::vector<std::string> table_ids() { return {"two_level_1d", "multilevel_1d", "multilevel_2d"}; }

TableSpec table_spec(const std::string& id) {
  TableSpec s;
  s.id = id;
  if (id == "two_level_1d" || id == "multilevel_1d") {
    s.dim = 1;
    s.waves = {"C1", "C2", "C3"};
    s.meshes = {{1 << 8, 1 << 10}, {1 << 10, 1 << 12}, {1 << 12, 1 << 14}};
    s.two_level = id == "two_level_1d";
    return s;
  }
  if (id == "multilevel_2d") {
    s.dim = 2;
    s.waves = {"C4", "C5"};
    s.meshes = {{1 << 6, 1 << 10}, {1 << 7, 1 << 11}, {1 << 8, 1 << 12}, {1 << 9, 1 << 13}};
    s.baseline = true;
    return s;
  }
  throw std::invalid_argument("unknown table id '" + id + "'");
}

long long mesh_size(int dim, const Mesh& mesh) {
  long long s = mesh.n_t;
  for (int d = 0; d < dim; ++d) s *= mesh.n_x;
  return s;
}

long long parse_size(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty size");
  long long total = 1;
  std::stringstream ss(text);
  std::string factor;
  while (std::getline(ss, factor, 'x')) {
    long long v = 0;
    if (factor.rfind("2^", 0) == 0) {
      const int e = static_cast<int>(parse_double(factor.substr(2), "size exponent"));
      if (e < 0 || e > 62) throw std::invalid_argument("size exponent out of range");
      v = 1LL << e;
    } else {
      const auto [ptr, ec] = std::from_chars(factor.data(), factor.data() + factor.size(), v);
      if (ec != std::errc{} || ptr != factor.data() + factor.size() || v < 0)
        throw std::invalid_argument("cannot parse size '" + text + "'");
    }
    total *= v;
  }
  return total;
}

long long default_size_cap(const TableSpec& spec) {
  long long cap = mesh_size(spec.dim, spec.meshes.front());
  for (const auto& m : spec.meshes) cap = std::min(cap, mesh_size(spec.dim, m));
  return cap;
}

TablePlan plan_table(const TableSpec& spec, long long size_cap, std::uint64_t seed) {
  TablePlan plan;
  for (int p : spec.degrees)
    for (const auto& mesh : spec.meshes)
      for (const auto& wave : spec.waves)
        for (int m : spec.factors) {
          TableCell cell{wave, p, m, mesh, {}};
          auto& c = cell.config;
          c.dim = spec.dim;
          c.wave = wave;
          c.p = p;
          c.n_x = mesh.n_x;
          c.n_t = mesh.n_t;
          c.coarsening = {m};
          c.max_levels = spec.two_level ? 2 : 0;
          c.kind = OperatorKind::Corrected;
          c.departures = DeparturePolicy::Backtrack;
          c.seed = seed;
          if (mesh_size(spec.dim, mesh) <= size_cap)
            plan.run.push_back(std::move(cell));
          else
            plan.skipped.push_back(std::move(cell));
        }
  return plan;
}

ExperimentConfig baseline_config(const ExperimentConfig& corrected) {
  ExperimentConfig b = corrected;
  b.kind = OperatorKind::Rediscretized;
  b.departures = DeparturePolicy::ErkSubsteps;
  return b;
}

std::vector<TableRow> run_table(const TableSpec& spec, const TablePlan& plan, int jobs) {
  std::vector<TableRow> rows(plan.run.size());
  auto work = [&](std::size_t i) {
    const TableCell& cell = plan.run[i];
    TableRow row;
    row.cell = cell;
    const RunOutcome out = run_experiment(cell.config);
    row.levels = out.levels;
    row.iterations = out.report.iterations;
    row.status = out.report.status;
    row.final_factor = out.report.final_factor;
    if (spec.baseline) {
      const RunOutcome b = run_experiment(baseline_config(cell.config));
      row.baseline_iterations = b.report.iterations;
      row.baseline_status = b.report.status;
    }
    rows[i] = std::move(row);
  };
  const std::size_t workers = std::max(1, std::min<int>(jobs, static_cast<int>(rows.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) work(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < rows.size() && !failed; i = next++) {
        try {
          work(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_table_csv(std::ostream& os, const TableSpec& spec, const std::vector<TableRow>& rows) {
  os << "table,dim,wave,p,r,m,n_x,n_t,levels,iterations,status,final_factor,"
        "baseline_iterations,baseline_status\n";
  for (const auto& row : rows) {
    const auto& c = row.cell.config;
    os << spec.id << ',' << c.dim << ',' << c.wave << ',' << c.p << ',' << c.erk_order() << ','
       << row.cell.m << ',' << c.n_x << ',' << c.n_t << ',' << row.levels << ',' << row.iterations
       << ',' << to_string(row.status) << ',' << format_double(row.final_factor) << ',';
    if (row.baseline_iterations) os << *row.baseline_iterations;
    os << ',';
    if (row.baseline_status) os << to_string(*row.baseline_status);
    os << '\n';
  }
}

std::vector<double> parse_c_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw std::invalid_argument("c grid must be start:stop:step");
    const double a = parse_double(parts[0], "c start");
    const double b = parse_double(parts[1], "c stop");
    const double s = parse_double(parts[2], "c step");
    if (!(s > 0.0) || b < a) throw std::invalid_argument("c grid needs step > 0 and stop >= start");
    const long long count = std::llround(std::floor((b - a) / s + 1e-9)) + 1;
    for (long long k = 0; k < count; ++k) out.push_back(a + k * s);
    return out;
  }
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) out.push_back(parse_double(part, "c value"));
  if (out.empty()) throw std::invalid_argument("empty c grid");
  return out;
}

std::vector<LfaRow> lfa_sweep(int p, const std::vector<int>& m_list, const std::vector<double>& c_grid,
                              CoarseSymbol kind) {
  check_degree(p);
  std::vector<LfaRow> rows;
  for (int m : m_list) {
    if (m < 1) throw std::invalid_argument("coarsening factors must be positive");
    for (double c : c_grid) rows.push_back({p, m, c, rho_estimate(p, m, c, kind), kind});
  }
  return rows;
}

void write_lfa_csv(std::ostream& os, const std::vector<LfaRow>& rows) {
  os << "p,m,c,rho,coarse_kind\n";
  for (const auto& r : rows)
    os << r.p << ',' << r.m << ',' << format_double(r.c) << ',' << format_double(r.rho) << ','
       << to_string(r.kind) << '\n';
}

}  // namespace slmgrit

#pragma once

// Experiment descriptions shared by the command-line tool and the test suites:
// a flat configuration record, JSON (de)serialisation, single runs, the
// iteration-count tables and Fourier-estimate sweeps.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "slmgrit/fourier.hpp"
#include "slmgrit/mgrit.hpp"

namespace slmgrit {

enum class GmresMode { Auto, Fixed, Tolerance };

std::string_view to_string(GmresMode g);
GmresMode parse_gmres_mode(std::string_view s);

struct ExperimentConfig {
  int dim = 1;
  /// Catalog id (C1..C5) or "const:a" / "const:a,b" for a constant velocity.
  std::string wave = "C1";
  int p = 1;
  /// ERK order for departure tracing; defaults to p.
  std::optional<int> r;
  int n_x = 256;
  int n_t = 1024;
  /// Fine time step; defaults to 0.85 h.
  std::optional<double> dt;
  std::vector<int> coarsening{4};
  int max_levels = 0;
  OperatorKind kind = OperatorKind::Corrected;
  DeparturePolicy departures = DeparturePolicy::Backtrack;
  /// Auto: fixed 10 iterations on two-level runs, tolerance 1e-2 (cap 10)
  /// otherwise.
  GmresMode gmres = GmresMode::Auto;
  Relaxation relaxation = Relaxation::FCF;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  int max_iters = 100;
  int threads = 1;

  int erk_order() const { return r.value_or(p); }
  SpatialGrid grid() const;
  double time_step() const;
};

/// Seed from MGRIT_ADVECT_SEED when set (and parseable), else 1.
std::uint64_t default_seed();

/// Builds a wave speed from an id as accepted by ExperimentConfig::wave.
WaveSpeed make_wave(const std::string& id, int dim);

/// Throws std::invalid_argument for out-of-range fields.
void validate(const ExperimentConfig& cfg);

HierarchyConfig hierarchy_config(const ExperimentConfig& cfg);
SolveConfig solve_config(const ExperimentConfig& cfg);

/// Applies the keys present in `j` on top of `base`. Unknown keys are errors.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct RunOutcome {
  ConvergenceReport report;
  int levels = 0;
  double wall_seconds = 0.0;
};

RunOutcome run_experiment(const ExperimentConfig& cfg);
nlohmann::json report_json(const ExperimentConfig& cfg, const RunOutcome& out);
/// Columns: iteration,residual,factor.
void write_history_csv(std::ostream& os, const ConvergenceReport& rep);

// Tables -------------------------------------------------------------------

struct Mesh {
  int n_x = 0;
  int n_t = 0;
};

struct TableSpec {
  std::string id;
  int dim = 1;
  std::vector<std::string> waves;
  std::vector<int> degrees{1, 3, 5};
  std::vector<int> factors{4, 8, 16};
  std::vector<Mesh> meshes;
  bool two_level = false;
  /// Also run the rediscretized operator with erk_substeps departures.
  bool baseline = false;
};

std::vector<std::string> table_ids();
/// Throws std::invalid_argument for an unknown id.
TableSpec table_spec(const std::string& id);

/// Space-time point count n_x^dim * n_t.
long long mesh_size(int dim, const Mesh& mesh);

/// Parses "N", "AxB[xC]" with factors given as integers or "2^k".
long long parse_size(const std::string& text);

/// Default cap: the smallest mesh of the table.
long long default_size_cap(const TableSpec& spec);

struct TableCell {
  std::string wave;
  int p = 1;
  int m = 4;
  Mesh mesh;
  ExperimentConfig config;
};

struct TableRow {
  TableCell cell;
  int levels = 0;
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIters;
  double final_factor = 0.0;
  std::optional<int> baseline_iterations;
  std::optional<SolveStatus> baseline_status;
};

struct TablePlan {
  std::vector<TableCell> run;
  std::vector<TableCell> skipped;
};

TablePlan plan_table(const TableSpec& spec, long long size_cap, std::uint64_t seed);
/// Runs the planned cells, `jobs` at a time; rows keep the plan order.
std::vector<TableRow> run_table(const TableSpec& spec, const TablePlan& plan, int jobs = 1);
ExperimentConfig baseline_config(const ExperimentConfig& corrected);

/// Header: table,dim,wave,p,r,m,n_x,n_t,levels,iterations,status,final_factor,
/// baseline_iterations,baseline_status
void write_table_csv(std::ostream& os, const TableSpec& spec, const std::vector<TableRow>& rows);

// Fourier sweeps -----------------------------------------------------------

struct LfaRow {
  int p = 1;
  int m = 2;
  double c = 0.0;
  double rho = 0.0;
  CoarseSymbol kind = CoarseSymbol::Corrected;
};

/// Parses "start:stop:step" (inclusive) or a comma-separated list.
std::vector<double> parse_c_grid(const std::string& text);
std::vector<LfaRow> lfa_sweep(int p, const std::vector<int>& m_list, const std::vector<double>& c_grid,
                              CoarseSymbol kind);
/// Header: p,m,c,rho,coarse_kind
void write_lfa_csv(std::ostream& os, const std::vector<LfaRow>& rows);

}  // namespace slmgrit

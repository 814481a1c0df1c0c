#pragma once

// Linear multigrid-reduction-in-time for u_{n+1} = Phi_n u_n + g_{n+1}.
//
// Levels are built by coarsening the time grid by m_l; coarse levels solve the
// residual (error) equation with a zero initial state. Restriction and
// interpolation are injection at C-points. Each V-cycle performs FCF (or F)
// pre-relaxation, the recursive coarse correction and an F post-relaxation;
// the coarsest level is solved by sequential time stepping.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slmgrit/coarse_correction.hpp"
#include "slmgrit/core.hpp"
#include "slmgrit/semi_lagrangian.hpp"

namespace slmgrit {

enum class OperatorKind { FineSL, Rediscretized, Corrected, ForwardEuler, Ideal };
enum class DeparturePolicy { Backtrack, ErkRediscretized, ErkSubsteps };
enum class Relaxation { FCF, F };
enum class SolveStatus { Converged, Diverged, MaxIters };

std::string_view to_string(OperatorKind k);
std::string_view to_string(DeparturePolicy d);
std::string_view to_string(Relaxation r);
std::string_view to_string(SolveStatus s);
OperatorKind parse_operator_kind(std::string_view s);
DeparturePolicy parse_departure_policy(std::string_view s);
Relaxation parse_relaxation(std::string_view s);

struct HierarchyConfig {
  SpatialGrid grid = SpatialGrid::line(64);
  WaveSpeed wave = WaveSpeed::catalog("C1");
  int p = 1;
  int r = 1;
  int n_t = 64;
  double dt = 0.0;
  /// Coarsening factor per level transition; the last entry repeats.
  std::vector<int> coarsening{4};
  /// Cap on the number of levels including the fine one; 0 means no cap.
  int max_levels = 0;
  OperatorKind coarse_kind = OperatorKind::Corrected;
  DeparturePolicy departures = DeparturePolicy::Backtrack;
  GmresConfig gmres = GmresConfig::multilevel();
};

struct Level {
  int index = 0;
  int n_steps = 0;
  double dt = 0.0;
  /// Number of level-0 steps spanned by one step of this level.
  long long fine_steps_per_step = 1;
  /// Coarsening factor towards the next coarser level (0 on the coarsest).
  int m_to_coarser = 0;
  OperatorKind kind = OperatorKind::FineSL;
  std::vector<DepartureSet> departures;
  std::vector<CorrectionField> phi;
  std::vector<CorrectionField> sigma;
};

class Hierarchy {
public:
  /// Throws std::invalid_argument on inconsistent configurations
  /// (non-divisible step counts, even p, dimension mismatch, ...).
  static Hierarchy build(const HierarchyConfig& cfg);

  const HierarchyConfig& config() const { return cfg_; }
  const SpatialGrid& grid() const { return cfg_.grid; }
  int num_levels() const { return static_cast<int>(levels_.size()); }
  const Level& level(int l) const { return levels_.at(l); }
  const DerivativeStencil& stencil() const { return stencil_; }

  /// out = Phi_n^{(l)} in.
  void step(int l, int n, std::span<const double> in, std::span<double> out) const;

private:
  Hierarchy(HierarchyConfig cfg, DerivativeStencil stencil)
      : cfg_(std::move(cfg)), stencil_(std::move(stencil)) {}

  HierarchyConfig cfg_;
  DerivativeStencil stencil_;
  std::vector<Level> levels_;
};

/// u_0..u_N on one level's time grid.
struct SpaceTimeState {
  std::vector<GridFunction> u;

  static SpaceTimeState zeros(std::size_t n_steps, std::size_t n_space);
  std::size_t n_steps() const { return u.empty() ? 0 : u.size() - 1; }
  GridFunction& operator[](std::size_t n) { return u[n]; }
  const GridFunction& operator[](std::size_t n) const { return u[n]; }
  double norm() const { return space_time_norm(u); }
};

/// Work-sharing over independent C-intervals. threads <= 1 runs inline; the
/// result is identical for any thread count.
struct Execution {
  int threads = 1;
};

void f_relax(const Hierarchy& h, int l, SpaceTimeState& u, const SpaceTimeState& g,
             Execution ex = {});
void c_relax(const Hierarchy& h, int l, SpaceTimeState& u, const SpaceTimeState& g,
             Execution ex = {});
/// r_n = g_n + Phi_{n-1} u_{n-1} - u_n for n >= 1, r_0 = 0.
SpaceTimeState residual(const Hierarchy& h, int l, const SpaceTimeState& u,
                        const SpaceTimeState& g);
/// Sequential time stepping from u_0 over the whole level.
void sequential_solve(const Hierarchy& h, int l, SpaceTimeState& u, const SpaceTimeState& g);

struct CycleOptions {
  Relaxation relaxation = Relaxation::FCF;
  Execution exec{};
};

void v_cycle(const Hierarchy& h, int l, SpaceTimeState& u, const SpaceTimeState& g,
             const CycleOptions& opts = {});

struct SolveConfig {
  int max_iters = 100;
  double rel_tol = 1e-10;
  double divergence_factor = 1e6;
  std::uint64_t seed = 1;
  CycleOptions cycle{};
};

struct ConvergenceReport {
  /// ||r^(k)||_2 for k = 0..iterations (initial residual first).
  std::vector<double> history;
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIters;
  /// ||r^(k)|| / ||r^(k-1)|| on the final iteration (0 if no iteration ran).
  double final_factor = 0.0;
};

struct SolveResult {
  ConvergenceReport report;
  SpaceTimeState state;
};

/// Initial iterate: u_0 from the initial condition, u_1..u_N uniform random
/// in [0, 1) drawn sequentially from one stream seeded with cfg.seed.
SpaceTimeState initial_iterate(const Hierarchy& h, std::uint64_t seed);
SolveResult solve(const Hierarchy& h, const SolveConfig& cfg);

}  // namespace slmgrit

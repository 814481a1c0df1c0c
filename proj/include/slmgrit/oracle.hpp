#pragma once

// Reference computations used to check the discrete operators: accurate
// characteristic tracing, the ideal coarse operator, the gap between the ideal
// and the modelled coarse operators, and log-log order fits.

#include <span>
#include <utility>
#include <vector>

#include "slmgrit/core.hpp"
#include "slmgrit/semi_lagrangian.hpp"

namespace slmgrit {

/// Classical RK4 backwards along the characteristic from (arrival, t_start +
/// step) to t_start. Starts from 2^12 substeps and keeps doubling (up to 2^16)
/// until two successive resolutions agree to 1e-12.
double trace_back_exact(const WaveSpeed& ws, double arrival, double t_start, double step);
Vec2 trace_back_exact(const WaveSpeed& ws, Vec2 arrival, double t_start, double step);

/// Departure set with every departure located by trace_back_exact.
DepartureSet trace_departures_exact(const SpatialGrid& grid, const WaveSpeed& ws, double t_start,
                                    double step);

/// Composition of the fine steps, earliest first.
GridFunction ideal_coarse_step(std::span<const DepartureSet> fine, int p,
                               std::span<const double> u);

enum class GapCorrection { Identity, BackwardEuler };

struct GapConfig {
  int p = 1;
  int m = 4;
  int n_x = 64;
  double dt = 0.0;
  WaveSpeed wave = WaveSpeed::catalog("C2");
  GapCorrection correction = GapCorrection::Identity;
};

/// ||prod S_fine u - C S_coarse u||_inf / ||phi||_inf at t = 0 with u the
/// sampled initial condition; 1D only. Throws std::domain_error("gap
/// normalization degenerate") when phi vanishes.
double measure_ideal_gap(const GapConfig& cfg);

struct OrderFit {
  std::vector<std::pair<double, double>> points;
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual of the fit in log space.
  double residual = 0.0;
};

/// Least-squares slope of log(gap) against log(h). Needs at least 3 points
/// with positive h and gap.
OrderFit fit_order(std::vector<std::pair<double, double>> points);

}  // namespace slmgrit

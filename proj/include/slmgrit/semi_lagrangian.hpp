#pragma once

// Fine-grid semi-Lagrangian time stepping: ERK departure tracing, departure
// decomposition into (east neighbour, offset), Lagrange stencils and the
// matrix-free operator application in 1D and 2D.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "slmgrit/core.hpp"

namespace slmgrit {

/// Explicit Runge-Kutta tableau used to trace characteristics backwards.
///
///   r = 1: forward Euler.
///   r = 3: Kutta's third-order method, c = (0, 1/2, 1),
///          a21 = 1/2, a31 = -1, a32 = 2, b = (1/6, 2/3, 1/6).
///   r = 5: six-stage Runge-Kutta-Fehlberg tableau with its fifth-order
///          weights b = (16/135, 0, 6656/12825, 28561/56430, -9/50, 2/55).
struct ErkScheme {
  int order = 1;
  std::vector<std::vector<double>> a;  // strictly lower triangular rows
  std::vector<double> b;
  std::vector<double> c;

  static ErkScheme of_order(int r);
  int stages() const { return static_cast<int>(b.size()); }
};

/// Interpolation stencil of odd degree p over offsets -west()..east()
/// relative to the east neighbour of the departure point.
class StencilSpec {
public:
  explicit StencilSpec(int p);
  int degree() const { return p_; }
  int west() const { return (p_ + 1) / 2; }
  int east() const { return (p_ - 1) / 2; }
  int width() const { return p_ + 1; }

private:
  int p_;
};

/// Throws std::invalid_argument("unsupported interpolation degree") unless
/// p is 1, 3 or 5.
void check_degree(int p);

/// Lagrange weights for offsets j = -west..east evaluated at -eps; entry k of
/// the returned array corresponds to offset j = k - west.
using InterpWeights = std::array<double, 6>;
InterpWeights interp_weights(int p, double eps);

/// One ERK step of size -step applied to dxi/dt = alpha(xi, t) starting from
/// (arrival, t_start + step). Returns the departure coordinate at t_start.
double erk_trace_back(const WaveSpeed& ws, double arrival, double t_start, double step,
                      const ErkScheme& scheme);
Vec2 erk_trace_back(const WaveSpeed& ws, Vec2 arrival, double t_start, double step,
                    const ErkScheme& scheme);

/// East neighbour and offset of a departure coordinate: coordinate = x_E - h*eps
/// modulo the period, with 0 <= eps < 1 and E in [0, n).
struct Decomposition {
  int east = 0;
  double eps = 0.0;
};
Decomposition decompose(const SpatialGrid& grid, double coordinate);

/// Same decomposition expressed relative to an arrival node: the departure
/// is node(arrival_index) - displacement.
Decomposition decompose_displacement(const SpatialGrid& grid, int arrival_index,
                                     double displacement);

/// Departure data of one time step on one level. Entry k describes the
/// characteristic arriving at node k (flat index in 2D). Displacements are
/// arrival minus departure in physical units and are never wrapped.
struct DepartureSet {
  int dim = 1;
  int n = 0;
  double t_start = 0.0;
  double step = 0.0;
  std::vector<std::int32_t> east_x;
  std::vector<std::int32_t> east_y;
  std::vector<double> eps;
  std::vector<double> nu;
  std::vector<double> disp_x;
  std::vector<double> disp_y;

  std::size_t size() const { return eps.size(); }

  static DepartureSet from_displacements(const SpatialGrid& grid, double t_start, double step,
                                         std::vector<double> disp_x,
                                         std::vector<double> disp_y = {});
};

/// Departures of every node for the step [t_start, t_start + step], traced
/// with a single ERK step.
DepartureSet trace_departures(const SpatialGrid& grid, const WaveSpeed& ws, double t_start,
                              double step, const ErkScheme& scheme);

/// Departures traced with `substeps` consecutive ERK steps of size step/substeps.
DepartureSet trace_departures_substeps(const SpatialGrid& grid, const WaveSpeed& ws,
                                       double t_start, double step, int substeps,
                                       const ErkScheme& scheme);

/// out_i = sum_j w_j(eps_i) u[E_i + j]; tensor-product weights in 2D.
void sl_step(const DepartureSet& dep, int p, std::span<const double> u, std::span<double> out);
GridFunction sl_step(const DepartureSet& dep, int p, std::span<const double> u);

}  // namespace slmgrit

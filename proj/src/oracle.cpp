#include "slmgrit/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "slmgrit/coarse_correction.hpp"

namespace slmgrit {

namespace {

constexpr int kStartSubsteps = 1 << 12;
constexpr int kMaxSubsteps = 1 << 16;

template <class State, class Rhs>
State rk4_backward(State x, double t_end, double step, int substeps, Rhs f) {
  const double dt = -step / substeps;
  double t = t_end;
  for (int s = 0; s < substeps; ++s) {
    const State k1 = f(x, t);
    const State k2 = f(x + 0.5 * dt * k1, t + 0.5 * dt);
    const State k3 = f(x + 0.5 * dt * k2, t + 0.5 * dt);
    const State k4 = f(x + dt * k3, t + dt);
    x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t_end + (s + 1) * dt;
  }
  return x;
}

struct P2 {
  double x, y;
};
P2 operator+(P2 a, P2 b) { return {a.x + b.x, a.y + b.y}; }
P2 operator*(double s, P2 a) { return {s * a.x, s * a.y}; }

double distance(double a, double b) { return std::abs(a - b); }
double distance(P2 a, P2 b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

template <class State, class Rhs>
State converged_trace(State start, double t_end, double step, Rhs f) {
  State prev = rk4_backward(start, t_end, step, kStartSubsteps / 2, f);
  for (int n = kStartSubsteps;; n *= 2) {
    const State cur = rk4_backward(start, t_end, step, n, f);
    if (distance(cur, prev) < 1e-12 || n >= kMaxSubsteps) return cur;
    prev = cur;
  }
}

}  // namespace

double trace_back_exact(const WaveSpeed& ws, double arrival, double t_start, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("trace_back_exact: step must be positive");
  return converged_trace(arrival, t_start + step, step,
                         [&](double x, double t) { return ws.alpha(x, t); });
}

Vec2 trace_back_exact(const WaveSpeed& ws, Vec2 arrival, double t_start, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("trace_back_exact: step must be positive");
  const P2 r = converged_trace(P2{arrival[0], arrival[1]}, t_start + step, step, [&](P2 q, double t) {
    const Vec2 v = ws.velocity(q.x, q.y, t);
    return P2{v[0], v[1]};
  });
  return {r.x, r.y};
}

DepartureSet trace_departures_exact(const SpatialGrid& grid, const WaveSpeed& ws, double t_start,
                                    double step) {
  const int n = grid.n();
  std::vector<double> dx(grid.size());
  // Every node shares one displacement when the speed ignores position.
  if (ws.space_independent()) {
    if (grid.dim() == 1) {
      dx.assign(grid.size(), -trace_back_exact(ws, 0.0, t_start, step));
      return DepartureSet::from_displacements(grid, t_start, step, std::move(dx));
    }
    const Vec2 d = trace_back_exact(ws, Vec2{0.0, 0.0}, t_start, step);
    dx.assign(grid.size(), -d[0]);
    return DepartureSet::from_displacements(grid, t_start, step, std::move(dx),
                                            std::vector<double>(grid.size(), -d[1]));
  }
  if (grid.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      const double x = grid.node(i);
      dx[i] = x - trace_back_exact(ws, x, t_start, step);
    }
    return DepartureSet::from_displacements(grid, t_start, step, std::move(dx));
  }
  std::vector<double> dy(grid.size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Vec2 a{grid.node(i), grid.node(j)};
      const Vec2 d = trace_back_exact(ws, a, t_start, step);
      dx[grid.index(i, j)] = a[0] - d[0];
      dy[grid.index(i, j)] = a[1] - d[1];
    }
  return DepartureSet::from_displacements(grid, t_start, step, std::move(dx), std::move(dy));
}

GridFunction ideal_coarse_step(std::span<const DepartureSet> fine, int p,
                               std::span<const double> u) {
  GridFunction cur(u.begin(), u.end());
  GridFunction next(u.size());
  for (const auto& dep : fine) {
    sl_step(dep, p, cur, next);
    std::swap(cur, next);
  }
  return cur;
}

double measure_ideal_gap(const GapConfig& cfg) {
  check_degree(cfg.p);
  if (cfg.m < 1) throw std::invalid_argument("coarsening factor must be positive");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (cfg.wave.dim() != 1) throw std::invalid_argument("gap measurement is one-dimensional");
  const SpatialGrid grid = SpatialGrid::line(cfg.n_x);

  std::vector<DepartureSet> fine;
  for (int k = 0; k < cfg.m; ++k)
    fine.push_back(trace_departures_exact(grid, cfg.wave, k * cfg.dt, cfg.dt));
  const DepartureSet coarse = trace_departures_exact(grid, cfg.wave, 0.0, cfg.m * cfg.dt);

  const CorrectionField phi = phi_vector(std::span<const DepartureSet>(fine), coarse, cfg.p);
  const double phi_norm = phi.max_abs();
  if (phi_norm == 0.0) throw std::domain_error("gap normalization degenerate");

  const GridFunction u = initial_condition(grid);
  const GridFunction ideal = ideal_coarse_step(fine, cfg.p, u);
  GridFunction model = sl_step(coarse, cfg.p, u);
  if (cfg.correction == GapCorrection::BackwardEuler) {
    const GmresConfig full{static_cast<int>(grid.size()), 1e-14};
    model = gmres_solve(phi, DerivativeStencil::for_degree(cfg.p), model, full).x;
  }
  double gap = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) gap = std::max(gap, std::abs(ideal[i] - model[i]));
  return gap / phi_norm;
}

OrderFit fit_order(std::vector<std::pair<double, double>> points) {
  if (points.size() < 3) throw std::invalid_argument("fit_order needs at least 3 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [h, g] : points) {
    if (!(h > 0.0) || !(g > 0.0)) throw std::invalid_argument("fit_order: non-positive value");
    const double x = std::log(h), y = std::log(g);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(points.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_order: mesh sizes must differ");
  OrderFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (const auto& [h, g] : points) {
    const double e = std::log(g) - (fit.intercept + fit.slope * std::log(h));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  fit.points = std::move(points);
  return fit;
}

}  // namespace slmgrit

#include "slmgrit/semi_lagrangian.hpp"

#include <cmath>
#include <stdexcept>

namespace slmgrit {

ErkScheme ErkScheme::of_order(int r) {
  ErkScheme s;
  s.order = r;
  switch (r) {
    case 1:
      s.a = {{}};
      s.b = {1.0};
      s.c = {0.0};
      break;
    case 3:
      s.a = {{}, {0.5}, {-1.0, 2.0}};
      s.b = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
      s.c = {0.0, 0.5, 1.0};
      break;
    case 5:
      s.a = {{},
             {1.0 / 4.0},
             {3.0 / 32.0, 9.0 / 32.0},
             {1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0},
             {439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0},
             {-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0}};
      s.b = {16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0};
      s.c = {0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0};
      break;
    default:
      throw std::invalid_argument("unsupported ERK order " + std::to_string(r));
  }
  return s;
}

void check_degree(int p) {
  if (p != 1 && p != 3 && p != 5) throw std::invalid_argument("unsupported interpolation degree");
}

StencilSpec::StencilSpec(int p) : p_(p) { check_degree(p); }

InterpWeights interp_weights(int p, double eps) {
  check_degree(p);
  const int west = (p + 1) / 2;
  const int width = p + 1;
  const double z = -eps;
  InterpWeights w{};
  for (int k = 0; k < width; ++k) {
    const int j = k - west;
    double num = 1.0;
    double den = 1.0;
    for (int q = 0; q < width; ++q) {
      if (q == k) continue;
      const int jq = q - west;
      num *= z - jq;
      den *= j - jq;
    }
    w[k] = num / den;
  }
  return w;
}

double erk_trace_back(const WaveSpeed& ws, double arrival, double t_start, double step,
                      const ErkScheme& scheme) {
  const double t_end = t_start + step;
  const double hstep = -step;
  const int s = scheme.stages();
  std::array<double, 8> k{};
  for (int i = 0; i < s; ++i) {
    double x = arrival;
    for (int j = 0; j < i; ++j) x += hstep * scheme.a[i][j] * k[j];
    k[i] = ws.alpha(x, t_end + scheme.c[i] * hstep);
  }
  double x = arrival;
  for (int i = 0; i < s; ++i) x += hstep * scheme.b[i] * k[i];
  return x;
}

Vec2 erk_trace_back(const WaveSpeed& ws, Vec2 arrival, double t_start, double step,
                    const ErkScheme& scheme) {
  const double t_end = t_start + step;
  const double hstep = -step;
  const int s = scheme.stages();
  std::array<Vec2, 8> k{};
  for (int i = 0; i < s; ++i) {
    Vec2 x = arrival;
    for (int j = 0; j < i; ++j) {
      x[0] += hstep * scheme.a[i][j] * k[j][0];
      x[1] += hstep * scheme.a[i][j] * k[j][1];
    }
    k[i] = ws.velocity(x[0], x[1], t_end + scheme.c[i] * hstep);
  }
  Vec2 x = arrival;
  for (int i = 0; i < s; ++i) {
    x[0] += hstep * scheme.b[i] * k[i][0];
    x[1] += hstep * scheme.b[i] * k[i][1];
  }
  return x;
}

namespace {

// s is the departure position in grid units (node i sits at s = i).
Decomposition decompose_grid_units(const SpatialGrid& grid, double s) {
  double e = std::ceil(s);
  double eps = e - s;
  if (eps < 0.0) eps = 0.0;
  if (eps >= 1.0) {
    eps -= 1.0;
    e -= 1.0;
  }
  return {grid.wrap(static_cast<long long>(e)), eps};
}

}  // namespace

Decomposition decompose(const SpatialGrid& grid, double coordinate) {
  return decompose_grid_units(grid, (coordinate - grid.x_lo()) / grid.h());
}

Decomposition decompose_displacement(const SpatialGrid& grid, int arrival_index,
                                     double displacement) {
  return decompose_grid_units(grid, arrival_index - displacement / grid.h());
}

DepartureSet DepartureSet::from_displacements(const SpatialGrid& grid, double t_start,
                                              double step, std::vector<double> disp_x,
                                              std::vector<double> disp_y) {
  DepartureSet d;
  d.dim = grid.dim();
  d.n = grid.n();
  d.t_start = t_start;
  d.step = step;
  const std::size_t size = grid.size();
  if (disp_x.size() != size) throw std::invalid_argument("displacement size mismatch");
  d.east_x.resize(size);
  d.eps.resize(size);
  const int n = grid.n();
  if (grid.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      const auto dec = decompose_displacement(grid, i, disp_x[i]);
      d.east_x[i] = dec.east;
      d.eps[i] = dec.eps;
    }
  } else {
    if (disp_y.size() != size) throw std::invalid_argument("displacement size mismatch");
    d.east_y.resize(size);
    d.nu.resize(size);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const std::size_t k = grid.index(i, j);
        const auto dx = decompose_displacement(grid, i, disp_x[k]);
        const auto dy = decompose_displacement(grid, j, disp_y[k]);
        d.east_x[k] = dx.east;
        d.eps[k] = dx.eps;
        d.east_y[k] = dy.east;
        d.nu[k] = dy.eps;
      }
    }
    d.disp_y = std::move(disp_y);
  }
  d.disp_x = std::move(disp_x);
  return d;
}

DepartureSet trace_departures(const SpatialGrid& grid, const WaveSpeed& ws, double t_start,
                              double step, const ErkScheme& scheme) {
  return trace_departures_substeps(grid, ws, t_start, step, 1, scheme);
}

DepartureSet trace_departures_substeps(const SpatialGrid& grid, const WaveSpeed& ws,
                                       double t_start, double step, int substeps,
                                       const ErkScheme& scheme) {
  if (ws.dim() != grid.dim()) throw std::invalid_argument("wave speed and grid dimension differ");
  if (substeps < 1) throw std::invalid_argument("substeps must be positive");
  const double dt = step / substeps;
  const int n = grid.n();
  std::vector<double> dx(grid.size());
  if (grid.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      double x = grid.node(i);
      for (int s = substeps - 1; s >= 0; --s) x = erk_trace_back(ws, x, t_start + s * dt, dt, scheme);
      dx[i] = grid.node(i) - x;
    }
    return DepartureSet::from_displacements(grid, t_start, step, std::move(dx));
  }
  std::vector<double> dy(grid.size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      Vec2 x{grid.node(i), grid.node(j)};
      for (int s = substeps - 1; s >= 0; --s) x = erk_trace_back(ws, x, t_start + s * dt, dt, scheme);
      const std::size_t k = grid.index(i, j);
      dx[k] = grid.node(i) - x[0];
      dy[k] = grid.node(j) - x[1];
    }
  }
  return DepartureSet::from_displacements(grid, t_start, step, std::move(dx), std::move(dy));
}

void sl_step(const DepartureSet& dep, int p, std::span<const double> u, std::span<double> out) {
  check_degree(p);
  if (u.size() != dep.size() || out.size() != dep.size())
    throw std::invalid_argument("sl_step: dimension mismatch");
  const int n = dep.n;
  const int west = (p + 1) / 2;
  const int width = p + 1;
  if (dep.dim == 1) {
    for (int i = 0; i < n; ++i) {
      const auto w = interp_weights(p, dep.eps[i]);
      int idx = dep.east_x[i] - west;
      if (idx < 0) idx += n;
      double acc = 0.0;
      for (int k = 0; k < width; ++k) {
        acc += w[k] * u[idx];
        if (++idx == n) idx = 0;
      }
      out[i] = acc;
    }
    return;
  }
  const std::size_t size = dep.size();
  std::array<int, 6> cols{};
  for (std::size_t q = 0; q < size; ++q) {
    const auto wx = interp_weights(p, dep.eps[q]);
    const auto wy = interp_weights(p, dep.nu[q]);
    int c = dep.east_x[q] - west;
    if (c < 0) c += n;
    for (int k = 0; k < width; ++k) {
      cols[k] = c;
      if (++c == n) c = 0;
    }
    int r = dep.east_y[q] - west;
    if (r < 0) r += n;
    double acc = 0.0;
    for (int b = 0; b < width; ++b) {
      const double* row = u.data() + static_cast<std::size_t>(r) * n;
      double racc = 0.0;
      for (int a = 0; a < width; ++a) racc += wx[a] * row[cols[a]];
      acc += wy[b] * racc;
      if (++r == n) r = 0;
    }
    out[q] = acc;
  }
}

GridFunction sl_step(const DepartureSet& dep, int p, std::span<const double> u) {
  GridFunction out(u.size());
  sl_step(dep, p, u, out);
  return out;
}

}  // namespace slmgrit

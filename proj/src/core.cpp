#include "slmgrit/core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace slmgrit {

namespace {
constexpr double kPi = std::numbers::pi;
}

SpatialGrid::SpatialGrid(int dim, int n, double x_lo, double length)
    : dim_(dim), n_(n), h_(length / n), x_lo_(x_lo) {
  if (n < 1) throw std::invalid_argument("grid needs at least one node");
  if (!(length > 0.0)) throw std::invalid_argument("grid length must be positive");
}

SpatialGrid SpatialGrid::line(int n, double x_lo, double length) {
  return SpatialGrid(1, n, x_lo, length);
}

SpatialGrid SpatialGrid::square(int n, double x_lo, double length) {
  return SpatialGrid(2, n, x_lo, length);
}

TimeGrid::TimeGrid(int n_t_, double dt_) : n_t(n_t_), dt(dt_) {
  if (n_t < 1) throw std::invalid_argument("time grid needs at least one step");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
}

WaveSpeed WaveSpeed::catalog(std::string_view id) {
  WaveSpeed w;
  if (id == "C1") {
    w.id_ = "C1";
    w.space_independent_ = true;
    w.alpha_ = [](double, double) { return 1.0; };
  } else if (id == "C2") {
    w.id_ = "C2";
    w.space_independent_ = true;
    w.alpha_ = [](double, double t) { return std::cos(2.0 * kPi * t); };
  } else if (id == "C3") {
    w.id_ = "C3";
    w.alpha_ = [](double x, double t) {
      return std::cos(2.0 * kPi * t) * std::cos(2.0 * kPi * x);
    };
  } else if (id == "C4" || id == "C4-2D") {
    w.id_ = "C4";
    w.dim_ = 2;
    w.space_independent_ = true;
    w.field_ = [](double, double, double) { return Vec2{1.0, 1.0}; };
  } else if (id == "C5" || id == "C5-2D") {
    w.id_ = "C5";
    w.dim_ = 2;
    w.field_ = [](double x, double y, double t) {
      const double g = std::cos(2.0 * kPi * t / 3.4);
      const double sy = std::sin(kPi * y);
      const double cx = std::cos(kPi * x);
      return Vec2{sy * sy * g, -cx * cx * g};
    };
  } else {
    throw std::invalid_argument("unknown wave speed '" + std::string(id) + "'");
  }
  return w;
}

WaveSpeed WaveSpeed::custom(std::string id, Field1D alpha, bool space_independent) {
  WaveSpeed w;
  w.id_ = std::move(id);
  w.space_independent_ = space_independent;
  w.alpha_ = std::move(alpha);
  return w;
}

WaveSpeed WaveSpeed::custom(std::string id, Field2D field, bool space_independent) {
  WaveSpeed w;
  w.id_ = std::move(id);
  w.dim_ = 2;
  w.space_independent_ = space_independent;
  w.field_ = std::move(field);
  return w;
}

double WaveSpeed::alpha(double x, double t) const {
  if (dim_ != 1) throw std::logic_error("alpha(x, t) requested from a 2D wave speed");
  return alpha_(x, t);
}

Vec2 WaveSpeed::velocity(double x, double y, double t) const {
  if (dim_ != 2) throw std::logic_error("velocity(x, y, t) requested from a 1D wave speed");
  return field_(x, y, t);
}

GridFunction initial_condition(const SpatialGrid& grid) {
  GridFunction u(grid.size());
  const int n = grid.n();
  if (grid.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      const double s = std::sin(kPi * grid.node(i));
      u[i] = s * s * s * s;
    }
    return u;
  }
  std::vector<double> profile(n);
  for (int i = 0; i < n; ++i) {
    const double s = std::sin(0.5 * kPi * (grid.node(i) - 1.0));
    profile[i] = s * s;
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) u[grid.index(i, j)] = profile[i] * profile[j];
  return u;
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double space_time_norm(std::span<const GridFunction> states) {
  if (states.empty()) throw std::invalid_argument("space_time_norm of an empty sequence");
  double s = 0.0;
  for (const auto& u : states)
    for (double x : u) s += x * x;
  return std::sqrt(s);
}

GridFunction random_state(const SpatialGrid& grid, Rng& rng) {
  GridFunction u(grid.size());
  for (auto& x : u) x = rng.uniform();
  return u;
}

GridFunction random_state(const SpatialGrid& grid, std::uint64_t seed) {
  Rng rng(seed);
  return random_state(grid, rng);
}

}  // namespace slmgrit

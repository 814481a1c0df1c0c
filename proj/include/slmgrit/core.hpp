#pragma once

// Periodic grids, wave-speed catalog, grid functions, norms and the seeded
// random initial iterate shared by the rest of the library.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slmgrit {

/// Real-valued state on a periodic spatial grid. In 2D the layout is
/// row-major with x fastest: index(i, j) = j * n + i.
using GridFunction = std::vector<double>;

using Vec2 = std::array<double, 2>;

/// Uniform periodic grid on [x_lo, x_lo + n*h) in one or two dimensions.
/// Node i sits at x_lo + i*h (0-based); the right endpoint is identified
/// with the left one, so there is no duplicated node. In 2D both directions
/// share n, h and x_lo.
class SpatialGrid {
public:
  static SpatialGrid line(int n, double x_lo = -1.0, double length = 2.0);
  static SpatialGrid square(int n, double x_lo = -1.0, double length = 2.0);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double h() const { return h_; }
  double x_lo() const { return x_lo_; }
  double period() const { return n_ * h_; }

  /// Number of unknowns: n in 1D, n*n in 2D.
  std::size_t size() const {
    return dim_ == 1 ? static_cast<std::size_t>(n_)
                     : static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }

  double node(int i) const { return x_lo_ + i * h_; }

  /// Maps any integer offset onto [0, n).
  int wrap(long long k) const {
    long long r = k % n_;
    return static_cast<int>(r < 0 ? r + n_ : r);
  }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(i);
  }

  bool operator==(const SpatialGrid&) const = default;

private:
  SpatialGrid(int dim, int n, double x_lo, double length);

  int dim_ = 1;
  int n_ = 1;
  double h_ = 1.0;
  double x_lo_ = 0.0;
};

/// Equispaced time grid t_n = n * dt, n = 0..n_t.
struct TimeGrid {
  int n_t = 1;
  double dt = 1.0;

  TimeGrid(int n_t, double dt);
  double t(int n) const { return n * dt; }
  double final_time() const { return n_t * dt; }
};

/// Default fine time step used throughout: 0.85 h.
inline constexpr double kDefaultCflFactor = 0.85;

/// Velocity field of the advection problem. 1D fields provide alpha(x, t);
/// 2D fields provide (alpha, beta)(x, y, t).
class WaveSpeed {
public:
  using Field1D = std::function<double(double x, double t)>;
  using Field2D = std::function<Vec2(double x, double y, double t)>;

  /// Catalog ids: "C1", "C2", "C3" (1D) and "C4", "C5" (2D). The 2D ids also
  /// accept the "C4-2D" / "C5-2D" spelling.
  static WaveSpeed catalog(std::string_view id);
  static WaveSpeed custom(std::string id, Field1D alpha, bool space_independent = false);
  static WaveSpeed custom(std::string id, Field2D field, bool space_independent = false);

  const std::string& id() const { return id_; }
  int dim() const { return dim_; }
  bool space_independent() const { return space_independent_; }

  double alpha(double x, double t) const;
  Vec2 velocity(double x, double y, double t) const;

private:
  WaveSpeed() = default;

  std::string id_;
  int dim_ = 1;
  bool space_independent_ = false;
  Field1D alpha_;
  Field2D field_;
};

/// Smooth periodic initial data: sin^4(pi x) in 1D and
/// sin^2(pi (x-1)/2) sin^2(pi (y-1)/2) in 2D.
GridFunction initial_condition(const SpatialGrid& grid);

/// l2 norm over all entries of all states. Throws on an empty sequence.
double space_time_norm(std::span<const GridFunction> states);

double l2_norm(std::span<const double> v);
double max_norm(std::span<const double> v);

/// Random stream used for initial iterates: std::mt19937_64 (its output
/// sequence is fixed by the standard) mapped to [0, 1) using the top 53 bits,
/// so draws are identical on every conforming platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 engine_;
};

GridFunction random_state(const SpatialGrid& grid, std::uint64_t seed);
GridFunction random_state(const SpatialGrid& grid, Rng& rng);

}  // namespace slmgrit

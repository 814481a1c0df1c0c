#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "slmgrit/oracle.hpp"
#include "slmgrit/semi_lagrangian.hpp"

using namespace slmgrit;
using std::numbers::pi;

namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("ERK tableaux are consistent") {
  for (int r : {1, 3, 5}) {
    const auto s = ErkScheme::of_order(r);
    double sb = 0.0;
    for (double b : s.b) sb += b;
    CHECK(sb == doctest::Approx(1.0).epsilon(1e-14));
    for (int i = 0; i < s.stages(); ++i) {
      double row = 0.0;
      for (int j = 0; j < i; ++j) row += s.a[i][j];
      CHECK(row == doctest::Approx(s.c[i]).epsilon(1e-14));
    }
  }
  CHECK_THROWS(ErkScheme::of_order(2));
}

TEST_CASE("stencil extents") {
  for (int p : {1, 3, 5}) {
    const StencilSpec s(p);
    CHECK(s.west() + s.east() + 1 == p + 1);
    CHECK(s.west() == s.east() + 1);
  }
  CHECK_THROWS_WITH_AS(StencilSpec(2), "unsupported interpolation degree", std::invalid_argument);
}

TEST_CASE("erk_trace_back examples") {
  const auto c1 = WaveSpeed::catalog("C1");
  for (int r : {1, 3, 5})
    CHECK(erk_trace_back(c1, 0.0, 0.0, 0.1, ErkScheme::of_order(r)) == doctest::Approx(-0.1).epsilon(1e-15));
  const auto c2 = WaveSpeed::catalog("C2");
  const double expected = -0.1 * std::cos(2.0 * pi * 0.1);
  CHECK(expected == doctest::Approx(-0.0809017).epsilon(1e-6));
  CHECK(erk_trace_back(c2, 0.0, 0.0, 0.1, ErkScheme::of_order(1)) == doctest::Approx(expected).epsilon(1e-15));
  const Vec2 d = erk_trace_back(WaveSpeed::catalog("C4"), Vec2{0.0, 0.0}, 0.0, 0.2, ErkScheme::of_order(3));
  CHECK(d[0] == doctest::Approx(-0.2));
  CHECK(d[1] == doctest::Approx(-0.2));
}

TEST_CASE("ERK order of accuracy against the accurate tracer") {
  const auto c3 = WaveSpeed::catalog("C3");
  for (int r : {1, 3, 5}) {
    // At r = 5 the error reaches the rounding floor below 2^-8.
    const int lo = 4, hi = r == 5 ? 8 : 9;
    std::vector<double> steps, errs;
    for (int k = lo; k <= hi; ++k) {
      const double dt = std::ldexp(1.0, -k);
      double err = 0.0;
      for (int i = 0; i < 32; ++i) {
        const double x = -1.0 + i / 16.0;
        const double approx = erk_trace_back(c3, x, 0.1, dt, ErkScheme::of_order(r));
        err = std::max(err, std::abs(approx - trace_back_exact(c3, x, 0.1, dt)));
      }
      steps.push_back(dt);
      errs.push_back(err);
    }
    CHECK(slope(steps, errs) == doctest::Approx(r + 1).epsilon(0.25 / (r + 1)));
  }
}

TEST_CASE("decompose examples") {
  const auto g = SpatialGrid::line(8);
  auto d = decompose(g, g.node(3));
  CHECK(d.east == 3);
  CHECK(d.eps == 0.0);
  d = decompose(g, g.node(3) - 0.5 * g.h());
  CHECK(d.east == 3);
  CHECK(d.eps == doctest::Approx(0.5));
  d = decompose(g, g.node(0) - 0.25 * g.h());
  CHECK(d.east == 0);
  CHECK(d.eps == doctest::Approx(0.25));
  // 1.25 h below the first node wraps to the last node.
  d = decompose(g, g.node(0) - 1.25 * g.h());
  CHECK(d.east == 7);
  CHECK(d.eps == doctest::Approx(0.25));
  // Coordinates outside the fundamental period wrap.
  d = decompose(g, g.node(2) + 3 * g.period());
  CHECK(d.east == 2);
  CHECK(d.eps == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("decompose keeps eps in [0, 1) and reconstructs the coordinate") {
  const auto g = SpatialGrid::line(16);
  Rng rng(4);
  for (int k = 0; k < 2000; ++k) {
    const double x = -5.0 + 10.0 * rng.uniform();
    const auto d = decompose(g, x);
    CHECK(d.eps >= 0.0);
    CHECK(d.eps < 1.0);
    const double rec = g.node(d.east) - g.h() * d.eps;
    const double diff = std::remainder(rec - x, g.period());
    CHECK(std::abs(diff) < 1e-12);
  }
}

TEST_CASE("interpolation weights") {
  auto w = interp_weights(1, 0.5);
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK(w[1] == doctest::Approx(0.5));
  w = interp_weights(1, 0.0);
  CHECK(w[0] == 0.0);
  CHECK(w[1] == 1.0);
  w = interp_weights(3, 0.0);
  CHECK(w[0] == 0.0);
  CHECK(w[1] == 0.0);
  CHECK(w[2] == 1.0);
  CHECK(w[3] == 0.0);
  CHECK_THROWS_WITH(interp_weights(4, 0.1), "unsupported interpolation degree");
}

TEST_CASE("partition of unity and polynomial reproduction") {
  for (int p : {1, 3, 5}) {
    const StencilSpec st(p);
    for (int k = 0; k < 100; ++k) {
      const double eps = k / 100.0;
      const auto w = interp_weights(p, eps);
      double sum = 0.0;
      for (int j = 0; j < st.width(); ++j) sum += w[j];
      CHECK(std::abs(sum - 1.0) <= 1e-13);
      for (int q = 0; q <= p; ++q) {
        double val = 0.0;
        for (int j = 0; j < st.width(); ++j) val += w[j] * std::pow(j - st.west(), q);
        CHECK(std::abs(val - std::pow(-eps, q)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("sl_step identity, constants and integer shifts") {
  const auto g = SpatialGrid::line(32);
  const auto u = initial_condition(g);
  for (int p : {1, 3, 5}) {
    const auto zero = DepartureSet::from_displacements(g, 0.0, 0.1, std::vector<double>(32, 0.0));
    CHECK(sl_step(zero, p, u) == u);

    const auto dep = trace_departures(g, WaveSpeed::catalog("C3"), 0.0, 0.3, ErkScheme::of_order(1));
    for (double v : sl_step(dep, p, GridFunction(32, 2.5))) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));

    for (int k : {1, 3, -2}) {
      const double step = k * g.h();
      const auto ws = WaveSpeed::custom("one", [](double, double) { return 1.0; }, true);
      const auto shift = trace_departures(g, ws, 0.0, std::abs(step), ErkScheme::of_order(3));
      const auto out = sl_step(shift, p, u);
      const int kk = std::abs(k);
      for (int i = 0; i < 32; ++i) CHECK(out[i] == doctest::Approx(u[g.wrap(i - kk)]).epsilon(1e-12));
    }
  }
}

TEST_CASE("sl_step in 2D uses tensor-product weights") {
  const auto g = SpatialGrid::square(16);
  const auto ws = WaveSpeed::custom("c", [](double, double, double) { return Vec2{0.37, -0.81}; }, true);
  const auto dep = trace_departures(g, ws, 0.0, 0.1, ErkScheme::of_order(1));
  const auto line = SpatialGrid::line(16);
  Rng rng(9);
  GridFunction u(g.size());
  for (auto& v : u) v = rng.uniform();
  const auto out = sl_step(dep, 3, u);
  // Separable check: interpolate rows then columns with the 1D operator.
  const auto dx = trace_departures(line, WaveSpeed::custom("a", [](double, double) { return 0.37; }, true), 0.0, 0.1,
                                   ErkScheme::of_order(1));
  const auto dy = trace_departures(line, WaveSpeed::custom("b", [](double, double) { return -0.81; }, true), 0.0, 0.1,
                                   ErkScheme::of_order(1));
  GridFunction tmp(g.size());
  for (int j = 0; j < 16; ++j) {
    GridFunction row(u.begin() + j * 16, u.begin() + (j + 1) * 16);
    const auto r = sl_step(dx, 3, row);
    std::copy(r.begin(), r.end(), tmp.begin() + j * 16);
  }
  for (int i = 0; i < 16; ++i) {
    GridFunction col(16);
    for (int j = 0; j < 16; ++j) col[j] = tmp[g.index(i, j)];
    const auto c = sl_step(dy, 3, col);
    for (int j = 0; j < 16; ++j) CHECK(out[g.index(i, j)] == doctest::Approx(c[j]).epsilon(1e-13));
  }
  CHECK_THROWS(sl_step(dep, 3, GridFunction(15)));
}

TEST_CASE("departure sets reconstruct departures") {
  const auto g = SpatialGrid::line(32);
  const auto ws = WaveSpeed::catalog("C3");
  const auto dep = trace_departures(g, ws, 0.2, 0.15, ErkScheme::of_order(3));
  for (int i = 0; i < 32; ++i) {
    const double xd = erk_trace_back(ws, g.node(i), 0.2, 0.15, ErkScheme::of_order(3));
    CHECK(dep.disp_x[i] == doctest::Approx(g.node(i) - xd).epsilon(1e-14));
    const double rec = g.node(dep.east_x[i]) - g.h() * dep.eps[i];
    CHECK(std::abs(std::remainder(rec - xd, g.period())) < 1e-12);
  }
  const auto sub = trace_departures_substeps(g, ws, 0.2, 0.15, 1, ErkScheme::of_order(3));
  CHECK(sub.disp_x == dep.disp_x);
}

TEST_CASE("solution error decays at the expected rate") {
  // C2 is space independent, so the exact solution is a translate of u_0.
  const auto ws = WaveSpeed::catalog("C2");
  for (int p : {1, 3}) {
    std::vector<double> hs, errs;
    for (int n : {64, 128, 256}) {
      const auto g = SpatialGrid::line(n);
      const double dt = 0.85 * g.h();
      const int nt = n / 2;
      const auto scheme = ErkScheme::of_order(p);
      auto u = initial_condition(g);
      for (int k = 0; k < nt; ++k) u = sl_step(trace_departures(g, ws, k * dt, dt, scheme), p, u);
      const double shift = std::sin(2.0 * pi * nt * dt) / (2.0 * pi);
      double err = 0.0;
      for (int i = 0; i < n; ++i)
        err = std::max(err, std::abs(u[i] - std::pow(std::sin(pi * (g.node(i) - shift)), 4)));
      hs.push_back(g.h());
      errs.push_back(err);
    }
    CHECK(slope(hs, errs) == doctest::Approx(p).epsilon(0.3 / p));
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "slmgrit/coarse_correction.hpp"
#include "slmgrit/fourier.hpp"

using namespace slmgrit;
using std::numbers::pi;

namespace {

DepartureSet constant_set(const SpatialGrid& g, double disp) {
  return DepartureSet::from_displacements(g, 0.0, 1.0, std::vector<double>(g.size(), disp));
}

CorrectionField constant_field(const SpatialGrid& g, double v) {
  auto f = CorrectionField::zeros(g);
  std::fill(f.x.begin(), f.x.end(), v);
  std::fill(f.y.begin(), f.y.end(), v);
  return f;
}

}  // namespace

TEST_CASE("f polynomial values") {
  CHECK(f_poly(1, 0.0) == 0.0);
  CHECK(f_poly(1, 0.5) == doctest::Approx(-0.125));
  CHECK(f_poly(3, 0.5) == doctest::Approx(0.0234375));
  CHECK_THROWS(f_poly(2, 0.5));
}

TEST_CASE("f polynomial roots sit at the stencil offsets") {
  for (int p : {1, 3, 5}) {
    const int west = (p + 1) / 2, east = (p - 1) / 2;
    for (int k = -east; k <= west; ++k) CHECK(f_poly(p, k) == 0.0);
    CHECK(f_poly(p, west + 0.5) != 0.0);
  }
}

TEST_CASE("derivative stencils") {
  CHECK(DerivativeStencil::for_degree(1).coeffs() == std::vector<int>{1, -2, 1});
  CHECK(DerivativeStencil::for_degree(3).coeffs() == std::vector<int>{1, -4, 6, -4, 1});
  CHECK(DerivativeStencil::for_degree(5).coeffs() == std::vector<int>{1, -6, 15, -20, 15, -6, 1});
  for (int p : {1, 3, 5}) {
    const auto d = DerivativeStencil::for_degree(p);
    int sum = 0;
    for (int k = -d.radius(); k <= d.radius(); ++k) {
      sum += d.coeff(k);
      CHECK(d.coeff(k) == d.coeff(-k));
    }
    CHECK(sum == 0);
    CHECK(d.order() == p + 1);
    for (double w : {-3.0, -1.0, 0.3, 2.0}) {
      const auto s = d.symbol(w);
      CHECK(s.real() == doctest::Approx(std::pow(2.0 * std::cos(w) - 2.0, (p + 1) / 2)));
      CHECK(std::abs(s.imag()) < 1e-12);
    }
  }
}

TEST_CASE("derivative stencil annihilates low-degree polynomials") {
  for (int p : {1, 3, 5}) {
    const auto d = DerivativeStencil::for_degree(p);
    for (int q = 0; q <= p; ++q) {
      // Non-periodic window around x = 0.3 with h = 0.1.
      double acc = 0.0;
      for (int k = -d.radius(); k <= d.radius(); ++k) acc += d.coeff(k) * std::pow(0.3 + 0.1 * k, q);
      CHECK(std::abs(acc) < 1e-12);
    }
  }
}

TEST_CASE("derivative stencil is second-order accurate") {
  for (int p : {1, 3, 5}) {
    const auto d = DerivativeStencil::for_degree(p);
    const int order = p + 1;
    std::vector<double> lh, le;
    for (int n : {32, 64, 128, 256}) {
      const auto g = SpatialGrid::line(n);
      GridFunction v(n), dv(n);
      for (int i = 0; i < n; ++i) v[i] = std::sin(2 * pi * g.node(i));
      d.apply(v, dv);
      double err = 0.0;
      for (int i = 0; i < n; ++i) {
        // The (p+1)-th derivative of sin(2 pi x) for even order p+1.
        const double exact = std::pow(-1.0, order / 2) * std::pow(2 * pi, order) * v[i];
        err = std::max(err, std::abs(dv[i] / std::pow(g.h(), order) - exact));
      }
      lh.push_back(std::log(g.h()));
      le.push_back(std::log(err));
    }
    const double s = (le.back() - le.front()) / (lh.back() - lh.front());
    CHECK(s == doctest::Approx(2.0).epsilon(0.125));
  }
}

TEST_CASE("phi vector examples") {
  const auto g = SpatialGrid::line(16);
  const double h = g.h();
  const std::vector<DepartureSet> fine{constant_set(g, 0.5 * h), constant_set(g, 0.5 * h)};
  const auto phi = phi_vector(fine, constant_set(g, h), 1);
  for (double v : phi.x) CHECK(v == doctest::Approx(0.25));

  const std::vector<DepartureSet> one{constant_set(g, 0.3 * h)};
  for (int p : {1, 3, 5})
    for (double v : phi_vector(one, constant_set(g, 0.3 * h), p).x) CHECK(v == 0.0);

  const std::vector<DepartureSet> whole{constant_set(g, h), constant_set(g, 2 * h)};
  for (double v : phi_vector(whole, constant_set(g, 3 * h), 3).x) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));

  const std::vector<const DepartureSet*> ptrs{&fine[0]};
  CHECK_THROWS(phi_vector(ptrs, constant_set(g, h), 1, 2));
}

TEST_CASE("phi is constant for spatially independent speeds") {
  const auto g = SpatialGrid::line(32);
  const auto ws = WaveSpeed::catalog("C2");
  const auto erk = ErkScheme::of_order(3);
  const double dt = 0.85 * g.h();
  std::vector<DepartureSet> fine;
  for (int k = 0; k < 4; ++k) fine.push_back(trace_departures(g, ws, k * dt, dt, erk));
  const auto phi = phi_vector(fine, trace_departures(g, ws, 0.0, 4 * dt, erk), 3);
  for (double v : phi.x) CHECK(v == doctest::Approx(phi.x[0]).epsilon(1e-10));
}

TEST_CASE("sigma accumulation") {
  const auto g = SpatialGrid::line(8);
  const auto phi = constant_field(g, 0.25);
  CHECK(sigma_accumulate(std::span<const CorrectionField>{}, phi, 2).x == phi.x);
  const std::vector<CorrectionField> zeros(2, CorrectionField::zeros(g));
  for (double v : sigma_accumulate(zeros, phi, 2).x) CHECK(v == 0.25);
  const std::vector<CorrectionField> kids(2, constant_field(g, 0.25));
  for (double v : sigma_accumulate(kids, constant_field(g, 0.1), 2).x) CHECK(v == doctest::Approx(0.6));
  CHECK_THROWS(sigma_accumulate(kids, phi, 3));

  const auto g2 = SpatialGrid::square(4);
  const std::vector<CorrectionField> kids2(2, constant_field(g2, 0.5));
  const auto s2 = sigma_accumulate(kids2, constant_field(g2, 0.25), 2);
  for (double v : s2.y) CHECK(v == doctest::Approx(1.25));
}

TEST_CASE("I - diag(field) D examples") {
  const auto g = SpatialGrid::line(4);
  const auto d = DerivativeStencil::for_degree(1);
  const GridFunction e1{1, 0, 0, 0};
  CHECK(apply_ImSD(CorrectionField::zeros(g), d, e1) == e1);
  const auto out = apply_ImSD(constant_field(g, 1.0), d, e1);
  CHECK(out == GridFunction{3, -1, 0, -1});
  for (double v : apply_ImSD(constant_field(g, 0.7), d, GridFunction(4, 2.0))) CHECK(v == doctest::Approx(2.0));
  CHECK_THROWS(apply_ImSD(constant_field(g, 1.0), d, GridFunction(5, 0.0)));
}

TEST_CASE("2D correction matches the Kronecker form") {
  const int n = 6;
  const auto g = SpatialGrid::square(n);
  const auto d = DerivativeStencil::for_degree(3);
  Rng rng(2);
  auto field = CorrectionField::zeros(g);
  for (auto& v : field.x) v = rng.uniform();
  for (auto& v : field.y) v = rng.uniform();
  GridFunction v(g.size());
  for (auto& x : v) x = rng.uniform();
  const auto out = apply_ImSD(field, d, v);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double dx = 0.0, dy = 0.0;
      for (int k = -2; k <= 2; ++k) {
        dx += d.coeff(k) * v[g.index(g.wrap(i + k), j)];
        dy += d.coeff(k) * v[g.index(i, g.wrap(j + k))];
      }
      const auto q = g.index(i, j);
      CHECK(out[q] == doctest::Approx(v[q] - field.x[q] * dx - field.y[q] * dy).epsilon(1e-14));
    }
}

TEST_CASE("GMRES") {
  const auto g = SpatialGrid::line(32);
  const auto d = DerivativeStencil::for_degree(1);
  Rng rng(8);
  GridFunction rhs(32);
  for (auto& x : rhs) x = rng.uniform();

  SUBCASE("identity system is solved in one iteration") {
    const auto r = gmres_solve(CorrectionField::zeros(g), d, rhs, GmresConfig::two_level());
    CHECK(r.iterations == 1);
    CHECK(r.breakdown);
    for (int i = 0; i < 32; ++i) CHECK(r.x[i] == doctest::Approx(rhs[i]));
  }
  SUBCASE("full-dimension GMRES recovers a manufactured solution") {
    auto field = CorrectionField::zeros(g);
    for (auto& v : field.x) v = 0.5 * rng.uniform();
    const auto b = apply_ImSD(field, d, rhs);
    const auto r = gmres_solve(field, d, b, GmresConfig{32, 0.0});
    for (int i = 0; i < 32; ++i) CHECK(std::abs(r.x[i] - rhs[i]) < 1e-10);
  }
  SUBCASE("residual history is non-increasing") {
    auto field = CorrectionField::zeros(g);
    for (auto& v : field.x) v = 2.0 * rng.uniform();
    const auto r = gmres_solve(field, d, rhs, GmresConfig{10, 0.0});
    CHECK(r.iterations == 10);
    CHECK(r.residuals.size() == 11u);
    for (std::size_t k = 1; k < r.residuals.size(); ++k) CHECK(r.residuals[k] <= r.residuals[k - 1] * (1 + 1e-14));
    // The reported residual matches the true one.
    const auto ax = apply_ImSD(field, d, r.x);
    double true_res = 0.0;
    for (int i = 0; i < 32; ++i) true_res += (rhs[i] - ax[i]) * (rhs[i] - ax[i]);
    CHECK(std::sqrt(true_res) == doctest::Approx(r.residuals.back()).epsilon(1e-8));
  }
  SUBCASE("tolerance mode stops early") {
    auto field = constant_field(g, 0.1);
    const auto r = gmres_solve(field, d, rhs, GmresConfig::multilevel());
    CHECK(r.iterations < 10);
    CHECK(r.residuals.back() <= 1e-2 * r.residuals.front());
  }
  SUBCASE("bad input") {
    GridFunction bad = rhs;
    bad[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS(gmres_solve(CorrectionField::zeros(g), d, bad, GmresConfig::two_level()));
    CHECK_THROWS(gmres_solve(CorrectionField::zeros(g), d, rhs, GmresConfig{0, 0.0}));
  }
}

TEST_CASE("corrected and forward-Euler coarse steps") {
  const auto g = SpatialGrid::line(64);
  const auto d = DerivativeStencil::for_degree(1);
  const auto dep = trace_departures(g, WaveSpeed::catalog("C3"), 0.0, 0.2, ErkScheme::of_order(1));
  const auto u = initial_condition(g);
  const auto plain = sl_step(dep, 1, u);
  const auto corr = corrected_coarse_step(dep, CorrectionField::zeros(g), d, 1, u, GmresConfig::two_level());
  for (int i = 0; i < 64; ++i) CHECK(corr[i] == doctest::Approx(plain[i]).epsilon(1e-14));
  CHECK(forward_euler_coarse_step(dep, CorrectionField::zeros(g), d, 1, u) == plain);
  const GridFunction c(64, 1.5);
  for (double v : corrected_coarse_step(dep, constant_field(g, 0.3), d, 1, c, GmresConfig::two_level()))
    CHECK(v == doctest::Approx(1.5));
  for (double v : forward_euler_coarse_step(dep, constant_field(g, 0.3), d, 1, c)) CHECK(v == doctest::Approx(1.5));
}

TEST_CASE("corrected coarse step acts on Fourier modes through its symbol") {
  // alpha = 1, p = 1, m = 2, c = 0.5 on 64 nodes; exact inner solve.
  const int n = 64;
  const auto g = SpatialGrid::line(n);
  const double h = g.h();
  const auto fine = constant_set(g, 0.5 * h);
  const auto coarse = constant_set(g, h);
  const std::vector<DepartureSet> kids{fine, fine};
  const auto phi = phi_vector(kids, coarse, 1);
  const auto d = DerivativeStencil::for_degree(1);
  for (int k : {1, 5, 17, 31}) {
    const double w = 2 * pi * k / n;
    GridFunction re(n), im(n);
    for (int i = 0; i < n; ++i) {
      re[i] = std::cos(w * i);
      im[i] = std::sin(w * i);
    }
    const auto sr = corrected_coarse_step(coarse, phi, d, 1, re, GmresConfig{n, 0.0});
    const auto si = corrected_coarse_step(coarse, phi, d, 1, im, GmresConfig{n, 0.0});
    const auto mu = corrected_symbol(1, 2, 0.5, w);
    for (int i = 0; i < n; ++i) {
      const std::complex<double> got(sr[i], si[i]);
      const std::complex<double> want = mu * std::polar(1.0, w * i);
      CHECK(std::abs(got - want) < 1e-10);
    }
  }
}

TEST_CASE("forward-Euler factor is unstable for large m") {
  // c = 0.5, m = 32: phi = 4 and |1 + phi d(omega)| reaches 15.
  const double phi = constant_phi(1, 32, 0.5);
  CHECK(phi == doctest::Approx(4.0));
  const auto d = DerivativeStencil::for_degree(1);
  double worst = 0.0;
  for (int k = 0; k < 512; ++k) worst = std::max(worst, std::abs(1.0 + phi * d.symbol(-pi + 2 * pi * k / 512).real()));
  CHECK(worst > 1.0);
}

TEST_CASE("backward-Euler factor is stable") {
  for (int p : {1, 3, 5}) {
    const auto d = DerivativeStencil::for_degree(p);
    for (int m : {2, 4, 8, 16})
      for (int ci = 1; ci <= 9; ++ci) {
        const double phi = constant_phi(p, m, ci / 10.0);
        double worst = 0.0;
        for (int k = 0; k < 4096; ++k) {
          const double dk = d.symbol(-pi + 2 * pi * k / 4096).real();
          worst = std::max(worst, 1.0 / std::abs(1.0 - phi * dk));
        }
        CHECK(worst <= 1.0 + 1e-12);
      }
  }
}

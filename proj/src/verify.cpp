#include "slmgrit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "slmgrit/coarse_correction.hpp"
#include "slmgrit/experiment.hpp"
#include "slmgrit/fourier.hpp"

namespace slmgrit {

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::vector<std::string> verify_suites() { return {"truncation", "stability", "footnote_equivalence"}; }

std::vector<int> truncation_ladder() { return {1 << 7, 1 << 8, 1 << 9, 1 << 10, 1 << 11}; }

std::vector<SlopeCase> truncation_cases() {
  using G = GapCorrection;
  return {
      {"C2", G::Identity, true, 1, 2.0},      {"C2", G::Identity, false, 1, 2.0},
      {"C2", G::BackwardEuler, true, 1, 3.0}, {"C2", G::BackwardEuler, false, 1, 3.0},
      {"C3", G::BackwardEuler, true, 1, 3.0}, {"C3", G::BackwardEuler, false, 1, 2.0},
  };
}

OrderFit gap_slope(const SlopeCase& c, const std::vector<int>& ladder) {
  std::vector<std::pair<double, double>> pts;
  for (int n : ladder) {
    GapConfig g;
    g.p = c.p;
    g.m = 4;
    g.n_x = n;
    const double h = 2.0 / n;
    g.dt = c.dt_scales_with_h ? kDefaultCflFactor * h : kDefaultCflFactor;
    g.wave = WaveSpeed::catalog(c.wave);
    g.correction = c.correction;
    pts.emplace_back(h, measure_ideal_gap(g));
  }
  return fit_order(std::move(pts));
}

double max_correction_symbol(const std::vector<int>& degrees, const std::vector<int>& factors,
                             const std::vector<double>& cfl) {
  double worst = 0.0;
  for (int p : degrees) {
    const auto stencil = DerivativeStencil::for_degree(p);
    std::vector<double> d(kLfaSamples);
    for (int k = 0; k < kLfaSamples; ++k)
      d[k] = stencil.symbol(-std::numbers::pi + 2.0 * std::numbers::pi * k / kLfaSamples).real();
    for (int m : factors)
      for (double c : cfl) {
        const double phi = constant_phi(p, m, c);
        for (double dk : d) worst = std::max(worst, 1.0 / std::abs(1.0 - phi * dk));
      }
  }
  return worst;
}

double backtrack_deviation(int dim, const std::string& wave, int p, int m, int n_x, int n_t) {
  ExperimentConfig cfg;
  cfg.dim = dim;
  cfg.wave = wave;
  cfg.p = p;
  cfg.n_x = n_x;
  cfg.n_t = n_t;
  cfg.coarsening = {m};
  cfg.kind = OperatorKind::Rediscretized;
  HierarchyConfig hc = hierarchy_config(cfg);
  const Hierarchy back = Hierarchy::build(hc);
  hc.departures = DeparturePolicy::ErkSubsteps;
  const Hierarchy erk = Hierarchy::build(hc);
  double dev = 0.0;
  for (int l = 1; l < back.num_levels(); ++l) {
    const auto& a = back.level(l).departures;
    const auto& b = erk.level(l).departures;
    for (std::size_t n = 0; n < a.size(); ++n) {
      for (std::size_t i = 0; i < a[n].disp_x.size(); ++i)
        dev = std::max(dev, std::abs(a[n].disp_x[i] - b[n].disp_x[i]));
      for (std::size_t i = 0; i < a[n].disp_y.size(); ++i)
        dev = std::max(dev, std::abs(a[n].disp_y[i] - b[n].disp_y[i]));
    }
  }
  return dev;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

VerifyReport truncation_suite() {
  VerifyReport rep{"truncation", {}};
  const auto ladder = truncation_ladder();
  for (const auto& c : truncation_cases()) {
    const OrderFit fit = gap_slope(c, ladder);
    const std::string name = c.wave + (c.correction == GapCorrection::Identity ? " identity" : " backward_euler") +
                             (c.dt_scales_with_h ? " dt=0.85h" : " dt=0.85") + " p=" + std::to_string(c.p);
    rep.checks.push_back({name, std::abs(fit.slope - c.expected) <= 0.3, fit.slope,
                          "slope within 0.3 of " + fmt(c.expected)});
  }
  return rep;
}

VerifyReport stability_suite() {
  VerifyReport rep{"stability", {}};
  std::vector<double> cfl;
  for (int k = 1; k <= 400; ++k) cfl.push_back(0.01 * k);
  const std::vector<int> factors{2, 4, 8, 16, 32};
  for (int p : {1, 3, 5}) {
    const double worst = max_correction_symbol({p}, factors, cfl);
    rep.checks.push_back({"p=" + std::to_string(p) + " c in [0.01, 4] m in {2..32}",
                          worst <= 1.0 + 1e-12, worst, "max |B symbol| <= 1 + 1e-12"});
  }
  return rep;
}

VerifyReport footnote_suite() {
  VerifyReport rep{"footnote_equivalence", {}};
  struct Case {
    int dim;
    std::string wave;
    int m;
  };
  const std::vector<Case> cases{{1, "C1", 2},          {1, "C1", 4},          {1, "C1", 8},
                                {1, "const:0.37", 4},  {1, "const:-2.3", 4},  {1, "const:0.9", 16},
                                {2, "C4", 4},          {2, "const:0.3,-0.7", 2}, {2, "const:1.9,0.45", 4}};
  for (const auto& c : cases) {
    const int n_x = c.dim == 1 ? 64 : 32;
    const int n_t = c.m * c.m * c.m;
    const double dev = backtrack_deviation(c.dim, c.wave, 1, c.m, n_x, n_t);
    rep.checks.push_back({std::to_string(c.dim) + "D " + c.wave + " m=" + std::to_string(c.m),
                          dev < 1e-12, dev, "max deviation < 1e-12"});
  }
  return rep;
}

}  // namespace

VerifyReport run_verify(const std::string& suite) {
  if (suite == "truncation") return truncation_suite();
  if (suite == "stability") return stability_suite();
  if (suite == "footnote_equivalence") return footnote_suite();
  throw std::invalid_argument("unknown verify suite '" + suite + "'");
}

nlohmann::json verify_json(const VerifyReport& rep) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"criterion", c.criterion}});
  return {{"suite", rep.suite}, {"passed", rep.passed()}, {"checks", checks}};
}

}  // namespace slmgrit

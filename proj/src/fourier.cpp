#include "slmgrit/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "slmgrit/coarse_correction.hpp"
#include "slmgrit/semi_lagrangian.hpp"

namespace slmgrit {

std::string_view to_string(CoarseSymbol k) {
  return k == CoarseSymbol::Rediscretized ? "rediscretized" : "corrected";
}

CoarseSymbol parse_coarse_symbol(std::string_view s) {
  if (s == "rediscretized") return CoarseSymbol::Rediscretized;
  if (s == "corrected") return CoarseSymbol::Corrected;
  throw std::invalid_argument("unknown coarse kind '" + std::string(s) + "'");
}

namespace {

struct Split {
  double k0;
  double eps;
};

// shift = k0 + eps with eps in [0, 1); the departure's east neighbour sits k0
// nodes west of the arrival node.
Split split_shift(double shift) {
  const double k0 = std::floor(shift);
  double eps = shift - k0;
  if (eps >= 1.0) eps = 0.0;
  return {k0, eps};
}

}  // namespace

std::complex<double> sl_symbol(int p, double shift, double omega) {
  check_degree(p);
  const auto [k0, eps] = split_shift(shift);
  const StencilSpec st(p);
  const InterpWeights w = interp_weights(p, eps);
  std::complex<double> s = 0.0;
  for (int k = 0; k < st.width(); ++k) {
    const int j = k - st.west();
    s += w[k] * std::polar(1.0, j * omega);
  }
  return std::polar(1.0, -k0 * omega) * s;
}

double constant_phi(int p, int m, double c) {
  check_degree(p);
  if (m < 1) throw std::invalid_argument("coarsening factor must be positive");
  const double sign = ((p + 1) % 2 == 0) ? 1.0 : -1.0;
  const double fine = split_shift(c).eps;
  const double coarse = split_shift(m * c).eps;
  return sign * (f_poly(p, coarse) - m * f_poly(p, fine));
}

std::complex<double> correction_symbol(int p, int m, double c, double omega) {
  const double phi = constant_phi(p, m, c);
  const auto d = DerivativeStencil::for_degree(p).symbol(omega);
  return 1.0 / (1.0 - phi * d);
}

std::complex<double> corrected_symbol(int p, int m, double c, double omega) {
  return sl_symbol(p, m * c, omega) * correction_symbol(p, m, c, omega);
}

std::complex<double> coarse_symbol(int p, int m, double c, double omega, CoarseSymbol kind) {
  return kind == CoarseSymbol::Corrected ? corrected_symbol(p, m, c, omega)
                                         : sl_symbol(p, m * c, omega);
}

std::vector<SymbolSample> sample_symbols(int p, int m, double c, CoarseSymbol kind, int count) {
  if (count < 1) throw std::invalid_argument("sample count must be positive");
  std::vector<SymbolSample> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double omega = -std::numbers::pi + 2.0 * std::numbers::pi * k / count;
    out.push_back({omega, sl_symbol(p, c, omega), coarse_symbol(p, m, c, omega, kind)});
  }
  return out;
}

double rho_estimate(int p, int m, double c, CoarseSymbol kind, int count) {
  double rho = 0.0;
  for (const auto& s : sample_symbols(p, m, c, kind, count)) {
    const double denom = 1.0 - std::abs(s.mu);
    if (std::abs(denom) < 1e-13) continue;
    const double lam = std::abs(s.lambda);
    const double val = std::pow(lam, m) * std::abs(std::pow(s.lambda, m) - s.mu) / denom;
    rho = std::max(rho, val);
  }
  return rho;
}

}  // namespace slmgrit

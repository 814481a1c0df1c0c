#pragma once

// Fourier symbols of the constant-speed semi-Lagrangian operators and the
// two-level convergence estimate built from them.
//
// Shifts are measured in grid units (alpha * step / h). A periodic
// semi-Lagrangian step with constant shift is circulant, so it acts on the
// mode e^{i omega x/h} as multiplication by its symbol.

#include <complex>
#include <string_view>
#include <vector>

namespace slmgrit {

enum class CoarseSymbol { Rediscretized, Corrected };

std::string_view to_string(CoarseSymbol k);
CoarseSymbol parse_coarse_symbol(std::string_view s);

constexpr int kLfaSamples = 512;

struct SymbolSample {
  double omega = 0.0;
  std::complex<double> lambda;
  std::complex<double> mu;
};

/// Symbol of one semi-Lagrangian step of degree p with the given shift.
std::complex<double> sl_symbol(int p, double shift, double omega);

/// Scalar correction coefficient for constant CFL number c and coarsening m.
double constant_phi(int p, int m, double c);

/// 1 / (1 - phi d(omega)): symbol of the backward-Euler factor.
std::complex<double> correction_symbol(int p, int m, double c, double omega);

/// Coarse symbol with the backward-Euler factor applied exactly.
std::complex<double> corrected_symbol(int p, int m, double c, double omega);

std::complex<double> coarse_symbol(int p, int m, double c, double omega, CoarseSymbol kind);

/// Samples at omega_k = -pi + 2 pi k / count, k = 0..count-1.
std::vector<SymbolSample> sample_symbols(int p, int m, double c, CoarseSymbol kind,
                                         int count = kLfaSamples);

/// max over sampled omega of |lambda|^m |lambda^m - mu| / (1 - |mu|), skipping
/// samples with |1 - |mu|| < 1e-13.
double rho_estimate(int p, int m, double c, CoarseSymbol kind, int count = kLfaSamples);

}  // namespace slmgrit

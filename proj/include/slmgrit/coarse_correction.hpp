#pragma once

// Truncation-error corrected coarse operators.
//
// The leading interpolation defect of a semi-Lagrangian step with offset eps is
// f_{p+1}(eps) * D_{p+1} u, where f_{p+1}(z) = prod_{q=-l(p)}^{r(p)} (q + z) / (p+1)!
// and D_{p+1} is the integer-coefficient centered difference for the (p+1)-st
// derivative (scaled by h^{p+1}). Matching the defect of a coarse step to the
// summed defects of the m steps it replaces gives the coefficient vector phi;
// the coarse operator is then [I - diag(sigma) D]^{-1} S_coarse, with sigma
// accumulated over levels.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "slmgrit/core.hpp"
#include "slmgrit/semi_lagrangian.hpp"

namespace slmgrit {

double f_poly(int p, double z);

/// Centered second-order stencil for the (p+1)-st derivative:
/// (1,-2,1), (1,-4,6,-4,1) or (1,-6,15,-20,15,-6,1).
class DerivativeStencil {
public:
  static DerivativeStencil for_degree(int p);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  int radius() const { return order() / 2; }
  /// Coefficient at offset k in [-radius, radius].
  int coeff(int k) const { return coeffs_[k + radius()]; }
  const std::vector<int>& coeffs() const { return coeffs_; }

  /// d(omega) = sum_k coeff(k) e^{i k omega}; real and equal to (2 cos omega - 2)^{(p+1)/2}.
  std::complex<double> symbol(double omega) const;

  /// Periodic application along one dimension of a 1D grid function.
  void apply(std::span<const double> v, std::span<double> out) const;

private:
  explicit DerivativeStencil(std::vector<int> c) : coeffs_(std::move(c)) {}
  std::vector<int> coeffs_;
};

/// Per-node coefficient vector(s). In 2D `x` multiplies the x-direction
/// derivative (built from eps data) and `y` the y-direction one (nu data).
struct CorrectionField {
  int dim = 1;
  int n = 0;
  std::vector<double> x;
  std::vector<double> y;

  static CorrectionField zeros(const SpatialGrid& grid);
  std::size_t size() const { return x.size(); }
  double max_abs() const;
};

/// phi_i = (-1)^{p+1} [ f(eps_i^coarse) - sum_k f(eps_i^{fine,k}) ]; with the
/// same construction on nu in 2D. `fine` must hold exactly m sets.
CorrectionField phi_vector(std::span<const DepartureSet* const> fine, const DepartureSet& coarse,
                           int p, int m);
CorrectionField phi_vector(std::span<const DepartureSet> fine, const DepartureSet& coarse, int p);

/// sigma = phi on the first coarse level (no children); otherwise the sum of
/// the m child sigmas plus this level's phi.
CorrectionField sigma_accumulate(std::span<const CorrectionField* const> children,
                                 const CorrectionField& phi, int m);
CorrectionField sigma_accumulate(std::span<const CorrectionField> children,
                                 const CorrectionField& phi, int m);

/// out = v - diag(field_x) (I (x) D) v [ - diag(field_y) (D (x) I) v in 2D ].
void apply_ImSD(const CorrectionField& field, const DerivativeStencil& stencil,
                std::span<const double> v, std::span<double> out);
GridFunction apply_ImSD(const CorrectionField& field, const DerivativeStencil& stencil,
                        std::span<const double> v);

/// out = v + diag(field) D v (the explicit forward-Euler factor).
void apply_IpSD(const CorrectionField& field, const DerivativeStencil& stencil,
                std::span<const double> v, std::span<double> out);

struct GmresConfig {
  int max_iters = 10;
  /// Relative residual tolerance; values <= 0 disable the test so exactly
  /// max_iters iterations run (unless the Krylov space becomes invariant).
  double rel_tol = 0.0;

  static GmresConfig two_level() { return {10, 0.0}; }
  static GmresConfig multilevel() { return {10, 1e-2}; }
};

struct GmresResult {
  GridFunction x;
  int iterations = 0;
  /// Residual norms, starting with ||rhs|| (zero initial guess).
  std::vector<double> residuals;
  /// Krylov space became invariant before the iteration cap.
  bool breakdown = false;
};

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

/// Non-restarted GMRES with modified Gram-Schmidt and Givens rotations,
/// zero initial guess. Throws on non-finite right-hand sides.
GmresResult gmres(const LinearOperator& op, std::span<const double> rhs, const GmresConfig& cfg);

/// Approximate solve of (I - diag(field) D) x = rhs.
GmresResult gmres_solve(const CorrectionField& field, const DerivativeStencil& stencil,
                        std::span<const double> rhs, const GmresConfig& cfg);

/// B S u: coarse semi-Lagrangian step followed by the implicit correction.
GridFunction corrected_coarse_step(const DepartureSet& dep, const CorrectionField& sigma,
                                   const DerivativeStencil& stencil, int p,
                                   std::span<const double> u, const GmresConfig& cfg);

/// F S u with F = I + diag(sigma) D.
GridFunction forward_euler_coarse_step(const DepartureSet& dep, const CorrectionField& sigma,
                                       const DerivativeStencil& stencil, int p,
                                       std::span<const double> u);

}  // namespace slmgrit

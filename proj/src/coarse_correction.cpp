#include "slmgrit/coarse_correction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slmgrit {

double f_poly(int p, double z) {
  check_degree(p);
  const int west = (p + 1) / 2;
  const int east = (p - 1) / 2;
  double prod = 1.0;
  for (int q = -west; q <= east; ++q) prod *= q + z;
  double fact = 1.0;
  for (int k = 2; k <= p + 1; ++k) fact *= k;
  return prod / fact;
}

DerivativeStencil DerivativeStencil::for_degree(int p) {
  check_degree(p);
  switch (p) {
    case 1: return DerivativeStencil({1, -2, 1});
    case 3: return DerivativeStencil({1, -4, 6, -4, 1});
    default: return DerivativeStencil({1, -6, 15, -20, 15, -6, 1});
  }
}

std::complex<double> DerivativeStencil::symbol(double omega) const {
  std::complex<double> s = 0.0;
  const int r = radius();
  for (int k = -r; k <= r; ++k) s += static_cast<double>(coeff(k)) * std::polar(1.0, k * omega);
  return s;
}

void DerivativeStencil::apply(std::span<const double> v, std::span<double> out) const {
  const int n = static_cast<int>(v.size());
  const int r = radius();
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = -r; k <= r; ++k) {
      int idx = i + k;
      idx = ((idx % n) + n) % n;
      acc += coeff(k) * v[idx];
    }
    out[i] = acc;
  }
}

CorrectionField CorrectionField::zeros(const SpatialGrid& grid) {
  CorrectionField f;
  f.dim = grid.dim();
  f.n = grid.n();
  f.x.assign(grid.size(), 0.0);
  if (grid.dim() == 2) f.y.assign(grid.size(), 0.0);
  return f;
}

double CorrectionField::max_abs() const { return std::max(max_norm(x), max_norm(y)); }

CorrectionField phi_vector(std::span<const DepartureSet* const> fine, const DepartureSet& coarse,
                           int p, int m) {
  check_degree(p);
  if (static_cast<int>(fine.size()) != m)
    throw std::invalid_argument("phi_vector: expected one fine departure set per substep");
  const double sign = ((p + 1) % 2 == 0) ? 1.0 : -1.0;
  CorrectionField phi;
  phi.dim = coarse.dim;
  phi.n = coarse.n;
  const std::size_t size = coarse.size();
  phi.x.resize(size);
  for (const auto* f : fine)
    if (f->size() != size || f->dim != coarse.dim)
      throw std::invalid_argument("phi_vector: fine and coarse sets live on different grids");
  for (std::size_t i = 0; i < size; ++i) {
    double s = f_poly(p, coarse.eps[i]);
    for (const auto* f : fine) s -= f_poly(p, f->eps[i]);
    phi.x[i] = sign * s;
  }
  if (coarse.dim == 2) {
    phi.y.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
      double s = f_poly(p, coarse.nu[i]);
      for (const auto* f : fine) s -= f_poly(p, f->nu[i]);
      phi.y[i] = sign * s;
    }
  }
  return phi;
}

CorrectionField phi_vector(std::span<const DepartureSet> fine, const DepartureSet& coarse, int p) {
  std::vector<const DepartureSet*> ptrs;
  for (const auto& f : fine) ptrs.push_back(&f);
  return phi_vector(ptrs, coarse, p, static_cast<int>(ptrs.size()));
}

CorrectionField sigma_accumulate(std::span<const CorrectionField* const> children,
                                 const CorrectionField& phi, int m) {
  if (children.empty()) return phi;
  if (static_cast<int>(children.size()) != m)
    throw std::invalid_argument("sigma_accumulate: expected one child field per substep");
  CorrectionField sigma = CorrectionField{phi.dim, phi.n, std::vector<double>(phi.x.size(), 0.0),
                                          std::vector<double>(phi.y.size(), 0.0)};
  for (const auto* c : children) {
    if (c->x.size() != phi.x.size() || c->y.size() != phi.y.size())
      throw std::invalid_argument("sigma_accumulate: shape mismatch");
    for (std::size_t i = 0; i < sigma.x.size(); ++i) sigma.x[i] += c->x[i];
    for (std::size_t i = 0; i < sigma.y.size(); ++i) sigma.y[i] += c->y[i];
  }
  for (std::size_t i = 0; i < sigma.x.size(); ++i) sigma.x[i] += phi.x[i];
  for (std::size_t i = 0; i < sigma.y.size(); ++i) sigma.y[i] += phi.y[i];
  return sigma;
}

CorrectionField sigma_accumulate(std::span<const CorrectionField> children,
                                 const CorrectionField& phi, int m) {
  std::vector<const CorrectionField*> ptrs;
  for (const auto& c : children) ptrs.push_back(&c);
  return sigma_accumulate(ptrs, phi, m);
}

namespace {

// out = v + sign * (diag(fx) Dx v + diag(fy) Dy v)
void apply_correction(const CorrectionField& field, const DerivativeStencil& stencil,
                      std::span<const double> v, std::span<double> out, double sign) {
  if (v.size() != field.size() || out.size() != field.size())
    throw std::invalid_argument("correction operator: shape mismatch");
  const int n = field.n;
  const int r = stencil.radius();
  const int* c = stencil.coeffs().data() + r;
  if (field.dim == 1) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) {
        int idx = i + k;
        if (idx < 0) idx += n;
        else if (idx >= n) idx -= n;
        acc += c[k] * v[idx];
      }
      out[i] = v[i] + sign * field.x[i] * acc;
    }
    return;
  }
  const std::size_t nn = static_cast<std::size_t>(n);
  for (int j = 0; j < n; ++j) {
    const double* row = v.data() + j * nn;
    for (int i = 0; i < n; ++i) {
      double ax = 0.0;
      double ay = 0.0;
      for (int k = -r; k <= r; ++k) {
        int ii = i + k;
        if (ii < 0) ii += n;
        else if (ii >= n) ii -= n;
        int jj = j + k;
        if (jj < 0) jj += n;
        else if (jj >= n) jj -= n;
        ax += c[k] * row[ii];
        ay += c[k] * v[jj * nn + i];
      }
      const std::size_t q = j * nn + i;
      out[q] = v[q] + sign * (field.x[q] * ax + field.y[q] * ay);
    }
  }
}

}  // namespace

void apply_ImSD(const CorrectionField& field, const DerivativeStencil& stencil,
                std::span<const double> v, std::span<double> out) {
  apply_correction(field, stencil, v, out, -1.0);
}

GridFunction apply_ImSD(const CorrectionField& field, const DerivativeStencil& stencil,
                        std::span<const double> v) {
  GridFunction out(v.size());
  apply_ImSD(field, stencil, v, out);
  return out;
}

void apply_IpSD(const CorrectionField& field, const DerivativeStencil& stencil,
                std::span<const double> v, std::span<double> out) {
  apply_correction(field, stencil, v, out, 1.0);
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

GmresResult gmres(const LinearOperator& op, std::span<const double> rhs, const GmresConfig& cfg) {
  if (cfg.max_iters < 1) throw std::invalid_argument("GMRES needs at least one iteration");
  for (double b : rhs)
    if (!std::isfinite(b)) throw std::invalid_argument("GMRES right-hand side is not finite");

  const std::size_t n = rhs.size();
  GmresResult res;
  res.x.assign(n, 0.0);
  const double beta = l2_norm(rhs);
  res.residuals.push_back(beta);
  if (beta == 0.0) return res;

  const int kmax = cfg.max_iters;
  std::vector<std::vector<double>> basis;
  basis.reserve(kmax + 1);
  basis.emplace_back(rhs.begin(), rhs.end());
  for (double& x : basis[0]) x /= beta;

  // Column-major Hessenberg: hess[k] holds column k (length k + 2).
  std::vector<std::vector<double>> hess;
  std::vector<double> cs, sn;
  std::vector<double> g{beta};
  std::vector<double> w(n);

  int k = 0;
  for (; k < kmax; ++k) {
    op(basis[k], w);
    const double wnorm0 = l2_norm(w);
    std::vector<double> col(k + 2, 0.0);
    for (int j = 0; j <= k; ++j) {
      const double hij = dot(w, basis[j]);
      col[j] = hij;
      const auto& vj = basis[j];
      for (std::size_t i = 0; i < n; ++i) w[i] -= hij * vj[i];
    }
    const double hnext = l2_norm(w);
    col[k + 1] = hnext;

    for (int j = 0; j < k; ++j) {
      const double a = col[j];
      const double b = col[j + 1];
      col[j] = cs[j] * a + sn[j] * b;
      col[j + 1] = -sn[j] * a + cs[j] * b;
    }
    const double a = col[k];
    const double b = col[k + 1];
    const double r = std::hypot(a, b);
    const double c = r == 0.0 ? 1.0 : a / r;
    const double s = r == 0.0 ? 0.0 : b / r;
    cs.push_back(c);
    sn.push_back(s);
    col[k] = r;
    col[k + 1] = 0.0;
    g.push_back(-s * g[k]);
    g[k] = c * g[k];
    hess.push_back(std::move(col));

    const double resid = std::abs(g[k + 1]);
    res.residuals.push_back(resid);

    const bool invariant = hnext <= 1e-14 * wnorm0;
    const bool converged = cfg.rel_tol > 0.0 && resid <= cfg.rel_tol * beta;
    if (invariant) res.breakdown = true;
    if (invariant || converged || k + 1 == kmax) {
      ++k;
      break;
    }
    basis.emplace_back(w);
    for (double& x : basis.back()) x /= hnext;
  }
  res.iterations = k;

  std::vector<double> y(k, 0.0);
  for (int i = k - 1; i >= 0; --i) {
    double s = g[i];
    for (int j = i + 1; j < k; ++j) s -= hess[j][i] * y[j];
    y[i] = hess[i][i] == 0.0 ? 0.0 : s / hess[i][i];
  }
  for (int j = 0; j < k; ++j) {
    const auto& vj = basis[j];
    for (std::size_t i = 0; i < n; ++i) res.x[i] += y[j] * vj[i];
  }
  return res;
}

GmresResult gmres_solve(const CorrectionField& field, const DerivativeStencil& stencil,
                        std::span<const double> rhs, const GmresConfig& cfg) {
  if (rhs.size() != field.size()) throw std::invalid_argument("gmres_solve: shape mismatch");
  LinearOperator op = [&](std::span<const double> v, std::span<double> out) {
    apply_ImSD(field, stencil, v, out);
  };
  return gmres(op, rhs, cfg);
}

GridFunction corrected_coarse_step(const DepartureSet& dep, const CorrectionField& sigma,
                                   const DerivativeStencil& stencil, int p,
                                   std::span<const double> u, const GmresConfig& cfg) {
  const GridFunction s = sl_step(dep, p, u);
  return gmres_solve(sigma, stencil, s, cfg).x;
}

GridFunction forward_euler_coarse_step(const DepartureSet& dep, const CorrectionField& sigma,
                                       const DerivativeStencil& stencil, int p,
                                       std::span<const double> u) {
  const GridFunction s = sl_step(dep, p, u);
  GridFunction out(s.size());
  apply_IpSD(sigma, stencil, s, out);
  return out;
}

}  // namespace slmgrit

#include "slmgrit/mgrit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "slmgrit/backtracking.hpp"

namespace slmgrit {

std::string_view to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::FineSL: return "fine";
    case OperatorKind::Rediscretized: return "rediscretized";
    case OperatorKind::Corrected: return "corrected";
    case OperatorKind::ForwardEuler: return "forward_euler";
    case OperatorKind::Ideal: return "ideal";
  }
  return "?";
}

std::string_view to_string(DeparturePolicy d) {
  switch (d) {
    case DeparturePolicy::Backtrack: return "backtrack";
    case DeparturePolicy::ErkRediscretized: return "erk_rediscretized";
    case DeparturePolicy::ErkSubsteps: return "erk_substeps";
  }
  return "?";
}

std::string_view to_string(Relaxation r) { return r == Relaxation::FCF ? "FCF" : "F"; }

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Diverged: return "diverged";
    case SolveStatus::MaxIters: return "max_iters";
  }
  return "?";
}

OperatorKind parse_operator_kind(std::string_view s) {
  if (s == "rediscretized") return OperatorKind::Rediscretized;
  if (s == "corrected") return OperatorKind::Corrected;
  if (s == "forward_euler") return OperatorKind::ForwardEuler;
  if (s == "ideal") return OperatorKind::Ideal;
  throw std::invalid_argument("unknown operator kind '" + std::string(s) + "'");
}

DeparturePolicy parse_departure_policy(std::string_view s) {
  if (s == "backtrack") return DeparturePolicy::Backtrack;
  if (s == "erk_rediscretized") return DeparturePolicy::ErkRediscretized;
  if (s == "erk_substeps") return DeparturePolicy::ErkSubsteps;
  throw std::invalid_argument("unknown departure policy '" + std::string(s) + "'");
}

Relaxation parse_relaxation(std::string_view s) {
  if (s == "FCF" || s == "fcf") return Relaxation::FCF;
  if (s == "F" || s == "f") return Relaxation::F;
  throw std::invalid_argument("unknown relaxation '" + std::string(s) + "'");
}

Hierarchy Hierarchy::build(const HierarchyConfig& cfg) {
  check_degree(cfg.p);
  const ErkScheme erk = ErkScheme::of_order(cfg.r);
  if (cfg.wave.dim() != cfg.grid.dim())
    throw std::invalid_argument("wave speed dimension does not match the grid");
  if (cfg.n_t < 1) throw std::invalid_argument("n_t must be positive");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (cfg.coarsening.empty()) throw std::invalid_argument("empty coarsening schedule");
  for (int m : cfg.coarsening)
    if (m < 2) throw std::invalid_argument("coarsening factors must be at least 2");
  if (cfg.coarse_kind == OperatorKind::FineSL)
    throw std::invalid_argument("'fine' is not a coarse operator kind");
  if (cfg.max_levels < 0) throw std::invalid_argument("max_levels must be non-negative");

  Hierarchy h(cfg, DerivativeStencil::for_degree(cfg.p));
  const SpatialGrid& grid = h.cfg_.grid;

  Level fine;
  fine.index = 0;
  fine.n_steps = cfg.n_t;
  fine.dt = cfg.dt;
  fine.kind = OperatorKind::FineSL;
  fine.departures.reserve(cfg.n_t);
  for (int n = 0; n < cfg.n_t; ++n)
    fine.departures.push_back(trace_departures(grid, cfg.wave, n * cfg.dt, cfg.dt, erk));
  h.levels_.push_back(std::move(fine));

  const bool needs_departures = cfg.coarse_kind != OperatorKind::Ideal;
  const bool needs_sigma =
      cfg.coarse_kind == OperatorKind::Corrected || cfg.coarse_kind == OperatorKind::ForwardEuler;

  while (cfg.max_levels == 0 || h.num_levels() < cfg.max_levels) {
    Level& finer = h.levels_.back();
    const int l = finer.index;
    const int m = cfg.coarsening[std::min<std::size_t>(l, cfg.coarsening.size() - 1)];
    const int n_fine = finer.n_steps;
    if (n_fine / m < 2) break;
    if (n_fine % m != 0)
      throw std::invalid_argument("level " + std::to_string(l) + " has " + std::to_string(n_fine) +
                                  " steps, not divisible by coarsening factor " +
                                  std::to_string(m));
    finer.m_to_coarser = m;

    Level coarse;
    coarse.index = l + 1;
    coarse.n_steps = n_fine / m;
    coarse.dt = finer.dt * m;
    coarse.fine_steps_per_step = finer.fine_steps_per_step * m;
    coarse.kind = cfg.coarse_kind;

    if (needs_departures) {
      coarse.departures.reserve(coarse.n_steps);
      for (int n = 0; n < coarse.n_steps; ++n) {
        const double t0 = n * coarse.dt;
        switch (cfg.departures) {
          case DeparturePolicy::Backtrack: {
            std::vector<const DepartureSet*> children;
            for (int k = 0; k < m; ++k) children.push_back(&finer.departures[n * m + k]);
            coarse.departures.push_back(backtrack_departures(grid, children));
            break;
          }
          case DeparturePolicy::ErkRediscretized:
            coarse.departures.push_back(trace_departures(grid, cfg.wave, t0, coarse.dt, erk));
            break;
          case DeparturePolicy::ErkSubsteps:
            coarse.departures.push_back(trace_departures_substeps(
                grid, cfg.wave, t0, coarse.dt, static_cast<int>(coarse.fine_steps_per_step), erk));
            break;
        }
      }
    }

    if (needs_sigma) {
      coarse.phi.reserve(coarse.n_steps);
      coarse.sigma.reserve(coarse.n_steps);
      for (int n = 0; n < coarse.n_steps; ++n) {
        std::vector<const DepartureSet*> children;
        for (int k = 0; k < m; ++k) children.push_back(&finer.departures[n * m + k]);
        coarse.phi.push_back(phi_vector(children, coarse.departures[n], cfg.p, m));
        if (l == 0) {
          coarse.sigma.push_back(coarse.phi.back());
        } else {
          std::vector<const CorrectionField*> kids;
          for (int k = 0; k < m; ++k) kids.push_back(&finer.sigma[n * m + k]);
          coarse.sigma.push_back(sigma_accumulate(kids, coarse.phi.back(), m));
        }
      }
    }
    h.levels_.push_back(std::move(coarse));
  }
  return h;
}

void Hierarchy::step(int l, int n, std::span<const double> in, std::span<double> out) const {
  const Level& L = levels_[l];
  const int p = cfg_.p;
  switch (L.kind) {
    case OperatorKind::FineSL:
    case OperatorKind::Rediscretized:
      sl_step(L.departures[n], p, in, out);
      return;
    case OperatorKind::Corrected: {
      const GridFunction s = sl_step(L.departures[n], p, in);
      const GmresResult g = gmres_solve(L.sigma[n], stencil_, s, cfg_.gmres);
      std::copy(g.x.begin(), g.x.end(), out.begin());
      return;
    }
    case OperatorKind::ForwardEuler: {
      const GridFunction s = sl_step(L.departures[n], p, in);
      apply_IpSD(L.sigma[n], stencil_, s, out);
      return;
    }
    case OperatorKind::Ideal: {
      const Level& child = levels_[l - 1];
      const int m = child.m_to_coarser;
      GridFunction cur(in.begin(), in.end());
      GridFunction next(in.size());
      for (int k = 0; k < m; ++k) {
        step(l - 1, n * m + k, cur, next);
        std::swap(cur, next);
      }
      std::copy(cur.begin(), cur.end(), out.begin());
      return;
    }
  }
}

SpaceTimeState SpaceTimeState::zeros(std::size_t n_steps, std::size_t n_space) {
  SpaceTimeState s;
  s.u.assign(n_steps + 1, GridFunction(n_space, 0.0));
  return s;
}

namespace {

template <class Fn>
void parallel_for(int count, Execution ex, Fn&& fn) {
  const int threads = std::min(ex.threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

// u_{n+1} = Phi_n u_n + g_{n+1}
void advance(const Hierarchy& h, int l, int n, SpaceTimeState& u, const SpaceTimeState& g) {
  auto& next = u[n + 1];
  h.step(l, n, u[n], next);
  const auto& f = g[n + 1];
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += f[i];
}

int coarsening_of(const Hierarchy& h, int l) {
  const int m = h.level(l).m_to_coarser;
  return m > 0 ? m : h.level(l).n_steps;
}

}  // namespace

void f_relax(const Hierarchy& h, int l, SpaceTimeState& u, const SpaceTimeState& g, Execution ex) {
  const int m = coarsening_of(h, l);
  const int intervals = h.level(l).n_steps / m;
  parallel_for(intervals, ex, [&](int c) {
    for (int k = 0; k < m - 1; ++k) advance(h, l, c * m + k, u, g);
  });
}

void c_relax(const Hierarchy& h, int l, SpaceTimeState& u, const SpaceTimeState& g, Execution ex) {
  const int m = coarsening_of(h, l);
  const int intervals = h.level(l).n_steps / m;
  parallel_for(intervals, ex, [&](int c) { advance(h, l, (c + 1) * m - 1, u, g); });
}

SpaceTimeState residual(const Hierarchy& h, int l, const SpaceTimeState& u,
                        const SpaceTimeState& g) {
  const int N = h.level(l).n_steps;
  const std::size_t size = h.grid().size();
  SpaceTimeState r = SpaceTimeState::zeros(N, size);
  for (int n = 0; n < N; ++n) {
    auto& rn = r[n + 1];
    h.step(l, n, u[n], rn);
    const auto& f = g[n + 1];
    const auto& un = u[n + 1];
    for (std::size_t i = 0; i < size; ++i) rn[i] += f[i] - un[i];
  }
  return r;
}

void sequential_solve(const Hierarchy& h, int l, SpaceTimeState& u, const SpaceTimeState& g) {
  const int N = h.level(l).n_steps;
  for (int n = 0; n < N; ++n) advance(h, l, n, u, g);
}

void v_cycle(const Hierarchy& h, int l, SpaceTimeState& u, const SpaceTimeState& g,
             const CycleOptions& opts) {
  if (l == h.num_levels() - 1) {
    sequential_solve(h, l, u, g);
    return;
  }
  const int m = h.level(l).m_to_coarser;
  const int nc = h.level(l).n_steps / m;
  const std::size_t size = h.grid().size();

  f_relax(h, l, u, g, opts.exec);
  if (opts.relaxation == Relaxation::FCF) {
    c_relax(h, l, u, g, opts.exec);
    f_relax(h, l, u, g, opts.exec);
  }

  // Residual restricted to C-points by injection.
  SpaceTimeState rc = SpaceTimeState::zeros(nc, size);
  {
    GridFunction tmp(size);
    for (int c = 1; c <= nc; ++c) {
      const int n = c * m;
      h.step(l, n - 1, u[n - 1], tmp);
      auto& rr = rc[c];
      const auto& f = g[n];
      const auto& un = u[n];
      for (std::size_t i = 0; i < size; ++i) rr[i] = f[i] + tmp[i] - un[i];
    }
  }

  SpaceTimeState ec = SpaceTimeState::zeros(nc, size);
  v_cycle(h, l + 1, ec, rc, opts);

  for (int c = 1; c <= nc; ++c) {
    auto& un = u[c * m];
    const auto& e = ec[c];
    for (std::size_t i = 0; i < size; ++i) un[i] += e[i];
  }
  f_relax(h, l, u, g, opts.exec);
}

SpaceTimeState initial_iterate(const Hierarchy& h, std::uint64_t seed) {
  const int N = h.level(0).n_steps;
  SpaceTimeState u;
  u.u.reserve(N + 1);
  u.u.push_back(initial_condition(h.grid()));
  Rng rng(seed);
  for (int n = 1; n <= N; ++n) u.u.push_back(random_state(h.grid(), rng));
  return u;
}

SolveResult solve(const Hierarchy& h, const SolveConfig& cfg) {
  if (cfg.max_iters < 0) throw std::invalid_argument("max_iters must be non-negative");
  SolveResult out;
  out.state = initial_iterate(h, cfg.seed);
  const SpaceTimeState g = SpaceTimeState::zeros(h.level(0).n_steps, h.grid().size());
  auto& rep = out.report;

  const double r0 = residual(h, 0, out.state, g).norm();
  rep.history.push_back(r0);
  if (r0 == 0.0) {
    rep.status = SolveStatus::Converged;
    return out;
  }
  if (!std::isfinite(r0)) {
    rep.status = SolveStatus::Diverged;
    return out;
  }

  rep.status = SolveStatus::MaxIters;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    if (h.num_levels() == 1)
      sequential_solve(h, 0, out.state, g);
    else
      v_cycle(h, 0, out.state, g, cfg.cycle);
    const double r = residual(h, 0, out.state, g).norm();
    rep.history.push_back(r);
    rep.iterations = it;
    rep.final_factor = r / rep.history[it - 1];
    if (!std::isfinite(r) || r >= cfg.divergence_factor * r0) {
      rep.status = SolveStatus::Diverged;
      break;
    }
    if (r <= cfg.rel_tol * r0) {
      rep.status = SolveStatus::Converged;
      break;
    }
  }
  return out;
}

}  // namespace slmgrit

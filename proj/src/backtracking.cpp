#include "slmgrit/backtracking.hpp"

#include <stdexcept>
#include <vector>

namespace slmgrit {

namespace {

void check_children(std::span<const DepartureSet* const> children, int dim) {
  if (children.empty()) throw std::invalid_argument("backtracking needs at least one child step");
  for (const auto* c : children)
    if (c == nullptr || c->dim != dim)
      throw std::invalid_argument("backtracking: child set has the wrong dimension");
}

}  // namespace

BacktrackResult1D backtrack_1d(const SpatialGrid& grid, std::span<const DepartureSet* const> children,
                               int arrival_index) {
  check_children(children, 1);
  const int m = static_cast<int>(children.size());
  BacktrackResult1D res;
  double disp = children[m - 1]->disp_x[arrival_index];
  for (int k = m - 2; k >= 0; --k) {
    const auto dec = decompose_displacement(grid, arrival_index, disp);
    const int east = dec.east;
    const int west = east == 0 ? grid.n() - 1 : east - 1;
    const auto& d = children[k]->disp_x;
    disp += (1.0 - dec.eps) * d[east] + dec.eps * d[west];
    ++res.updates;
  }
  res.displacement = disp;
  res.departure = grid.node(arrival_index) - disp;
  return res;
}

BacktrackResult2D backtrack_2d(const SpatialGrid& grid, std::span<const DepartureSet* const> children,
                               int arrival_i, int arrival_j) {
  check_children(children, 2);
  const int m = static_cast<int>(children.size());
  const int n = grid.n();
  const std::size_t arrival = grid.index(arrival_i, arrival_j);
  BacktrackResult2D res;
  double dx = children[m - 1]->disp_x[arrival];
  double dy = children[m - 1]->disp_y[arrival];
  for (int k = m - 2; k >= 0; --k) {
    const auto ex = decompose_displacement(grid, arrival_i, dx);
    const auto ey = decompose_displacement(grid, arrival_j, dy);
    const int e = ex.east;
    const int w = e == 0 ? n - 1 : e - 1;
    const int no = ey.east;
    const int so = no == 0 ? n - 1 : no - 1;
    const double eps = ex.eps;
    const double nu = ey.eps;
    const std::size_t ne = grid.index(e, no), nw = grid.index(w, no);
    const std::size_t se = grid.index(e, so), sw = grid.index(w, so);
    const double wne = (1.0 - eps) * (1.0 - nu);
    const double wnw = eps * (1.0 - nu);
    const double wse = (1.0 - eps) * nu;
    const double wsw = eps * nu;
    const auto& cx = children[k]->disp_x;
    const auto& cy = children[k]->disp_y;
    dx += wne * cx[ne] + wnw * cx[nw] + wse * cx[se] + wsw * cx[sw];
    dy += wne * cy[ne] + wnw * cy[nw] + wse * cy[se] + wsw * cy[sw];
    ++res.updates;
  }
  res.displacement = {dx, dy};
  res.departure = {grid.node(arrival_i) - dx, grid.node(arrival_j) - dy};
  return res;
}

DepartureSet backtrack_departures(const SpatialGrid& grid,
                                  std::span<const DepartureSet* const> children) {
  check_children(children, grid.dim());
  const double t_start = children.front()->t_start;
  double step = 0.0;
  for (const auto* c : children) step += c->step;
  const int n = grid.n();
  std::vector<double> dx(grid.size());
  if (grid.dim() == 1) {
    for (int i = 0; i < n; ++i) dx[i] = backtrack_1d(grid, children, i).displacement;
    return DepartureSet::from_displacements(grid, t_start, step, std::move(dx));
  }
  std::vector<double> dy(grid.size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const auto r = backtrack_2d(grid, children, i, j);
      dx[grid.index(i, j)] = r.displacement[0];
      dy[grid.index(i, j)] = r.displacement[1];
    }
  return DepartureSet::from_displacements(grid, t_start, step, std::move(dx), std::move(dy));
}

DepartureSet backtrack_departures(const SpatialGrid& grid, std::span<const DepartureSet> children) {
  std::vector<const DepartureSet*> ptrs;
  for (const auto& c : children) ptrs.push_back(&c);
  return backtrack_departures(grid, ptrs);
}

}  // namespace slmgrit

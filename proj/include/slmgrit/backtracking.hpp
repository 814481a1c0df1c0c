#pragma once

// Coarse departure points from recycled fine-level characteristics.
//
// A coarse characteristic arriving at node i is followed backwards through the
// m child steps of its interval. Its position after the last child step is the
// child's own departure point; every earlier position is obtained by linearly
// (bilinearly in 2D) interpolating the child displacements of the two (four)
// nodes surrounding the current position. The interpolation acts on
// displacements rather than absolute coordinates, which keeps it continuous
// across the periodic seam.

#include <span>

#include "slmgrit/core.hpp"
#include "slmgrit/semi_lagrangian.hpp"

namespace slmgrit {

struct BacktrackResult1D {
  /// Departure coordinate (not wrapped into the fundamental period).
  double departure = 0.0;
  /// Arrival minus departure.
  double displacement = 0.0;
  int updates = 0;
};

struct BacktrackResult2D {
  Vec2 departure{};
  Vec2 displacement{};
  int updates = 0;
};

/// `children` are the m child departure sets of the coarse interval, ordered
/// from the earliest (k = 0) to the latest (k = m - 1).
BacktrackResult1D backtrack_1d(const SpatialGrid& grid, std::span<const DepartureSet* const> children,
                               int arrival_index);
BacktrackResult2D backtrack_2d(const SpatialGrid& grid, std::span<const DepartureSet* const> children,
                               int arrival_i, int arrival_j);

/// Coarse departure set for the whole grid built by backtracking.
DepartureSet backtrack_departures(const SpatialGrid& grid,
                                  std::span<const DepartureSet* const> children);
DepartureSet backtrack_departures(const SpatialGrid& grid, std::span<const DepartureSet> children);

}  // namespace slmgrit

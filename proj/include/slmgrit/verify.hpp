#pragma once

// Self-check batteries exposed through `slmgrit verify`.
//
//   truncation            ideal-gap decay rates under mesh refinement (p = 1)
//   stability             |1 / (1 - phi d(omega))| <= 1 + 1e-12 over a CFL sweep
//   footnote_equivalence  backtracked coarse departures equal m-step ERK
//                         departures for constant velocities (< 1e-12)

#include <string>
#include <vector>

#include <json.hpp>

#include "slmgrit/oracle.hpp"

namespace slmgrit {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string criterion;
};

struct VerifyReport {
  std::string suite;
  std::vector<VerifyCheck> checks;
  bool passed() const;
};

std::vector<std::string> verify_suites();
/// Throws std::invalid_argument for an unknown suite.
VerifyReport run_verify(const std::string& suite);
nlohmann::json verify_json(const VerifyReport& rep);

/// Mesh ladder used for gap slopes: n_x = 2^7 .. 2^11.
std::vector<int> truncation_ladder();

struct SlopeCase {
  std::string wave;
  GapCorrection correction = GapCorrection::Identity;
  /// dt = 0.85 h when true, dt = 0.85 otherwise.
  bool dt_scales_with_h = true;
  int p = 1;
  double expected = 2.0;
};

std::vector<SlopeCase> truncation_cases();
OrderFit gap_slope(const SlopeCase& c, const std::vector<int>& ladder);

/// Largest |1 / (1 - phi d(omega))| over the degrees, coarsening factors and
/// CFL numbers given, sampled at the standard 512 frequencies.
double max_correction_symbol(const std::vector<int>& degrees, const std::vector<int>& factors,
                             const std::vector<double>& cfl);

/// Largest |backtracked - ERK-substep| coarse displacement over every coarse
/// level of a hierarchy for a constant velocity.
double backtrack_deviation(int dim, const std::string& wave, int p, int m, int n_x, int n_t);

}  // namespace slmgrit

#pragma once

#include <string>

#include "umlab/multiplier.hpp"
#include "umlab/phase_geometry.hpp"
#include "umlab/symbols.hpp"

namespace umlab {

/// Everything the growth sweep needs, fixed once per symbol.
struct GrowthSetup {
  Symbol original;
  Symbol working;  // rotated (and possibly negated) so the witness sits at the pole
  Vec pole;        // direction of the original sphere moved to e_d
  bool negated = false;
  ChartPhase chart;
  WitnessDomains domains;
  BumpAmplitude bump;
};

struct GrowthOptions {
  int sphere_starts = 0;  // 0: 16 d
  Vec seed_offset;        // empty: scan candidate seeds
  double shrink = 1.0;
};

/// Builds the setup. d = 2: the pole is the direction of largest tangential
/// derivative and the nonzero-slope branch is used. d >= 3: the lowest
/// nondegenerate local minimum is rotated to the pole; failing that a
/// nondegenerate maximum, with the symbol negated (T^{-t} is the adjoint of
/// T^t, so the norms agree). Throws HypothesisError when neither exists or
/// when a 2-d symbol is constant.
GrowthSetup prepare_growth(const Symbol& sym, const GrowthOptions& opts = {});

std::string growth_setup_json(const GrowthSetup& setup);

}  // namespace umlab

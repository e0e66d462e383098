#pragma once

#include <string>
#include <vector>

#include "jscc/channel_exp.hpp"
#include "jscc/hull.hpp"
#include "jscc/prob.hpp"

// Independent brute-force certification of the optimization modules. The
// exhaustive searches here deliberately share no solver code with the
// channel-exponent or hull modules: naive grids and inline arithmetic only.

namespace jscc::oracle {

// Exhaustive grid over couplings with row marginal Q (conditional rows on a
// simplex grid), filtered by I <= R + quantization slack; |X| <= 3.
double brute_force_weak_exponent(const Distribution& q, double R,
                                 const BhattacharyyaMatrix& d, double resolution);

// Both marginals pinned to Q. |X| = 2 uses the one-parameter family scanned
// at the given step; |X| = 3 grids the four free entries.
double brute_force_ckm_exponent(const Distribution& q, double R,
                                const BhattacharyyaMatrix& d, double resolution);

struct DualityRow {
  std::string section;  // "source", "channel", "joint"
  double param = 0.0;   // R (or 0 for scalar comparisons)
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  bool boundary = false;  // truncation flag fired on either route
  bool pass = true;       // gap <= 1e-3 or boundary-excused
};

struct DualityReport {
  std::vector<DualityRow> rows;
  double max_source_gap = 0.0;
  double max_channel_gap = 0.0;
  double max_joint_gap = 0.0;
  bool pass = true;
};

// Primal-vs-dual tabulation for the source reliability function, the weak
// channel exponent at uniform Q, and the composite joint exponent.
DualityReport duality_report(double t, const Distribution& pv, const Channel& w,
                             const GridSpec& grids = {});

}  // namespace jscc::oracle

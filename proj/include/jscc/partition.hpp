#pragma once

#include <optional>
#include <vector>

#include "jscc/channel_exp.hpp"
#include "jscc/hull.hpp"
#include "jscc/plan.hpp"
#include "jscc/prob.hpp"

// Class-based partitioning of source types: the argmax assignment rule, the
// closed-form two-class threshold, the two-supporting-point construction,
// and type-class-size feasibility checks.

namespace jscc {

// Assigns each source type to the class maximizing
// E'_x(Q_c, rho_c) + (lambda_c - rho_c) R_i - t E_s(lambda_c, P_V);
// ties go to the lowest class index.
PartitionPlan assign_classes(const SourceTypeTable& types,
                             const std::vector<ClassParams>& classes, double t,
                             const Distribution& pv, const BhattacharyyaMatrix& d);

struct ThresholdResult {
  double r0 = 0.0;
  bool class1_low = true;  // class 1 takes R_i <= r0 when true
};

// Closed-form rate threshold separating two classes; errors on equal slopes
// (the assignment is then constant in R).
ThresholdResult two_class_threshold(const ClassParams& c1, const ClassParams& c2,
                                    double t, const Distribution& pv,
                                    const BhattacharyyaMatrix& d);

struct TwoClassPlan {
  PartitionPlan plan;
  double exponent = 0.0;  // overall per-type dual exponent of the plan
  PerTypeTable table;
  double lambda0 = 1.0;
  double lambda1 = 1.0;  // supporting abscissae (equal when the hull touches)
  double lambda2 = 1.0;
  std::optional<double> threshold_r0;
  uint8_t flags = 0;
};

// Builds the two-class plan from the two hull supporting points at the
// maximizing lambda of the type-partitioned dual exponent.
TwoClassPlan build_two_class_plan(double t, const Distribution& pv, const Channel& w,
                                  int k, const GridSpec& grids = {});

struct FeasibilityReport {
  bool feasible = true;
  std::vector<double> margins;          // log|T^n(Q_c)| - log|A_c| per class
  std::vector<double> log_class_sizes;  // log|A_c|
  std::vector<double> log_type_sizes;   // log|T^n(Q_c)| at the quantized Q_c
};

// Exact log-count feasibility: every class must fit inside the type class of
// its (quantized) composition.
FeasibilityReport check_feasibility(const PartitionPlan& plan, int n,
                                    const SourceTypeTable& types);

}  // namespace jscc

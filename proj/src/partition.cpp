#include "jscc/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jscc/source_exp.hpp"

namespace jscc {

PartitionPlan assign_classes(const SourceTypeTable& types,
                             const std::vector<ClassParams>& classes, double t,
                             const Distribution& pv, const BhattacharyyaMatrix& d) {
  if (classes.empty()) throw std::invalid_argument("assign_classes: no classes");
  const int m = static_cast<int>(classes.size());
  // Per-class constants are memoized; the per-type score is then linear in
  // R_i.
  std::vector<double> base(static_cast<size_t>(m));
  std::vector<double> slope(static_cast<size_t>(m));
  for (int c = 0; c < m; ++c) {
    const ClassParams& cp = classes[static_cast<size_t>(c)];
    if (cp.rho < 1.0 || cp.lambda < 1.0)
      throw std::invalid_argument("assign_classes: class parameters below 1");
    base[static_cast<size_t>(c)] = ex_prime_dual(cp.q, cp.rho, d) -
                                   t * gallager_source_fn(cp.lambda, pv);
    slope[static_cast<size_t>(c)] = cp.lambda - cp.rho;
  }
  PartitionPlan plan;
  plan.classes = classes;
  plan.k = types.k;
  plan.n = static_cast<int>(std::lround(types.k / types.t));
  plan.assignment.resize(static_cast<size_t>(types.size()));
  for (int i = 0; i < types.size(); ++i) {
    const double r = types.types[static_cast<size_t>(i)].rate;
    int best = 0;
    double best_score = base[0] + slope[0] * r;
    for (int c = 1; c < m; ++c) {
      const double s = base[static_cast<size_t>(c)] + slope[static_cast<size_t>(c)] * r;
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    plan.assignment[static_cast<size_t>(i)] = best;
  }
  return plan;
}

ThresholdResult two_class_threshold(const ClassParams& c1, const ClassParams& c2,
                                    double t, const Distribution& pv,
                                    const BhattacharyyaMatrix& d) {
  const double den = (c2.lambda - c2.rho) - (c1.lambda - c1.rho);
  if (std::abs(den) < 1e-14)
    throw std::invalid_argument(
        "two_class_threshold: equal slopes, assignment is constant");
  const double num = ex_prime_dual(c1.q, c1.rho, d) - ex_prime_dual(c2.q, c2.rho, d) +
                     t * (gallager_source_fn(c2.lambda, pv) -
                          gallager_source_fn(c1.lambda, pv));
  ThresholdResult out;
  out.r0 = num / den;
  out.class1_low = den > 0.0;
  return out;
}

TwoClassPlan build_two_class_plan(double t, const Distribution& pv, const Channel& w,
                                  int k, const GridSpec& grids) {
  const BhattacharyyaMatrix d = bhattacharyya(w);
  const CsiszarDual cd = csiszar_dual_exponent(t, pv, d, grids);

  // Supporting points: the hull vertices bracketing the maximizing lambda.
  const std::vector<int> vertices = hull_vertex_indices(cd.curve);
  const double lambda0 = cd.lambda0;
  int v1 = vertices.front(), v2 = vertices.back();
  for (int idx : vertices) {
    if (cd.curve.grid[static_cast<size_t>(idx)] <= lambda0 + 1e-12) v1 = idx;
  }
  for (auto it = vertices.rbegin(); it != vertices.rend(); ++it) {
    if (cd.curve.grid[static_cast<size_t>(*it)] >= lambda0 - 1e-12) v2 = *it;
  }
  if (v1 > v2) std::swap(v1, v2);

  TwoClassPlan out;
  out.lambda0 = lambda0;
  out.lambda1 = cd.curve.grid[static_cast<size_t>(v1)];
  out.lambda2 = cd.curve.grid[static_cast<size_t>(v2)];
  out.flags = cd.result.flags;

  // Class c pins rho_c to its supporting abscissa and shares lambda0, so the
  // two assignment scores differ by a linear-in-R term that crosses exactly
  // at the chord slope.
  const Distribution q1 = cd.argmax_q[static_cast<size_t>(v1)];
  const Distribution q2 = cd.argmax_q[static_cast<size_t>(v2)];
  std::vector<ClassParams> classes;
  classes.emplace_back(q1, out.lambda1, lambda0);
  classes.emplace_back(q2, out.lambda2, lambda0);

  const SourceTypeTable types = enumerate_types(k, pv.size(), t);
  out.plan = assign_classes(types, classes, t, pv, d);
  if (std::abs((classes[1].lambda - classes[1].rho) -
               (classes[0].lambda - classes[0].rho)) >= 1e-14)
    out.threshold_r0 = two_class_threshold(classes[0], classes[1], t, pv, d).r0;

  out.table = per_type_exponent_table(t, pv, w, out.plan, types, grids);
  out.exponent = out.table.overall_dual;
  return out;
}

FeasibilityReport check_feasibility(const PartitionPlan& plan, int n,
                                    const SourceTypeTable& types) {
  if (static_cast<int>(plan.assignment.size()) != types.size())
    throw std::invalid_argument("check_feasibility: plan does not cover types");
  FeasibilityReport rep;
  const int m = plan.num_classes();
  rep.margins.resize(static_cast<size_t>(m));
  rep.log_class_sizes.resize(static_cast<size_t>(m));
  rep.log_type_sizes.resize(static_cast<size_t>(m));
  for (int c = 0; c < m; ++c) {
    std::vector<double> member_logs;
    for (int i = 0; i < types.size(); ++i)
      if (plan.assignment[static_cast<size_t>(i)] == c)
        member_logs.push_back(types.types[static_cast<size_t>(i)].log_count);
    const double log_ac = log_sum_exp(member_logs);
    const std::vector<int> counts = quantize_composition(plan.classes[static_cast<size_t>(c)].q, n);
    const double log_tn = log_multinomial(counts);
    rep.log_class_sizes[static_cast<size_t>(c)] = log_ac;
    rep.log_type_sizes[static_cast<size_t>(c)] = log_tn;
    rep.margins[static_cast<size_t>(c)] = log_tn - log_ac;
    if (rep.margins[static_cast<size_t>(c)] < -1e-9) rep.feasible = false;
  }
  return rep;
}

}  // namespace jscc

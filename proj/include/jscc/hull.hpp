#pragma once

#include <vector>

#include "jscc/channel_exp.hpp"
#include "jscc/plan.hpp"
#include "jscc/prob.hpp"
#include "jscc/source_exp.hpp"

// Concave-hull machinery over sampled exponent curves and the composite
// joint source-channel exponents built from them.

namespace jscc {

// Per-point attainment flags on sampled curves.
enum CurveFlag : uint8_t {
  kCurveOk = 0,
  kCurveLeftEdge = 1,
  kCurveRightEdge = 2,
  kCurveTruncated = 4,
};

struct ExponentCurve {
  std::vector<double> grid;     // strictly increasing
  std::vector<double> values;   // extended reals
  std::vector<uint8_t> flags;   // CurveFlag bits, optional (empty = all ok)

  int size() const { return static_cast<int>(grid.size()); }
  void validate() const;
};

// Pointwise smallest concave majorant on the sampled grid: monotone-chain
// upper hull of the finite points, interpolated back onto the grid.
ExponentCurve upper_concave_hull(const ExponentCurve& curve);

// Indices into curve.grid of the hull vertices (points where the hull
// touches the curve).
std::vector<int> hull_vertex_indices(const ExponentCurve& curve);

// g**(lambda) = inf_R sup_rho { g(rho) + (lambda - rho) R }, evaluated
// numerically with an R grid spanning the observed slope range.
double biconjugate_eval(const ExponentCurve& curve, double lambda,
                        int r_points = 801);

// Pointwise maximum of the members' inner dual functions on a rho grid.
ExponentCurve family_dual_curve(const std::vector<Distribution>& family,
                                const std::vector<double>& rho_grid,
                                const BhattacharyyaMatrix& d);

struct GridSpec {
  double rho_max = 1e4;
  double rho_cap = 1e8;
  int rho_points = 200;
  int r_points = 200;
  double q_resolution = 0.0;  // 0 = auto per alphabet size

  std::vector<double> rho_grid() const { return log_space(1.0, rho_max, rho_points); }
};

struct JointResult {
  double value = 0.0;
  double arg = 0.0;        // minimizing R or maximizing lambda
  uint8_t flags = kCurveOk;
  double resolution = 0.0; // width of the final refinement bracket
};

// min_R [ t e(R/t, P_V) + max_{Q in family} E'_ex(Q, R) ].
JointResult joint_exponent_primal(double t, const Distribution& pv, const Channel& w,
                                  const std::vector<Distribution>& family,
                                  const GridSpec& grids = {});

// min_R [ t e(R/t, P_V) + max_Q E'_ex(Q, R) ], max over the simplex grid.
JointResult joint_exponent_EJ2(double t, const Distribution& pv, const Channel& w,
                               const GridSpec& grids = {});

// max_Q min_R [ t e(R/t, P_V) + E_ex(Q, R) ] with the CKM exponent inside.
JointResult joint_exponent_EJ1(double t, const Distribution& pv, const Channel& w,
                               const GridSpec& grids = {});

// sup_{lambda >= 1} { hull of the family curve at lambda - t E_s(lambda) }.
JointResult dual_family_exponent(double t, const Distribution& pv,
                                 const BhattacharyyaMatrix& d,
                                 const std::vector<Distribution>& family,
                                 const GridSpec& grids = {});

struct CsiszarDual {
  JointResult result;
  ExponentCurve curve;                  // max_Q E'_x(Q, rho) on the rho grid
  ExponentCurve hull;                   // its concave hull
  std::vector<Distribution> argmax_q;   // per grid point
  double lambda0 = 1.0;                 // maximizing lambda
};

// Type-partitioned dual exponent: sup_lambda { hull(max_Q E'_x)(lambda)
// - t E_s(lambda) }, with the per-grid-point maximizers retained for the
// two-class construction.
CsiszarDual csiszar_dual_exponent(double t, const Distribution& pv,
                                  const BhattacharyyaMatrix& d,
                                  const GridSpec& grids = {});

// Single-composition exponent: sup_{rho >= 1} { max_Q E_x(Q, rho)
// - t E_s(rho) }; no hull.
JointResult single_class_dual_exponent(double t, const Distribution& pv,
                                       const BhattacharyyaMatrix& d,
                                       const GridSpec& grids = {});

struct TypeRow {
  int type_index = 0;
  double rate = 0.0;       // R_i = t H(P_i)
  int class_index = 0;
  double primal = 0.0;     // t e(R_i/t) + E'_ex(Q_c, R_i)
  double dual = 0.0;       // per-type optimized dual row
  uint8_t flags = kCurveOk;
};

struct PerTypeTable {
  std::vector<TypeRow> rows;
  double overall_primal = kInf;  // min over rows
  double overall_dual = kInf;
};

// Per-type exponents under a fixed plan, both routes, plus the overall
// (minimum) exponent.
PerTypeTable per_type_exponent_table(double t, const Distribution& pv,
                                     const Channel& w, const PartitionPlan& plan,
                                     const SourceTypeTable& types,
                                     const GridSpec& grids = {});

// Finite-n union bound from the dual rows, with the polynomial prefactor
// (k+1)^{|V|} N_k; clamped to 1.
double finite_n_union_bound(const PerTypeTable& table, const SourceTypeTable& types,
                            int n, int alphabet_size);

}  // namespace jscc

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "jscc/prob.hpp"

// Bhattacharyya geometry and the four channel expurgated exponent functions:
// the weak exponent in primal (coupling minimization) and dual (parameter
// supremum) form, the CKM exponent (both marginals pinned), and the
// single-composition dual exponent with its tilt function.

namespace jscc {

struct BhattacharyyaMatrix {
  std::vector<std::vector<double>> d;  // symmetric, zero diagonal, entries in [0, +inf]

  int size() const { return static_cast<int>(d.size()); }
  double operator()(int x, int xb) const {
    return d[static_cast<size_t>(x)][static_cast<size_t>(xb)];
  }
};

// d_B(x, xb) = -log sum_y sqrt(W(y|x) W(y|xb)); +inf for disjoint rows.
BhattacharyyaMatrix bhattacharyya(const Channel& w);

// min_xb sum_x Q(x) d(x, xb): the value of the best product coupling, which
// is both the R = 0 weak primal exponent and the rho -> inf limit of the
// inner dual function.
double product_coupling_min(const Distribution& q, const BhattacharyyaMatrix& d);

// --- inner dual function over Q' -------------------------------------------

struct ExPrimeOptions {
  double gap_tol = 1e-10;
  int max_iters = 100000;
  // Defensive dense scan (resolution 0.02) for |X| <= 4 after the solver.
  bool grid_check = true;
  // Warm start for the inner minimizer.
  const std::vector<double>* warm_start = nullptr;
};

struct InnerMinResult {
  double value = 0.0;
  std::vector<double> qprime;  // minimizer
  double gap = 0.0;            // final Frank-Wolfe duality gap
  int iters = 0;
};

// E'_x(Q, rho) = min_{Q'} -rho sum_x Q(x) log sum_xb Q'(xb) e^{-d(x,xb)/rho},
// rho >= 1. Convex in Q'; solved by Frank-Wolfe with exact line search plus a
// pairwise-transfer polish.
double ex_prime_dual(const Distribution& q, double rho,
                     const BhattacharyyaMatrix& d, const ExPrimeOptions& opts = {});
InnerMinResult ex_prime_dual_full(const Distribution& q, double rho,
                                  const BhattacharyyaMatrix& d,
                                  const ExPrimeOptions& opts = {});

// --- maximization over the input composition --------------------------------

struct SimplexGrid {
  // 0 resolves to 0.01 for dim <= 3, 0.05 for dim 4; dim > 4 requires an
  // explicit value.
  double resolution = 0.0;
};

struct QMax {
  double value = 0.0;
  Distribution argmax{std::vector<double>{1.0}};
};

// Deterministic simplex walk: exhaustive grid (ties to the lowest grid index,
// then toward uniform), followed by pairwise-transfer polish.
QMax max_over_simplex(const std::function<double(const Distribution&)>& f,
                      int dim, const SimplexGrid& grid);

QMax ex_prime_dual_max(double rho, const BhattacharyyaMatrix& d,
                       const SimplexGrid& grid = {});

struct MaxCurve {
  std::vector<double> rho;
  std::vector<double> value;          // max_Q E'_x(Q, rho) per grid point
  std::vector<Distribution> argmax;   // winning composition per grid point
  double limit = 0.0;                 // rho -> inf limit of the max
};

// max_Q E'_x(Q, rho) over a whole rho grid. Sweeps rho innermost per grid
// composition so the inner minimizer warm-starts along the curve, then
// polishes each per-rho winner over the continuous simplex.
MaxCurve max_inner_dual_curve(const BhattacharyyaMatrix& d,
                              const std::vector<double>& rho_grid,
                              const SimplexGrid& grid = {});

// --- rho supremum (dual weak exponent) --------------------------------------

enum class SupAttain : uint8_t { kInterior = 0, kAtRhoOne = 1, kTruncated = 2 };

struct RhoSup {
  double value = 0.0;
  double rho = 1.0;
  SupAttain flag = SupAttain::kInterior;
  // Analytic rho -> inf limit of E'_x(Q, rho), reported when the supremum
  // sits at the grid boundary.
  std::optional<double> limit_value;
};

struct RhoGridOptions {
  double rho_max = 1e4;
  double rho_cap = 1e8;
  int points = 200;
};

// E'_ex(Q, R) = sup_{rho >= 1} E'_x(Q, rho) - rho R. At R = 0 the supremum is
// the rho -> inf limit; it is returned with a truncation flag.
RhoSup eex_prime_from_dual(const Distribution& q, double R,
                           const BhattacharyyaMatrix& d,
                           const RhoGridOptions& opts = {});

// --- primal couplings --------------------------------------------------------

struct PrimalOptions {
  double gap_tol = 1e-9;
  int max_iters = 50000;
  double mi_tol = 1e-10;  // bisection target |I - R|
};

// Weak exponent, primal form: min over couplings with row marginal Q and
// I(X;Xb) <= R of E[d_B] + I - R. Conditional gradient over the coupling
// polytope with a bisected multiplier for the mutual-information cap.
double eex_prime_primal(const Distribution& q, double R,
                        const BhattacharyyaMatrix& d, const PrimalOptions& opts = {});

// CKM exponent: both marginals pinned to Q. With both marginals fixed the
// mutual information is D(P || QxQ), so the inner problem is an
// entropy-regularized transport solved exactly by Sinkhorn scaling.
double eex_ckm_primal(const Distribution& q, double R,
                      const BhattacharyyaMatrix& d, const PrimalOptions& opts = {});

// --- single-composition dual function ----------------------------------------

struct TiltResult {
  double value = 0.0;
  std::vector<double> tilt;  // a(.), gauge-fixed to sum_x Q(x) a(x) = 0
};

// E_x(Q, rho) = sup_a -rho sum_x Q(x) log sum_xb Q(xb)
//                      (e^{-d(x,xb)} e^{a(xb)-a(x)})^{1/rho}, rho >= 1.
// Concave in a; gradient ascent with backtracking from a = 0.
double ex_single_dual(const Distribution& q, double rho,
                      const BhattacharyyaMatrix& d);
TiltResult ex_single_dual_full(const Distribution& q, double rho,
                               const BhattacharyyaMatrix& d);

QMax ex_single_dual_max(double rho, const BhattacharyyaMatrix& d,
                        const SimplexGrid& grid = {});

}  // namespace jscc

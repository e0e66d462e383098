#include "jscc/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "jscc/source_exp.hpp"

namespace jscc::oracle {

namespace {

// Local helpers only: the oracle keeps its arithmetic separate from the
// solver modules on purpose.

double joint_value(const std::vector<std::vector<double>>& p,
                   const std::vector<double>& row_marg,
                   const BhattacharyyaMatrix& d, double R, double slack,
                   bool& feasible) {
  const size_t n = p.size();
  std::vector<double> col(n, 0.0);
  for (size_t x = 0; x < n; ++x)
    for (size_t y = 0; y < n; ++y) col[y] += p[x][y];
  double mi = 0.0, ed = 0.0;
  for (size_t x = 0; x < n; ++x) {
    for (size_t y = 0; y < n; ++y) {
      const double v = p[x][y];
      if (v == 0.0) continue;
      if (d(static_cast<int>(x), static_cast<int>(y)) == kInf) {
        feasible = false;  // couplings touching infinite distances lose
        return kInf;
      }
      ed += v * d(static_cast<int>(x), static_cast<int>(y));
      mi += v * std::log(v / (row_marg[x] * col[y]));
    }
  }
  mi = std::max(mi, 0.0);
  feasible = mi <= R + slack;
  return ed + mi - R;
}

// All length-m composition rows with entries multiples of `step` summing to
// total (total is a multiple of step up to rounding).
void enumerate_rows(int slots, int steps_left, int steps_total,
                    std::vector<double>& cur, std::vector<std::vector<double>>& out) {
  if (slots == 1) {
    cur.push_back(static_cast<double>(steps_left) / steps_total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int c = steps_left; c >= 0; --c) {
    cur.push_back(static_cast<double>(c) / steps_total);
    enumerate_rows(slots - 1, steps_left - c, steps_total, cur, out);
    cur.pop_back();
  }
}

// Allowance on the I <= R filter for grid-quantized couplings. Where the
// constraint set has interior, a strictly feasible neighbor exists within one
// grid step and no slack is needed; where it pinches to a point (R = 0, the
// product coupling), I is locally quadratic with curvature bounded by
// 4/min(Q)^2, so the nearest grid point overshoots by O(res^2). A linear
// slack would let the scan drift sqrt(slack) along the objective instead.
double quantization_slack(const std::vector<double>& marginal, double resolution) {
  double qmin = 1.0;
  for (double v : marginal)
    if (v > 0.0) qmin = std::min(qmin, v);
  return 1e-9 + resolution * resolution * 4.0 / (qmin * qmin);
}

}  // namespace

double brute_force_weak_exponent(const Distribution& q, double R,
                                 const BhattacharyyaMatrix& d, double resolution) {
  const int n = d.size();
  if (n > 3)
    throw std::invalid_argument("brute_force_weak_exponent: |X| > 3");
  if (resolution < 0.01 - 1e-12)
    throw std::invalid_argument("brute_force_weak_exponent: resolution < 0.01");
  const int steps = std::max(1, static_cast<int>(std::lround(1.0 / resolution)));
  std::vector<std::vector<double>> rows;
  {
    std::vector<double> cur;
    enumerate_rows(n, steps, steps, cur, rows);
  }
  std::vector<int> supp;
  for (int x = 0; x < n; ++x)
    if (q[x] > 0.0) supp.push_back(x);
  const double slack = quantization_slack(q.probs(), resolution);

  double best = kInf;
  std::vector<std::vector<double>> p(static_cast<size_t>(n),
                                     std::vector<double>(static_cast<size_t>(n), 0.0));
  std::vector<size_t> pick(supp.size(), 0);
  for (;;) {
    for (size_t si = 0; si < supp.size(); ++si) {
      const int x = supp[si];
      for (int y = 0; y < n; ++y)
        p[static_cast<size_t>(x)][static_cast<size_t>(y)] = q[x] * rows[pick[si]][static_cast<size_t>(y)];
    }
    bool feasible = false;
    const double v = joint_value(p, q.probs(), d, R, slack, feasible);
    if (feasible && v < best) best = v;
    // advance the odometer
    size_t si = 0;
    for (; si < pick.size(); ++si) {
      if (++pick[si] < rows.size()) break;
      pick[si] = 0;
    }
    if (si == pick.size()) break;
  }
  return best;
}

double brute_force_ckm_exponent(const Distribution& q, double R,
                                const BhattacharyyaMatrix& d, double resolution) {
  const int n = d.size();
  const double slack = quantization_slack(q.probs(), resolution);
  double best = kInf;
  if (n == 2) {
    // One free parameter: alpha = P(0,0) in [max(0, 2q0-1), q0].
    const double q0 = q[0];
    const double lo = std::max(0.0, 2.0 * q0 - 1.0), hi = q0;
    const int steps = static_cast<int>(std::ceil((hi - lo) / resolution));
    for (int i = 0; i <= steps; ++i) {
      const double a = std::min(hi, lo + i * resolution);
      std::vector<std::vector<double>> p = {{a, q0 - a}, {q0 - a, 1.0 - 2.0 * q0 + a}};
      for (auto& row : p)
        for (double& v : row) v = std::max(v, 0.0);
      bool feasible = false;
      const double val = joint_value(p, q.probs(), d, R, slack, feasible);
      if (feasible && val < best) best = val;
    }
    return best;
  }
  if (n == 3) {
    // Four free entries; the rest follow from the pinned marginals.
    const int steps = std::max(1, static_cast<int>(std::lround(1.0 / resolution)));
    const auto val_of = [&](int i) { return static_cast<double>(i) / steps; };
    for (int a00 = 0; a00 <= steps; ++a00)
      for (int a01 = 0; a00 + a01 <= steps; ++a01)
        for (int a10 = 0; a10 <= steps; ++a10)
          for (int a11 = 0; a10 + a11 <= steps; ++a11) {
            std::vector<std::vector<double>> p(3, std::vector<double>(3, 0.0));
            p[0][0] = val_of(a00);
            p[0][1] = val_of(a01);
            p[1][0] = val_of(a10);
            p[1][1] = val_of(a11);
            p[0][2] = q[0] - p[0][0] - p[0][1];
            p[1][2] = q[1] - p[1][0] - p[1][1];
            p[2][0] = q[0] - p[0][0] - p[1][0];
            p[2][1] = q[1] - p[0][1] - p[1][1];
            p[2][2] = q[2] - p[2][0] - p[2][1];
            bool ok = true;
            for (const auto& row : p)
              for (double v : row)
                if (v < -1e-12) ok = false;
            if (!ok) continue;
            for (auto& row : p)
              for (double& v : row) v = std::max(v, 0.0);
            bool feasible = false;
            const double val = joint_value(p, q.probs(), d, R, slack, feasible);
            if (feasible && val < best) best = val;
          }
    return best;
  }
  throw std::invalid_argument("brute_force_ckm_exponent: |X| > 3");
}

DualityReport duality_report(double t, const Distribution& pv, const Channel& w,
                             const GridSpec& grids) {
  DualityReport rep;
  const BhattacharyyaMatrix d = bhattacharyya(w);

  // Source reliability: both routes on a 50-point grid.
  {
    int supp = 0;
    for (int i = 0; i < pv.size(); ++i)
      if (pv[i] > 0.0) ++supp;
    const auto rgrid = lin_space(0.0, std::log(static_cast<double>(supp)), 50);
    for (double r : rgrid) {
      DualityRow row;
      row.section = "source";
      row.param = r;
      row.primal = source_reliability_primal(r, pv);
      row.dual = source_reliability_dual(r, pv);
      row.gap = std::isfinite(row.primal) && std::isfinite(row.dual)
                    ? std::abs(row.primal - row.dual)
                    : (row.primal == row.dual ? 0.0 : kInf);
      row.pass = row.gap <= 1e-6;
      rep.max_source_gap = std::max(rep.max_source_gap, row.gap);
      rep.pass = rep.pass && row.pass;
      rep.rows.push_back(row);
    }
  }

  // Weak channel exponent at uniform Q on a 20-point grid.
  {
    const Distribution qu = Distribution::uniform(d.size());
    const auto rgrid =
        lin_space(0.0, std::log(static_cast<double>(d.size())), 20);
    RhoGridOptions ro;
    ro.rho_max = grids.rho_max;
    ro.points = grids.rho_points;
    for (double r : rgrid) {
      DualityRow row;
      row.section = "channel";
      row.param = r;
      row.primal = eex_prime_primal(qu, r, d);
      const RhoSup ds = eex_prime_from_dual(qu, r, d, ro);
      row.dual = ds.value;
      row.boundary = ds.flag == SupAttain::kTruncated;
      row.gap = std::isfinite(row.primal) && std::isfinite(row.dual)
                    ? std::abs(row.primal - row.dual)
                    : (row.primal == row.dual ? 0.0 : kInf);
      row.pass = row.boundary || row.gap <= 1e-3;
      if (!row.boundary)
        rep.max_channel_gap = std::max(rep.max_channel_gap, row.gap);
      rep.pass = rep.pass && row.pass;
      rep.rows.push_back(row);
    }
  }

  // Composite joint exponent: grid-min route vs hull route.
  {
    DualityRow row;
    row.section = "joint";
    const JointResult ej2 = joint_exponent_EJ2(t, pv, w, grids);
    const CsiszarDual cd = csiszar_dual_exponent(t, pv, d, grids);
    row.primal = ej2.value;
    row.dual = cd.result.value;
    row.boundary = (ej2.flags | cd.result.flags) & kCurveTruncated;
    row.gap = std::abs(row.primal - row.dual);
    row.pass = row.boundary || row.gap <= 1e-3;
    if (!row.boundary) rep.max_joint_gap = row.gap;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace jscc::oracle

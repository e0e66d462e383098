#include "jscc/hull.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jscc {

void ExponentCurve::validate() const {
  if (grid.size() != values.size())
    throw std::invalid_argument("ExponentCurve: grid/value length mismatch");
  if (!flags.empty() && flags.size() != grid.size())
    throw std::invalid_argument("ExponentCurve: flag length mismatch");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("ExponentCurve: grid not strictly increasing");
}

namespace {

struct Pt {
  double x, y;
  int idx;
};

// Monotone-chain upper hull over the finite points, left to right.
std::vector<Pt> upper_chain(const ExponentCurve& c) {
  std::vector<Pt> pts;
  for (int i = 0; i < c.size(); ++i) {
    const double v = c.values[static_cast<size_t>(i)];
    if (v == kInf)
      throw std::invalid_argument("upper_concave_hull: +inf value");
    if (v == -kInf || std::isnan(v)) continue;
    pts.push_back({c.grid[static_cast<size_t>(i)], v, i});
  }
  if (pts.size() < 2)
    throw std::invalid_argument("upper_concave_hull: fewer than 2 finite points");
  std::vector<Pt> st;
  for (const Pt& p : pts) {
    while (st.size() >= 2) {
      const Pt& o = st[st.size() - 2];
      const Pt& a = st[st.size() - 1];
      // pop a when it lies on or below the chord o -> p
      const double cross = (a.x - o.x) * (p.y - o.y) - (a.y - o.y) * (p.x - o.x);
      if (cross >= 0.0)
        st.pop_back();
      else
        break;
    }
    st.push_back(p);
  }
  return st;
}

}  // namespace

ExponentCurve upper_concave_hull(const ExponentCurve& curve) {
  curve.validate();
  const std::vector<Pt> chain = upper_chain(curve);
  ExponentCurve out;
  out.grid = curve.grid;
  out.values = curve.values;
  out.flags = curve.flags;
  size_t seg = 0;
  for (int i = 0; i < curve.size(); ++i) {
    const double x = curve.grid[static_cast<size_t>(i)];
    if (x < chain.front().x || x > chain.back().x) continue;  // keep original
    while (seg + 2 < chain.size() && chain[seg + 1].x <= x) ++seg;
    const Pt& a = chain[seg];
    const Pt& b = chain[std::min(seg + 1, chain.size() - 1)];
    double v;
    if (b.x == a.x)
      v = std::max(a.y, b.y);
    else
      v = a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
    out.values[static_cast<size_t>(i)] =
        std::max(v, curve.values[static_cast<size_t>(i)]);
  }
  return out;
}

std::vector<int> hull_vertex_indices(const ExponentCurve& curve) {
  curve.validate();
  const std::vector<Pt> chain = upper_chain(curve);
  std::vector<int> idx;
  idx.reserve(chain.size());
  for (const Pt& p : chain) idx.push_back(p.idx);
  return idx;
}

double biconjugate_eval(const ExponentCurve& curve, double lambda, int r_points) {
  curve.validate();
  if (lambda < curve.grid.front() - 1e-12 || lambda > curve.grid.back() + 1e-12)
    throw std::domain_error("biconjugate_eval: lambda outside grid span");
  // Slope range observed between adjacent finite points.
  double smin = kInf, smax = -kInf;
  double px = 0.0, py = 0.0;
  bool have_prev = false;
  for (int i = 0; i < curve.size(); ++i) {
    const double v = curve.values[static_cast<size_t>(i)];
    if (!std::isfinite(v)) continue;
    const double x = curve.grid[static_cast<size_t>(i)];
    if (have_prev) {
      const double s = (v - py) / (x - px);
      smin = std::min(smin, s);
      smax = std::max(smax, s);
    }
    px = x;
    py = v;
    have_prev = true;
  }
  if (!(smax >= smin))
    throw std::invalid_argument("biconjugate_eval: fewer than 2 finite points");
  const double margin = 0.05 * (std::abs(smin) + std::abs(smax) + 1.0);
  const auto rgrid = lin_space(smin - margin, smax + margin, r_points);
  double best = kInf;
  for (double r : rgrid) {
    double inner = -kInf;
    for (int i = 0; i < curve.size(); ++i) {
      const double v = curve.values[static_cast<size_t>(i)];
      if (!std::isfinite(v)) continue;
      inner = std::max(inner, v + (lambda - curve.grid[static_cast<size_t>(i)]) * r);
    }
    best = std::min(best, inner);
  }
  return best;
}

ExponentCurve family_dual_curve(const std::vector<Distribution>& family,
                                const std::vector<double>& rho_grid,
                                const BhattacharyyaMatrix& d) {
  if (family.empty())
    throw std::invalid_argument("family_dual_curve: empty family");
  ExponentCurve c;
  c.grid = rho_grid;
  c.values.assign(rho_grid.size(), -kInf);
  for (const Distribution& q : family) {
    std::vector<double> warm(static_cast<size_t>(d.size()), 1.0 / d.size());
    for (size_t i = 0; i < rho_grid.size(); ++i) {
      ExPrimeOptions o;
      o.grid_check = false;
      o.warm_start = &warm;
      InnerMinResult r = ex_prime_dual_full(q, rho_grid[i], d, o);
      warm = r.qprime;
      c.values[i] = std::max(c.values[i], r.value);
    }
  }
  c.flags.assign(rho_grid.size(), kCurveOk);
  return c;
}

// ---------------------------------------------------------------------------
// Shared pieces for the composite exponents.
// ---------------------------------------------------------------------------

namespace {

// A sampled inner dual function with its analytic rho -> inf limit.
struct SampledInner {
  std::vector<double> rho;
  std::vector<double> val;
  double limit = kInf;
};

struct ConjValue {
  double value = 0.0;
  uint8_t flags = kCurveOk;
};

// sup_rho [ val(rho) - rho R ] on the piecewise-linear interpolant of the
// samples; R = 0 uses the analytic limit.
ConjValue conjugate_at(const SampledInner& s, double R) {
  ConjValue out;
  if (R <= 1e-14) {
    out.value = s.limit;
    out.flags = kCurveTruncated;
    return out;
  }
  size_t best = 0;
  double bv = -kInf;
  for (size_t i = 0; i < s.rho.size(); ++i) {
    const double v = s.val[i] - s.rho[i] * R;
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  // Piecewise-linear refinement between the bracketing samples: a linear
  // function minus rho R stays linear, so the sampled sup is exact for the
  // interpolant; the bracket endpoints already dominate. Nothing to refine.
  out.value = bv;
  if (best == 0)
    out.flags = kCurveLeftEdge;
  else if (best + 1 == s.rho.size())
    out.flags = kCurveTruncated;
  return out;
}

SampledInner sample_inner_dual(const Distribution& q, const BhattacharyyaMatrix& d,
                               const std::vector<double>& rho_grid) {
  SampledInner s;
  s.rho = rho_grid;
  s.val.resize(rho_grid.size());
  std::vector<double> warm(static_cast<size_t>(d.size()), 1.0 / d.size());
  for (size_t i = 0; i < rho_grid.size(); ++i) {
    ExPrimeOptions o;
    o.grid_check = false;
    o.warm_start = &warm;
    InnerMinResult r = ex_prime_dual_full(q, rho_grid[i], d, o);
    warm = r.qprime;
    s.val[i] = r.value;
  }
  s.limit = product_coupling_min(q, d);
  return s;
}

// Minimize a 1-D function on [lo, hi]: grid scan plus golden refinement
// between the bracketing neighbors.
JointResult minimize_on_interval(const std::function<double(double)>& f, double lo,
                                 double hi, int points) {
  const auto grid = lin_space(lo, hi, points);
  std::vector<double> vals(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) vals[i] = f(grid[i]);
  size_t best = 0;
  for (size_t i = 1; i < grid.size(); ++i)
    if (vals[i] < vals[best]) best = i;
  const double a = grid[best > 0 ? best - 1 : 0];
  const double b = grid[best + 1 < grid.size() ? best + 1 : grid.size() - 1];
  JointResult out;
  out.value = vals[best];
  out.arg = grid[best];
  out.resolution = b - a;
  if (b > a) {
    const Bracket1D r = golden_max([&](double x) { return -f(x); }, a, b);
    if (-r.value < out.value) {
      out.value = -r.value;
      out.arg = r.arg;
    }
  }
  if (best == 0)
    out.flags |= kCurveLeftEdge;
  else if (best + 1 == grid.size())
    out.flags |= kCurveRightEdge;
  return out;
}

// Maximize hull(lambda) - t Es(lambda) where hull is piecewise linear on its
// sampled grid; the objective is concave, so golden refinement is valid.
JointResult sup_hull_minus_source(const ExponentCurve& hull, double t,
                                  const Distribution& pv) {
  const auto interp = [&](double x) {
    const auto& g = hull.grid;
    const size_t n = g.size();
    if (x <= g.front()) return hull.values.front();
    if (x >= g.back()) return hull.values.back();
    size_t j = static_cast<size_t>(
        std::upper_bound(g.begin(), g.end(), x) - g.begin());
    const double x0 = g[j - 1], x1 = g[j];
    const double v0 = hull.values[j - 1], v1 = hull.values[j];
    return v0 + (v1 - v0) * (x - x0) / (x1 - x0);
  };
  const auto f = [&](double lam) {
    return interp(lam) - t * gallager_source_fn(lam, pv);
  };
  std::vector<double> vals(hull.grid.size());
  for (size_t i = 0; i < hull.grid.size(); ++i)
    vals[i] = hull.values[i] - t * gallager_source_fn(hull.grid[i], pv);
  size_t best = 0;
  for (size_t i = 1; i < vals.size(); ++i)
    if (vals[i] > vals[best]) best = i;
  const double a = hull.grid[best > 0 ? best - 1 : 0];
  const double b = hull.grid[best + 1 < vals.size() ? best + 1 : vals.size() - 1];
  JointResult out;
  out.value = vals[best];
  out.arg = hull.grid[best];
  out.resolution = b - a;
  if (b > a) {
    const Bracket1D r = golden_max(f, a, b);
    if (r.value > out.value) {
      out.value = r.value;
      out.arg = r.arg;
    }
  }
  if (best == 0)
    out.flags |= kCurveLeftEdge;
  else if (best + 1 == vals.size())
    out.flags |= kCurveRightEdge | kCurveTruncated;
  return out;
}

double source_rate_domain(const Distribution& pv, double t) {
  int supp = 0;
  for (int i = 0; i < pv.size(); ++i)
    if (pv[i] > 0.0) ++supp;
  return t * std::log(static_cast<double>(supp));
}

}  // namespace

JointResult joint_exponent_primal(double t, const Distribution& pv, const Channel& w,
                                  const std::vector<Distribution>& family,
                                  const GridSpec& grids) {
  if (family.empty())
    throw std::invalid_argument("joint_exponent_primal: empty family");
  const BhattacharyyaMatrix d = bhattacharyya(w);
  const auto rho_grid = grids.rho_grid();
  std::vector<SampledInner> members;
  members.reserve(family.size());
  for (const Distribution& q : family)
    members.push_back(sample_inner_dual(q, d, rho_grid));

  const double rmax = source_rate_domain(pv, t);
  uint8_t inner_flags = kCurveOk;
  const auto f = [&](double R) {
    double channel_part = -kInf;
    for (const SampledInner& s : members) {
      const ConjValue cv = conjugate_at(s, R);
      if (cv.value > channel_part) channel_part = cv.value;
    }
    const double src = t * source_reliability_primal(R / t, pv);
    return src + channel_part;
  };
  JointResult out = minimize_on_interval(f, 0.0, rmax, grids.r_points);
  // Attainment flags of the inner sup at the minimizing R.
  for (const SampledInner& s : members)
    inner_flags |= conjugate_at(s, out.arg).flags & kCurveTruncated;
  out.flags |= inner_flags;
  return out;
}

JointResult joint_exponent_EJ2(double t, const Distribution& pv, const Channel& w,
                               const GridSpec& grids) {
  const BhattacharyyaMatrix d = bhattacharyya(w);
  SimplexGrid qg{grids.q_resolution};
  const MaxCurve mc = max_inner_dual_curve(d, grids.rho_grid(), qg);
  SampledInner s;
  s.rho = mc.rho;
  s.val = mc.value;
  s.limit = mc.limit;

  const double rmax = source_rate_domain(pv, t);
  const auto f = [&](double R) {
    return t * source_reliability_primal(R / t, pv) + conjugate_at(s, R).value;
  };
  JointResult out = minimize_on_interval(f, 0.0, rmax, grids.r_points);
  out.flags |= conjugate_at(s, out.arg).flags & kCurveTruncated;
  return out;
}

JointResult joint_exponent_EJ1(double t, const Distribution& pv, const Channel& w,
                               const GridSpec& grids) {
  const BhattacharyyaMatrix d = bhattacharyya(w);
  const double rmax = source_rate_domain(pv, t);
  JointResult best_inner;
  const auto outer = [&](const Distribution& q) {
    const auto f = [&](double R) {
      return t * source_reliability_primal(R / t, pv) + eex_ckm_primal(q, R, d);
    };
    return minimize_on_interval(f, 0.0, rmax, grids.r_points).value;
  };
  SimplexGrid qg{grids.q_resolution};
  const QMax m = max_over_simplex(outer, d.size(), qg);
  const auto f = [&](double R) {
    return t * source_reliability_primal(R / t, pv) + eex_ckm_primal(m.argmax, R, d);
  };
  JointResult out = minimize_on_interval(f, 0.0, rmax, grids.r_points);
  out.value = m.value;
  return out;
}

JointResult dual_family_exponent(double t, const Distribution& pv,
                                 const BhattacharyyaMatrix& d,
                                 const std::vector<Distribution>& family,
                                 const GridSpec& grids) {
  const ExponentCurve curve = family_dual_curve(family, grids.rho_grid(), d);
  const ExponentCurve hull = upper_concave_hull(curve);
  return sup_hull_minus_source(hull, t, pv);
}

CsiszarDual csiszar_dual_exponent(double t, const Distribution& pv,
                                  const BhattacharyyaMatrix& d,
                                  const GridSpec& grids) {
  CsiszarDual out;
  SimplexGrid qg{grids.q_resolution};
  const MaxCurve mc = max_inner_dual_curve(d, grids.rho_grid(), qg);
  out.curve.grid = mc.rho;
  out.curve.values = mc.value;
  out.curve.flags.assign(mc.rho.size(), kCurveOk);
  out.argmax_q = mc.argmax;
  out.hull = upper_concave_hull(out.curve);
  out.result = sup_hull_minus_source(out.hull, t, pv);
  out.lambda0 = out.result.arg;
  return out;
}

JointResult single_class_dual_exponent(double t, const Distribution& pv,
                                       const BhattacharyyaMatrix& d,
                                       const GridSpec& grids) {
  const auto rho_grid = grids.rho_grid();
  SimplexGrid qg{grids.q_resolution};
  std::vector<double> vals(rho_grid.size());
  for (size_t i = 0; i < rho_grid.size(); ++i)
    vals[i] = ex_single_dual_max(rho_grid[i], d, qg).value -
              t * gallager_source_fn(rho_grid[i], pv);
  size_t best = 0;
  for (size_t i = 1; i < vals.size(); ++i)
    if (vals[i] > vals[best]) best = i;
  JointResult out;
  out.value = vals[best];
  out.arg = rho_grid[best];
  const double a = rho_grid[best > 0 ? best - 1 : 0];
  const double b = rho_grid[best + 1 < vals.size() ? best + 1 : vals.size() - 1];
  out.resolution = b - a;
  if (b > a) {
    // No concavity guarantee for the max-over-Q curve: refine on the true
    // function only inside the winning bracket.
    const Bracket1D r = golden_max(
        [&](double rho) {
          return ex_single_dual_max(rho, d, qg).value -
                 t * gallager_source_fn(rho, pv);
        },
        a, b, 1e-9, 60);
    if (r.value > out.value) {
      out.value = r.value;
      out.arg = r.arg;
    }
  }
  if (best == 0)
    out.flags |= kCurveLeftEdge;
  else if (best + 1 == vals.size())
    out.flags |= kCurveRightEdge | kCurveTruncated;
  return out;
}

PerTypeTable per_type_exponent_table(double t, const Distribution& pv,
                                     const Channel& w, const PartitionPlan& plan,
                                     const SourceTypeTable& types,
                                     const GridSpec& grids) {
  if (static_cast<int>(plan.assignment.size()) != types.size())
    throw std::invalid_argument("per_type_exponent_table: plan does not cover types");
  const BhattacharyyaMatrix d = bhattacharyya(w);
  RhoGridOptions ro;
  ro.rho_max = grids.rho_max;
  ro.rho_cap = grids.rho_cap;
  ro.points = grids.rho_points;

  PerTypeTable out;
  out.rows.reserve(static_cast<size_t>(types.size()));
  for (int i = 0; i < types.size(); ++i) {
    const TypeEntry& e = types.types[static_cast<size_t>(i)];
    const int c = plan.assignment[static_cast<size_t>(i)];
    const Distribution& qc = plan.classes[static_cast<size_t>(c)].q;
    TypeRow row;
    row.type_index = i;
    row.rate = e.rate;
    row.class_index = c;
    row.primal = t * source_reliability_primal(e.rate / t, pv) +
                 eex_prime_primal(qc, e.rate, d);
    const RhoSup ch = eex_prime_from_dual(qc, e.rate, d, ro);
    const double src = tilted_rate_sup(e.rate, t, pv, 1.0);
    row.dual = ch.value + src;
    if (ch.flag == SupAttain::kTruncated) row.flags |= kCurveTruncated;
    out.rows.push_back(row);
    out.overall_primal = std::min(out.overall_primal, row.primal);
    out.overall_dual = std::min(out.overall_dual, row.dual);
  }
  return out;
}

double finite_n_union_bound(const PerTypeTable& table, const SourceTypeTable& types,
                            int n, int alphabet_size) {
  std::vector<double> terms;
  terms.reserve(table.rows.size());
  for (const TypeRow& r : table.rows) terms.push_back(-n * r.dual);
  const double log_sum = log_sum_exp(terms);
  const double log_poly = alphabet_size * std::log(types.k + 1.0) +
                          std::log(static_cast<double>(types.size()));
  return std::min(1.0, std::exp(log_poly + log_sum));
}

}  // namespace jscc

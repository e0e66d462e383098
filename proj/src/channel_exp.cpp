#include "jscc/channel_exp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jscc {

BhattacharyyaMatrix bhattacharyya(const Channel& w) {
  const int nx = w.input_size();
  BhattacharyyaMatrix m;
  m.d.assign(static_cast<size_t>(nx), std::vector<double>(static_cast<size_t>(nx), 0.0));
  for (int x = 0; x < nx; ++x) {
    for (int xb = x + 1; xb < nx; ++xb) {
      double overlap = 0.0;
      for (int y = 0; y < w.output_size(); ++y)
        overlap += std::sqrt(w(x, y) * w(xb, y));
      const double dist = overlap > 0.0 ? std::max(0.0, -std::log(overlap)) : kInf;
      m.d[static_cast<size_t>(x)][static_cast<size_t>(xb)] = dist;
      m.d[static_cast<size_t>(xb)][static_cast<size_t>(x)] = dist;
    }
  }
  return m;
}

double product_coupling_min(const Distribution& q, const BhattacharyyaMatrix& d) {
  if (q.size() != d.size())
    throw std::invalid_argument("product_coupling_min: dimension mismatch");
  double best = kInf;
  for (int xb = 0; xb < d.size(); ++xb) {
    double col = 0.0;
    for (int x = 0; x < d.size(); ++x) {
      if (q[x] == 0.0) continue;
      if (d(x, xb) == kInf) {
        col = kInf;
        break;
      }
      col += q[x] * d(x, xb);
    }
    best = std::min(best, col);
  }
  return best;
}

namespace {

// Kernel B(x, xb) = exp(-d/rho); exp(-inf) = 0.
std::vector<std::vector<double>> dual_kernel(const BhattacharyyaMatrix& d, double rho) {
  const int n = d.size();
  std::vector<std::vector<double>> b(static_cast<size_t>(n),
                                     std::vector<double>(static_cast<size_t>(n)));
  for (int x = 0; x < n; ++x)
    for (int xb = 0; xb < n; ++xb)
      b[static_cast<size_t>(x)][static_cast<size_t>(xb)] =
          d(x, xb) == kInf ? 0.0 : std::exp(-d(x, xb) / rho);
  return b;
}

double inner_objective(const std::vector<double>& qw,  // input weights
                       const std::vector<std::vector<double>>& b, double rho,
                       const std::vector<double>& qp) {
  const size_t n = qp.size();
  double f = 0.0;
  for (size_t x = 0; x < n; ++x) {
    if (qw[x] == 0.0) continue;
    double inner = 0.0;
    for (size_t xb = 0; xb < n; ++xb) inner += qp[xb] * b[x][xb];
    if (inner <= 0.0) return kInf;
    f -= rho * qw[x] * std::log(inner);
  }
  return f;
}

// Deterministic simplex grid: compositions of N = round(1/res) into dim
// parts, first coordinate descending (same order as the type enumeration).
void simplex_points(int dim, int n_steps, std::vector<int>& cur,
                    std::vector<std::vector<double>>& out) {
  if (dim == 1) {
    cur.push_back(n_steps);
    double tot = 0.0;
    for (int c : cur) tot += c;
    std::vector<double> p(cur.size());
    for (size_t i = 0; i < cur.size(); ++i) p[i] = cur[i] / tot;
    out.push_back(std::move(p));
    cur.pop_back();
    return;
  }
  for (int c = n_steps; c >= 0; --c) {
    cur.push_back(c);
    simplex_points(dim - 1, n_steps - c, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<double>> enumerate_simplex(int dim, double resolution) {
  const int n_steps = std::max(1, static_cast<int>(std::lround(1.0 / resolution)));
  std::vector<std::vector<double>> out;
  std::vector<int> cur;
  simplex_points(dim, n_steps, cur, out);
  return out;
}

double resolve_resolution(int dim, const SimplexGrid& grid) {
  if (grid.resolution > 0.0) return grid.resolution;
  if (dim <= 3) return 0.01;
  if (dim == 4) return 0.05;
  throw std::invalid_argument("simplex grid: dim > 4 requires explicit resolution");
}

}  // namespace

InnerMinResult ex_prime_dual_full(const Distribution& q, double rho,
                                  const BhattacharyyaMatrix& d,
                                  const ExPrimeOptions& opts) {
  if (rho < 1.0) throw std::domain_error("ex_prime_dual: rho < 1");
  if (q.size() != d.size())
    throw std::invalid_argument("ex_prime_dual: dimension mismatch");
  const int n = d.size();
  const auto b = dual_kernel(d, rho);
  const std::vector<double>& qw = q.probs();

  std::vector<double> qp(static_cast<size_t>(n), 1.0 / n);
  if (opts.warm_start && static_cast<int>(opts.warm_start->size()) == n)
    qp = *opts.warm_start;

  const auto objective = [&](const std::vector<double>& v) {
    return inner_objective(qw, b, rho, v);
  };

  // inner[x] = <Q', B(x,.)>
  std::vector<double> inner(static_cast<size_t>(n), 0.0);
  const auto refresh_inner = [&]() {
    for (int x = 0; x < n; ++x) {
      double s = 0.0;
      for (int xb = 0; xb < n; ++xb)
        s += qp[static_cast<size_t>(xb)] * b[static_cast<size_t>(x)][static_cast<size_t>(xb)];
      inner[static_cast<size_t>(x)] = s;
    }
  };
  refresh_inner();

  InnerMinResult res;
  std::vector<double> grad(static_cast<size_t>(n));
  int it = 0;
  double gap = kInf;

  // Stop at gap_tol (absolute) or at the floating-point noise floor of the
  // gap itself: gradient entries scale with rho, so the computable gap
  // cannot resolve below ~eps * |grad|.
  double gap_floor = 0.0;
  const auto compute_gap = [&](int& vertex) {
    double scale = 0.0;
    for (int xb = 0; xb < n; ++xb) {
      double g = 0.0;
      for (int x = 0; x < n; ++x) {
        if (qw[static_cast<size_t>(x)] == 0.0) continue;
        g -= rho * qw[static_cast<size_t>(x)] *
             b[static_cast<size_t>(x)][static_cast<size_t>(xb)] /
             inner[static_cast<size_t>(x)];
      }
      grad[static_cast<size_t>(xb)] = g;
      scale = std::max(scale, std::abs(g));
    }
    gap_floor = 64.0 * 2.220446049250313e-16 * scale;
    vertex = 0;
    for (int xb = 1; xb < n; ++xb)
      if (grad[static_cast<size_t>(xb)] < grad[static_cast<size_t>(vertex)]) vertex = xb;
    double dot = 0.0;
    for (int xb = 0; xb < n; ++xb)
      dot += grad[static_cast<size_t>(xb)] * qp[static_cast<size_t>(xb)];
    return dot - grad[static_cast<size_t>(vertex)];
  };

  // Pairwise-transfer polish: exact one-dimensional moves cut through the
  // sublinear Frank-Wolfe tail near interior optima.
  const auto polish = [&]() {
    double best = objective(qp);
    for (int pass = 0; pass < 50; ++pass) {
      double improved = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const double qi = qp[static_cast<size_t>(i)], qj = qp[static_cast<size_t>(j)];
          if (qi + qj <= 0.0) continue;
          const auto g = golden_max(
              [&](double delta) {
                std::vector<double> trial = qp;
                trial[static_cast<size_t>(i)] = qi - delta;
                trial[static_cast<size_t>(j)] = qj + delta;
                return -objective(trial);
              },
              -qj, qi, 1e-14);
          if (-g.value < best - 1e-15) {
            improved += best - (-g.value);
            best = -g.value;
            qp[static_cast<size_t>(i)] = qi - g.arg;
            qp[static_cast<size_t>(j)] = qj + g.arg;
          }
        }
      }
      if (improved < 1e-14) break;
    }
    refresh_inner();
  };

  bool done = false;
  bool first_round = true;
  while (!done && it < opts.max_iters) {
    // A round of Frank-Wolfe steps with exact line search. Warm starts tend
    // to land near the optimum, so the first round hands over to the polish
    // quickly instead of riding the sublinear Frank-Wolfe tail.
    const int round_end = std::min(opts.max_iters, it + (first_round ? 8 : 192));
    first_round = false;
    for (; it < round_end; ++it) {
      int s = 0;
      gap = compute_gap(s);
      if (gap <= std::max(opts.gap_tol, gap_floor)) {
        done = true;
        break;
      }
      bool vertex_safe = true;
      for (int x = 0; x < n && vertex_safe; ++x)
        if (qw[static_cast<size_t>(x)] > 0.0 &&
            b[static_cast<size_t>(x)][static_cast<size_t>(s)] == 0.0)
          vertex_safe = false;
      const double gmax = vertex_safe ? 1.0 : 1.0 - 1e-12;
      const auto dphi = [&](double g) {
        double v = 0.0;
        for (int x = 0; x < n; ++x) {
          if (qw[static_cast<size_t>(x)] == 0.0) continue;
          const double bs = b[static_cast<size_t>(x)][static_cast<size_t>(s)];
          const double ix = inner[static_cast<size_t>(x)];
          v -= rho * qw[static_cast<size_t>(x)] * (bs - ix) /
               ((1.0 - g) * ix + g * bs);
        }
        return v;
      };
      double step = gmax;
      if (dphi(gmax) > 0.0) {
        double lo = 0.0, hi = gmax;
        for (int k = 0; k < 45; ++k) {
          const double mid = 0.5 * (lo + hi);
          if (dphi(mid) <= 0.0)
            lo = mid;
          else
            hi = mid;
        }
        step = 0.5 * (lo + hi);
      }
      if (step <= 0.0) {
        done = true;
        break;
      }
      for (int xb = 0; xb < n; ++xb)
        qp[static_cast<size_t>(xb)] *= (1.0 - step);
      qp[static_cast<size_t>(s)] += step;
      for (int x = 0; x < n; ++x)
        inner[static_cast<size_t>(x)] =
            (1.0 - step) * inner[static_cast<size_t>(x)] +
            step * b[static_cast<size_t>(x)][static_cast<size_t>(s)];
    }
    if (done) break;
    polish();
    int s = 0;
    gap = compute_gap(s);
    if (gap <= std::max(opts.gap_tol, gap_floor)) break;
  }
  double best = objective(qp);

  // Defensive dense scan; restart from any grid point that beats the solver.
  if (opts.grid_check && n <= 4) {
    const auto pts = enumerate_simplex(n, 0.02);
    for (const auto& p : pts) {
      if (objective(p) < best - 1e-12) {
        ExPrimeOptions retry = opts;
        retry.grid_check = false;
        retry.warm_start = &p;
        InnerMinResult r2 = ex_prime_dual_full(q, rho, d, retry);
        if (r2.value < best) {
          r2.iters += it;
          return r2;
        }
      }
    }
  }

  res.value = best > -1e-12 ? std::max(best, 0.0) : best;
  res.qprime = qp;
  res.gap = gap;
  res.iters = it;
  return res;
}

double ex_prime_dual(const Distribution& q, double rho, const BhattacharyyaMatrix& d,
                     const ExPrimeOptions& opts) {
  return ex_prime_dual_full(q, rho, d, opts).value;
}

QMax max_over_simplex(const std::function<double(const Distribution&)>& f, int dim,
                      const SimplexGrid& grid) {
  const double res = resolve_resolution(dim, grid);
  const auto pts = enumerate_simplex(dim, res);
  QMax out;
  out.value = -kInf;
  std::vector<double> best_q;
  for (const auto& p : pts) {
    const double v = f(Distribution(p));
    if (v > out.value) {
      out.value = v;
      best_q = p;
    }
  }
  // Ties prefer the uniform composition.
  {
    const Distribution u = Distribution::uniform(dim);
    const double vu = f(u);
    if (vu >= out.value - 1e-15) {
      out.value = std::max(out.value, vu);
      best_q = u.probs();
    }
  }
  // Pairwise-transfer polish on the continuous simplex.
  for (int pass = 0; pass < 8; ++pass) {
    double improved = 0.0;
    for (int i = 0; i < dim; ++i) {
      for (int j = i + 1; j < dim; ++j) {
        const double qi = best_q[static_cast<size_t>(i)];
        const double qj = best_q[static_cast<size_t>(j)];
        const auto g = golden_max(
            [&](double delta) {
              std::vector<double> trial = best_q;
              trial[static_cast<size_t>(i)] = qi - delta;
              trial[static_cast<size_t>(j)] = qj + delta;
              return f(Distribution(trial));
            },
            -qj, qi, 1e-12);
        if (g.value > out.value + 1e-14) {
          improved += g.value - out.value;
          out.value = g.value;
          best_q[static_cast<size_t>(i)] = qi - g.arg;
          best_q[static_cast<size_t>(j)] = qj + g.arg;
        }
      }
    }
    if (improved < 1e-13) break;
  }
  out.argmax = Distribution(best_q);
  return out;
}

QMax ex_prime_dual_max(double rho, const BhattacharyyaMatrix& d,
                       const SimplexGrid& grid) {
  std::vector<double> warm(static_cast<size_t>(d.size()), 1.0 / d.size());
  const auto f = [&](const Distribution& q) {
    ExPrimeOptions o;
    o.grid_check = false;
    o.warm_start = &warm;
    InnerMinResult r = ex_prime_dual_full(q, rho, d, o);
    warm = r.qprime;
    return r.value;
  };
  QMax m = max_over_simplex(f, d.size(), grid);
  // Re-evaluate the winner with the full defensive check.
  m.value = ex_prime_dual(m.argmax, rho, d);
  return m;
}

MaxCurve max_inner_dual_curve(const BhattacharyyaMatrix& d,
                              const std::vector<double>& rho_grid,
                              const SimplexGrid& grid) {
  const int dim = d.size();
  const double res = resolve_resolution(dim, grid);
  auto pts = enumerate_simplex(dim, res);
  pts.push_back(Distribution::uniform(dim).probs());  // uniform tie preference

  MaxCurve out;
  out.rho = rho_grid;
  out.value.assign(rho_grid.size(), -kInf);
  out.argmax.assign(rho_grid.size(), Distribution::uniform(dim));
  for (const auto& qv : pts) {
    const Distribution q(qv);
    std::vector<double> warm(static_cast<size_t>(dim), 1.0 / dim);
    for (size_t i = 0; i < rho_grid.size(); ++i) {
      ExPrimeOptions o;
      o.grid_check = false;
      o.warm_start = &warm;
      InnerMinResult r = ex_prime_dual_full(q, rho_grid[i], d, o);
      warm = r.qprime;
      if (r.value > out.value[i] + 1e-15) {
        out.value[i] = r.value;
        out.argmax[i] = q;
      }
    }
  }
  // Continuous pairwise polish of each per-rho winner.
  for (size_t i = 0; i < rho_grid.size(); ++i) {
    const double rho = rho_grid[i];
    std::vector<double> warm(static_cast<size_t>(dim), 1.0 / dim);
    std::vector<double> best_q = out.argmax[i].probs();
    for (int pass = 0; pass < 4; ++pass) {
      double improved = 0.0;
      for (int a = 0; a < dim; ++a) {
        for (int bidx = a + 1; bidx < dim; ++bidx) {
          const double qa = best_q[static_cast<size_t>(a)];
          const double qb = best_q[static_cast<size_t>(bidx)];
          const auto g = golden_max(
              [&](double delta) {
                std::vector<double> trial = best_q;
                trial[static_cast<size_t>(a)] = qa - delta;
                trial[static_cast<size_t>(bidx)] = qb + delta;
                ExPrimeOptions o;
                o.grid_check = false;
                o.warm_start = &warm;
                return ex_prime_dual_full(Distribution(trial), rho, d, o).value;
              },
              -qb, qa, 1e-12);
          if (g.value > out.value[i] + 1e-14) {
            improved += g.value - out.value[i];
            out.value[i] = g.value;
            best_q[static_cast<size_t>(a)] = qa - g.arg;
            best_q[static_cast<size_t>(bidx)] = qb + g.arg;
          }
        }
      }
      if (improved < 1e-13) break;
    }
    out.argmax[i] = Distribution(best_q);
  }
  out.limit = max_over_simplex(
                  [&](const Distribution& q) { return product_coupling_min(q, d); },
                  dim, grid)
                  .value;
  return out;
}

RhoSup eex_prime_from_dual(const Distribution& q, double R,
                           const BhattacharyyaMatrix& d, const RhoGridOptions& opts) {
  if (R < 0.0) throw std::domain_error("eex_prime_from_dual: R < 0");
  std::vector<double> warm(static_cast<size_t>(d.size()), 1.0 / d.size());
  const auto f = [&](double rho) {
    ExPrimeOptions o;
    o.grid_check = false;
    o.warm_start = &warm;
    InnerMinResult r = ex_prime_dual_full(q, rho, d, o);
    warm = r.qprime;
    return r.value - rho * R;
  };
  RhoSup out;
  if (R <= 1e-14) {
    // The supremum is the rho -> inf limit: the best product coupling.
    out.value = product_coupling_min(q, d);
    out.rho = kInf;
    out.flag = SupAttain::kTruncated;
    out.limit_value = out.value;
    return out;
  }
  const RaySup s = ray_max(f, 1.0, opts.rho_max, opts.rho_cap, opts.points);
  out.value = s.value;
  out.rho = s.arg;
  switch (s.flag) {
    case RayFlag::kLeftEdge:
      out.flag = SupAttain::kAtRhoOne;
      out.rho = 1.0;
      out.value = f(1.0);
      break;
    case RayFlag::kTruncated:
      out.flag = SupAttain::kTruncated;
      out.limit_value = product_coupling_min(q, d);
      break;
    default:
      out.flag = SupAttain::kInterior;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weak primal: conditional gradient over couplings with fixed row marginal.
// ---------------------------------------------------------------------------

namespace {

struct JointState {
  std::vector<std::vector<double>> p;  // coupling, rows sum to Q
  std::vector<double> col;             // column marginal
};

double joint_mi(const JointState& st, const std::vector<double>& qw) {
  double mi = 0.0;
  const size_t n = st.col.size();
  for (size_t x = 0; x < n; ++x)
    for (size_t y = 0; y < n; ++y) {
      const double v = st.p[x][y];
      if (v == 0.0) continue;
      mi += v * std::log(v / (qw[x] * st.col[y]));
    }
  return std::max(mi, 0.0);
}

double joint_distortion(const JointState& st, const BhattacharyyaMatrix& d) {
  double e = 0.0;
  const size_t n = st.col.size();
  for (size_t x = 0; x < n; ++x)
    for (size_t y = 0; y < n; ++y) {
      const double v = st.p[x][y];
      if (v == 0.0) continue;
      if (d(static_cast<int>(x), static_cast<int>(y)) == kInf) return kInf;
      e += v * d(static_cast<int>(x), static_cast<int>(y));
    }
  return e;
}

void refresh_col(JointState& st) {
  const size_t n = st.p.size();
  for (size_t y = 0; y < n; ++y) {
    double s = 0.0;
    for (size_t x = 0; x < n; ++x) s += st.p[x][y];
    st.col[y] = s;
  }
}

// Minimize E[d] + (1+mu) I over couplings with row marginal Q by
// Frank-Wolfe; the linear subproblem separates by row.
JointState fw_joint_min(const std::vector<double>& qw, const BhattacharyyaMatrix& d,
                        double mu, const PrimalOptions& opts,
                        const JointState* warm) {
  const int n = d.size();
  JointState st;
  if (warm) {
    st = *warm;
  } else {
    // Diagonal start: always finite (d(x,x) = 0).
    st.p.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
    for (int x = 0; x < n; ++x) st.p[static_cast<size_t>(x)][static_cast<size_t>(x)] = qw[static_cast<size_t>(x)];
    st.col.assign(static_cast<size_t>(n), 0.0);
    refresh_col(st);
  }

  const double w = 1.0 + mu;
  const auto objective = [&](const JointState& s) {
    const double e = joint_distortion(s, d);
    if (e == kInf) return kInf;
    return e + w * joint_mi(s, qw);
  };

  std::vector<std::vector<double>> grad(
      static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
  for (int it = 0; it < opts.max_iters; ++it) {
    // grad = d + (1+mu) log(P / (Q x col)); -inf at empty cells, +inf where
    // d is infinite (mass there is never useful).
    for (int x = 0; x < n; ++x) {
      if (qw[static_cast<size_t>(x)] == 0.0) continue;
      for (int y = 0; y < n; ++y) {
        const double dv = d(x, y);
        if (dv == kInf) {
          grad[static_cast<size_t>(x)][static_cast<size_t>(y)] = kInf;
          continue;
        }
        const double pv = st.p[static_cast<size_t>(x)][static_cast<size_t>(y)];
        if (pv == 0.0) {
          grad[static_cast<size_t>(x)][static_cast<size_t>(y)] = -kInf;
          continue;
        }
        grad[static_cast<size_t>(x)][static_cast<size_t>(y)] =
            dv + w * std::log(pv / (qw[static_cast<size_t>(x)] *
                                    st.col[static_cast<size_t>(y)]));
      }
    }
    // Row-separable vertex: each row sends its mass to its smallest-gradient
    // column.
    std::vector<int> target(static_cast<size_t>(n), 0);
    for (int x = 0; x < n; ++x) {
      int tb = 0;
      for (int y = 1; y < n; ++y)
        if (grad[static_cast<size_t>(x)][static_cast<size_t>(y)] <
            grad[static_cast<size_t>(x)][static_cast<size_t>(tb)])
          tb = y;
      target[static_cast<size_t>(x)] = tb;
    }
    double gap = 0.0;
    bool vertex_new_cell = false;
    for (int x = 0; x < n; ++x) {
      if (qw[static_cast<size_t>(x)] == 0.0) continue;
      for (int y = 0; y < n; ++y) {
        const double pv = st.p[static_cast<size_t>(x)][static_cast<size_t>(y)];
        if (pv > 0.0) gap += pv * grad[static_cast<size_t>(x)][static_cast<size_t>(y)];
      }
      const double gv = grad[static_cast<size_t>(x)][static_cast<size_t>(target[static_cast<size_t>(x)])];
      if (gv == -kInf)
        vertex_new_cell = true;
      else
        gap -= qw[static_cast<size_t>(x)] * gv;
    }
    if (!vertex_new_cell && gap <= opts.gap_tol * (1.0 + std::abs(objective(st)))) break;

    // Exact line search along P + g (V - P); derivative is nondecreasing.
    const auto dphi = [&](double g) {
      double v = 0.0;
      for (int x = 0; x < n; ++x) {
        if (qw[static_cast<size_t>(x)] == 0.0) continue;
        for (int y = 0; y < n; ++y) {
          const double pv = st.p[static_cast<size_t>(x)][static_cast<size_t>(y)];
          const double vv = (target[static_cast<size_t>(x)] == y ? qw[static_cast<size_t>(x)] : 0.0);
          const double diff = vv - pv;
          if (diff == 0.0) continue;
          const double pg = pv + g * diff;
          double colg = st.col[static_cast<size_t>(y)];
          // column marginal moves too
          double colv = 0.0;
          for (int xx = 0; xx < n; ++xx)
            colv += (target[static_cast<size_t>(xx)] == y ? qw[static_cast<size_t>(xx)] : 0.0);
          colg = colg + g * (colv - colg);
          if (pg <= 0.0 || colg <= 0.0) {
            v += diff < 0 ? kInf : -kInf;
            continue;
          }
          v += diff * (d(x, y) + w * std::log(pg / (qw[static_cast<size_t>(x)] * colg)));
        }
      }
      return v;
    };
    double lo = 0.0, hi = 1.0 - 1e-12;
    if (dphi(hi) <= 0.0) {
      lo = hi;
    } else {
      for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (dphi(mid) <= 0.0)
          lo = mid;
        else
          hi = mid;
      }
    }
    const double step = lo;
    if (step <= 1e-18) break;
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        const double vv = (target[static_cast<size_t>(x)] == y ? qw[static_cast<size_t>(x)] : 0.0);
        auto& pv = st.p[static_cast<size_t>(x)][static_cast<size_t>(y)];
        pv += step * (vv - pv);
      }
    }
    refresh_col(st);
  }
  return st;
}

}  // namespace

double eex_prime_primal(const Distribution& q, double R, const BhattacharyyaMatrix& d,
                        const PrimalOptions& opts) {
  if (R < 0.0) throw std::domain_error("eex_prime_primal: R < 0");
  if (q.size() != d.size())
    throw std::invalid_argument("eex_prime_primal: dimension mismatch");
  if (R <= 1e-14) return product_coupling_min(q, d);
  const std::vector<double>& qw = q.probs();

  JointState st = fw_joint_min(qw, d, 0.0, opts, nullptr);
  double mi = joint_mi(st, qw);
  if (mi <= R + 1e-9) return joint_distortion(st, d) + mi - R;

  // Constraint active: bisect the multiplier until I(P_mu) = R.
  double mu_lo = 0.0, mu_hi = 1.0;
  JointState hi_state = st;
  for (int k = 0; k < 60; ++k) {
    hi_state = fw_joint_min(qw, d, mu_hi, opts, &st);
    if (joint_mi(hi_state, qw) <= R) break;
    mu_lo = mu_hi;
    mu_hi *= 2.0;
    if (mu_hi > 1e12) return kInf;  // even near-minimal I exceeds R
  }
  JointState cur = hi_state;
  for (int k = 0; k < 100; ++k) {
    const double mu = 0.5 * (mu_lo + mu_hi);
    cur = fw_joint_min(qw, d, mu, opts, &cur);
    mi = joint_mi(cur, qw);
    if (std::abs(mi - R) <= opts.mi_tol) break;
    if (mi > R)
      mu_lo = mu;
    else
      mu_hi = mu;
  }
  mi = joint_mi(cur, qw);
  return joint_distortion(cur, d) + mi - R;
}

// ---------------------------------------------------------------------------
// CKM primal: Sinkhorn scaling on the transportation polytope U(Q, Q).
// ---------------------------------------------------------------------------

namespace {

struct SinkhornResult {
  std::vector<std::vector<double>> p;
  bool converged = false;
};

// Minimizes <d, P> + eps * D(P || QxQ) over couplings with both marginals Q.
SinkhornResult sinkhorn_coupling(const std::vector<double>& qw,
                                 const BhattacharyyaMatrix& d, double eps) {
  const int n = static_cast<int>(qw.size());
  std::vector<int> supp;
  for (int i = 0; i < n; ++i)
    if (qw[static_cast<size_t>(i)] > 0.0) supp.push_back(i);
  const int m = static_cast<int>(supp.size());

  // log kernel on the support: log Q(x) + log Q(xb) - d/eps
  std::vector<std::vector<double>> lk(static_cast<size_t>(m),
                                      std::vector<double>(static_cast<size_t>(m)));
  for (int a = 0; a < m; ++a)
    for (int bidx = 0; bidx < m; ++bidx) {
      const double dv = d(supp[static_cast<size_t>(a)], supp[static_cast<size_t>(bidx)]);
      lk[static_cast<size_t>(a)][static_cast<size_t>(bidx)] =
          dv == kInf ? -kInf
                     : std::log(qw[static_cast<size_t>(supp[static_cast<size_t>(a)])]) +
                           std::log(qw[static_cast<size_t>(supp[static_cast<size_t>(bidx)])]) -
                           dv / eps;
    }
  std::vector<double> f(static_cast<size_t>(m), 0.0), g(static_cast<size_t>(m), 0.0);
  std::vector<double> row(static_cast<size_t>(m));
  bool converged = false;
  for (int it = 0; it < 20000; ++it) {
    for (int a = 0; a < m; ++a) {
      for (int bidx = 0; bidx < m; ++bidx)
        row[static_cast<size_t>(bidx)] =
            lk[static_cast<size_t>(a)][static_cast<size_t>(bidx)] + g[static_cast<size_t>(bidx)];
      f[static_cast<size_t>(a)] =
          std::log(qw[static_cast<size_t>(supp[static_cast<size_t>(a)])]) - log_sum_exp(row);
    }
    double err = 0.0;
    for (int bidx = 0; bidx < m; ++bidx) {
      for (int a = 0; a < m; ++a)
        row[static_cast<size_t>(a)] =
            lk[static_cast<size_t>(a)][static_cast<size_t>(bidx)] + f[static_cast<size_t>(a)];
      const double lcol = log_sum_exp(row);
      const double target = std::log(qw[static_cast<size_t>(supp[static_cast<size_t>(bidx)])]);
      err = std::max(err, std::abs(std::exp(lcol + g[static_cast<size_t>(bidx)]) -
                                   std::exp(target)));
      g[static_cast<size_t>(bidx)] = target - lcol;
    }
    if (err <= 1e-14) {
      converged = true;
      break;
    }
  }
  SinkhornResult out;
  out.converged = converged;
  out.p.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
  for (int a = 0; a < m; ++a)
    for (int bidx = 0; bidx < m; ++bidx) {
      const double lv = lk[static_cast<size_t>(a)][static_cast<size_t>(bidx)] +
                        f[static_cast<size_t>(a)] + g[static_cast<size_t>(bidx)];
      out.p[static_cast<size_t>(supp[static_cast<size_t>(a)])]
           [static_cast<size_t>(supp[static_cast<size_t>(bidx)])] =
          lv == -kInf ? 0.0 : std::exp(lv);
    }
  return out;
}

double coupling_mi_pinned(const std::vector<std::vector<double>>& p,
                          const std::vector<double>& qw) {
  double mi = 0.0;
  for (size_t x = 0; x < p.size(); ++x)
    for (size_t y = 0; y < p.size(); ++y) {
      const double v = p[x][y];
      if (v == 0.0) continue;
      mi += v * std::log(v / (qw[x] * qw[y]));
    }
  return std::max(mi, 0.0);
}

double coupling_distortion(const std::vector<std::vector<double>>& p,
                           const BhattacharyyaMatrix& d) {
  double e = 0.0;
  for (size_t x = 0; x < p.size(); ++x)
    for (size_t y = 0; y < p.size(); ++y) {
      const double v = p[x][y];
      if (v == 0.0) continue;
      if (d(static_cast<int>(x), static_cast<int>(y)) == kInf) return kInf;
      e += v * d(static_cast<int>(x), static_cast<int>(y));
    }
  return e;
}

}  // namespace

double eex_ckm_primal(const Distribution& q, double R, const BhattacharyyaMatrix& d,
                      const PrimalOptions& opts) {
  if (R < 0.0) throw std::domain_error("eex_ckm_primal: R < 0");
  if (q.size() != d.size())
    throw std::invalid_argument("eex_ckm_primal: dimension mismatch");
  const std::vector<double>& qw = q.probs();
  if (R <= 1e-14) {
    // I <= 0 forces the product coupling QxQ, the only product in U(Q, Q).
    double e = 0.0;
    for (int x = 0; x < q.size(); ++x)
      for (int y = 0; y < q.size(); ++y) {
        const double v = qw[static_cast<size_t>(x)] * qw[static_cast<size_t>(y)];
        if (v == 0.0) continue;
        if (d(x, y) == kInf) return kInf;
        e += v * d(x, y);
      }
    return e;
  }

  SinkhornResult s0 = sinkhorn_coupling(qw, d, 1.0);
  double mi = coupling_mi_pinned(s0.p, qw);
  if (s0.converged && mi <= R + 1e-9)
    return coupling_distortion(s0.p, d) + mi - R;

  double mu_lo = 0.0, mu_hi = 1.0;
  SinkhornResult hi = s0;
  bool found = false;
  for (int k = 0; k < 60; ++k) {
    hi = sinkhorn_coupling(qw, d, 1.0 + mu_hi);
    if (hi.converged && coupling_mi_pinned(hi.p, qw) <= R) {
      found = true;
      break;
    }
    mu_lo = mu_hi;
    mu_hi *= 2.0;
    if (mu_hi > 1e12) break;
  }
  if (!found) return kInf;  // minimal I over admissible couplings exceeds R
  SinkhornResult cur = hi;
  for (int k = 0; k < 100; ++k) {
    const double mu = 0.5 * (mu_lo + mu_hi);
    cur = sinkhorn_coupling(qw, d, 1.0 + mu);
    mi = coupling_mi_pinned(cur.p, qw);
    if (std::abs(mi - R) <= opts.mi_tol) break;
    if (mi > R)
      mu_lo = mu;
    else
      mu_hi = mu;
  }
  mi = coupling_mi_pinned(cur.p, qw);
  return coupling_distortion(cur.p, d) + mi - R;
}

// ---------------------------------------------------------------------------
// Single-composition dual function: concave ascent over the tilt a(.).
// ---------------------------------------------------------------------------

TiltResult ex_single_dual_full(const Distribution& q, double rho,
                               const BhattacharyyaMatrix& d) {
  if (rho < 1.0) throw std::domain_error("ex_single_dual: rho < 1");
  if (q.size() != d.size())
    throw std::invalid_argument("ex_single_dual: dimension mismatch");
  const int n = q.size();
  std::vector<int> supp = q.support();
  const int m = static_cast<int>(supp.size());

  std::vector<double> a(static_cast<size_t>(m), 0.0);
  std::vector<double> lq(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i)
    lq[static_cast<size_t>(i)] = std::log(q[supp[static_cast<size_t>(i)]]);

  std::vector<double> log_s(static_cast<size_t>(m));
  std::vector<double> terms(static_cast<size_t>(m));
  const auto eval = [&](const std::vector<double>& av) {
    double val = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const double dv = d(supp[static_cast<size_t>(i)], supp[static_cast<size_t>(j)]);
        terms[static_cast<size_t>(j)] =
            dv == kInf ? -kInf
                       : lq[static_cast<size_t>(j)] +
                             (av[static_cast<size_t>(j)] - dv) / rho;
      }
      log_s[static_cast<size_t>(i)] = log_sum_exp(terms);
      val += std::exp(lq[static_cast<size_t>(i)]) *
             (av[static_cast<size_t>(i)] - rho * log_s[static_cast<size_t>(i)]);
    }
    return val;
  };
  const auto recenter = [&](std::vector<double>& av) {
    double mean = 0.0;
    for (int i = 0; i < m; ++i)
      mean += std::exp(lq[static_cast<size_t>(i)]) * av[static_cast<size_t>(i)];
    for (double& v : av) v -= mean;
  };

  double best = eval(a);  // also fills log_s at a
  std::vector<double> grad(static_cast<size_t>(m));
  double step = 1.0;
  for (int it = 0; it < 10000; ++it) {
    // gradient at the current a (log_s is fresh from the last eval)
    double gmax = 0.0;
    for (int z = 0; z < m; ++z) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) {
        const double dv = d(supp[static_cast<size_t>(i)], supp[static_cast<size_t>(z)]);
        if (dv == kInf) continue;
        acc += std::exp(lq[static_cast<size_t>(i)] +
                        (a[static_cast<size_t>(z)] - dv) / rho -
                        log_s[static_cast<size_t>(i)]);
      }
      grad[static_cast<size_t>(z)] =
          std::exp(lq[static_cast<size_t>(z)]) * (1.0 - acc);
      gmax = std::max(gmax, std::abs(grad[static_cast<size_t>(z)]));
    }
    if (gmax <= 1e-10) break;
    double g2 = 0.0;
    for (double v : grad) g2 += v * v;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      std::vector<double> trial = a;
      for (int z = 0; z < m; ++z)
        trial[static_cast<size_t>(z)] += step * grad[static_cast<size_t>(z)];
      recenter(trial);
      const double tv = eval(trial);
      if (tv >= best + 0.3 * step * g2) {
        a = trial;
        best = tv;
        step *= 1.5;
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-18) break;
    }
    if (!accepted) {
      eval(a);  // restore log_s for consistency
      break;
    }
  }

  TiltResult out;
  out.value = best;
  out.tilt.assign(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < m; ++i)
    out.tilt[static_cast<size_t>(supp[static_cast<size_t>(i)])] = a[static_cast<size_t>(i)];
  return out;
}

double ex_single_dual(const Distribution& q, double rho, const BhattacharyyaMatrix& d) {
  return ex_single_dual_full(q, rho, d).value;
}

QMax ex_single_dual_max(double rho, const BhattacharyyaMatrix& d,
                        const SimplexGrid& grid) {
  const auto f = [&](const Distribution& q) { return ex_single_dual(q, rho, d); };
  return max_over_simplex(f, d.size(), grid);
}

}  // namespace jscc

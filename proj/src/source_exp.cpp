#include "jscc/source_exp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jscc {

SourceModel::SourceModel(const Distribution& pv, double t_)
    : law(pv.restricted_to_support()), t(t_) {
  if (!(t > 0.0)) throw std::invalid_argument("SourceModel: t must be > 0");
}

double gallager_source_fn(double rho, const Distribution& pv) {
  if (rho < 0.0) throw std::domain_error("gallager_source_fn: rho < 0");
  // (1+rho) * logsumexp_v( log P(v) / (1+rho) ); zero letters contribute
  // nothing.
  std::vector<double> terms;
  terms.reserve(static_cast<size_t>(pv.size()));
  for (int v = 0; v < pv.size(); ++v) {
    if (pv[v] == 0.0) continue;
    terms.push_back(std::log(pv[v]) / (1.0 + rho));
  }
  return (1.0 + rho) * log_sum_exp(terms);
}

namespace {

// Entropy of the tilted law Q_a(v) proportional to P(v)^a, P full support.
double tilted_entropy(const std::vector<double>& logp, double a) {
  std::vector<double> w(logp.size());
  for (size_t i = 0; i < logp.size(); ++i) w[i] = a * logp[i];
  const double lz = log_sum_exp(w);
  double h = 0.0;
  for (size_t i = 0; i < logp.size(); ++i) {
    const double lq = w[i] - lz;
    h -= std::exp(lq) * lq;
  }
  return h;
}

double tilted_kl_to_p(const std::vector<double>& logp, double a) {
  std::vector<double> w(logp.size());
  for (size_t i = 0; i < logp.size(); ++i) w[i] = a * logp[i];
  const double lz = log_sum_exp(w);
  double d = 0.0;
  for (size_t i = 0; i < logp.size(); ++i) {
    const double lq = w[i] - lz;
    d += std::exp(lq) * (lq - logp[i]);
  }
  return std::max(d, 0.0);
}

}  // namespace

double source_reliability_primal(double R, const Distribution& pv) {
  if (R < 0.0) throw std::domain_error("source_reliability_primal: R < 0");
  const Distribution q = pv.restricted_to_support();
  const double hp = entropy(q);
  if (R <= hp + 1e-14) return 0.0;
  const double log_v = std::log(static_cast<double>(q.size()));
  if (R > log_v + 1e-12) return kInf;

  std::vector<double> logp(static_cast<size_t>(q.size()));
  for (int i = 0; i < q.size(); ++i) logp[static_cast<size_t>(i)] = std::log(q[i]);

  if (R >= log_v - 1e-12)
    return kl_divergence(Distribution::uniform(q.size()), q);

  // H(Q_a) decreases from log|V| at a=0 to H(P) at a=1; bisect on a.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double h = tilted_entropy(logp, mid);
    if (std::abs(h - R) <= 1e-12) {
      lo = hi = mid;
      break;
    }
    if (h > R)
      lo = mid;
    else
      hi = mid;
  }
  return tilted_kl_to_p(logp, 0.5 * (lo + hi));
}

namespace {

double sup_rate_minus_source(double R, double t, const Distribution& pv,
                             double lambda_min, const SourceDualOptions& opts) {
  std::vector<double> logp;
  for (int v = 0; v < pv.size(); ++v)
    if (pv[v] > 0.0) logp.push_back(std::log(pv[v]));
  const double m = static_cast<double>(logp.size());
  const double log_m = std::log(m);
  // lam R - t Es(lam) evaluated without cancellation: with u = 1/(1+lam),
  //   f = [ (R - t log m) - R u - t log1p(mean_v expm1(log p_v * u)) ] / u.
  // The naive difference of two O(lam)-sized terms loses ~lam*eps absolute
  // accuracy, which matters near the R = t log|V| boundary where the
  // supremum sits at very large lam.
  const double delta = R - t * log_m;
  const auto f = [&](double lam) {
    const double u = 1.0 / (1.0 + lam);
    double s = 0.0;
    for (double c : logp) s += std::expm1(c * u);
    const double lse_excess = std::log1p(s / m);
    return (delta - R * u - t * lse_excess) / u;
  };
  const RaySup s = ray_max(f, lambda_min, opts.rho_max, opts.rho_cap, opts.grid_points);
  if (s.flag == RayFlag::kTruncated) {
    // Slope at the cap decides between an asymptote (finite limit, already
    // within cap^-1 of the value) and a genuinely unbounded supremum.
    const double cap = s.arg;
    const double slope = (f(cap) - f(0.5 * cap)) / (0.5 * cap);
    if (slope > 1e-9 * (1.0 + std::abs(R))) return kInf;
  }
  return s.value;
}

}  // namespace

double source_reliability_dual(double R, const Distribution& pv,
                               const SourceDualOptions& opts) {
  if (R < 0.0) throw std::domain_error("source_reliability_dual: R < 0");
  const double v = sup_rate_minus_source(R, 1.0, pv, 0.0, opts);
  return std::max(v, 0.0);  // rho = 0 always achieves 0
}

double tilted_rate_sup(double R, double t, const Distribution& pv,
                       double lambda_min, const SourceDualOptions& opts) {
  return sup_rate_minus_source(R, t, pv, lambda_min, opts);
}

double class_source_fn(double rho, const SourceTypeTable& table,
                       const std::vector<int>& member_indices,
                       const Distribution& pv) {
  if (rho < 0.0) throw std::domain_error("class_source_fn: rho < 0");
  if (member_indices.empty())
    throw std::invalid_argument("class_source_fn: empty class");
  std::vector<double> terms;
  terms.reserve(member_indices.size());
  for (int idx : member_indices) {
    const TypeEntry& e = table.types.at(static_cast<size_t>(idx));
    // log P^k(v) is constant over the type class:
    // k * sum_v P_i(v) log P_V(v).
    double log_pk = 0.0;
    for (int v = 0; v < e.type.size(); ++v) {
      if (e.type[v] == 0.0) continue;
      if (pv[v] == 0.0) {
        log_pk = -kInf;
        break;
      }
      log_pk += e.type[v] * std::log(pv[v]);
    }
    log_pk *= table.k;
    terms.push_back(e.log_count + log_pk / (1.0 + rho));
  }
  return (1.0 + rho) * log_sum_exp(terms);
}

}  // namespace jscc

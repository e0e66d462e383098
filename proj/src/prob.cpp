#include "jscc/prob.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jscc {

namespace {

void check_probability_vector(const std::vector<double>& p, const char* what) {
  if (p.empty()) throw std::invalid_argument(std::string(what) + ": empty");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0))
      throw std::invalid_argument(std::string(what) + ": negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kStochasticTol)
    throw std::invalid_argument(std::string(what) + ": entries sum to " +
                                std::to_string(sum) + ", not 1");
}

}  // namespace

Distribution::Distribution(std::vector<double> probs) : p_(std::move(probs)) {
  check_probability_vector(p_, "Distribution");
}

Distribution Distribution::uniform(int n) {
  if (n < 1) throw std::invalid_argument("Distribution::uniform: n < 1");
  return Distribution(std::vector<double>(static_cast<size_t>(n), 1.0 / n));
}

Distribution Distribution::point_mass(int n, int at) {
  if (n < 1 || at < 0 || at >= n)
    throw std::invalid_argument("Distribution::point_mass: bad index");
  std::vector<double> p(static_cast<size_t>(n), 0.0);
  p[static_cast<size_t>(at)] = 1.0;
  return Distribution(std::move(p));
}

std::vector<int> Distribution::support() const {
  std::vector<int> s;
  for (int i = 0; i < size(); ++i)
    if (p_[static_cast<size_t>(i)] > 0.0) s.push_back(i);
  return s;
}

Distribution Distribution::restricted_to_support() const {
  std::vector<double> q;
  for (double v : p_)
    if (v > 0.0) q.push_back(v);
  return Distribution(std::move(q));
}

JointDistribution::JointDistribution(std::vector<std::vector<double>> probs)
    : p_(std::move(probs)) {
  if (p_.empty() || p_[0].empty())
    throw std::invalid_argument("JointDistribution: empty");
  const size_t cols = p_[0].size();
  double sum = 0.0;
  for (const auto& row : p_) {
    if (row.size() != cols)
      throw std::invalid_argument("JointDistribution: ragged rows");
    for (double v : row) {
      if (!(v >= 0.0))
        throw std::invalid_argument("JointDistribution: negative entry");
      sum += v;
    }
  }
  if (std::abs(sum - 1.0) > kStochasticTol)
    throw std::invalid_argument("JointDistribution: total mass " +
                                std::to_string(sum) + ", not 1");
}

Distribution JointDistribution::row_marginal() const {
  std::vector<double> m(static_cast<size_t>(rows()), 0.0);
  for (int x = 0; x < rows(); ++x)
    for (int y = 0; y < cols(); ++y) m[static_cast<size_t>(x)] += (*this)(x, y);
  // Guard against accumulated rounding pushing the sum outside tolerance.
  double s = 0.0;
  for (double v : m) s += v;
  for (double& v : m) v /= s;
  return Distribution(std::move(m));
}

Distribution JointDistribution::col_marginal() const {
  std::vector<double> m(static_cast<size_t>(cols()), 0.0);
  for (int x = 0; x < rows(); ++x)
    for (int y = 0; y < cols(); ++y) m[static_cast<size_t>(y)] += (*this)(x, y);
  double s = 0.0;
  for (double v : m) s += v;
  for (double& v : m) v /= s;
  return Distribution(std::move(m));
}

Channel::Channel(std::vector<std::vector<double>> rows) : w_(std::move(rows)) {
  if (w_.empty() || w_[0].empty()) throw std::invalid_argument("Channel: empty");
  const size_t cols = w_[0].size();
  for (size_t x = 0; x < w_.size(); ++x) {
    if (w_[x].size() != cols) throw std::invalid_argument("Channel: ragged rows");
    double sum = 0.0;
    for (double v : w_[x]) {
      if (!(v >= 0.0))
        throw std::invalid_argument("Channel: negative entry in row " +
                                    std::to_string(x));
      sum += v;
    }
    if (std::abs(sum - 1.0) > kStochasticTol)
      throw std::invalid_argument("Channel: row " + std::to_string(x) +
                                  " sums to " + std::to_string(sum));
  }
}

Channel Channel::bsc(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bsc: p outside [0,1]");
  return Channel({{1.0 - p, p}, {p, 1.0 - p}});
}

double entropy(const Distribution& p) {
  double h = 0.0;
  for (int i = 0; i < p.size(); ++i) h -= xlogy(p[i], p[i]);
  return std::max(h, 0.0);
}

double kl_divergence(const Distribution& q, const Distribution& p) {
  if (q.size() != p.size())
    throw std::invalid_argument("kl_divergence: alphabet size mismatch");
  double d = 0.0;
  for (int i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (p[i] == 0.0) return kInf;
    d += q[i] * std::log(q[i] / p[i]);
  }
  return std::max(d, 0.0);
}

double mutual_information(const JointDistribution& j) {
  const Distribution px = j.row_marginal();
  const Distribution py = j.col_marginal();
  double mi = 0.0;
  for (int x = 0; x < j.rows(); ++x)
    for (int y = 0; y < j.cols(); ++y) {
      const double v = j(x, y);
      if (v == 0.0) continue;
      mi += v * std::log(v / (px[x] * py[y]));
    }
  return std::max(mi, 0.0);
}

double log_num_types(int n, int m) {
  return std::lgamma(n + m) - std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(m));
}

double log_multinomial(const std::vector<int>& counts) {
  int k = 0;
  for (int c : counts) {
    if (c < 0) throw std::invalid_argument("log_multinomial: negative count");
    k += c;
  }
  double lc = std::lgamma(k + 1.0);
  for (int c : counts) lc -= std::lgamma(c + 1.0);
  return lc;
}

std::vector<int> quantize_composition(const Distribution& q, int n) {
  if (n < 1) throw std::invalid_argument("quantize_composition: n < 1");
  const int m = q.size();
  std::vector<int> counts(static_cast<size_t>(m));
  std::vector<double> frac(static_cast<size_t>(m));
  int assigned = 0;
  for (int i = 0; i < m; ++i) {
    const double exact = n * q[i];
    counts[static_cast<size_t>(i)] = static_cast<int>(std::floor(exact));
    frac[static_cast<size_t>(i)] = exact - counts[static_cast<size_t>(i)];
    assigned += counts[static_cast<size_t>(i)];
  }
  // Hand out the remainder by descending fractional part, ties by index.
  std::vector<int> order(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) order[static_cast<size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return frac[static_cast<size_t>(a)] > frac[static_cast<size_t>(b)];
  });
  for (int r = 0; r < n - assigned; ++r)
    ++counts[static_cast<size_t>(order[static_cast<size_t>(r % m)])];
  return counts;
}

namespace {

void enumerate_compositions(int remaining, int slots, std::vector<int>& cur,
                            const SourceTypeTable& table_meta,
                            std::vector<TypeEntry>& out) {
  if (slots == 1) {
    cur.push_back(remaining);
    std::vector<double> p(cur.size());
    for (size_t i = 0; i < cur.size(); ++i)
      p[i] = static_cast<double>(cur[i]) / table_meta.k;
    Distribution type(std::move(p));
    const double lc = log_multinomial(cur);
    out.push_back(TypeEntry{type, lc, table_meta.t * entropy(type)});
    cur.pop_back();
    return;
  }
  for (int c = remaining; c >= 0; --c) {
    cur.push_back(c);
    enumerate_compositions(remaining - c, slots - 1, cur, table_meta, out);
    cur.pop_back();
  }
}

}  // namespace

SourceTypeTable enumerate_types(int k, int alphabet_size, double t) {
  if (k < 1 || alphabet_size < 1)
    throw std::invalid_argument("enumerate_types: k and alphabet size must be >= 1");
  if (!(t > 0.0)) throw std::invalid_argument("enumerate_types: t must be > 0");
  if (log_num_types(k, alphabet_size) > std::log(1e6))
    throw std::invalid_argument("enumerate_types: more than 10^6 types");
  SourceTypeTable table;
  table.k = k;
  table.t = t;
  std::vector<int> cur;
  enumerate_compositions(k, alphabet_size, cur, table, table.types);
  return table;
}

int SourceTypeTable::index_of_counts(const std::vector<int>& counts) const {
  // Types are in lexicographically decreasing count order; rank by counting
  // the compositions that precede the query prefix.
  int idx = 0;
  int remaining = k;
  const int m = static_cast<int>(counts.size());
  for (int pos = 0; pos < m - 1; ++pos) {
    for (int c = remaining; c > counts[static_cast<size_t>(pos)]; --c) {
      idx += static_cast<int>(
          std::lround(std::exp(log_num_types(remaining - c, m - pos - 1))));
    }
    remaining -= counts[static_cast<size_t>(pos)];
  }
  return idx;
}

double log_type_class_size(const Distribution& type, int k) {
  std::vector<int> counts(static_cast<size_t>(type.size()));
  int total = 0;
  for (int i = 0; i < type.size(); ++i) {
    const double c = type[i] * k;
    const int ci = static_cast<int>(std::lround(c));
    if (std::abs(c - ci) > 1e-9)
      throw std::invalid_argument("log_type_class_size: not a k-type");
    counts[static_cast<size_t>(i)] = ci;
    total += ci;
  }
  if (total != k)
    throw std::invalid_argument("log_type_class_size: counts do not sum to k");
  return log_multinomial(counts);
}

}  // namespace jscc

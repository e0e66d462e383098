#include "jscc/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "jscc/partition.hpp"

namespace jscc {

std::vector<uint8_t> message_sequence(int64_t index, int k, int alphabet) {
  std::vector<uint8_t> v(static_cast<size_t>(k));
  for (int pos = k - 1; pos >= 0; --pos) {
    v[static_cast<size_t>(pos)] = static_cast<uint8_t>(index % alphabet);
    index /= alphabet;
  }
  return v;
}

Codebook sample_codebook(const PartitionPlan& plan, const SourceTypeTable& types,
                         int n, uint64_t seed) {
  const int vsize = types.types.front().type.size();
  double log_msgs = types.k * std::log(static_cast<double>(vsize));
  if (log_msgs > std::log(1e6))
    throw std::invalid_argument("sample_codebook: more than 10^6 source sequences");
  const FeasibilityReport feas = check_feasibility(plan, n, types);
  if (!feas.feasible)
    throw std::invalid_argument("sample_codebook: infeasible plan at this n");

  Codebook cb;
  cb.k = types.k;
  cb.n = n;
  cb.source_alphabet = vsize;
  cb.channel_alphabet = plan.classes.front().q.size();
  cb.seed = seed;
  cb.plan = plan;

  // Quantized composition multiset per class.
  std::vector<std::vector<uint8_t>> base(static_cast<size_t>(plan.num_classes()));
  for (int c = 0; c < plan.num_classes(); ++c) {
    const std::vector<int> counts =
        quantize_composition(plan.classes[static_cast<size_t>(c)].q, n);
    for (size_t x = 0; x < counts.size(); ++x)
      base[static_cast<size_t>(c)].insert(base[static_cast<size_t>(c)].end(),
                                          static_cast<size_t>(counts[x]),
                                          static_cast<uint8_t>(x));
  }

  int64_t num_messages = 1;
  for (int i = 0; i < types.k; ++i) num_messages *= vsize;
  cb.entries.resize(static_cast<size_t>(num_messages));
  cb.type_of_message.resize(static_cast<size_t>(num_messages));
  std::vector<int> counts(static_cast<size_t>(vsize));
  for (int64_t m = 0; m < num_messages; ++m) {
    const std::vector<uint8_t> v = message_sequence(m, types.k, vsize);
    std::fill(counts.begin(), counts.end(), 0);
    for (uint8_t s : v) ++counts[s];
    const int ti = types.index_of_counts(counts);
    cb.type_of_message[static_cast<size_t>(m)] = ti;
    const int c = plan.assignment[static_cast<size_t>(ti)];
    std::vector<uint8_t> word = base[static_cast<size_t>(c)];
    // Fisher-Yates with a per-message stream: independent across messages.
    CounterRng rng = CounterRng::keyed(seed, static_cast<uint64_t>(m));
    for (size_t i = word.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(rng.next_below(i));
      std::swap(word[i - 1], word[j]);
    }
    cb.entries[static_cast<size_t>(m)] = std::move(word);
  }
  return cb;
}

CodeSimulator::CodeSimulator(Codebook codebook, const SourceTypeTable& types,
                             const Distribution& pv, const Channel& w)
    : cb_(std::move(codebook)) {
  if (pv.size() != cb_.source_alphabet)
    throw std::invalid_argument("CodeSimulator: source alphabet mismatch");
  if (w.input_size() != cb_.channel_alphabet)
    throw std::invalid_argument("CodeSimulator: channel alphabet mismatch");
  num_messages_ = static_cast<int64_t>(cb_.entries.size());
  ny_ = w.output_size();
  log_w_.resize(static_cast<size_t>(w.input_size() * ny_));
  for (int x = 0; x < w.input_size(); ++x)
    for (int y = 0; y < ny_; ++y)
      log_w_[static_cast<size_t>(x * ny_ + y)] =
          w(x, y) > 0.0 ? std::log(w(x, y)) : -kInf;

  metric_shift_.resize(static_cast<size_t>(types.size()));
  for (int i = 0; i < types.size(); ++i)
    metric_shift_[static_cast<size_t>(i)] =
        2.0 * cb_.k * kl_divergence(types.types[static_cast<size_t>(i)].type, pv);

  log_pk_.resize(static_cast<size_t>(num_messages_));
  for (int64_t m = 0; m < num_messages_; ++m) {
    const std::vector<uint8_t> v =
        message_sequence(m, cb_.k, cb_.source_alphabet);
    double lp = 0.0;
    for (uint8_t s : v) lp += pv[s] > 0.0 ? std::log(pv[s]) : -kInf;
    log_pk_[static_cast<size_t>(m)] = lp;
  }

  source_cdf_.resize(static_cast<size_t>(pv.size()));
  double acc = 0.0;
  for (int i = 0; i < pv.size(); ++i) {
    acc += pv[i];
    source_cdf_[static_cast<size_t>(i)] = acc;
  }
  source_cdf_.back() = 1.0;
  channel_cdf_.resize(static_cast<size_t>(w.input_size()));
  for (int x = 0; x < w.input_size(); ++x) {
    channel_cdf_[static_cast<size_t>(x)].resize(static_cast<size_t>(ny_));
    acc = 0.0;
    for (int y = 0; y < ny_; ++y) {
      acc += w(x, y);
      channel_cdf_[static_cast<size_t>(x)][static_cast<size_t>(y)] = acc;
    }
    channel_cdf_[static_cast<size_t>(x)].back() = 1.0;
  }
}

int64_t CodeSimulator::decode(const std::vector<uint8_t>& y) const {
  int64_t best = 0;
  double best_metric = -kInf;
  for (int64_t m = 0; m < num_messages_; ++m) {
    const std::vector<uint8_t>& x = cb_.entries[static_cast<size_t>(m)];
    double metric = metric_shift_[static_cast<size_t>(
        cb_.type_of_message[static_cast<size_t>(m)])];
    for (int l = 0; l < cb_.n; ++l)
      metric += log_w_[static_cast<size_t>(x[static_cast<size_t>(l)] * ny_ +
                                           y[static_cast<size_t>(l)])];
    if (metric > best_metric) {  // strict: ties stay at the smallest index
      best_metric = metric;
      best = m;
    }
  }
  return best;
}

namespace {

int sample_from_cdf(const std::vector<double>& cdf, double u) {
  return static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

double wilson_halfwidth(double p, int64_t n) {
  if (n <= 0) return 1.0;
  const double z = 1.959963984540054;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double spread = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return spread / denom;
}

}  // namespace

SimResult CodeSimulator::estimate_error(int64_t trials, uint64_t seed,
                                        int num_threads) const {
  if (trials < 1) throw std::invalid_argument("estimate_error: trials < 1");
  const int n_types = static_cast<int>(metric_shift_.size());
  if (num_threads <= 0)
    num_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  num_threads = static_cast<int>(std::min<int64_t>(num_threads, trials));

  struct Tally {
    int64_t errors = 0;
    std::vector<int64_t> type_count, type_error;
  };
  std::vector<Tally> tallies(static_cast<size_t>(num_threads));
  std::atomic<int64_t> next_chunk{0};
  const int64_t chunk = 4096;

  const auto worker = [&](int wi) {
    Tally& t = tallies[static_cast<size_t>(wi)];
    t.type_count.assign(static_cast<size_t>(n_types), 0);
    t.type_error.assign(static_cast<size_t>(n_types), 0);
    std::vector<uint8_t> y(static_cast<size_t>(cb_.n));
    for (;;) {
      const int64_t lo = next_chunk.fetch_add(chunk);
      if (lo >= trials) break;
      const int64_t hi = std::min(trials, lo + chunk);
      for (int64_t trial = lo; trial < hi; ++trial) {
        // Per-trial stream: the result is a pure function of (seed, trial).
        CounterRng rng = CounterRng::keyed(seed ^ 0x5eau, static_cast<uint64_t>(trial));
        int64_t m = 0;
        for (int i = 0; i < cb_.k; ++i)
          m = m * cb_.source_alphabet + sample_from_cdf(source_cdf_, rng.next_double());
        const std::vector<uint8_t>& x = cb_.entries[static_cast<size_t>(m)];
        for (int l = 0; l < cb_.n; ++l)
          y[static_cast<size_t>(l)] = static_cast<uint8_t>(sample_from_cdf(
              channel_cdf_[static_cast<size_t>(x[static_cast<size_t>(l)])],
              rng.next_double()));
        const int64_t dec = decode(y);
        const int ti = cb_.type_of_message[static_cast<size_t>(m)];
        ++t.type_count[static_cast<size_t>(ti)];
        if (dec != m) {
          ++t.errors;
          ++t.type_error[static_cast<size_t>(ti)];
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int wi = 1; wi < num_threads; ++wi) pool.emplace_back(worker, wi);
  worker(0);
  for (auto& th : pool) th.join();

  int64_t errors = 0;
  std::vector<int64_t> tc(static_cast<size_t>(n_types), 0),
      te(static_cast<size_t>(n_types), 0);
  for (const Tally& t : tallies) {
    errors += t.errors;
    for (int i = 0; i < n_types; ++i) {
      tc[static_cast<size_t>(i)] += t.type_count[static_cast<size_t>(i)];
      te[static_cast<size_t>(i)] += t.type_error[static_cast<size_t>(i)];
    }
  }
  SimResult r;
  r.n = cb_.n;
  r.k = cb_.k;
  r.trials = trials;
  r.p_e = static_cast<double>(errors) / static_cast<double>(trials);
  r.ci_halfwidth = wilson_halfwidth(r.p_e, trials);
  r.empirical_exponent = r.p_e > 0.0 ? -std::log(r.p_e) / cb_.n : kInf;
  r.per_type_error.resize(static_cast<size_t>(n_types), 0.0);
  r.per_type_count.assign(tc.begin(), tc.end());
  for (int i = 0; i < n_types; ++i)
    if (tc[static_cast<size_t>(i)] > 0)
      r.per_type_error[static_cast<size_t>(i)] =
          static_cast<double>(te[static_cast<size_t>(i)]) /
          static_cast<double>(tc[static_cast<size_t>(i)]);
  return r;
}

bool CodeSimulator::exact_feasible() const {
  return cb_.n * std::log(static_cast<double>(ny_)) <= std::log(1e6) + 1e-12;
}

SimResult CodeSimulator::exact_error() const {
  if (!exact_feasible())
    throw std::invalid_argument("exact_error: |Y|^n exceeds 10^6");
  int64_t n_outputs = 1;
  for (int l = 0; l < cb_.n; ++l) n_outputs *= ny_;
  const int n_types = static_cast<int>(metric_shift_.size());

  // The decoder depends only on y: decode each output once, then sweep
  // messages accumulating P(v) W^n(y | x_v) over the outputs it gets wrong.
  std::vector<int64_t> decoded(static_cast<size_t>(n_outputs));
  std::vector<uint8_t> y(static_cast<size_t>(cb_.n), 0);
  for (int64_t yi = 0; yi < n_outputs; ++yi) {
    int64_t rem = yi;
    for (int l = cb_.n - 1; l >= 0; --l) {
      y[static_cast<size_t>(l)] = static_cast<uint8_t>(rem % ny_);
      rem /= ny_;
    }
    decoded[static_cast<size_t>(yi)] = decode(y);
  }
  double pe = 0.0;
  std::vector<double> type_err(static_cast<size_t>(n_types), 0.0),
      type_mass(static_cast<size_t>(n_types), 0.0);
  for (int64_t m = 0; m < num_messages_; ++m) {
    const double pv_mass = std::exp(log_pk_[static_cast<size_t>(m)]);
    const int ti = cb_.type_of_message[static_cast<size_t>(m)];
    type_mass[static_cast<size_t>(ti)] += pv_mass;
    if (pv_mass == 0.0) continue;
    const std::vector<uint8_t>& x = cb_.entries[static_cast<size_t>(m)];
    double cond_err = 0.0;
    for (int64_t yi = 0; yi < n_outputs; ++yi) {
      if (decoded[static_cast<size_t>(yi)] == m) continue;
      int64_t rem = yi;
      double lw = 0.0;
      for (int l = cb_.n - 1; l >= 0; --l) {
        const int yy = static_cast<int>(rem % ny_);
        rem /= ny_;
        lw += log_w_[static_cast<size_t>(x[static_cast<size_t>(l)] * ny_ + yy)];
      }
      if (lw > -kInf) cond_err += std::exp(lw);
    }
    pe += pv_mass * cond_err;
    type_err[static_cast<size_t>(ti)] += pv_mass * cond_err;
  }
  SimResult r;
  r.n = cb_.n;
  r.k = cb_.k;
  r.trials = 0;
  r.exact = true;
  r.p_e = pe;
  r.ci_halfwidth = 0.0;
  r.empirical_exponent = pe > 0.0 ? -std::log(pe) / cb_.n : kInf;
  r.per_type_error.resize(static_cast<size_t>(n_types), 0.0);
  r.per_type_count.assign(static_cast<size_t>(n_types), 0);
  for (int i = 0; i < n_types; ++i)
    if (type_mass[static_cast<size_t>(i)] > 0.0)
      r.per_type_error[static_cast<size_t>(i)] =
          type_err[static_cast<size_t>(i)] / type_mass[static_cast<size_t>(i)];
  return r;
}

BestOfResult expurgate_best_of(const PartitionPlan& plan, const SourceTypeTable& types,
                               const Distribution& pv, const Channel& w, int n,
                               int m_codebooks, int64_t trials, uint64_t seed,
                               bool exact) {
  if (m_codebooks < 1)
    throw std::invalid_argument("expurgate_best_of: M < 1");
  BestOfResult out;
  double best_pe = kInf;
  for (int m = 0; m < m_codebooks; ++m) {
    const uint64_t cb_seed =
        CounterRng::keyed(seed, 0x10000u + static_cast<uint64_t>(m)).next_u64();
    Codebook cb = sample_codebook(plan, types, n, cb_seed);
    CodeSimulator sim(std::move(cb), types, pv, w);
    const SimResult r = exact && sim.exact_feasible()
                            ? sim.exact_error()
                            : sim.estimate_error(trials, cb_seed);
    out.all_pe.push_back(r.p_e);
    if (r.p_e < best_pe) {
      best_pe = r.p_e;
      out.best_index = m;
      out.best = sim.codebook();
      out.result = r;
    }
  }
  return out;
}

}  // namespace jscc

#pragma once

#include <cstdint>
#include <vector>

#include "jscc/plan.hpp"
#include "jscc/prob.hpp"

// Desk-scale Monte Carlo validation: class-based constant-composition
// codebooks, the tilted decoding metric, best-of-M expurgation, and
// empirical exponent estimation. All randomness is counter-based, keyed by
// (seed, message) or (seed, trial), so results are independent of how work
// is partitioned across threads.

namespace jscc {

struct Codebook {
  int k = 0;
  int n = 0;
  int source_alphabet = 0;
  int channel_alphabet = 0;
  uint64_t seed = 0;
  std::vector<std::vector<uint8_t>> entries;  // codeword per message index
  std::vector<int> type_of_message;           // type-table index per message
  PartitionPlan plan;
};

// Message index <-> sequence: big-endian mixed radix, so numeric order is
// lexicographic order of sequences.
std::vector<uint8_t> message_sequence(int64_t index, int k, int alphabet);

// Draws one codeword per source sequence, uniformly from the quantized type
// class of its class composition (a seeded random permutation of the
// composition multiset).
Codebook sample_codebook(const PartitionPlan& plan, const SourceTypeTable& types,
                         int n, uint64_t seed);

struct SimResult {
  int n = 0;
  int k = 0;
  int64_t trials = 0;
  double p_e = 0.0;
  double ci_halfwidth = 0.0;       // Wilson 95% half-width (0 for exact)
  double empirical_exponent = 0.0; // -(1/n) log p_e
  double bound_exponent = 0.0;     // filled by the caller from the bound table
  bool exact = false;
  std::vector<double> per_type_error;   // conditional error rate per type
  std::vector<int64_t> per_type_count;  // trials per type (exact: weight denorm)
};

class CodeSimulator {
 public:
  CodeSimulator(Codebook codebook, const SourceTypeTable& types,
                const Distribution& pv, const Channel& w);

  // Tilted-metric decoder: argmax_v W^n(y | x_v) exp(2k D(P-hat_v || P_V)),
  // ties resolved toward the lexicographically smallest source sequence.
  int64_t decode(const std::vector<uint8_t>& y) const;

  // Monte Carlo estimate over (V ~ P^k, Y ~ W^n(.|x_V)).
  SimResult estimate_error(int64_t trials, uint64_t seed, int num_threads = 0) const;

  // Exact error probability by output enumeration; requires |Y|^n <= 10^6.
  SimResult exact_error() const;

  bool exact_feasible() const;
  const Codebook& codebook() const { return cb_; }

 private:
  Codebook cb_;
  int64_t num_messages_ = 0;
  std::vector<double> log_w_;        // log W(y|x), row-major [x][y]
  std::vector<double> metric_shift_; // 2k D(P_i || P_V) per type index
  std::vector<double> log_pk_;       // log P^k(v) per message
  std::vector<double> source_cdf_;   // for sampling V
  std::vector<std::vector<double>> channel_cdf_;  // per input row
  int ny_ = 0;
};

struct BestOfResult {
  Codebook best;
  SimResult result;
  int best_index = 0;
  std::vector<double> all_pe;  // p_e estimate per candidate codebook
};

// Best-of-M expurgation: samples M codebooks, estimates each, returns the
// best (ties to the lowest index) together with its per-type breakdown.
BestOfResult expurgate_best_of(const PartitionPlan& plan, const SourceTypeTable& types,
                               const Distribution& pv, const Channel& w, int n,
                               int m_codebooks, int64_t trials, uint64_t seed,
                               bool exact = false);

}  // namespace jscc

#pragma once

#include <string>
#include <vector>

#include "jscc/numerics.hpp"

// Finite-alphabet probability primitives and type (composition) counting.
// All information quantities are in nats. Constructors validate and refuse
// to renormalize: a row summing to 0.999 is a config bug, not noise.

namespace jscc {

inline constexpr double kStochasticTol = 1e-12;

class Distribution {
 public:
  explicit Distribution(std::vector<double> probs);

  static Distribution uniform(int n);
  static Distribution point_mass(int n, int at);

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_[static_cast<size_t>(i)]; }
  const std::vector<double>& probs() const { return p_; }

  std::vector<int> support() const;
  // Drops zero-probability letters (alphabet shrinks).
  Distribution restricted_to_support() const;

 private:
  std::vector<double> p_;
};

class JointDistribution {
 public:
  explicit JointDistribution(std::vector<std::vector<double>> probs);

  int rows() const { return static_cast<int>(p_.size()); }
  int cols() const { return static_cast<int>(p_[0].size()); }
  double operator()(int x, int y) const {
    return p_[static_cast<size_t>(x)][static_cast<size_t>(y)];
  }
  const std::vector<std::vector<double>>& probs() const { return p_; }

  Distribution row_marginal() const;
  Distribution col_marginal() const;

 private:
  std::vector<std::vector<double>> p_;
};

class Channel {
 public:
  explicit Channel(std::vector<std::vector<double>> rows);

  // Binary symmetric channel with crossover probability p.
  static Channel bsc(double p);

  int input_size() const { return static_cast<int>(w_.size()); }
  int output_size() const { return static_cast<int>(w_[0].size()); }
  double operator()(int x, int y) const {
    return w_[static_cast<size_t>(x)][static_cast<size_t>(y)];
  }
  const std::vector<double>& row(int x) const { return w_[static_cast<size_t>(x)]; }

 private:
  std::vector<std::vector<double>> w_;
};

struct TypeEntry {
  Distribution type;     // entries are multiples of 1/k
  double log_count;      // exact log |T^k(P_i)| via log-gamma
  double rate;           // R_i = t * H(P_i)
};

struct SourceTypeTable {
  int k = 0;
  double t = 1.0;
  std::vector<TypeEntry> types;

  int size() const { return static_cast<int>(types.size()); }
  // Index of the type with the given symbol counts (counts sum to k).
  int index_of_counts(const std::vector<int>& counts) const;
};

double entropy(const Distribution& p);
double kl_divergence(const Distribution& q, const Distribution& p);
double mutual_information(const JointDistribution& j);

// All k-types on an alphabet, enumerated in lexicographically decreasing
// count order; refuses enumerations beyond 10^6 types.
SourceTypeTable enumerate_types(int k, int alphabet_size, double t);

// Exact log multinomial coefficient of a k-type.
double log_type_class_size(const Distribution& type, int k);

// log C(n+m-1, m-1): number of compositions of n into m parts.
double log_num_types(int n, int m);

// Exact log multinomial coefficient from symbol counts.
double log_multinomial(const std::vector<int>& counts);

// Largest-remainder rounding of n*Q to integer counts summing to n;
// remainder ties break by lower index.
std::vector<int> quantize_composition(const Distribution& q, int n);

}  // namespace jscc

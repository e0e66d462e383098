#pragma once

#include <vector>

#include "jscc/prob.hpp"

// Class-based partition plans: every source type carries a class index, and
// each class carries a codeword composition and dual parameters.

namespace jscc {

struct ClassParams {
  Distribution q;      // codeword composition on X
  double rho = 1.0;    // >= 1
  double lambda = 1.0; // >= 1

  ClassParams(const Distribution& q_, double rho_, double lambda_)
      : q(q_), rho(rho_), lambda(lambda_) {}
};

struct PartitionPlan {
  std::vector<ClassParams> classes;
  std::vector<int> assignment;  // per type index in the SourceTypeTable
  int k = 0;
  int n = 0;

  int num_classes() const { return static_cast<int>(classes.size()); }
  std::vector<int> members_of(int c) const {
    std::vector<int> m;
    for (size_t i = 0; i < assignment.size(); ++i)
      if (assignment[i] == c) m.push_back(static_cast<int>(i));
    return m;
  }
};

}  // namespace jscc

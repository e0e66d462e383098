#pragma once

#include <vector>

#include "jscc/prob.hpp"

// Source reliability function e(R, P_V) in primal (constrained divergence
// minimization) and dual (tilted-parameter supremum) forms, the source
// cumulant E_s(rho, P_V), and its exact class-restricted variant computed by
// type enumeration.

namespace jscc {

struct SourceModel {
  Distribution law;  // zero-probability letters dropped at construction
  double t;          // transmission rate, source symbols per channel use

  SourceModel(const Distribution& pv, double t_);
};

struct SourceDualOptions {
  double rho_max = 1e4;   // initial grid endpoint
  double rho_cap = 1e10;  // adaptive extension stops here
  int grid_points = 200;
};

// E_s(rho, P_V) = (1+rho) log sum_v P_V(v)^{1/(1+rho)}, in nats.
double gallager_source_fn(double rho, const Distribution& pv);

// e(R, P_V) = min_{Q : H(Q) >= R} D(Q || P_V), solved on the tilted family
// Q_a(v) proportional to P_V(v)^a by bisection on H(Q_a) = R.
double source_reliability_primal(double R, const Distribution& pv);

// e(R, P_V) = sup_{rho >= 0} rho R - E_s(rho, P_V). Returns +inf when the
// supremum is unattained (slope still positive at the rho cap).
double source_reliability_dual(double R, const Distribution& pv,
                               const SourceDualOptions& opts = {});

// Exact class-conditional source cumulant:
// (1+rho) log sum_{v in A_c} P^k(v)^{1/(1+rho)}, the sum running over the
// type classes listed in member_indices.
double class_source_fn(double rho, const SourceTypeTable& table,
                       const std::vector<int>& member_indices,
                       const Distribution& pv);

// sup_{lambda >= lambda_min} { lambda R - t E_s(lambda, P_V) }, the source
// side of the per-type dual exponent rows. +inf when unattained.
double tilted_rate_sup(double R, double t, const Distribution& pv,
                       double lambda_min = 1.0,
                       const SourceDualOptions& opts = {});

}  // namespace jscc

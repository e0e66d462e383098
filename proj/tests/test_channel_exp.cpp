#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jscc/channel_exp.hpp"
#include "jscc/oracle.hpp"

using namespace jscc;

namespace {

const Channel kUseless({{0.3, 0.7}, {0.3, 0.7}});

Channel random_channel(int nx, int ny, uint64_t stream) {
  CounterRng rng = CounterRng::keyed(0xc4a7, stream);
  std::vector<std::vector<double>> rows(static_cast<size_t>(nx));
  for (auto& row : rows) {
    row.resize(static_cast<size_t>(ny));
    double s = 0.0;
    for (double& v : row) s += v = 0.05 + rng.next_double();
    for (double& v : row) v /= s;
  }
  return Channel(rows);
}

}  // namespace

TEST_CASE("bhattacharyya anchors") {
  const BhattacharyyaMatrix d = bhattacharyya(Channel::bsc(0.1));
  CHECK(d(0, 0) == 0.0);
  CHECK(d(1, 1) == 0.0);
  CHECK(d(0, 1) == doctest::Approx(-std::log(0.6)).epsilon(1e-12));
  CHECK(d(0, 1) == d(1, 0));

  const BhattacharyyaMatrix noiseless = bhattacharyya(Channel({{1.0, 0.0}, {0.0, 1.0}}));
  CHECK(noiseless(0, 1) == kInf);

  const BhattacharyyaMatrix useless = bhattacharyya(kUseless);
  CHECK(useless(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("bhattacharyya entries are symmetric and nonnegative") {
  for (uint64_t s = 0; s < 6; ++s) {
    const Channel w = random_channel(3, 4, s);
    const BhattacharyyaMatrix d = bhattacharyya(w);
    for (int x = 0; x < 3; ++x) {
      CHECK(d(x, x) == 0.0);
      for (int xb = 0; xb < 3; ++xb) {
        CHECK(d(x, xb) >= 0.0);
        CHECK(d(x, xb) == d(xb, x));
      }
    }
  }
}

TEST_CASE("inner dual anchors on the BSC") {
  const BhattacharyyaMatrix d = bhattacharyya(Channel::bsc(0.1));
  const Distribution qu = Distribution::uniform(2);
  CHECK(ex_prime_dual(qu, 1.0, d) == doctest::Approx(-std::log(0.8)).epsilon(1e-9));
  const double closed2 = -2.0 * std::log((1.0 + std::sqrt(0.6)) / 2.0);
  CHECK(ex_prime_dual(qu, 2.0, d) == doctest::Approx(closed2).epsilon(1e-9));
}

TEST_CASE("inner dual on degenerate channels") {
  const BhattacharyyaMatrix d0 = bhattacharyya(kUseless);
  for (double rho : {1.0, 2.0, 7.5})
    CHECK(ex_prime_dual(Distribution({0.3, 0.7}), rho, d0) ==
          doctest::Approx(0.0).epsilon(1e-12));
  // single-input channel
  BhattacharyyaMatrix d1;
  d1.d = {{0.0}};
  CHECK(ex_prime_dual(Distribution({1.0}), 3.0, d1) == doctest::Approx(0.0));
  CHECK_THROWS_AS(ex_prime_dual(Distribution({1.0}), 0.5, d1), std::domain_error);
}

TEST_CASE("inner dual is nonnegative and matches a dense grid") {
  for (uint64_t s = 0; s < 4; ++s) {
    const Channel w = random_channel(3, 3, 100 + s);
    const BhattacharyyaMatrix d = bhattacharyya(w);
    CounterRng rng = CounterRng::keyed(0x715, s);
    std::vector<double> qv(3);
    double sum = 0.0;
    for (double& v : qv) sum += v = 0.1 + rng.next_double();
    for (double& v : qv) v /= sum;
    const Distribution q(qv);
    for (double rho : {1.0, 3.0}) {
      const double solver = ex_prime_dual(q, rho, d);
      CHECK(solver >= -1e-12);
      // naive reference scan at resolution 0.005
      double best = kInf;
      const int steps = 200;
      for (int i = 0; i <= steps; ++i)
        for (int j = 0; i + j <= steps; ++j) {
          const std::vector<double> qp = {static_cast<double>(i) / steps,
                                          static_cast<double>(j) / steps,
                                          static_cast<double>(steps - i - j) / steps};
          double f = 0.0;
          for (int x = 0; x < 3 && f < kInf; ++x) {
            double inner = 0.0;
            for (int xb = 0; xb < 3; ++xb)
              inner += qp[static_cast<size_t>(xb)] * std::exp(-d(x, xb) / rho);
            f = inner > 0.0 ? f - rho * q[x] * std::log(inner) : kInf;
          }
          best = std::min(best, f);
        }
      CHECK(solver <= best + 1e-9);
      CHECK(solver >= best - 5e-4);  // grid is only 0.005-accurate
    }
  }
}

TEST_CASE("inner dual max over compositions") {
  const BhattacharyyaMatrix d = bhattacharyya(Channel::bsc(0.1));
  const QMax m = ex_prime_dual_max(1.0, d);
  CHECK(m.value == doctest::Approx(-std::log(0.8)).epsilon(1e-8));
  CHECK(m.argmax[0] == doctest::Approx(0.5).epsilon(1e-6));

  const QMax mu = ex_prime_dual_max(2.0, bhattacharyya(kUseless));
  CHECK(mu.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mu.argmax[0] == doctest::Approx(0.5));  // ties prefer uniform

  BhattacharyyaMatrix d1;
  d1.d = {{0.0}};
  const QMax m1 = ex_prime_dual_max(1.5, d1);
  CHECK(m1.value == doctest::Approx(0.0));
  CHECK(m1.argmax.size() == 1);
}

TEST_CASE("inner dual is invariant under input relabeling") {
  const Channel w = random_channel(3, 3, 41);
  const BhattacharyyaMatrix d = bhattacharyya(w);
  const std::vector<int> perm = {2, 0, 1};
  BhattacharyyaMatrix dp;
  dp.d.assign(3, std::vector<double>(3));
  for (int x = 0; x < 3; ++x)
    for (int xb = 0; xb < 3; ++xb)
      dp.d[static_cast<size_t>(perm[static_cast<size_t>(x)])]
          [static_cast<size_t>(perm[static_cast<size_t>(xb)])] = d(x, xb);
  const Distribution q({0.2, 0.5, 0.3});
  std::vector<double> qpv(3);
  for (int x = 0; x < 3; ++x)
    qpv[static_cast<size_t>(perm[static_cast<size_t>(x)])] = q[x];
  const Distribution qp(qpv);
  for (double rho : {1.0, 2.0, 5.0})
    CHECK(ex_prime_dual(q, rho, d) ==
          doctest::Approx(ex_prime_dual(qp, rho, dp)).epsilon(1e-9));
}

TEST_CASE("weak dual exponent anchors") {
  const BhattacharyyaMatrix d = bhattacharyya(Channel::bsc(0.1));
  const Distribution qu = Distribution::uniform(2);

  const RhoSup at_log2 = eex_prime_from_dual(qu, std::log(2.0), d);
  CHECK(at_log2.value == doctest::Approx(-std::log(0.8) - std::log(2.0)).epsilon(1e-9));
  CHECK(at_log2.flag == SupAttain::kAtRhoOne);
  CHECK(at_log2.rho == doctest::Approx(1.0));

  const RhoSup at_zero = eex_prime_from_dual(qu, 0.0, d);
  CHECK(at_zero.value == doctest::Approx(-0.5 * std::log(0.6)).epsilon(1e-9));
  CHECK(at_zero.flag == SupAttain::kTruncated);

  const RhoSup useless = eex_prime_from_dual(qu, 0.1, bhattacharyya(kUseless));
  CHECK(useless.value == doctest::Approx(-0.1).epsilon(1e-9));
  CHECK(useless.flag == SupAttain::kAtRhoOne);
}

TEST_CASE("weak primal anchors") {
  const BhattacharyyaMatrix d = bhattacharyya(Channel::bsc(0.1));
  const Distribution qu = Distribution::uniform(2);
  CHECK(eex_prime_primal(qu, 0.0, d) == doctest::Approx(-0.5 * std::log(0.6)).epsilon(1e-9));
  CHECK(eex_prime_primal(qu, std::log(2.0), d) ==
        doctest::Approx(-std::log(0.8) - std::log(2.0)).epsilon(1e-5));
  CHECK(eex_prime_primal(qu, 0.0, bhattacharyya(kUseless)) ==
        doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("weak primal on the noiseless channel tracks the entropy constraint") {
  const BhattacharyyaMatrix d = bhattacharyya(Channel({{1.0, 0.0}, {0.0, 1.0}}));
  const Distribution q({0.5, 0.5});
  // Only the identity coupling avoids infinite distance, so I = log 2 always.
  CHECK(eex_prime_primal(q, 0.2, d) == kInf);
  const double at = eex_prime_primal(q, std::log(2.0) + 0.1, d);
  CHECK(at == doctest::Approx(-0.1).epsilon(1e-6));
}

TEST_CASE("ckm primal anchors") {
  const BhattacharyyaMatrix d = bhattacharyya(Channel::bsc(0.1));
  const Distribution qu = Distribution::uniform(2);
  CHECK(eex_ckm_primal(qu, 0.0, d) == doctest::Approx(-0.5 * std::log(0.6)).epsilon(1e-9));
  // point-mass composition: only the diagonal coupling is feasible
  const Distribution pm({1.0, 0.0});
  for (double r : {0.1, 0.5, 1.0})
    CHECK(eex_ckm_primal(pm, r, d) == doctest::Approx(-r).epsilon(1e-9));
  // the CKM feasible set is smaller, so the exponent dominates the weak one
  for (double r : lin_space(0.05, std::log(2.0), 8))
    CHECK(eex_ckm_primal(qu, r, d) >= eex_prime_primal(qu, r, d) - 1e-6);
  CHECK(eex_ckm_primal(qu, std::log(2.0), d) <= 1e-9);
}

TEST_CASE("weak primal equals weak dual across a grid") {
  const Distribution qs[] = {Distribution::uniform(2), Distribution({0.7, 0.3})};
  for (double p : {0.1, 0.2}) {
    const BhattacharyyaMatrix d = bhattacharyya(Channel::bsc(p));
    for (const Distribution& q : qs) {
      for (double r : lin_space(0.0, std::log(2.0), 20)) {
        const RhoSup ds = eex_prime_from_dual(q, r, d);
        if (ds.flag == SupAttain::kTruncated) continue;
        const double pp = eex_prime_primal(q, r, d);
        CHECK(std::abs(pp - ds.value) <= 1e-3);
      }
    }
  }
  const Channel w23 = random_channel(2, 3, 9);
  const BhattacharyyaMatrix d23 = bhattacharyya(w23);
  for (const Distribution& q : qs) {
    for (double r : lin_space(0.0, std::log(2.0), 20)) {
      const RhoSup ds = eex_prime_from_dual(q, r, d23);
      if (ds.flag == SupAttain::kTruncated) continue;
      CHECK(std::abs(eex_prime_primal(q, r, d23) - ds.value) <= 1e-3);
    }
  }
}

TEST_CASE("weak dual exponent is nonincreasing in R") {
  const BhattacharyyaMatrix d = bhattacharyya(Channel::bsc(0.2));
  const Distribution q({0.6, 0.4});
  double prev = kInf;
  for (double r : lin_space(0.01, std::log(2.0), 30)) {
    const double v = eex_prime_from_dual(q, r, d).value;
    CHECK(v <= prev + 1e-10);
    prev = v;
  }
}

TEST_CASE("single-composition dual anchors") {
  const BhattacharyyaMatrix d = bhattacharyya(Channel::bsc(0.1));
  const Distribution qu = Distribution::uniform(2);
  const TiltResult t = ex_single_dual_full(qu, 1.0, d);
  CHECK(t.value == doctest::Approx(-std::log(0.8)).epsilon(1e-9));
  for (double a : t.tilt) CHECK(std::abs(a) <= 1e-6);  // zero tilt is optimal

  CHECK(ex_single_dual(Distribution({0.3, 0.7}), 2.0, bhattacharyya(kUseless)) ==
        doctest::Approx(0.0).epsilon(1e-9));
  CHECK(ex_single_dual(Distribution({1.0, 0.0}), 1.5, d) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero tilt reproduces the inner dual objective at Q' = Q") {
  for (uint64_t s = 0; s < 4; ++s) {
    const Channel w = random_channel(3, 3, 300 + s);
    const BhattacharyyaMatrix d = bhattacharyya(w);
    const Distribution q({0.25, 0.35, 0.4});
    for (double rho : {1.0, 2.0, 6.0}) {
      double f = 0.0;
      for (int x = 0; x < 3; ++x) {
        double inner = 0.0;
        for (int xb = 0; xb < 3; ++xb)
          inner += q[xb] * std::exp(-d(x, xb) / rho);
        f -= rho * q[x] * std::log(inner);
      }
      // ascent starts from a = 0, so the result dominates the zero-tilt value
      CHECK(ex_single_dual(q, rho, d) >= f - 1e-12);
    }
  }
}

TEST_CASE("single-composition exponent dominates the inner dual") {
  for (uint64_t s = 0; s < 3; ++s) {
    const Channel w = random_channel(2, 3, 400 + s);
    const BhattacharyyaMatrix d = bhattacharyya(w);
    for (double rho : {1.0, 2.0, 4.0}) {
      const QMax mx = ex_single_dual_max(rho, d);
      const QMax mp = ex_prime_dual_max(rho, d);
      CHECK(mx.value >= mp.value - 1e-6);
    }
  }
  const BhattacharyyaMatrix d = bhattacharyya(Channel::bsc(0.1));
  CHECK(ex_single_dual_max(1.0, d).value ==
        doctest::Approx(-std::log(0.8)).epsilon(1e-7));
  CHECK(ex_single_dual_max(1.0, d).argmax[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("oracle certifies the weak and ckm primal solvers") {
  const BhattacharyyaMatrix d = bhattacharyya(Channel::bsc(0.1));
  const Distribution qu = Distribution::uniform(2);
  const double res = 0.02;
  CHECK(oracle::brute_force_weak_exponent(qu, 0.0, d, res) ==
        doctest::Approx(-0.5 * std::log(0.6)).epsilon(0.04));
  for (double r : lin_space(0.0, std::log(2.0), 10)) {
    const double oracle_v = oracle::brute_force_weak_exponent(qu, r, d, res);
    const double solver_v = eex_prime_primal(qu, r, d);
    CHECK(std::abs(oracle_v - solver_v) <= 5 * res);
  }
  for (double r : lin_space(0.0, std::log(2.0), 6)) {
    const double oracle_v = oracle::brute_force_ckm_exponent(qu, r, d, 1e-4);
    const double solver_v = eex_ckm_primal(qu, r, d);
    CHECK(std::abs(oracle_v - solver_v) <= 1e-3);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jscc/source_exp.hpp"

using namespace jscc;

namespace {

Distribution random_source(int size, uint64_t stream) {
  CounterRng rng = CounterRng::keyed(0xabcdef, stream);
  std::vector<double> p(static_cast<size_t>(size));
  double s = 0.0;
  for (double& v : p) s += v = 0.02 + rng.next_double();
  for (double& v : p) v /= s;
  return Distribution(p);
}

}  // namespace

TEST_CASE("source cumulant anchors") {
  const Distribution u({0.5, 0.5});
  for (double rho : {0.0, 0.5, 1.0, 3.0, 10.0})
    CHECK(gallager_source_fn(rho, u) == doctest::Approx(rho * std::log(2.0)).epsilon(1e-12));
  CHECK(gallager_source_fn(3.0, Distribution({1.0, 0.0})) == doctest::Approx(0.0));
  CHECK(gallager_source_fn(1.0, Distribution({0.9, 0.1})) ==
        doctest::Approx(std::log(1.6)).epsilon(1e-12));
  CHECK_THROWS_AS(gallager_source_fn(-0.1, u), std::domain_error);
}

TEST_CASE("source cumulant is zero at rho=0 and convex") {
  for (uint64_t s = 0; s < 4; ++s) {
    const Distribution pv = random_source(3, s);
    CHECK(gallager_source_fn(0.0, pv) == doctest::Approx(0.0).epsilon(1e-12));
    const auto grid = lin_space(0.0, 20.0, 81);
    for (size_t i = 1; i + 1 < grid.size(); ++i) {
      const double second = gallager_source_fn(grid[i - 1], pv) -
                            2.0 * gallager_source_fn(grid[i], pv) +
                            gallager_source_fn(grid[i + 1], pv);
      CHECK(second >= -1e-9);
    }
  }
}

TEST_CASE("source reliability primal anchors") {
  const Distribution p({0.9, 0.1});
  CHECK(source_reliability_primal(0.0, p) == doctest::Approx(0.0));
  CHECK(source_reliability_primal(std::log(2.0), p) ==
        doctest::Approx(0.510825623765991).epsilon(1e-9));
  CHECK(source_reliability_primal(1.1 * std::log(2.0), p) == kInf);
  // below the source entropy the exponent vanishes
  CHECK(source_reliability_primal(0.3, p) == doctest::Approx(0.0));
}

TEST_CASE("source reliability dual anchors") {
  const Distribution u({0.5, 0.5});
  CHECK(source_reliability_dual(0.3, u) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(source_reliability_dual(std::log(2.0), u) == doctest::Approx(0.0).epsilon(1e-10));
  const Distribution p({0.9, 0.1});
  CHECK(source_reliability_dual(std::log(2.0), p) ==
        doctest::Approx(0.510825623765991).epsilon(1e-7));
  CHECK(source_reliability_dual(0.1, Distribution({1.0, 0.0})) == kInf);
}

TEST_CASE("primal and dual routes agree on grids") {
  for (int size : {2, 3}) {
    for (uint64_t s = 0; s < 5; ++s) {
      const Distribution pv = random_source(size, 100 * size + s);
      const auto grid = lin_space(0.0, std::log(static_cast<double>(size)), 50);
      for (double r : grid) {
        const double ep = source_reliability_primal(r, pv);
        const double ed = source_reliability_dual(r, pv);
        REQUIRE(std::isfinite(ep));
        REQUIRE(std::isfinite(ed));
        CHECK(std::abs(ep - ed) <= 1e-6);
      }
    }
  }
}

TEST_CASE("reliability function is nondecreasing and zero below entropy") {
  const Distribution pv = random_source(3, 77);
  const double h = entropy(pv);
  double prev = 0.0;
  for (double r : lin_space(0.0, std::log(3.0), 60)) {
    const double e = source_reliability_primal(r, pv);
    CHECK(e >= prev - 1e-12);
    if (r <= h) CHECK(e == doctest::Approx(0.0));
    prev = e;
  }
}

TEST_CASE("class cumulant: single class over all types matches k E_s") {
  const Distribution pv({0.9, 0.1});
  for (int k : {2, 4, 7}) {
    const SourceTypeTable table = enumerate_types(k, 2, 1.0);
    std::vector<int> all;
    for (int i = 0; i < table.size(); ++i) all.push_back(i);
    for (double rho : {0.0, 0.7, 1.0, 2.5}) {
      CHECK(class_source_fn(rho, table, all, pv) ==
            doctest::Approx(k * gallager_source_fn(rho, pv)).epsilon(1e-9));
    }
  }
}

TEST_CASE("class cumulant: singleton classes") {
  const Distribution pv({0.9, 0.1});
  const SourceTypeTable t4 = enumerate_types(4, 2, 1.0);
  // type (1,0): one sequence of probability 0.9^4
  CHECK(class_source_fn(1.0, t4, {0}, pv) ==
        doctest::Approx(4.0 * std::log(0.9)).epsilon(1e-12));
  const SourceTypeTable t1 = enumerate_types(1, 2, 1.0);
  // type (0,1) at k=1: single sequence of probability 0.1
  CHECK(class_source_fn(0.0, t1, {1}, pv) ==
        doctest::Approx(std::log(0.1)).epsilon(1e-12));
  CHECK_THROWS_AS(class_source_fn(1.0, t4, {}, pv), std::invalid_argument);
}

TEST_CASE("class cumulants partition the full sum") {
  const Distribution pv({0.8, 0.2});
  const SourceTypeTable table = enumerate_types(6, 2, 1.0);
  // split types into two classes and check the partition identity
  std::vector<int> c1, c2;
  for (int i = 0; i < table.size(); ++i) (i % 2 ? c1 : c2).push_back(i);
  for (double rho : {0.3, 1.0, 4.0}) {
    const double lhs =
        std::exp(class_source_fn(rho, table, c1, pv) / (1.0 + rho)) +
        std::exp(class_source_fn(rho, table, c2, pv) / (1.0 + rho));
    const double rhs = std::exp(6.0 * gallager_source_fn(rho, pv) / (1.0 + rho));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

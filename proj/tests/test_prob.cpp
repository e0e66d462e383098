#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jscc/prob.hpp"

using namespace jscc;

TEST_CASE("entropy anchors") {
  CHECK(entropy(Distribution({0.5, 0.5})) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(entropy(Distribution({1.0, 0.0})) == doctest::Approx(0.0));
  CHECK(entropy(Distribution({0.9, 0.1})) == doctest::Approx(0.325082973391448).epsilon(1e-10));
}

TEST_CASE("kl divergence anchors and edge cases") {
  const Distribution p({0.9, 0.1});
  const Distribution u({0.5, 0.5});
  CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
  CHECK(kl_divergence(u, p) == doctest::Approx(0.510825623765991).epsilon(1e-12));
  CHECK(kl_divergence(u, Distribution({1.0, 0.0})) == kInf);
  CHECK_THROWS_AS(kl_divergence(u, Distribution({1.0, 0.0, 0.0})), std::invalid_argument);
}

TEST_CASE("kl divergence is zero only at equality") {
  const Distribution p({0.3, 0.45, 0.25});
  const Distribution q({0.31, 0.44, 0.25});
  CHECK(kl_divergence(q, p) > 1e-5);
  CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
}

TEST_CASE("mutual information anchors") {
  const JointDistribution prod({{0.45, 0.45}, {0.05, 0.05}});
  CHECK(mutual_information(prod) == doctest::Approx(0.0).epsilon(1e-12));
  const JointDistribution diag({{0.5, 0.0}, {0.0, 0.5}});
  CHECK(mutual_information(diag) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const JointDistribution j({{0.4, 0.1}, {0.1, 0.4}});
  CHECK(mutual_information(j) == doctest::Approx(0.192744757021757).epsilon(1e-10));
}

TEST_CASE("mutual information of random product joints is zero") {
  CounterRng rng = CounterRng::keyed(11, 0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> a(3), b(2);
    double sa = 0.0, sb = 0.0;
    for (double& v : a) sa += v = 0.05 + rng.next_double();
    for (double& v : b) sb += v = 0.05 + rng.next_double();
    for (double& v : a) v /= sa;
    for (double& v : b) v /= sb;
    std::vector<std::vector<double>> p(3, std::vector<double>(2));
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 2; ++y) p[x][y] = a[x] * b[y];
    // renormalize exactly
    double tot = 0.0;
    for (auto& row : p)
      for (double v : row) tot += v;
    for (auto& row : p)
      for (double& v : row) v /= tot;
    CHECK(mutual_information(JointDistribution(p)) <= 1e-12);
  }
}

TEST_CASE("distribution validation refuses to renormalize") {
  CHECK_THROWS_AS(Distribution({0.5, 0.499}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution({-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(Channel({{0.9, 0.0999}, {0.1, 0.9}}), std::invalid_argument);
  CHECK_NOTHROW(Channel::bsc(0.1));
}

TEST_CASE("type enumeration counts") {
  const SourceTypeTable t2 = enumerate_types(2, 2, 1.0);
  REQUIRE(t2.size() == 3);
  CHECK(t2.types[0].type[0] == doctest::Approx(1.0));
  CHECK(t2.types[1].type[0] == doctest::Approx(0.5));
  CHECK(t2.types[2].type[0] == doctest::Approx(0.0));

  const SourceTypeTable t4 = enumerate_types(4, 2, 1.0);
  REQUIRE(t4.size() == 5);
  // the balanced type has count C(4,2) = 6
  CHECK(t4.types[2].type[0] == doctest::Approx(0.5));
  CHECK(t4.types[2].log_count == doctest::Approx(std::log(6.0)).epsilon(1e-12));

  CHECK(enumerate_types(4, 3, 1.0).size() == 15);
  CHECK_THROWS_AS(enumerate_types(1000, 8, 1.0), std::invalid_argument);
}

TEST_CASE("rates are t times entropy") {
  const SourceTypeTable t = enumerate_types(6, 2, 0.5);
  for (const TypeEntry& e : t.types)
    CHECK(e.rate == doctest::Approx(0.5 * entropy(e.type)).epsilon(1e-12));
}

TEST_CASE("index_of_counts inverts enumeration order") {
  const SourceTypeTable t = enumerate_types(5, 3, 1.0);
  for (int i = 0; i < t.size(); ++i) {
    std::vector<int> counts(3);
    for (int v = 0; v < 3; ++v)
      counts[v] = static_cast<int>(std::lround(t.types[i].type[v] * 5));
    CHECK(t.index_of_counts(counts) == i);
  }
}

TEST_CASE("log type class size anchors") {
  CHECK(log_type_class_size(Distribution({1.0, 0.0}), 5) == doctest::Approx(0.0));
  CHECK(log_type_class_size(Distribution({0.5, 0.5}), 4) ==
        doctest::Approx(std::log(6.0)).epsilon(1e-12));
  CHECK(log_type_class_size(Distribution({0.75, 0.25}), 4) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK_THROWS_AS(log_type_class_size(Distribution({0.3, 0.7}), 4),
                  std::invalid_argument);
}

TEST_CASE("method-of-types sandwich") {
  for (int vs = 2; vs <= 4; ++vs) {
    for (int k = 1; k <= 20; ++k) {
      const SourceTypeTable t = enumerate_types(k, vs, 1.0);
      for (const TypeEntry& e : t.types) {
        const double gap = k * entropy(e.type) - e.log_count;
        CHECK(gap >= -1e-9);
        CHECK(gap <= vs * std::log(k + 1.0) + 1e-9);
      }
    }
  }
}

TEST_CASE("type probabilities sum to one") {
  const Distribution pv({0.6, 0.3, 0.1});
  for (int k : {3, 7, 12}) {
    const SourceTypeTable t = enumerate_types(k, 3, 1.0);
    std::vector<double> logs;
    for (const TypeEntry& e : t.types) {
      double lp = e.log_count;
      for (int v = 0; v < 3; ++v) lp += k * e.type[v] * std::log(pv[v]);
      logs.push_back(lp);
    }
    CHECK(std::exp(log_sum_exp(logs)) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("quantize_composition anchors") {
  CHECK(quantize_composition(Distribution({0.5, 0.5}), 4) == std::vector<int>{2, 2});
  CHECK(quantize_composition(Distribution({0.6, 0.4}), 5) == std::vector<int>{3, 2});
  CHECK(quantize_composition(Distribution({1.0 / 3, 1.0 / 3, 1.0 / 3}), 4) ==
        std::vector<int>{2, 1, 1});
  // total variation bound |X|/(2n)
  const Distribution q({0.21, 0.33, 0.46});
  for (int n : {3, 7, 19}) {
    const auto counts = quantize_composition(q, n);
    double tv = 0.0;
    int tot = 0;
    for (int i = 0; i < 3; ++i) {
      tv += std::abs(static_cast<double>(counts[i]) / n - q[i]);
      tot += counts[i];
    }
    CHECK(tot == n);
    CHECK(tv / 2.0 <= 3.0 / (2.0 * n) + 1e-12);
  }
}

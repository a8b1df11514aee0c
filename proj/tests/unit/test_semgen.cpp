#include <doctest.h>

#include <cmath>
#include <numeric>
#include <string>

#include "oracles.hpp"
#include "semorder/errors.hpp"
#include "semorder/semgen.hpp"

using namespace semorder;

namespace {

SemSpec chain(EdgeFunction fn, double sd1, double sd2) {
  SemSpec s;
  s.p = 2;
  s.order = {0, 1};
  s.edges = {Edge{0, 1, std::move(fn)}};
  s.noise_sd = {sd1, sd2};
  return s;
}

ClassSpec linear_class() { return ClassSpec{Dictionary(BasisFamily::Polynomial, 1, -10.0, 10.0)}; }

double column_variance(const Matrix& m, int c) {
  const double mean = m.col(c).mean();
  return (m.col(c).array() - mean).square().mean();
}

}  // namespace

TEST_SUITE("semgen") {
  TEST_CASE("single variable is standard normal") {
    SemSpec s;
    s.p = 1;
    s.order = {0};
    s.noise_sd = {1.0};
    const auto data = sample(s, 100000, 3);
    CHECK(std::abs(column_variance(data.values, 0) - 1.0) <= 0.03);
  }

  TEST_CASE("sine chain variance matches the quadrature oracle") {
    const auto s = chain(edge::Sine{1.0, 1.0}, 1.0, 0.5);
    const auto data = sample(s, 100000, 8);
    const double expected = oracle::gaussian_variance([](double z) { return std::sin(z); }) + 0.25;
    CHECK(expected == doctest::Approx((1.0 - std::exp(-2.0)) / 2.0 + 0.25).epsilon(1e-8));
    CHECK(std::abs(column_variance(data.values, 1) - expected) <= 0.03);
  }

  TEST_CASE("sampling is deterministic and thread independent") {
    const auto s = chain(edge::Tanh{2.0}, 1.0, 0.3);
    const auto a = sample(s, 1000, 99, 1);
    const auto b = sample(s, 1000, 99, 1);
    const auto c = sample(s, 1000, 99, 4);
    CHECK(a.values == b.values);
    CHECK(a.values == c.values);
    CHECK(sample(s, 1000, 100).values != a.values);
    CHECK(a.seed.value() == 99);
  }

  TEST_CASE("variables are generated in the declared order") {
    // Order (2, 1): x1 depends on x2.
    SemSpec s;
    s.p = 2;
    s.order = {1, 0};
    s.edges = {Edge{1, 0, edge::Linear{3.0}}};
    s.noise_sd = {0.1, 1.0};
    const auto data = sample(s, 20000, 1);
    CHECK(column_variance(data.values, 0) == doctest::Approx(9.01).epsilon(0.05));
  }

  TEST_CASE("spec validation names the offending edge") {
    auto s = chain(edge::Linear{1.0}, 1.0, 1.0);
    s.edges.push_back(Edge{1, 0, edge::Linear{1.0}});
    s.order.clear();
    try {
      s.validate();
      FAIL("cycle not detected");
    } catch (const UsageError& e) {
      CHECK(std::string(e.what()).find("->") != std::string::npos);
    }
    auto bad = chain(edge::Linear{1.0}, 1.0, 0.0);
    CHECK_THROWS_AS(bad.validate(), UsageError);
    auto self = chain(edge::Linear{1.0}, 1.0, 1.0);
    self.edges = {Edge{1, 1, edge::Linear{1.0}}};
    CHECK_THROWS_AS(self.validate(), UsageError);
    auto against = chain(edge::Linear{1.0}, 1.0, 1.0);
    against.order = {1, 0};
    CHECK_THROWS_AS(against.validate(), UsageError);
  }

  TEST_CASE("topological orders") {
    auto s = chain(edge::Linear{1.0}, 1.0, 1.0);
    CHECK(topological_orders(s) == std::vector<std::vector<int>>{{0, 1}});
    s.edges.clear();
    CHECK(topological_orders(s) == std::vector<std::vector<int>>{{0, 1}, {1, 0}});

    SemSpec v;
    v.p = 3;
    v.order = {0, 1, 2};
    v.edges = {Edge{0, 2, edge::Linear{1.0}}, Edge{1, 2, edge::Linear{1.0}}};
    v.noise_sd = {1, 1, 1};
    std::vector<std::vector<int>> filtered;
    std::vector<int> perm{0, 1, 2};
    do {
      if (is_topological_order(v, perm)) filtered.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(topological_orders(v) == filtered);
    CHECK(filtered.size() == 2);

    SemSpec big;
    big.p = 11;
    big.order.resize(11);
    std::iota(big.order.begin(), big.order.end(), 0);
    big.noise_sd.assign(11, 1.0);
    CHECK_THROWS_AS(topological_orders(big), CapacityError);
  }

  TEST_CASE("population sigma of a linear Gaussian chain") {
    const auto s = chain(edge::Linear{1.0}, 1.0, 1.0);
    const auto forward = population_sigma(s, {0, 1}, linear_class(), 200000, 5);
    CHECK(forward.sigma2[0] == doctest::Approx(1.0).epsilon(0.02));
    CHECK(forward.sigma2[1] == doctest::Approx(1.0).epsilon(0.02));
    // Reverse: Var(X2) = 2, Var(X1 | X2) = 1 - 1/2.
    const auto reverse = population_sigma(s, {1, 0}, linear_class(), 200000, 5);
    CHECK(reverse.sigma2[0] == doctest::Approx(2.0).epsilon(0.02));
    CHECK(reverse.sigma2[1] == doctest::Approx(0.5).epsilon(0.02));
    CHECK(reverse.sigma2[0] * reverse.sigma2[1] == doctest::Approx(forward.sigma2[0] * forward.sigma2[1]).epsilon(1e-6));
    CHECK_THROWS_AS(population_sigma(s, {0, 1}, linear_class(), 10, 5), UsageError);
  }

  TEST_CASE("identifiability gap") {
    SUBCASE("linear Gaussian chain has a vanishing gap") {
      const auto report = identifiability_gap(chain(edge::Linear{1.0}, 1.0, 1.0), linear_class(), 100000, 2);
      CHECK(std::abs(report.xi) <= 3.0 * report.mc_se);
      CHECK(report.table.size() == 2);
    }
    SUBCASE("sine chain is identifiable under a spline class") {
      const ClassSpec spline{Dictionary(BasisFamily::CubicBSpline, 6, -3.0, 3.0)};
      const auto report = identifiability_gap(chain(edge::Sine{2.0, 1.0}, 1.0, 0.3), spline, 100000, 2);
      CHECK(report.xi > 3.0 * report.mc_se);
      CHECK(report.argmin == std::vector<int>{1, 0});
    }
    SUBCASE("one variable has no wrong permutation") {
      SemSpec s;
      s.p = 1;
      s.order = {0};
      s.noise_sd = {1.0};
      CHECK(std::isinf(identifiability_gap(s, linear_class(), 1000, 1).xi));
    }
  }
}

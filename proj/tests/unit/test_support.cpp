#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "semorder/errors.hpp"
#include "semorder/linalg.hpp"
#include "semorder/parallel.hpp"
#include "semorder/rng.hpp"
#include "semorder/stats.hpp"

using namespace semorder;

TEST_SUITE("support") {
  TEST_CASE("rng streams are reproducible and derived seeds differ") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.bits() == b.bits());
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {0}) != derive_seed(2, {0}));
  }

  TEST_CASE("mt19937_64 reference value") {
    // The standard fixes the 10000th output of a default-seeded engine.
    std::mt19937_64 engine;
    engine.discard(9999);
    CHECK(engine() == 9981545732273789042ULL);
  }

  TEST_CASE("uniform and normal moments") {
    Rng rng(7);
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0;
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform();
      CHECK_UNARY(u >= 0.0);
      CHECK_UNARY(u < 1.0);
      su += u;
      const double z = rng.normal();
      sn += z;
      sn2 += z * z;
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
  }

  TEST_CASE("summary statistics") {
    const std::vector<double> v{1, 2, 3, 4, 5};
    const auto s = summarize(v);
    CHECK(s.mean == doctest::Approx(3.0));
    CHECK(s.sd == doctest::Approx(std::sqrt(2.5)));
    CHECK(s.q90 == doctest::Approx(4.6));
    CHECK(s.count == 5);
    const std::vector<double> one{2.0};
    CHECK(std::isnan(summarize(one).sd));
  }

  TEST_CASE("log-log slope recovers a power law") {
    std::vector<double> x, y;
    for (double n : {100.0, 200.0, 400.0, 800.0}) {
      x.push_back(n);
      y.push_back(3.0 * std::pow(n, -0.5));
    }
    const auto fit = fit_loglog(x, y);
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK(fit.slope_se == doctest::Approx(0.0).epsilon(1e-9));
  }

  TEST_CASE("parallel_for covers every index once for any thread count") {
    for (unsigned threads : {1u, 2u, 5u}) {
      std::vector<std::atomic<int>> hits(37);
      parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
      for (auto& h : hits) CHECK(h.load() == 1);
    }
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                      if (i == 4) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
  }

  TEST_CASE("generalized extremes against a random scan") {
    Rng rng(11);
    const Matrix b = oracle::random_spd(3, rng);
    const Matrix a = oracle::random_symmetric(3, rng);
    const auto ext = linalg::generalized_extremes(a, b, "B");
    CHECK(ext.largest_vector.dot(b * ext.largest_vector) == doctest::Approx(1.0));
    CHECK(ext.largest_vector.dot(a * ext.largest_vector) == doctest::Approx(ext.largest));
    const double scan = oracle::ellipsoid_scan(a, b, 20000, 3);
    CHECK(std::max(std::abs(ext.largest), std::abs(ext.smallest)) >= scan - 1e-12);
  }

  TEST_CASE("singular metric is reported") {
    Matrix b = Matrix::Zero(2, 2);
    b(0, 0) = 1.0;
    CHECK_THROWS_AS(linalg::generalized_extremes(Matrix::Identity(2, 2), b, "Sigma"), NumericalError);
    CHECK_THROWS_AS(linalg::inverse_sqrt(b, "Sigma"), NumericalError);
  }
}

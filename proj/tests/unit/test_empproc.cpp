#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "semorder/empproc.hpp"
#include "semorder/errors.hpp"

using namespace semorder;

namespace {

MomentPair pair_of(const Matrix& sample, const Matrix& population) {
  MomentPair mp;
  mp.sample = sample;
  mp.population = population;
  return mp;
}

/// Sample moments of n Gaussian rows with covariance sigma.
Matrix noisy_sample(const Matrix& sigma, int n, Rng& rng) {
  const Matrix l = Eigen::LLT<Matrix>(sigma).matrixL();
  const Matrix z = oracle::random_matrix(n, static_cast<int>(sigma.rows()), rng) * l.transpose();
  return z.transpose() * z / n;
}

}  // namespace

TEST_SUITE("empproc") {
  TEST_CASE("ellipsoid supremum fixtures") {
    const Matrix s = Matrix::Identity(3, 3);
    CHECK(z_sup_ellipsoid(pair_of(s, s)) == 0.0);
    Matrix a(1, 1), b(1, 1);
    a << 1.2;
    b << 1.0;
    CHECK(z_sup_ellipsoid(pair_of(a, b)) == doctest::Approx(0.2));
  }

  TEST_CASE("ellipsoid supremum dominates a random scan and is attained") {
    Rng rng(1);
    for (int k = 0; k < 10; ++k) {
      const Matrix sigma = oracle::random_spd(3, rng);
      const Matrix hat = noisy_sample(sigma, 50, rng);
      const auto sup = ellipsoid_sup(pair_of(hat, sigma));
      const double scan = oracle::ellipsoid_scan(hat - sigma, sigma, 100000, 100 + k);
      CHECK(sup.value >= scan - 1e-12);
      CHECK(sup.value - scan <= 1e-3 * std::max(1.0, sup.value));
      const Vector& b = sup.argmax;
      CHECK(b.dot(sigma * b) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(std::abs(std::abs(b.dot((hat - sigma) * b)) - sup.value) <= 1e-6);
    }
  }

  TEST_CASE("ellipsoid supremum is congruence invariant") {
    Rng rng(2);
    for (int k = 0; k < 10; ++k) {
      const Matrix sigma = oracle::random_spd(4, rng);
      const Matrix hat = noisy_sample(sigma, 40, rng);
      const Matrix t = oracle::random_matrix(4, 4, rng) + 2.0 * Matrix::Identity(4, 4);
      const double a = z_sup_ellipsoid(pair_of(hat, sigma));
      const double b = z_sup_ellipsoid(pair_of(t.transpose() * hat * t, t.transpose() * sigma * t));
      CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, a));
    }
  }

  TEST_CASE("singular population moments are rejected") {
    Matrix sigma = Matrix::Identity(2, 2);
    sigma(1, 1) = 0.0;
    CHECK_THROWS_AS(z_sup_ellipsoid(pair_of(Matrix::Identity(2, 2), sigma)), NumericalError);
    Matrix asym = Matrix::Identity(2, 2);
    asym(0, 1) = 0.5;
    CHECK_THROWS_AS(z_sup_ellipsoid(pair_of(asym, Matrix::Identity(2, 2))), UsageError);
  }

  TEST_CASE("l1 supremum fixtures") {
    const Matrix s = Matrix::Identity(3, 3);
    CHECK(z_sup_l1(pair_of(s, s), 1.0) == 0.0);
    Rng rng(3);
    for (int k = 0; k < 5; ++k) {
      const Matrix sigma = oracle::random_spd(4, rng);
      const auto mp = pair_of(noisy_sample(sigma, 30, rng), sigma);
      CHECK(std::abs(z_sup_l1(mp, 1e6) - z_sup_ellipsoid(mp)) <= 1e-6);
    }
  }

  TEST_CASE("l1 supremum matches the dense grid in two dimensions") {
    Matrix sigma(2, 2), hat(2, 2);
    sigma << 1.0, 0.3, 0.3, 0.8;
    hat << 1.4, -0.2, -0.2, 0.5;  // indefinite difference
    for (double budget : {0.3, 0.7, 1.2, 3.0}) {
      const auto mp = pair_of(hat, sigma);
      const auto sup = z_sup_l1_detailed(mp, budget);
      const double grid = oracle::l1_grid_2d(hat - sigma, sigma, budget, 62832);
      CHECK(std::abs(sup.value - grid) <= 1e-3);
      CHECK(sup.value <= z_sup_ellipsoid(mp) + 1e-8);
      CHECK(sup.argmax.lpNorm<1>() <= budget + 1e-9);
      CHECK(sup.argmax.dot(sigma * sup.argmax) <= 1.0 + 1e-9);
      CHECK(sup.grid_agrees);
    }
  }

  TEST_CASE("l1 supremum never exceeds the ellipsoid supremum") {
    Rng rng(4);
    for (int k = 0; k < 20; ++k) {
      const int d = 2 + k % 5;
      const Matrix sigma = oracle::random_spd(d, rng);
      const auto mp = pair_of(noisy_sample(sigma, 25, rng), sigma);
      const double budget = 0.2 + 2.0 * rng.uniform();
      CHECK(z_sup_l1(mp, budget, 16, k) <= z_sup_ellipsoid(mp) + 1e-8);
    }
  }

  TEST_CASE("inner product supremum") {
    Rng rng(5);
    const Matrix sf = oracle::random_spd(3, rng);
    const Matrix sg = oracle::random_spd(2, rng);
    const Matrix c = oracle::random_matrix(3, 2, rng);
    CHECK(inner_product_sup(c, c, sf, sg, 1.0, 1.0) == 0.0);

    Matrix ch(1, 1), cp(1, 1), f(1, 1), g(1, 1);
    ch << 0.7;
    cp << 0.4;
    f << 4.0;
    g << 9.0;
    CHECK(inner_product_sup(ch, cp, f, g, 2.0, 3.0) == doctest::Approx(0.3 * 6.0 / 6.0));

    const Matrix hat = c + 0.2 * oracle::random_matrix(3, 2, rng);
    const double value = inner_product_sup(hat, c, sf, sg, 1.0, 1.0);
    CHECK(inner_product_sup(hat, c, sf, sg, 2.5, 1.0) == doctest::Approx(2.5 * value).epsilon(1e-14));
    // Random directions on both ellipsoids.
    const Matrix lf = Eigen::LLT<Matrix>(sf).matrixL();
    const Matrix lg = Eigen::LLT<Matrix>(sg).matrixL();
    double best = 0.0;
    for (int k = 0; k < 100000; ++k) {
      Vector u(3), v(2);
      for (auto& x : u) x = rng.normal();
      for (auto& x : v) x = rng.normal();
      const Vector b = lf.transpose().triangularView<Eigen::Upper>().solve(u.normalized());
      const Vector e = lg.transpose().triangularView<Eigen::Upper>().solve(v.normalized());
      best = std::max(best, std::abs(b.dot((hat - c) * e)));
    }
    CHECK(value >= best - 1e-12);
    CHECK(value - best <= 1e-3);
  }

  TEST_CASE("sub-Gaussian product supremum") {
    Rng rng(6);
    const Matrix features = oracle::random_matrix(100, 3, rng);
    const Vector y = oracle::random_matrix(100, 1, rng).col(0);
    const Matrix sigma = oracle::random_spd(3, rng);
    const Vector v = features.transpose() * y / 100.0;
    CHECK(subgauss_product_sup(features, y, sigma, v) == doctest::Approx(0.0).epsilon(1e-14));

    Matrix s1(1, 1);
    s1 << 2.0;
    const double one = subgauss_product_sup(features.leftCols(1), y, s1, Vector::Constant(1, 0.1));
    CHECK(one == doctest::Approx(std::abs(v(0) - 0.1) / std::sqrt(2.0)));

    const Vector m = Vector::Constant(3, 0.05);
    const double value = subgauss_product_sup(features, y, sigma, m);
    const Matrix l = Eigen::LLT<Matrix>(sigma).matrixL();
    double best = 0.0;
    for (int k = 0; k < 100000; ++k) {
      Vector u(3);
      for (auto& x : u) x = rng.normal();
      const Vector b = l.transpose().triangularView<Eigen::Upper>().solve(u.normalized());
      best = std::max(best, std::abs(b.dot(v - m)));
    }
    CHECK(value >= best - 1e-12);
    CHECK(value - best <= 1e-3);
  }

  TEST_CASE("rademacher diagnostic") {
    const Matrix sigma = Matrix::Identity(2, 2);
    SUBCASE("constant data with matched moments") {
      const FeatureSampler constant = [](std::uint64_t) { return Matrix(Matrix::Ones(50, 1)); };
      const auto r = rademacher_diagnostic(constant, Matrix::Ones(1, 1), 30, 1);
      CHECK(r.z_mean == 0.0);
      CHECK(r.z_eps_mean > 0.0);  // |sum eps_i / n| for n = 50 is rarely zero
      CHECK(r.z_mean <= 2.0 * r.z_eps_mean);
    }
    SUBCASE("Gaussian features satisfy the symmetrization inequality") {
      const FeatureSampler gaussian = [](std::uint64_t seed) {
        Rng rng(seed);
        return oracle::random_matrix(200, 2, rng);
      };
      const auto r = rademacher_diagnostic(gaussian, sigma, 200, 9);
      CHECK(r.reps == 200);
      CHECK(r.z_mean <= 2.0 * r.z_eps_mean + 3.0 * r.combined_se);
      CHECK(r.z_se > 0.0);
    }
    SUBCASE("too few replications") {
      const FeatureSampler any = [](std::uint64_t) { return Matrix(Matrix::Identity(2, 2)); };
      CHECK_THROWS_AS(rademacher_diagnostic(any, sigma, 29, 1), UsageError);
      CHECK_NOTHROW(rademacher_diagnostic(any, sigma, 30, 1));
    }
  }
}

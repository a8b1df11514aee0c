#include <doctest.h>

#include <cmath>

#include "semorder/bounds.hpp"
#include "semorder/misspec.hpp"

using namespace semorder;

namespace {

MisspecConfig grid(std::uint64_t seed) {
  MisspecConfig c;
  c.n_grid = {256, 512, 1024, 2048, 4096, 8192};
  c.reps = 50;
  c.oracle_n = 200000;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("misspec") {
  TEST_CASE("truth inside the span decays at the parametric rate") {
    const AdditiveDesign truth(2, -1.0, 1.0, {edge::Linear{1.0}, edge::Linear{-2.0}}, 1.0);
    const ClassSpec cls{Dictionary(BasisFamily::Polynomial, 1, -1.0, 1.0)};
    const auto report = misspec_experiment(truth, cls, grid(1));
    CHECK(std::abs(report.slope.slope + 0.5) <= 0.1);
    CHECK(report.oracle.beta_star(1) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(report.oracle.beta_star(2) == doctest::Approx(-2.0).epsilon(0.02));
  }

  TEST_CASE("cubic truth with a linear class still converges to the projection") {
    const AdditiveDesign truth(2, -1.0, 1.0, {edge::Cubic{1.0}, edge::Cubic{1.0}}, 0.5);
    const ClassSpec cls{Dictionary(BasisFamily::Polynomial, 1, -1.0, 1.0)};
    const auto report = misspec_experiment(truth, cls, grid(2));
    CHECK(std::abs(report.slope.slope + 0.5) <= 0.15);
    // E[x^4]/E[x^2] = 3/5 for Uniform[-1, 1].
    CHECK(report.oracle.beta_star(1) == doctest::Approx(0.6).epsilon(0.02));
    for (const auto& cell : report.cells) {
      CHECK(cell.delta_n > 0.0);
      CHECK(cell.distance.count == 50);
      CHECK(cell.distances.size() == 50);
      CHECK(cell.ratio.mean == doctest::Approx(cell.distance.mean / cell.delta_n));
    }
    CHECK(report.cells.back().distance.mean < report.cells.front().distance.mean);
  }

  TEST_CASE("a fit on the oracle sample reproduces the projection") {
    const AdditiveDesign truth(1, -1.0, 1.0, {edge::Cubic{1.0}}, 0.5);
    const ClassSpec cls{Dictionary(BasisFamily::Polynomial, 1, -1.0, 1.0)};
    const auto oracle = build_misspec_oracle(truth, cls, 50000, 77);
    const auto draw = misspec_draw(oracle, truth, cls, 50000, 77);
    CHECK(draw.distance <= 1e-6);
    CHECK(draw.excess_risk <= 1e-6);
    CHECK(misspec_draw(oracle, truth, cls, 50000, 78).distance > 1e-6);
  }
}

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "semorder/dictionary.hpp"
#include "semorder/edge_function.hpp"
#include "semorder/types.hpp"

namespace semorder {

struct DesignSample {
  Matrix coordinates;  ///< n x p, i.i.d. uniform rows
  Vector response;     ///< f0(X_i) + noise, empty when the design has no response
};

/// Random design with p independent Uniform[a, b] coordinates and an
/// optional additive response Y = sum_k f_k(x_k) + N(0, noise_sd^2).
///
/// Population moments of dictionary features are integrated exactly (up to
/// rounding) by piecewise Gauss-Legendre quadrature, which is what makes
/// the design usable as a ground truth for the empirical-process statistics.
class AdditiveDesign {
 public:
  AdditiveDesign(int coordinates, double lower, double upper);
  AdditiveDesign(int coordinates, double lower, double upper, std::vector<EdgeFunction> response_terms,
                 double noise_sd);

  int coordinates() const { return p_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  bool has_response() const { return !terms_.empty(); }
  double noise_sd() const { return noise_sd_; }

  /// Row i uses the stream derive_seed(seed, {i}); output does not depend on `threads`.
  DesignSample sample(Index n, std::uint64_t seed, unsigned threads = 1) const;

  /// E psi psi^T for the design_matrix layout (intercept first when set).
  Matrix population_second_moment(const Dictionary& dict, bool intercept) const;
  /// E[Y psi] for the same layout. Requires a response.
  Vector population_cross_moment(const Dictionary& dict, bool intercept) const;
  /// E[f0(X)^2] + noise_sd^2.
  double population_response_second_moment() const;

 private:
  /// Mean over Uniform[a, b] of g, split at `breaks`.
  template <class F>
  double uniform_mean(F&& g, const std::vector<double>& breaks) const;

  int p_;
  double lower_;
  double upper_;
  std::vector<EdgeFunction> terms_;
  double noise_sd_ = 0.0;
};

}  // namespace semorder

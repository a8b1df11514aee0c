#include "semorder/design.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <numeric>

#include "semorder/errors.hpp"
#include "semorder/parallel.hpp"
#include "semorder/rng.hpp"

namespace semorder {

namespace {
constexpr int kSubdivisions = 64;
}

AdditiveDesign::AdditiveDesign(int coordinates, double lower, double upper)
    : AdditiveDesign(coordinates, lower, upper, {}, 0.0) {}

AdditiveDesign::AdditiveDesign(int coordinates, double lower, double upper, std::vector<EdgeFunction> response_terms,
                               double noise_sd)
    : p_(coordinates), lower_(lower), upper_(upper), terms_(std::move(response_terms)), noise_sd_(noise_sd) {
  if (p_ < 1) throw UsageError("design needs at least one coordinate");
  if (!(lower_ < upper_)) throw UsageError("design domain must satisfy a < b");
  if (!terms_.empty() && static_cast<int>(terms_.size()) != p_)
    throw UsageError("design response needs one term per coordinate");
  if (noise_sd_ < 0.0) throw UsageError("design noise_sd must be nonnegative");
}

DesignSample AdditiveDesign::sample(Index n, std::uint64_t seed, unsigned threads) const {
  if (n < 1) throw UsageError("design sample size must be positive");
  DesignSample out;
  out.coordinates.resize(n, p_);
  if (has_response()) out.response.resize(n);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, {i}));
    const auto row = static_cast<Index>(i);
    double y = 0.0;
    for (int k = 0; k < p_; ++k) {
      const double x = rng.uniform(lower_, upper_);
      out.coordinates(row, k) = x;
      if (has_response()) y += terms_[static_cast<std::size_t>(k)](x);
    }
    if (has_response()) out.response(row) = y + noise_sd_ * rng.normal();
  });
  return out;
}

template <class F>
double AdditiveDesign::uniform_mean(F&& g, const std::vector<double>& breaks) const {
  std::vector<double> cuts;
  for (int i = 0; i <= kSubdivisions; ++i) cuts.push_back(lower_ + (upper_ - lower_) * i / kSubdivisions);
  for (double b : breaks)
    if (b > lower_ && b < upper_) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += boost::math::quadrature::gauss<double, 20>::integrate(g, cuts[i], cuts[i + 1]);
  return total / (upper_ - lower_);
}

Matrix AdditiveDesign::population_second_moment(const Dictionary& dict, bool intercept) const {
  const int width = dict.size();
  const auto breaks = dict.breakpoints();
  // Single-coordinate moments: means m_r and Gram G_rs of the basis.
  Vector means(width);
  Matrix gram(width, width);
  for (int r = 0; r < width; ++r) {
    means(r) = uniform_mean([&](double x) { return dict.eval(r, x); }, breaks);
    for (int s = r; s < width; ++s) {
      gram(r, s) = uniform_mean([&](double x) { return dict.eval(r, x) * dict.eval(s, x); }, breaks);
      gram(s, r) = gram(r, s);
    }
  }
  const Index offset = intercept ? 1 : 0;
  const Index d = static_cast<Index>(p_) * width + offset;
  Matrix sigma(d, d);
  if (intercept) {
    sigma(0, 0) = 1.0;
    for (int k = 0; k < p_; ++k) {
      sigma.block(0, offset + k * width, 1, width) = means.transpose();
      sigma.block(offset + k * width, 0, width, 1) = means;
    }
  }
  for (int j = 0; j < p_; ++j) {
    for (int k = 0; k < p_; ++k) {
      auto block = sigma.block(offset + j * width, offset + k * width, width, width);
      if (j == k)
        block = gram;
      else
        block = means * means.transpose();
    }
  }
  return sigma;
}

Vector AdditiveDesign::population_cross_moment(const Dictionary& dict, bool intercept) const {
  if (!has_response()) throw UsageError("design has no response");
  const int width = dict.size();
  const auto breaks = dict.breakpoints();
  std::vector<double> term_means(static_cast<std::size_t>(p_));
  for (int k = 0; k < p_; ++k)
    term_means[static_cast<std::size_t>(k)] = uniform_mean(terms_[static_cast<std::size_t>(k)], breaks);
  const double response_mean = std::accumulate(term_means.begin(), term_means.end(), 0.0);

  Vector basis_means(width);
  for (int r = 0; r < width; ++r) basis_means(r) = uniform_mean([&](double x) { return dict.eval(r, x); }, breaks);

  const Index offset = intercept ? 1 : 0;
  Vector cross(static_cast<Index>(p_) * width + offset);
  if (intercept) cross(0) = response_mean;
  for (int k = 0; k < p_; ++k) {
    const auto& term = terms_[static_cast<std::size_t>(k)];
    const double others = response_mean - term_means[static_cast<std::size_t>(k)];
    for (int r = 0; r < width; ++r) {
      const double same = uniform_mean([&](double x) { return term(x) * dict.eval(r, x); }, breaks);
      cross(offset + k * width + r) = same + others * basis_means(r);
    }
  }
  return cross;
}

double AdditiveDesign::population_response_second_moment() const {
  if (!has_response()) throw UsageError("design has no response");
  double mean = 0.0;
  double var = 0.0;
  for (const auto& term : terms_) {
    const double m = uniform_mean(term, {});
    const double m2 = uniform_mean([&](double x) { return term(x) * term(x); }, {});
    mean += m;
    var += m2 - m * m;
  }
  return var + mean * mean + noise_sd_ * noise_sd_;
}

}  // namespace semorder

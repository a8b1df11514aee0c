#include "semorder/edge_function.hpp"

#include <cmath>
#include <vector>

#include "semorder/errors.hpp"

namespace semorder {

namespace {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;
}  // namespace

EdgeFunction::EdgeFunction(Kind kind) : kind_(std::move(kind)) {
  if (const auto* combo = std::get_if<edge::DictionaryCombination>(&kind_)) {
    if (combo->coefficients.size() != combo->dict.size())
      throw UsageError("dictionary-combination: coefficient count must equal dictionary size");
  }
}

double EdgeFunction::operator()(double x) const {
  return std::visit(
      Overloaded{
          [x](const edge::Sine& s) { return s.amplitude * std::sin(s.frequency * x); },
          [x](const edge::Cubic& c) { return c.scale * x * x * x; },
          [x](const edge::Tanh& t) { return t.scale * std::tanh(x); },
          [x](const edge::Linear& l) { return l.slope * x; },
          [x](const edge::DictionaryCombination& d) {
            std::vector<double> values(static_cast<std::size_t>(d.dict.size()));
            d.dict.eval_all(x, values);
            double sum = 0.0;
            for (Index r = 0; r < d.coefficients.size(); ++r) sum += d.coefficients(r) * values[static_cast<std::size_t>(r)];
            return sum;
          },
      },
      kind_);
}

std::string EdgeFunction::name() const {
  return std::visit(Overloaded{
                        [](const edge::Sine&) { return std::string("sine"); },
                        [](const edge::Cubic&) { return std::string("cubic"); },
                        [](const edge::Tanh&) { return std::string("tanh"); },
                        [](const edge::Linear&) { return std::string("linear"); },
                        [](const edge::DictionaryCombination&) { return std::string("dictionary-combination"); },
                    },
                    kind_);
}

}  // namespace semorder

#pragma once

#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "semorder/dictionary.hpp"
#include "semorder/types.hpp"

namespace semorder {

namespace edge {
struct Sine {
  double amplitude = 1.0;
  double frequency = 1.0;
};
struct Cubic {
  double scale = 1.0;
};
/// scale * tanh(x)
struct Tanh {
  double scale = 1.0;
};
struct Linear {
  double slope = 1.0;
};
struct DictionaryCombination {
  Dictionary dict;
  Vector coefficients;
};
}  // namespace edge

/// One additive component f_{k,j} of a structural equation.
class EdgeFunction {
 public:
  using Kind = std::variant<edge::Sine, edge::Cubic, edge::Tanh, edge::Linear, edge::DictionaryCombination>;

  EdgeFunction(Kind kind);  // NOLINT(google-explicit-constructor)
  template <class T>
    requires std::is_constructible_v<Kind, T&&> && (!std::is_same_v<std::remove_cvref_t<T>, Kind>) &&
             (!std::is_same_v<std::remove_cvref_t<T>, EdgeFunction>)
  EdgeFunction(T&& kind) : EdgeFunction(Kind(std::forward<T>(kind))) {}  // NOLINT(google-explicit-constructor)

  double operator()(double x) const;
  const Kind& kind() const { return kind_; }
  std::string name() const;

 private:
  Kind kind_;
};

}  // namespace semorder

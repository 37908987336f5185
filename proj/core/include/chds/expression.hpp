#pragma once

#include <memory>
#include <string>

#include "chds/fe_space.hpp"

namespace chds {

/// Arithmetic expression in x and y: numbers, pi, + - * /, unary minus, parentheses,
/// sin(...) and cos(...). Evaluation also returns the exact gradient (forward-mode
/// differentiation), so an expression can feed the Ritz projection.
class Expression {
 public:
  /// Throws chds::Error (Config) with the offending position on a syntax error.
  explicit Expression(std::string text);
  ~Expression();
  Expression(const Expression&);
  Expression& operator=(const Expression&);
  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;

  const std::string& text() const { return text_; }
  double operator()(double x, double y) const;
  Vec2 gradient(double x, double y) const;
  ScalarField field() const;

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace chds

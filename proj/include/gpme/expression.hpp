#pragma once

#include <memory>
#include <string>

namespace gpme {

/// Tiny arithmetic expression in one variable.
///
/// Grammar: numbers, the variable, + - * / ^ (right associative, binds tighter than
/// unary minus), parentheses, and the functions abs(.) and sgn(.).
class Expression {
 public:
  /// Throws ParseError on malformed input.
  static Expression parse(const std::string& text, const std::string& variable = "s");

  double operator()(double x) const;
  const std::string& text() const noexcept { return text_; }
  /// True when the expression does not reference the variable.
  bool is_constant() const noexcept;

  struct Node;

 private:
  Expression(std::string text, std::shared_ptr<const Node> root);
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace gpme

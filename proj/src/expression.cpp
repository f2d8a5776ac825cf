#include "gpme/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "gpme/error.hpp"
#include "gpme/node_function.hpp"

namespace gpme {

struct Expression::Node {
  enum class Kind { number, variable, neg, add, sub, mul, div, pow, abs, sgn } kind;
  double value = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  double eval(double x) const {
    switch (kind) {
      case Kind::number: return value;
      case Kind::variable: return x;
      case Kind::neg: return -lhs->eval(x);
      case Kind::add: return lhs->eval(x) + rhs->eval(x);
      case Kind::sub: return lhs->eval(x) - rhs->eval(x);
      case Kind::mul: return lhs->eval(x) * rhs->eval(x);
      case Kind::div: return lhs->eval(x) / rhs->eval(x);
      case Kind::pow: return std::pow(lhs->eval(x), rhs->eval(x));
      case Kind::abs: return std::fabs(lhs->eval(x));
      case Kind::sgn: return static_cast<double>(sgn(lhs->eval(x)));
    }
    return 0.0;
  }

  bool uses_variable() const {
    if (kind == Kind::variable) return true;
    return (lhs && lhs->uses_variable()) || (rhs && rhs->uses_variable());
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->value = value;
  return n;
}

// expr   := term (('+'|'-') term)*
// term   := unary (('*'|'/') unary)*
// unary  := '-' unary | '+' unary | power
// power  := atom ('^' unary)?
// atom   := number | var | func '(' expr ')' | '(' expr ')'
class Parser {
 public:
  Parser(const std::string& text, const std::string& variable) : text_(text), variable_(variable) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("expression '" + text_ + "': " + msg + " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Kind::add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Kind::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Kind::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Kind::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return make(Kind::pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Kind::number, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name = text_.substr(start, pos_ - start);
      if (name == variable_) return make(Kind::variable);
      if (name == "abs" || name == "sgn") {
        if (!accept('(')) fail("expected '(' after " + name);
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(name == "abs" ? Kind::abs : Kind::sgn, arg);
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& text_;
  const std::string& variable_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::string text, std::shared_ptr<const Node> root)
    : text_(std::move(text)), root_(std::move(root)) {}

Expression Expression::parse(const std::string& text, const std::string& variable) {
  Parser p(text, variable);
  return Expression(text, p.parse());
}

double Expression::operator()(double x) const { return root_->eval(x); }

bool Expression::is_constant() const noexcept { return !root_->uses_variable(); }

}  // namespace gpme

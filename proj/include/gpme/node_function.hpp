#pragma once

#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace gpme {

/// Node measure mu, shared by value. A default-constructed Measure is the counting measure.
class Measure {
 public:
  using Fn = std::function<double(const std::string&)>;

  Measure() = default;
  explicit Measure(Fn fn) : fn_(std::make_shared<const Fn>(std::move(fn))) {}

  double operator()(const std::string& x) const { return fn_ ? (*fn_)(x) : 1.0; }

 private:
  std::shared_ptr<const Fn> fn_;
};

/// Finitely supported real function on the nodes of a graph. Absent nodes read as 0.
///
/// Values are fixed at construction; arithmetic returns new functions carrying the
/// measure of the left operand.
class NodeFunction {
 public:
  using Map = std::map<std::string, double>;

  NodeFunction() = default;
  explicit NodeFunction(Measure mu, Map values = {});
  NodeFunction(Measure mu, std::initializer_list<Map::value_type> values);

  double operator()(const std::string& x) const;
  const Map& values() const noexcept { return values_; }
  const Measure& measure() const noexcept { return mu_; }

  /// Same values with the exact zeros dropped.
  NodeFunction canonical() const;
  /// Node ids where the value is nonzero, in ascending id order.
  std::vector<std::string> support() const;
  bool is_zero() const;
  bool nonnegative() const;
  bool nonpositive() const;

  NodeFunction operator+(const NodeFunction& other) const;
  NodeFunction operator-(const NodeFunction& other) const;
  NodeFunction operator-() const;
  NodeFunction operator*(double scale) const;
  friend NodeFunction operator*(double scale, const NodeFunction& f) { return f * scale; }

  /// Pointwise map over the stored entries.
  NodeFunction map(const std::function<double(double)>& fn) const;

  /// Equality of canonical forms; measures are not compared.
  friend bool operator==(const NodeFunction& a, const NodeFunction& b);

 private:
  Measure mu_;
  Map values_;
};

enum class Lp { one, two, inf };

/// ||f||_p with respect to the measure carried by f.
double norm(const NodeFunction& f, Lp p);

/// The semi-inner product <z, k>_+ of the l^p space (p = 1 or 2), in closed form.
/// Throws InvalidArgument for p = inf.
double bracket_plus(const NodeFunction& z, const NodeFunction& k, Lp p);

struct SignParts {
  NodeFunction positive;  // max{0, g}
  NodeFunction negative;  // min{0, g}
};

SignParts sign_split(const NodeFunction& g);

/// sgn with sgn(0) = 0.
constexpr int sgn(double s) noexcept { return (s > 0.0) - (s < 0.0); }

}  // namespace gpme

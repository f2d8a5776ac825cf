#include "gpme/node_function.hpp"

#include <algorithm>
#include <cmath>

#include "gpme/error.hpp"
#include "gpme/summation.hpp"

namespace gpme {

namespace {

void check_finite(const NodeFunction::Map& values) {
  for (const auto& [id, value] : values) {
    if (!std::isfinite(value)) {
      throw InvalidArgument("non-finite value at node '" + id + "'");
    }
  }
}

// Merge two sorted maps, combining matching entries with op.
template <class Op>
NodeFunction::Map merge(const NodeFunction::Map& a, const NodeFunction::Map& b, Op op) {
  NodeFunction::Map out;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      out.emplace_hint(out.end(), ia->first, op(ia->second, 0.0));
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      out.emplace_hint(out.end(), ib->first, op(0.0, ib->second));
      ++ib;
    } else {
      out.emplace_hint(out.end(), ia->first, op(ia->second, ib->second));
      ++ia;
      ++ib;
    }
  }
  return out;
}

}  // namespace

NodeFunction::NodeFunction(Measure mu, Map values) : mu_(std::move(mu)), values_(std::move(values)) {
  check_finite(values_);
}

NodeFunction::NodeFunction(Measure mu, std::initializer_list<Map::value_type> values)
    : NodeFunction(std::move(mu), Map(values)) {}

double NodeFunction::operator()(const std::string& x) const {
  const auto it = values_.find(x);
  return it == values_.end() ? 0.0 : it->second;
}

NodeFunction NodeFunction::canonical() const {
  Map out;
  for (const auto& [id, value] : values_) {
    if (value != 0.0) out.emplace_hint(out.end(), id, value);
  }
  return NodeFunction(mu_, std::move(out));
}

std::vector<std::string> NodeFunction::support() const {
  std::vector<std::string> ids;
  for (const auto& [id, value] : values_) {
    if (value != 0.0) ids.push_back(id);
  }
  return ids;
}

bool NodeFunction::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](const auto& e) { return e.second == 0.0; });
}

bool NodeFunction::nonnegative() const {
  return std::all_of(values_.begin(), values_.end(), [](const auto& e) { return e.second >= 0.0; });
}

bool NodeFunction::nonpositive() const {
  return std::all_of(values_.begin(), values_.end(), [](const auto& e) { return e.second <= 0.0; });
}

NodeFunction NodeFunction::operator+(const NodeFunction& other) const {
  return NodeFunction(mu_, merge(values_, other.values_, [](double a, double b) { return a + b; }));
}

NodeFunction NodeFunction::operator-(const NodeFunction& other) const {
  return NodeFunction(mu_, merge(values_, other.values_, [](double a, double b) { return a - b; }));
}

NodeFunction NodeFunction::operator-() const { return map([](double s) { return -s; }); }

NodeFunction NodeFunction::operator*(double scale) const {
  return map([scale](double s) { return scale * s; });
}

NodeFunction NodeFunction::map(const std::function<double(double)>& fn) const {
  Map out;
  for (const auto& [id, value] : values_) out.emplace_hint(out.end(), id, fn(value));
  return NodeFunction(mu_, std::move(out));
}

bool operator==(const NodeFunction& a, const NodeFunction& b) {
  return a.canonical().values_ == b.canonical().values_;
}

double norm(const NodeFunction& f, Lp p) {
  const Measure& mu = f.measure();
  switch (p) {
    case Lp::one: {
      CompensatedSum acc;
      for (const auto& [id, value] : f.values()) {
        if (value != 0.0) acc += std::fabs(value) * mu(id);
      }
      return acc.value();
    }
    case Lp::two: {
      CompensatedSum acc;
      for (const auto& [id, value] : f.values()) {
        if (value != 0.0) acc += value * value * mu(id);
      }
      return std::sqrt(acc.value());
    }
    case Lp::inf: {
      double out = 0.0;
      for (const auto& [id, value] : f.values()) out = std::max(out, std::fabs(value));
      return out;
    }
  }
  return 0.0;
}

double bracket_plus(const NodeFunction& z, const NodeFunction& k, Lp p) {
  const Measure& mu = k.measure();
  if (p == Lp::two) {
    CompensatedSum acc;
    for (const auto& [id, kv] : k.values()) {
      if (kv != 0.0) acc += z(id) * kv * mu(id);
    }
    return acc.value();
  }
  if (p != Lp::one) throw InvalidArgument("bracket_plus supports only p = 1 and p = 2");

  CompensatedSum acc;
  for (const auto& [id, zv] : z.values()) {
    const double kv = k(id);
    if (kv == 0.0) {
      acc += std::fabs(zv) * mu(id);
    } else {
      acc += zv * sgn(kv) * mu(id);
    }
  }
  return norm(k, Lp::one) * acc.value();
}

SignParts sign_split(const NodeFunction& g) {
  return {g.map([](double s) { return std::max(0.0, s); }),
          g.map([](double s) { return std::min(0.0, s); })};
}

}  // namespace gpme

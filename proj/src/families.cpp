#include "gpme/families.hpp"

#include <charconv>
#include <cmath>

#include "gpme/error.hpp"

namespace gpme {

namespace {

std::optional<long long> parse_label(const std::string& x) {
  long long v = 0;
  const char* end = x.data() + x.size();
  const auto [ptr, ec] = std::from_chars(x.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  // Reject non-canonical spellings such as "007" or "-0".
  if (std::to_string(v) != x) return std::nullopt;
  return v;
}

double checked(double value, const char* what, long long n, bool strictly_positive) {
  if (!std::isfinite(value) || value < 0.0 || (strictly_positive && value == 0.0)) {
    throw InvalidArgument(std::string("profile ") + what + "(" + std::to_string(n) + ") = " +
                          std::to_string(value) + " is out of range");
  }
  return value;
}

class ChainFamily : public LazyGraph {
 public:
  explicit ChainFamily(ChainProfile profile, double max_degree_count)
      : p_(std::move(profile)) {
    const bool constant = p_.mu.is_constant() && p_.kappa.is_constant() && p_.w.is_constant();
    if (constant) {
      const double mu = p_.mu(0.0);
      if (!p_.mu_lower_bound) p_.mu_lower_bound = mu;
      if (!p_.deg_bound) p_.deg_bound = (max_degree_count * p_.w(0.0) + p_.kappa(0.0)) / mu;
    }
  }

  bool locally_finite() const override { return true; }
  std::optional<double> uniform_mu_lower_bound() const override { return p_.mu_lower_bound; }
  std::optional<double> uniform_deg_bound() const override { return p_.deg_bound; }

  std::vector<Neighbor> neighbors(const std::string& x, std::size_t offset, std::size_t limit) const override {
    const long long n = label(x);
    std::vector<Neighbor> out;
    const auto all_nb = adjacent(n);
    for (std::size_t k = offset; k < all_nb.size() && out.size() < limit; ++k) out.push_back(all_nb[k]);
    return out;
  }

  double weight(const std::string& x, const std::string& y) const override {
    const long long n = label(x);
    for (const Neighbor& nb : adjacent(n)) {
      if (nb.id == y) return nb.weight;
    }
    return 0.0;
  }

  double weight_sum(const std::string& x) const override {
    double s = 0.0;
    for (const Neighbor& nb : adjacent(label(x))) s += nb.weight;
    return s;
  }

 protected:
  long long label(const std::string& x) const {
    const auto n = parse_label(x);
    if (!n || !valid(*n)) throw UnknownNode(x);
    return *n;
  }
  virtual bool valid(long long n) const = 0;
  virtual std::vector<Neighbor> adjacent(long long n) const = 0;

  double mu_of(double n, long long label) const { return checked(p_.mu(n), "mu", label, true); }
  double kappa_of(double n, long long label) const { return checked(p_.kappa(n), "kappa", label, false); }
  double w_of(double n, long long label) const { return checked(p_.w(n), "w", label, false); }

  ChainProfile p_;
};

class HalfLine final : public ChainFamily {
 public:
  explicit HalfLine(ChainProfile p) : ChainFamily(std::move(p), 2.0) {}
  std::string name() const override { return "half_line"; }
  std::string root() const override { return "0"; }
  bool contains(const std::string& x) const override {
    const auto n = parse_label(x);
    return n && valid(*n);
  }
  double kappa(const std::string& x) const override {
    const long long n = label(x);
    return kappa_of(static_cast<double>(n), n);
  }
  double mu(const std::string& x) const override {
    const long long n = label(x);
    return mu_of(static_cast<double>(n), n);
  }
  std::optional<std::size_t> distance_to_root(const std::string& x) const override {
    return static_cast<std::size_t>(label(x));
  }

 private:
  bool valid(long long n) const override { return n >= 0; }
  std::vector<Neighbor> adjacent(long long n) const override {
    std::vector<Neighbor> out;
    if (n > 0) out.push_back({std::to_string(n - 1), w_of(static_cast<double>(n - 1), n - 1)});
    out.push_back({std::to_string(n + 1), w_of(static_cast<double>(n), n)});
    return out;
  }
};

class Lattice final : public ChainFamily {
 public:
  explicit Lattice(ChainProfile p) : ChainFamily(std::move(p), 2.0) {}
  std::string name() const override { return "integer_lattice_1d"; }
  std::string root() const override { return "0"; }
  bool contains(const std::string& x) const override { return parse_label(x).has_value(); }
  double kappa(const std::string& x) const override {
    const long long n = label(x);
    return kappa_of(static_cast<double>(n), n);
  }
  double mu(const std::string& x) const override {
    const long long n = label(x);
    return mu_of(static_cast<double>(n), n);
  }
  std::optional<std::size_t> distance_to_root(const std::string& x) const override {
    return static_cast<std::size_t>(std::llabs(label(x)));
  }

 private:
  bool valid(long long) const override { return true; }
  std::vector<Neighbor> adjacent(long long n) const override {
    return {{std::to_string(n - 1), w_of(static_cast<double>(n - 1), n - 1)},
            {std::to_string(n + 1), w_of(static_cast<double>(n), n)}};
  }
};

class BinaryTree final : public ChainFamily {
 public:
  explicit BinaryTree(ChainProfile p) : ChainFamily(std::move(p), 3.0) {}
  std::string name() const override { return "binary_tree"; }
  std::string root() const override { return "0"; }
  bool contains(const std::string& x) const override {
    const auto n = parse_label(x);
    return n && valid(*n);
  }
  double kappa(const std::string& x) const override {
    const long long n = label(x);
    return kappa_of(static_cast<double>(depth(n)), n);
  }
  double mu(const std::string& x) const override {
    const long long n = label(x);
    return mu_of(static_cast<double>(depth(n)), n);
  }
  std::optional<std::size_t> distance_to_root(const std::string& x) const override {
    return static_cast<std::size_t>(depth(label(x)));
  }

 private:
  static long long depth(long long n) {
    long long d = 0;
    while (n > 0) {
      n = (n - 1) / 2;
      ++d;
    }
    return d;
  }
  bool valid(long long n) const override { return n >= 0 && n < (1LL << 61); }
  std::vector<Neighbor> adjacent(long long n) const override {
    std::vector<Neighbor> out;
    const long long d = depth(n);
    if (n > 0) out.push_back({std::to_string((n - 1) / 2), w_of(static_cast<double>(d), n)});
    out.push_back({std::to_string(2 * n + 1), w_of(static_cast<double>(d + 1), 2 * n + 1)});
    out.push_back({std::to_string(2 * n + 2), w_of(static_cast<double>(d + 1), 2 * n + 2)});
    return out;
  }
};

class Star final : public LazyGraph {
 public:
  explicit Star(StarProfile p) : p_(p) {
    if (!(p_.w > 0.0) || !(p_.ratio > 0.0 && p_.ratio < 1.0)) {
      throw InvalidArgument("star_infinite needs w > 0 and 0 < ratio < 1");
    }
    if (!(p_.mu_center > 0.0) || !(p_.mu_leaf > 0.0) || !(p_.mu_ratio > 0.0) || !(p_.kappa >= 0.0)) {
      throw InvalidArgument("star_infinite needs positive measures and nonnegative kappa");
    }
  }

  std::string name() const override { return "star_infinite"; }
  std::string root() const override { return "c"; }
  bool contains(const std::string& x) const override { return x == "c" || leaf(x).has_value(); }

  std::vector<Neighbor> neighbors(const std::string& x, std::size_t offset, std::size_t limit) const override {
    std::vector<Neighbor> out;
    if (x == "c") {
      for (std::size_t k = offset + 1; out.size() < limit; ++k) {
        const double w = leaf_weight(static_cast<long long>(k));
        if (w == 0.0) break;  // underflow: the remaining weights are below double range
        out.push_back({std::to_string(k), w});
      }
      return out;
    }
    const long long k = require_leaf(x);
    if (offset == 0 && limit > 0) out.push_back({"c", leaf_weight(k)});
    return out;
  }

  double weight(const std::string& x, const std::string& y) const override {
    if (x == "c" && y != "c") return leaf(y) ? leaf_weight(*leaf(y)) : 0.0;
    if (y == "c" && x != "c") return leaf_weight(require_leaf(x));
    return 0.0;
  }

  double weight_sum(const std::string& x) const override {
    if (x == "c") return p_.w * p_.ratio / (1.0 - p_.ratio);
    return leaf_weight(require_leaf(x));
  }

  double kappa(const std::string& x) const override {
    if (x != "c") require_leaf(x);
    return p_.kappa;
  }

  double mu(const std::string& x) const override {
    if (x == "c") return p_.mu_center;
    return p_.mu_leaf * std::pow(p_.mu_ratio, static_cast<double>(require_leaf(x)));
  }

  std::optional<std::size_t> distance_to_root(const std::string& x) const override {
    if (x == "c") return 0;
    require_leaf(x);
    return 1;
  }

  bool locally_finite() const override { return false; }
  bool finite_neighborhood(const std::string& x) const override { return x != "c"; }

  std::optional<double> uniform_mu_lower_bound() const override {
    if (p_.mu_ratio < 1.0) return std::nullopt;
    return std::min(p_.mu_center, p_.mu_leaf * p_.mu_ratio);
  }

  std::optional<double> uniform_deg_bound() const override {
    const bool bounded = p_.ratio <= p_.mu_ratio && (p_.kappa == 0.0 || p_.mu_ratio >= 1.0);
    if (!bounded) return std::nullopt;
    const double centre = (weight_sum("c") + p_.kappa) / p_.mu_center;
    const double leaves = (p_.w * p_.ratio + p_.kappa) / (p_.mu_leaf * p_.mu_ratio);
    return std::max(centre, leaves);
  }

 private:
  static std::optional<long long> leaf(const std::string& x) {
    const auto k = parse_label(x);
    if (!k || *k < 1) return std::nullopt;
    return k;
  }
  long long require_leaf(const std::string& x) const {
    const auto k = leaf(x);
    if (!k) throw UnknownNode(x);
    return *k;
  }
  double leaf_weight(long long k) const { return p_.w * std::pow(p_.ratio, static_cast<double>(k)); }

  StarProfile p_;
};

}  // namespace

std::shared_ptr<const LazyGraph> half_line(const ChainProfile& profile) {
  return std::make_shared<const HalfLine>(profile);
}

std::shared_ptr<const LazyGraph> integer_lattice_1d(const ChainProfile& profile) {
  return std::make_shared<const Lattice>(profile);
}

std::shared_ptr<const LazyGraph> binary_tree(const ChainProfile& profile) {
  return std::make_shared<const BinaryTree>(profile);
}

std::shared_ptr<const LazyGraph> star_infinite(const StarProfile& profile) {
  return std::make_shared<const Star>(profile);
}

}  // namespace gpme

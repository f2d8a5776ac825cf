#pragma once

#include <functional>
#include <optional>
#include <string>

#include "gpme/node_function.hpp"

namespace gpme {

enum class Regime { heat, porous_medium, fast_diffusion, custom };

/// The scalar nonlinearity phi (strictly increasing, onto, phi(0) = 0) and its inverse psi.
class Nonlinearity {
 public:
  using Scalar = std::function<double(double)>;

  /// phi(s) = s|s|^{m-1}; throws InvalidArgument for m <= 0.
  static Nonlinearity power_law(double m);

  /// User-supplied pair; sampled for phi(0) = 0, monotonicity and psi(phi(s)) = s.
  /// Throws InvalidArgument when a sampled check fails.
  static Nonlinearity custom(Scalar phi, Scalar psi, std::optional<Scalar> phi_prime = std::nullopt,
                             std::optional<double> global_lipschitz = std::nullopt,
                             std::string description = "custom");

  double phi(double s) const { return phi_(s); }
  double psi(double s) const { return psi_(s); }
  bool has_phi_prime() const noexcept { return static_cast<bool>(phi_prime_); }
  double phi_prime(double s) const;

  Regime regime() const noexcept { return regime_; }
  /// Exponent for power laws.
  std::optional<double> exponent() const noexcept { return m_; }
  std::optional<double> global_lipschitz() const noexcept { return lipschitz_; }
  /// True when phi is Lipschitz on every bounded interval (power laws with m >= 1).
  bool locally_lipschitz() const noexcept;
  const std::string& description() const noexcept { return description_; }

 private:
  Nonlinearity() = default;

  Scalar phi_;
  Scalar psi_;
  Scalar phi_prime_;
  Regime regime_ = Regime::custom;
  std::optional<double> m_;
  std::optional<double> lipschitz_;
  std::string description_;
};

/// (Phi u)(x) = phi(u(x)).
NodeFunction extend_phi(const Nonlinearity& nl, const NodeFunction& u);
/// (Psi v)(x) = psi(v(x)).
NodeFunction extend_psi(const Nonlinearity& nl, const NodeFunction& v);

}  // namespace gpme

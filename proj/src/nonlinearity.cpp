#include "gpme/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "gpme/error.hpp"

namespace gpme {

namespace {

// Symmetric log-spaced samples in [-1e3, 1e3] plus 0.
std::vector<double> probe_points() {
  std::vector<double> pts{0.0};
  for (int e = -24; e <= 12; ++e) {
    const double s = std::pow(10.0, e / 4.0);
    pts.push_back(s);
    pts.push_back(-s);
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace

Nonlinearity Nonlinearity::power_law(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("power law exponent must be positive");
  Nonlinearity nl;
  nl.m_ = m;
  std::ostringstream desc;
  desc << "power_law(m=" << m << ")";
  nl.description_ = desc.str();
  if (m == 1.0) {
    nl.phi_ = [](double s) { return s; };
    nl.psi_ = [](double s) { return s; };
    nl.phi_prime_ = [](double) { return 1.0; };
    nl.regime_ = Regime::heat;
    nl.lipschitz_ = 1.0;
    return nl;
  }
  const double inv = 1.0 / m;
  nl.phi_ = [m](double s) { return std::copysign(std::pow(std::fabs(s), m), s); };
  nl.psi_ = [inv](double s) { return std::copysign(std::pow(std::fabs(s), inv), s); };
  nl.phi_prime_ = [m](double s) { return m * std::pow(std::fabs(s), m - 1.0); };
  nl.regime_ = m > 1.0 ? Regime::porous_medium : Regime::fast_diffusion;
  return nl;
}

Nonlinearity Nonlinearity::custom(Scalar phi, Scalar psi, std::optional<Scalar> phi_prime,
                                  std::optional<double> global_lipschitz, std::string description) {
  if (!phi || !psi) throw InvalidArgument("custom nonlinearity needs both phi and psi");
  if (phi(0.0) != 0.0) throw InvalidArgument("custom phi must satisfy phi(0) = 0");
  if (psi(0.0) != 0.0) throw InvalidArgument("custom psi must satisfy psi(0) = 0");
  const auto pts = probe_points();
  double prev = -INFINITY;
  for (double s : pts) {
    const double p = phi(s);
    if (!std::isfinite(p)) throw InvalidArgument("custom phi is not finite at s = " + std::to_string(s));
    if (!(p > prev)) throw InvalidArgument("custom phi is not strictly increasing near s = " + std::to_string(s));
    prev = p;
    const double back = psi(p);
    if (!(std::fabs(back - s) <= 1e-12 * std::fabs(s) + 1e-300)) {
      throw InvalidArgument("custom psi is not the inverse of phi at s = " + std::to_string(s));
    }
  }
  Nonlinearity nl;
  nl.phi_ = std::move(phi);
  nl.psi_ = std::move(psi);
  if (phi_prime) nl.phi_prime_ = std::move(*phi_prime);
  nl.lipschitz_ = global_lipschitz;
  nl.regime_ = Regime::custom;
  nl.description_ = std::move(description);
  return nl;
}

double Nonlinearity::phi_prime(double s) const {
  if (!phi_prime_) throw InvalidArgument("nonlinearity has no derivative");
  return phi_prime_(s);
}

bool Nonlinearity::locally_lipschitz() const noexcept {
  if (lipschitz_) return true;
  return m_ && *m_ >= 1.0;
}

NodeFunction extend_phi(const Nonlinearity& nl, const NodeFunction& u) {
  return u.map([&nl](double s) { return nl.phi(s); });
}

NodeFunction extend_psi(const Nonlinearity& nl, const NodeFunction& v) {
  return v.map([&nl](double s) { return nl.psi(s); });
}

}  // namespace gpme

#include "gpme/oracle.hpp"

#include <cmath>
#include <set>

#include "gpme/error.hpp"

namespace gpme::oracle {

DenseOperator assemble_dense(const Graph& graph) {
  const std::size_t n = graph.size();
  if (n > kMaxDenseNodes) {
    throw InvalidArgument("dense oracle is limited to " + std::to_string(kMaxDenseNodes) + " nodes");
  }
  DenseOperator out;
  out.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (NodeIndex i = 0; i < n; ++i) {
    out.nodes.push_back(graph.id(i));
    out.mu.push_back(graph.mu(i));
  }
  std::vector<long double> diag(n, 0.0L);
  for (const Edge& e : graph.edges()) {
    const auto u = static_cast<Eigen::Index>(e.u);
    const auto v = static_cast<Eigen::Index>(e.v);
    out.matrix(u, v) -= e.w / out.mu[e.u];
    out.matrix(v, u) -= e.w / out.mu[e.v];
    diag[e.u] += e.w;
    diag[e.v] += e.w;
  }
  for (NodeIndex i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out.matrix(ii, ii) = static_cast<double>((diag[i] + graph.kappa(i)) / out.mu[i]);
  }
  return out;
}

NodeFunction expm_apply(const DenseOperator& M, double t, const NodeFunction& u0) {
  if (t == 0.0) return u0;
  const auto n = static_cast<Eigen::Index>(M.nodes.size());
  Eigen::VectorXd sqrt_mu(n);
  for (Eigen::Index i = 0; i < n; ++i) sqrt_mu[i] = std::sqrt(M.mu[static_cast<std::size_t>(i)]);
  // S = D^{1/2} M D^{-1/2} is symmetric because mu_i M_ij = -w_ij = mu_j M_ji.
  Eigen::MatrixXd S = sqrt_mu.asDiagonal() * M.matrix * sqrt_mu.cwiseInverse().asDiagonal();
  S = 0.5 * (S + S.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = u0(M.nodes[static_cast<std::size_t>(i)]) * sqrt_mu[i];
  const Eigen::VectorXd decay = (-t * eig.eigenvalues().array()).exp().matrix();
  const Eigen::VectorXd y = eig.eigenvectors() * decay.asDiagonal() * (eig.eigenvectors().transpose() * x);
  NodeFunction::Map values;
  for (Eigen::Index i = 0; i < n; ++i) values.emplace(M.nodes[static_cast<std::size_t>(i)], y[i] / sqrt_mu[i]);
  return NodeFunction(u0.measure(), std::move(values));
}

double brute_resolvent_1d(double kappa, double mu, const Nonlinearity& nl, double lambda, double g) {
  if (g == 0.0 || kappa == 0.0) return g;
  const double c = lambda * kappa / mu;
  auto F = [&](double u) { return u + c * nl.phi(u) - g; };
  // |u| <= |g| since phi(u) has the sign of u.
  double a = std::min(0.0, g);
  double b = std::max(0.0, g);
  constexpr int kGrid = 1000;
  double prev = a;
  double f_prev = F(a);
  for (int i = 1; i <= kGrid; ++i) {
    const double x = a + (b - a) * i / kGrid;
    const double fx = F(x);
    if (f_prev == 0.0) return prev;
    if ((f_prev < 0.0) != (fx < 0.0) || fx == 0.0) {
      a = prev;
      b = x;
      break;
    }
    prev = x;
    f_prev = fx;
  }
  double fa = F(a);
  while (b - a > 1e-12 * std::max(1.0, std::fabs(g))) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    const double fm = F(m);
    if (fm == 0.0) return m;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> bracket_by_limit(const NodeFunction& z, const NodeFunction& k, const std::vector<double>& lambdas) {
  std::set<std::string> nodes;
  for (const auto& [id, value] : z.values()) nodes.insert(id);
  for (const auto& [id, value] : k.values()) nodes.insert(id);
  const Measure& mu = k.measure();
  long double k_norm = 0.0L;
  for (const auto& x : nodes) k_norm += std::fabs(static_cast<long double>(k(x))) * mu(x);
  if (k_norm == 0.0L) throw InvalidArgument("bracket_by_limit needs k != 0");
  std::vector<double> out;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    long double perturbed = 0.0L;
    for (const auto& x : nodes) {
      perturbed += std::fabs(static_cast<long double>(k(x)) + static_cast<long double>(lambda) * z(x)) * mu(x);
    }
    out.push_back(static_cast<double>(k_norm * (perturbed - k_norm) / lambda));
  }
  return out;
}

}  // namespace gpme::oracle

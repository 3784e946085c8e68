#ifndef QANM_OBJECTIVE_HPP_
#define QANM_OBJECTIVE_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace qanm {

// One node's local sensor-fusion cost
//   f(x) = 1/2 * omega * (x - anchor)' P (x - anchor)
// with P symmetric positive definite. Curvature constants are derived once at
// construction from the extreme eigenvalues of omega*P:
//   mu = omega * lambda_min(P), L = omega * lambda_max(P),
//   kappa = L / mu, beta = (sqrt(kappa) - 1) / (sqrt(kappa) + 1).
class QuadraticObjective {
 public:
  QuadraticObjective(double omega, Eigen::MatrixXd p_matrix, Eigen::VectorXd anchor);

  double evaluate(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;

  double omega() const { return omega_; }
  const Eigen::MatrixXd& p_matrix() const { return p_; }
  const Eigen::VectorXd& anchor() const { return anchor_; }
  Eigen::Index dim() const { return anchor_.size(); }

  double strong_convexity() const { return mu_; }    // mu
  double smoothness() const { return smoothness_; }  // L
  double condition_number() const { return kappa_; }
  double momentum_coefficient() const { return beta_; }

 private:
  double omega_;
  Eigen::MatrixXd p_;
  Eigen::VectorXd anchor_;
  double mu_;
  double smoothness_;
  double kappa_;
  double beta_;
};

// Network-wide constants used by the convergence certificate:
// smoothness = mean of L_i, strong_convexity = min of mu_i,
// beta_hat = mean momentum coefficient, beta_tilde = max |beta_hat - beta_i|.
struct GlobalConstants {
  double smoothness = 0.0;
  double strong_convexity = 0.0;
  double beta_hat = 0.0;
  double beta_tilde = 0.0;
};

// Per-node momentum coefficients, optionally overridden by a uniform value
// (0 reproduces the non-momentum baseline).
std::vector<double> momentum_coefficients(const std::vector<QuadraticObjective>& objectives,
                                          std::optional<double> override_beta);

GlobalConstants global_constants(const std::vector<QuadraticObjective>& objectives,
                                 const std::vector<double>& betas);

// Exact minimizer of the summed cost via a symmetric direct solve:
//   x* = (sum omega_i P_i)^{-1} sum omega_i P_i anchor_i.
Eigen::VectorXd global_optimum(const std::vector<QuadraticObjective>& objectives);

enum class Scenario {
  kShared,        // every node uses the common diagonal weight matrix
  kPersonalized,  // common matrix plus a node-specific Gaussian perturbation
};

// Builds the n local objectives for a fusion experiment. The shared matrix is
// diag(2^-(dim-1), ..., 1/2, 1); the personalized variant adds Pn' * Pn with
// Pn entries drawn from N(0, 0.1). Node weights omega_i and anchor components
// are drawn uniformly from {1, ..., 5}. Deterministic for a fixed seed.
std::vector<QuadraticObjective> build_scenario_objectives(Scenario scenario, int n,
                                                          int dim, std::uint64_t seed);

}  // namespace qanm

#endif  // QANM_OBJECTIVE_HPP_

#include "qanm/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qanm/errors.hpp"
#include "qanm/rng.hpp"

namespace qanm {

namespace {

bool is_diagonal(const Eigen::MatrixXd& p) {
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      if (i != j && p(i, j) != 0.0) return false;
    }
  }
  return true;
}

void check_dim(const QuadraticObjective& obj, const Eigen::VectorXd& x) {
  if (x.size() != obj.dim()) {
    throw std::invalid_argument("state dimension " + std::to_string(x.size()) +
                                " does not match objective dimension " +
                                std::to_string(obj.dim()));
  }
}

}  // namespace

QuadraticObjective::QuadraticObjective(double omega, Eigen::MatrixXd p_matrix,
                                       Eigen::VectorXd anchor)
    : omega_(omega), p_(std::move(p_matrix)), anchor_(std::move(anchor)) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument("objective weight must be positive");
  }
  if (p_.rows() != p_.cols() || p_.rows() != anchor_.size() || p_.rows() == 0) {
    throw std::invalid_argument("weight matrix must be square and match the anchor dimension");
  }
  const double scale = p_.cwiseAbs().maxCoeff();
  if ((p_ - p_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0)) {
    throw std::invalid_argument("weight matrix is not symmetric");
  }

  double lambda_min = 0.0;
  double lambda_max = 0.0;
  if (is_diagonal(p_)) {
    lambda_min = p_.diagonal().minCoeff();
    lambda_max = p_.diagonal().maxCoeff();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(p_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw NumericError("eigenvalue computation for the weight matrix failed");
    }
    lambda_min = solver.eigenvalues().minCoeff();
    lambda_max = solver.eigenvalues().maxCoeff();
  }
  if (!(lambda_min > 0.0)) {
    throw std::invalid_argument("weight matrix is not positive definite (lambda_min = " +
                                std::to_string(lambda_min) + ")");
  }
  mu_ = omega_ * lambda_min;
  smoothness_ = omega_ * lambda_max;
  kappa_ = smoothness_ / mu_;
  const double root = std::sqrt(kappa_);
  beta_ = (root - 1.0) / (root + 1.0);
}

double QuadraticObjective::evaluate(const Eigen::VectorXd& x) const {
  check_dim(*this, x);
  const Eigen::VectorXd d = x - anchor_;
  return 0.5 * omega_ * d.dot(p_ * d);
}

Eigen::VectorXd QuadraticObjective::gradient(const Eigen::VectorXd& x) const {
  check_dim(*this, x);
  return omega_ * (p_ * (x - anchor_));
}

std::vector<double> momentum_coefficients(const std::vector<QuadraticObjective>& objectives,
                                          std::optional<double> override_beta) {
  std::vector<double> betas;
  betas.reserve(objectives.size());
  for (const auto& obj : objectives) {
    betas.push_back(override_beta ? *override_beta : obj.momentum_coefficient());
  }
  return betas;
}

GlobalConstants global_constants(const std::vector<QuadraticObjective>& objectives,
                                 const std::vector<double>& betas) {
  if (objectives.empty() || objectives.size() != betas.size()) {
    throw std::invalid_argument("need one momentum coefficient per objective");
  }
  GlobalConstants g;
  double sum_l = 0.0;
  double min_mu = objectives.front().strong_convexity();
  double sum_beta = 0.0;
  bool betas_equal = true;
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    sum_l += objectives[i].smoothness();
    min_mu = std::min(min_mu, objectives[i].strong_convexity());
    sum_beta += betas[i];
    betas_equal = betas_equal && betas[i] == betas.front();
  }
  const double n = static_cast<double>(objectives.size());
  g.smoothness = sum_l / n;
  g.strong_convexity = min_mu;
  // The mean of identical coefficients is kept exact so that beta_tilde is
  // exactly zero whenever every node uses the same momentum.
  g.beta_hat = betas_equal ? betas.front() : sum_beta / n;
  g.beta_tilde = 0.0;
  for (double beta : betas) {
    g.beta_tilde = std::max(g.beta_tilde, std::abs(g.beta_hat - beta));
  }
  return g;
}

Eigen::VectorXd global_optimum(const std::vector<QuadraticObjective>& objectives) {
  if (objectives.empty()) {
    throw std::invalid_argument("cannot optimize an empty objective list");
  }
  const Eigen::Index p = objectives.front().dim();
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  for (const auto& obj : objectives) {
    if (obj.dim() != p) {
      throw std::invalid_argument("objectives disagree on the state dimension");
    }
    lhs += obj.omega() * obj.p_matrix();
    rhs += obj.omega() * (obj.p_matrix() * obj.anchor());
  }
  Eigen::LDLT<Eigen::MatrixXd> solver(lhs);
  if (solver.info() != Eigen::Success) {
    throw NumericError("summed weight matrix is numerically singular");
  }
  return solver.solve(rhs);
}

std::vector<QuadraticObjective> build_scenario_objectives(Scenario scenario, int n,
                                                          int dim, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("scenario needs at least one node");
  if (dim < 1) throw std::invalid_argument("scenario needs dimension >= 1");
  Eigen::MatrixXd common = Eigen::MatrixXd::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) {
    common(j, j) = std::ldexp(1.0, j - (dim - 1));  // 2^-(dim-1), ..., 1/2, 1
  }
  Rng rng(seed);
  std::vector<QuadraticObjective> objectives;
  objectives.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double omega = static_cast<double>(rng.uniform_int(1, 5));
    Eigen::VectorXd anchor(dim);
    for (int j = 0; j < dim; ++j) {
      anchor[j] = static_cast<double>(rng.uniform_int(1, 5));
    }
    Eigen::MatrixXd p = common;
    if (scenario == Scenario::kPersonalized) {
      Eigen::MatrixXd perturbation(dim, dim);
      for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
          perturbation(r, c) = rng.normal(0.0, 0.1);
        }
      }
      p += perturbation.transpose() * perturbation;
    }
    objectives.emplace_back(omega, std::move(p), std::move(anchor));
  }
  return objectives;
}

}  // namespace qanm

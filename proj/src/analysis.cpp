#include "qanm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qanm/errors.hpp"
#include "qanm/rng.hpp"

namespace qanm {

ConvergenceCertificate compute_certificate(const GlobalConstants& constants,
                                           double alpha, int n) {
  if (!(constants.strong_convexity > 0.0) || !(constants.smoothness > 0.0)) {
    throw std::invalid_argument("certificate needs positive curvature constants");
  }
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("certificate needs a positive step size");
  }
  if (n < 1) throw std::invalid_argument("certificate needs n >= 1");

  ConvergenceCertificate cert;
  const double mu = constants.strong_convexity;
  const double big_l = constants.smoothness;
  cert.eta = 1.0 - mu * alpha / static_cast<double>(n);
  cert.b = cert.eta * constants.beta_hat + alpha * big_l * constants.beta_tilde;
  if (cert.b == 0.0) {
    cert.c = 0.0;  // degenerate roots: t^2 - eta*t = 0
    cert.d = cert.eta;
  } else {
    const double s = cert.eta + cert.b;
    const double root = std::sqrt(s * s + 4.0 * cert.b);
    cert.c = 0.5 * (-s + root);
    cert.d = 0.5 * (s + root);
  }
  cert.condition_holds = cert.b < mu * alpha / (2.0 * static_cast<double>(n));
  cert.d_in_unit = cert.d > 0.0 && cert.d < 1.0;
  cert.step_size_ok = alpha <= 2.0 / (mu + big_l);
  return cert;
}

double error_metric(const std::vector<Eigen::VectorXd>& states,
                    const std::vector<Eigen::VectorXd>& initial_states,
                    const Eigen::VectorXd& x_star) {
  if (states.empty() || states.size() != initial_states.size()) {
    throw std::invalid_argument("error metric needs matching state lists");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double denom = (initial_states[i] - x_star).norm();
    if (denom == 0.0) {
      throw std::invalid_argument("degenerate normalization: node " + std::to_string(i) +
                                  " starts exactly at the optimum");
    }
    sum += (states[i] - x_star).norm() / denom;
  }
  return std::sqrt(sum / static_cast<double>(states.size()));
}

double lyapunov_value(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prev,
                      const Eigen::VectorXd& x_star,
                      const ConvergenceCertificate& certificate, double delta, int p) {
  if (certificate.d == 1.0) {
    throw std::invalid_argument("degenerate certificate: d == 1");
  }
  const double correction =
      2.0 * std::sqrt(static_cast<double>(p)) * delta / (certificate.d - 1.0);
  return (x - x_star).norm() + certificate.c * (x_prev - x_star).norm() + correction;
}

double consensus_gap(const std::vector<Eigen::VectorXd>& pre_consensus,
                     const std::vector<Eigen::VectorXd>& post_consensus) {
  if (pre_consensus.empty() || pre_consensus.size() != post_consensus.size()) {
    throw std::invalid_argument("consensus gap needs matching nonempty lists");
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(pre_consensus.front().size());
  for (const auto& z : pre_consensus) {
    if (z.size() != mean.size()) throw std::invalid_argument("dimension mismatch");
    mean += z;
  }
  mean /= static_cast<double>(pre_consensus.size());
  double gap = 0.0;
  for (const auto& x : post_consensus) {
    if (x.size() != mean.size()) throw std::invalid_argument("dimension mismatch");
    gap = std::max(gap, (x - mean).norm());
  }
  return gap;
}

ContractionReport contraction_check(const std::vector<QuadraticObjective>& objectives,
                                    double theta, int trials, std::uint64_t seed) {
  if (objectives.empty()) throw std::invalid_argument("contraction check needs objectives");
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  for (const auto& obj : objectives) {
    const double limit = 2.0 / (obj.strong_convexity() + obj.smoothness());
    if (theta > limit) {
      throw std::invalid_argument("theta " + std::to_string(theta) +
                                  " exceeds 2/(mu+L) = " + std::to_string(limit));
    }
  }
  Rng rng(seed);
  ContractionReport report;
  report.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const auto& obj =
        objectives[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(objectives.size()) - 1))];
    Eigen::VectorXd x1(obj.dim());
    Eigen::VectorXd x2(obj.dim());
    for (Eigen::Index j = 0; j < obj.dim(); ++j) {
      x1[j] = rng.uniform(-10.0, 10.0);
      x2[j] = rng.uniform(-10.0, 10.0);
    }
    const double dist = (x1 - x2).norm();
    if (dist == 0.0) continue;
    const double lhs = (x1 - x2 - theta * (obj.gradient(x1) - obj.gradient(x2))).norm();
    const double rhs = (1.0 - obj.strong_convexity() * theta) * dist;
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? HUGE_VAL : 0.0);
    report.worst_ratio = std::max(report.worst_ratio, ratio);
    if (ratio > 1.0 + 1e-12) report.all_within = false;
  }
  return report;
}

}  // namespace qanm

#ifndef QANM_ANALYSIS_HPP_
#define QANM_ANALYSIS_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qanm/objective.hpp"

namespace qanm {

// Constants of the two-term linear convergence recursion. With
//   eta = 1 - mu*alpha/n,  b = eta*beta_hat + alpha*L*beta_tilde,
// c and d are the magnitudes of the roots of t^2 - (eta+b)t - b = 0, so that
// the distance recursion contracts with rate d whenever b < mu*alpha/(2n).
struct ConvergenceCertificate {
  double eta = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  bool condition_holds = false;  // b < mu*alpha/(2n)
  bool d_in_unit = false;        // 0 < d < 1
  bool step_size_ok = false;     // alpha <= 2/(mu + L)
};

ConvergenceCertificate compute_certificate(const GlobalConstants& constants,
                                           double alpha, int n);

// e = sqrt( (1/n) * sum_i ||x_i - x*|| / ||x_i(0) - x*|| ). Exactly 1 when
// states == initial_states; throws when any initial distance is zero.
double error_metric(const std::vector<Eigen::VectorXd>& states,
                    const std::vector<Eigen::VectorXd>& initial_states,
                    const Eigen::VectorXd& x_star);

// xi = ||x - x*|| + c*||x_prev - x*|| + (1/(d-1)) * 2*sqrt(p)*delta.
// Throws when d == 1 (degenerate correction term).
double lyapunov_value(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prev,
                      const Eigen::VectorXd& x_star,
                      const ConvergenceCertificate& certificate, double delta, int p);

// max_i || x_i - mean(z) || between the pre-consensus vectors z and the
// post-consensus states x.
double consensus_gap(const std::vector<Eigen::VectorXd>& pre_consensus,
                     const std::vector<Eigen::VectorXd>& post_consensus);

struct ContractionReport {
  int trials = 0;
  double worst_ratio = 0.0;  // max over trials of lhs / ((1 - mu*theta) * ||x1 - x2||)
  bool all_within = true;    // every ratio <= 1 + 1e-12
};

// Gradient-map contraction: for random pairs (x1, x2) and objectives drawn
// from the ensemble, verifies
//   ||x1 - x2 - theta*(grad f(x1) - grad f(x2))|| <= (1 - mu*theta)*||x1 - x2||.
// Requires theta <= 2/(mu_i + L_i) for every ensemble member.
ContractionReport contraction_check(const std::vector<QuadraticObjective>& objectives,
                                    double theta, int trials, std::uint64_t seed);

// Per-iteration record of one optimizer run.
struct IterationRecord {
  int k = 0;
  double error = 0.0;          // e, the normalized error metric
  double consensus_gap = 0.0;  // max_i ||x_i - mean(z)||
  double lyapunov = 0.0;       // xi (max over nodes where they differ)
  long rounds = 0;             // consensus rounds used this iteration
  long long tokens = 0;        // tokens sent this iteration
  long long bits_estimate = 0;
  double distance = 0.0;       // ||x - x*|| (common across nodes after consensus)
  double spread_margin = 0.0;  // max_i (||s_hat - s_i|| - beta_tilde*||m_i||)
};

struct ConvergenceTrace {
  std::vector<IterationRecord> iterations;
  ConvergenceCertificate certificate;
  GlobalConstants constants;
  Eigen::VectorXd x_star;
  double final_mean_distance = 0.0;
  long long stop_broadcasts = 0;
};

}  // namespace qanm

#endif  // QANM_ANALYSIS_HPP_

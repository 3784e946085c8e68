#ifndef QANM_OPTIMIZER_HPP_
#define QANM_OPTIMIZER_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qanm/analysis.hpp"
#include "qanm/consensus.hpp"
#include "qanm/digraph.hpp"
#include "qanm/objective.hpp"
#include "qanm/quantize.hpp"

namespace qanm {

// Per-node optimizer state across outer iterations.
struct QanmNodeState {
  Eigen::VectorXd x;          // current estimate
  Eigen::VectorXd x_prev;     // previous estimate (equals x at k = 0)
  Eigen::VectorXd look_ahead; // s, the extrapolated evaluation point
  Eigen::VectorXd step;       // z, the local gradient-step result sent to consensus
  double beta = 0.0;          // momentum coefficient in effect
};

struct QanmConfig {
  double alpha = 0.12;
  QuantizationLevel delta{1e-6};
  int max_outer_iterations = 100;
  std::optional<double> momentum_override;  // 0 reproduces the non-momentum baseline
  std::uint64_t seed = 0;                   // base of the per-iteration consensus streams
  double error_floor = 0.0;                 // stop early once e <= floor (0 disables)
  long consensus_round_budget = kDefaultRoundBudget;
};

// Extrapolated evaluation point x + beta*(x - x_prev).
Eigen::VectorXd look_ahead(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prev,
                           double beta);

// s - alpha * grad f(s); throws NumericError on non-finite gradients.
Eigen::VectorXd gradient_step(const Eigen::VectorXd& s, const QuadraticObjective& objective,
                              double alpha);

// Consensus stream for outer iteration k, derived so that traces reproduce and
// inner randomness is independent across iterations.
std::uint64_t consensus_seed(std::uint64_t base, int k);

struct OuterStepStats {
  long rounds = 0;
  long long tokens = 0;
  long long bits_estimate = 0;
  long long stop_broadcasts = 0;
};

// One full outer iteration: local look-ahead and gradient step on every node,
// quantization to lattice integers, one complete consensus instance, then the
// state shift. On return every node's x is the identical consensus output.
// When pre_consensus is non-null it receives the real-valued z vectors.
OuterStepStats outer_iteration(std::vector<QanmNodeState>& states,
                               const std::vector<QuadraticObjective>& objectives,
                               double alpha, QuantizationLevel delta, const Digraph& graph,
                               std::uint64_t seed, long round_budget,
                               std::vector<Eigen::VectorXd>* pre_consensus = nullptr);

// Runs the full accelerated loop and records per-iteration diagnostics.
// Two bounds are verified on every iteration and throw ProtocolError when
// violated: the consensus gap max_i ||x_i - mean(z)|| <= 2*sqrt(p)*delta, and
// (from the second iteration on, where all previous estimates agree) the
// look-ahead spread ||mean(s) - s_i|| <= beta_tilde * ||x_i - x_prev_i||.
ConvergenceTrace run_qanm(const QanmConfig& config, const Digraph& graph,
                          const std::vector<QuadraticObjective>& objectives,
                          const std::vector<Eigen::VectorXd>& initial_states);

}  // namespace qanm

#endif  // QANM_OPTIMIZER_HPP_

#include "qanm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qanm/errors.hpp"
#include "qanm/rng.hpp"

namespace qanm {

Eigen::VectorXd look_ahead(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prev,
                           double beta) {
  return x + beta * (x - x_prev);
}

Eigen::VectorXd gradient_step(const Eigen::VectorXd& s, const QuadraticObjective& objective,
                              double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("step size must be positive");
  Eigen::VectorXd g = objective.gradient(s);
  if (!g.allFinite()) throw NumericError("non-finite gradient during descent step");
  return s - alpha * g;
}

std::uint64_t consensus_seed(std::uint64_t base, int k) {
  return mix_seed(base, static_cast<std::uint64_t>(k));
}

OuterStepStats outer_iteration(std::vector<QanmNodeState>& states,
                               const std::vector<QuadraticObjective>& objectives,
                               double alpha, QuantizationLevel delta, const Digraph& graph,
                               std::uint64_t seed, long round_budget,
                               std::vector<Eigen::VectorXd>* pre_consensus) {
  const std::size_t n = states.size();
  if (n == 0 || n != objectives.size() ||
      static_cast<int>(n) != graph.node_count()) {
    throw std::invalid_argument("states, objectives and graph disagree on the node count");
  }

  std::vector<std::vector<std::int64_t>> lattice_inputs(n);
  for (std::size_t i = 0; i < n; ++i) {
    QanmNodeState& st = states[i];
    st.look_ahead = look_ahead(st.x, st.x_prev, st.beta);
    st.step = gradient_step(st.look_ahead, objectives[i], alpha);
    lattice_inputs[i] = to_lattice(st.step, delta);
  }
  if (pre_consensus) {
    pre_consensus->clear();
    for (const auto& st : states) pre_consensus->push_back(st.step);
  }

  const ConsensusResult consensus =
      run_consensus(lattice_inputs, graph, delta, seed, round_budget);
  for (std::size_t i = 0; i < n; ++i) {
    states[i].x_prev = states[i].x;
    states[i].x = consensus.outputs[i];
  }

  OuterStepStats stats;
  stats.rounds = consensus.rounds;
  stats.tokens = consensus.stats.tokens_sent;
  stats.bits_estimate = consensus.stats.bits_estimate;
  stats.stop_broadcasts = consensus.stats.stop_broadcasts;
  return stats;
}

ConvergenceTrace run_qanm(const QanmConfig& config, const Digraph& graph,
                          const std::vector<QuadraticObjective>& objectives,
                          const std::vector<Eigen::VectorXd>& initial_states) {
  const std::size_t n = objectives.size();
  if (n == 0 || initial_states.size() != n ||
      static_cast<int>(n) != graph.node_count()) {
    throw std::invalid_argument("objectives, initial states and graph disagree on the node count");
  }
  if (config.max_outer_iterations < 1) {
    throw std::invalid_argument("need at least one outer iteration");
  }
  const Eigen::Index p = objectives.front().dim();
  for (const auto& x0 : initial_states) {
    if (x0.size() != p) throw std::invalid_argument("initial state dimension mismatch");
  }

  const std::vector<double> betas = momentum_coefficients(objectives, config.momentum_override);

  ConvergenceTrace trace;
  trace.constants = global_constants(objectives, betas);
  trace.certificate = compute_certificate(trace.constants, config.alpha, static_cast<int>(n));
  trace.x_star = global_optimum(objectives);
  trace.iterations.reserve(static_cast<std::size_t>(config.max_outer_iterations));

  double max_initial_distance = 0.0;
  for (const auto& x0 : initial_states) {
    const double dist = (x0 - trace.x_star).norm();
    if (dist == 0.0) {
      throw std::invalid_argument("a node starts exactly at the optimum; "
                                  "the normalized error metric is undefined");
    }
    max_initial_distance = std::max(max_initial_distance, dist);
  }

  std::vector<QanmNodeState> states(n);
  for (std::size_t i = 0; i < n; ++i) {
    states[i].x = initial_states[i];
    states[i].x_prev = initial_states[i];
    states[i].beta = betas[i];
  }

  const double gap_bound =
      2.0 * std::sqrt(static_cast<double>(p)) * config.delta.value();
  // xi is undefined at d == 1; record NaN there instead of aborting the run.
  const double xi_correction =
      trace.certificate.d == 1.0
          ? std::numeric_limits<double>::quiet_NaN()
          : 2.0 * std::sqrt(static_cast<double>(p)) * config.delta.value() /
                (trace.certificate.d - 1.0);
  double prev_distance = max_initial_distance;  // worst-case ||x - x*|| at k-1

  std::vector<Eigen::VectorXd> pre_consensus;
  std::vector<Eigen::VectorXd> momentum_diffs(n);
  std::vector<Eigen::VectorXd> current(n);
  for (int k = 1; k <= config.max_outer_iterations; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      momentum_diffs[i] = states[i].x - states[i].x_prev;
    }
    const OuterStepStats step_stats =
        outer_iteration(states, objectives, config.alpha, config.delta, graph,
                        consensus_seed(config.seed, k), config.consensus_round_budget,
                        &pre_consensus);

    for (std::size_t i = 0; i < n; ++i) current[i] = states[i].x;

    IterationRecord record;
    record.k = k;
    record.rounds = step_stats.rounds;
    record.tokens = step_stats.tokens;
    record.bits_estimate = step_stats.bits_estimate;
    trace.stop_broadcasts += step_stats.stop_broadcasts;

    record.consensus_gap = consensus_gap(pre_consensus, current);
    if (record.consensus_gap > gap_bound) {
      throw ProtocolError("consensus gap " + std::to_string(record.consensus_gap) +
                          " exceeds 2*sqrt(p)*delta = " + std::to_string(gap_bound) +
                          " at iteration " + std::to_string(k));
    }

    // Look-ahead spread against beta_tilde * ||x - x_prev||, using the
    // momentum differences that actually entered this iteration's look-ahead.
    // Enforced only once both estimates feeding the look-ahead are consensus
    // outputs (k >= 3); earlier iterations mix node-specific initial states,
    // where the bound does not follow, so they are recorded but not asserted.
    {
      Eigen::VectorXd mean_s = Eigen::VectorXd::Zero(p);
      for (const auto& st : states) mean_s += st.look_ahead;
      mean_s /= static_cast<double>(n);
      double margin = -HUGE_VAL;
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double spread = (mean_s - states[i].look_ahead).norm();
        const double allowance = trace.constants.beta_tilde * momentum_diffs[i].norm();
        margin = std::max(margin, spread - allowance);
        scale = std::max(scale, spread + allowance);
      }
      record.spread_margin = margin;
      if (k >= 3 && margin > 1e-9 * std::max(1.0, scale)) {
        throw ProtocolError("look-ahead spread bound violated at iteration " +
                            std::to_string(k) + " by " + std::to_string(margin));
      }
    }

    record.distance = (current.front() - trace.x_star).norm();
    record.error = error_metric(current, initial_states, trace.x_star);
    record.lyapunov = record.distance + trace.certificate.c * prev_distance + xi_correction;
    prev_distance = record.distance;

    trace.iterations.push_back(record);
    if (config.error_floor > 0.0 && record.error <= config.error_floor) break;
  }

  trace.final_mean_distance = trace.iterations.back().distance;
  return trace;
}

}  // namespace qanm

#ifndef QANM_CONSENSUS_HPP_
#define QANM_CONSENSUS_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "qanm/digraph.hpp"
#include "qanm/quantize.hpp"
#include "qanm/rng.hpp"

namespace qanm {

inline constexpr long kDefaultRoundBudget = 1'000'000;

// Per-node protocol state of the finite-time quantized average consensus
// (FTQAC). `mass` and `weight` are the integer mass variables whose network
// totals are conserved; `stop_max`/`stop_min` are the max-min consensus
// vectors used for the distributed stopping test.
struct FtqacNodeState {
  std::vector<std::int64_t> mass;      // y, one entry per state component
  std::int64_t weight = 0;             // z, scalar token count
  std::vector<std::int64_t> stop_max;  // M
  std::vector<std::int64_t> stop_min;  // m
  bool halted = false;
  std::vector<std::int64_t> output;    // lattice integers, set on halt
};

struct FtqacStats {
  long rounds = 0;
  long long tokens_sent = 0;
  long long stop_broadcasts = 0;  // stopping-variable messages, counted separately
  // Transparent bandwidth estimate: per token, ceil(log2(1+|component|))
  // summed over payload components plus one weight bit.
  long long bits_estimate = 0;
};

// Called once per node at the end of every round.
using RoundTraceFn = std::function<void(long round, int node, const FtqacNodeState&)>;

// One synchronous consensus instance over a strongly connected digraph.
// Every node starts with weight 2 and mass twice its integer input vector.
// Rounds interleave (1) a stopping-variable reset every D rounds, (2) a
// max/min fold of the stopping variables over in-neighbors, (3) a token
// send phase that splits each node's mass into near-equal integer payloads,
// and (4) synchronous end-of-round delivery. The instance halts when, at a
// multiple of D, every node's folded stop vectors satisfy
// max-min <= 1 component-wise; the agreed output is stop_min.
//
// Determinism: a fixed (inputs, graph, seed) reproduces the round-by-round
// trace exactly. Mass and weight totals are verified every round.
class FtqacInstance {
 public:
  FtqacInstance(std::vector<std::vector<std::int64_t>> inputs, const Digraph& graph,
                std::uint64_t seed, long max_rounds = kDefaultRoundBudget);

  // Advances one round; returns true once the instance has halted.
  // Throws NonTerminationError when the round budget is exhausted.
  bool step();

  // Runs until halted and returns the agreed lattice output.
  const std::vector<std::int64_t>& run();

  bool halted() const { return halted_; }
  long round() const { return round_; }
  const std::vector<FtqacNodeState>& states() const { return states_; }
  const FtqacStats& stats() const { return stats_; }
  const std::vector<std::int64_t>& agreed_output() const;

  void set_trace(RoundTraceFn trace) { trace_ = std::move(trace); }

  std::vector<std::int64_t> total_mass() const;
  std::int64_t total_weight() const;

 private:
  void check_conservation() const;

  const Digraph& graph_;
  Eigen::Index dim_;
  long max_rounds_;
  long round_ = 0;
  bool halted_ = false;
  std::vector<FtqacNodeState> states_;
  std::vector<std::int64_t> expected_mass_;
  std::int64_t expected_weight_ = 0;
  std::vector<std::int64_t> agreed_;
  FtqacStats stats_;
  Rng rng_;
  RoundTraceFn trace_;
};

struct ConsensusResult {
  std::vector<std::int64_t> output;          // agreed lattice integers
  std::vector<Eigen::VectorXd> outputs;      // per-node scaled outputs (identical)
  long rounds = 0;
  FtqacStats stats;
};

// Convenience wrapper: runs one instance to completion and scales the agreed
// lattice vector by the quantization level. Every returned per-node output is
// bitwise identical and deviates from delta*(sum of inputs)/n by at most
// delta per component.
ConsensusResult run_consensus(const std::vector<std::vector<std::int64_t>>& inputs,
                              const Digraph& graph, QuantizationLevel delta,
                              std::uint64_t seed, long max_rounds = kDefaultRoundBudget,
                              RoundTraceFn trace = nullptr);

}  // namespace qanm

#endif  // QANM_CONSENSUS_HPP_

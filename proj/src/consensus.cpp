#include "qanm/consensus.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qanm/errors.hpp"

namespace qanm {

namespace {

// Floor/ceil division toward -inf/+inf for signed masses; divisor > 0.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

long long payload_bits(const std::vector<std::int64_t>& payload) {
  long long bits = 1;  // weight bit
  for (std::int64_t v : payload) {
    const std::uint64_t mag = v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1
                                    : static_cast<std::uint64_t>(v);
    bits += std::bit_width(mag);
  }
  return bits;
}

std::string dump_states(const std::vector<FtqacNodeState>& states) {
  std::ostringstream os;
  for (std::size_t i = 0; i < states.size(); ++i) {
    os << "\n  node " << i << ": z=" << states[i].weight << " y=[";
    for (std::size_t j = 0; j < states[i].mass.size(); ++j) {
      if (j) os << ',';
      os << states[i].mass[j];
    }
    os << "]";
  }
  return os.str();
}

}  // namespace

FtqacInstance::FtqacInstance(std::vector<std::vector<std::int64_t>> inputs,
                             const Digraph& graph, std::uint64_t seed, long max_rounds)
    : graph_(graph), max_rounds_(max_rounds), rng_(seed) {
  const int n = graph.node_count();
  if (inputs.empty() || static_cast<int>(inputs.size()) != n) {
    throw std::invalid_argument("need exactly one input vector per node, got " +
                                std::to_string(inputs.size()) + " for n=" +
                                std::to_string(n));
  }
  dim_ = static_cast<Eigen::Index>(inputs.front().size());
  if (dim_ == 0) throw std::invalid_argument("input vectors must be non-empty");

  // Masses only split and merge after initialization, so every intermediate
  // value stays within the initial token range. Bounding the doubled inputs
  // against int64 here makes later rounds overflow-free.
  const std::int64_t cap = std::numeric_limits<std::int64_t>::max() / (4 * std::max(n, 1));
  states_.resize(static_cast<std::size_t>(n));
  expected_mass_.assign(static_cast<std::size_t>(dim_), 0);
  for (int i = 0; i < n; ++i) {
    const auto& rho = inputs[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(rho.size()) != dim_) {
      throw std::invalid_argument("input vectors disagree on dimension");
    }
    FtqacNodeState& st = states_[static_cast<std::size_t>(i)];
    st.mass.resize(rho.size());
    for (std::size_t j = 0; j < rho.size(); ++j) {
      if (std::abs(rho[j]) > cap) {
        throw OverflowError("consensus input magnitude " + std::to_string(rho[j]) +
                            " exceeds the safe integer range for n=" + std::to_string(n));
      }
      st.mass[j] = 2 * rho[j];
      expected_mass_[j] += st.mass[j];
    }
    st.weight = 2;
    st.stop_max.assign(static_cast<std::size_t>(dim_), 0);
    st.stop_min.assign(static_cast<std::size_t>(dim_), 0);
    expected_weight_ += st.weight;
  }
}

bool FtqacInstance::step() {
  if (halted_) return true;
  if (round_ >= max_rounds_) {
    throw NonTerminationError("consensus did not halt within " +
                              std::to_string(max_rounds_) + " rounds; state:" +
                              dump_states(states_));
  }
  ++round_;
  const int n = graph_.node_count();
  const int d = graph_.diameter();

  // 1. Reset stopping variables from the local mass ratio at the start of
  // each D-round block (every round when D == 1).
  if (round_ % d == 1 % d) {
    for (auto& st : states_) {
      for (Eigen::Index j = 0; j < dim_; ++j) {
        st.stop_max[static_cast<std::size_t>(j)] =
            ceil_div(st.mass[static_cast<std::size_t>(j)], st.weight);
        st.stop_min[static_cast<std::size_t>(j)] =
            floor_div(st.mass[static_cast<std::size_t>(j)], st.weight);
      }
    }
  }

  // 2. Broadcast stopping variables and fold component-wise extrema over
  // in-neighbors (own values included). After D folds every node holds the
  // global extrema of the reset-round snapshot.
  {
    std::vector<std::vector<std::int64_t>> fold_max(static_cast<std::size_t>(n));
    std::vector<std::vector<std::int64_t>> fold_min(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      fold_max[static_cast<std::size_t>(i)] = states_[static_cast<std::size_t>(i)].stop_max;
      fold_min[static_cast<std::size_t>(i)] = states_[static_cast<std::size_t>(i)].stop_min;
      stats_.stop_broadcasts += graph_.out_degree(i);
    }
    for (int i = 0; i < n; ++i) {
      auto& st = states_[static_cast<std::size_t>(i)];
      for (int j : graph_.in_neighbors(i)) {
        for (Eigen::Index k = 0; k < dim_; ++k) {
          const auto kk = static_cast<std::size_t>(k);
          st.stop_max[kk] = std::max(st.stop_max[kk], fold_max[static_cast<std::size_t>(j)][kk]);
          st.stop_min[kk] = std::min(st.stop_min[kk], fold_min[static_cast<std::size_t>(j)][kk]);
        }
      }
    }
  }

  // 3. Send phase: while a node holds more than one weight unit it splits off
  // a token carrying floor(y/z) per component and one unit of weight, sent to
  // a uniformly random out-neighbor or itself.
  struct Token {
    std::vector<std::int64_t> payload;
  };
  std::vector<std::vector<Token>> mailbox(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& st = states_[static_cast<std::size_t>(i)];
    std::int64_t pending = st.weight;
    while (pending > 1) {
      Token token;
      token.payload.resize(static_cast<std::size_t>(dim_));
      for (Eigen::Index j = 0; j < dim_; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        token.payload[jj] = floor_div(st.mass[jj], st.weight);
        st.mass[jj] -= token.payload[jj];
      }
      st.weight -= 1;
      pending -= 1;
      const auto& out = graph_.out_neighbors(i);
      const std::int64_t pick = rng_.uniform_int(0, static_cast<std::int64_t>(out.size()));
      const int dest = pick == 0 ? i : out[static_cast<std::size_t>(pick - 1)];
      stats_.tokens_sent += 1;
      stats_.bits_estimate += payload_bits(token.payload);
      mailbox[static_cast<std::size_t>(dest)].push_back(std::move(token));
    }
  }

  // 4. Synchronous end-of-round delivery.
  for (int i = 0; i < n; ++i) {
    auto& st = states_[static_cast<std::size_t>(i)];
    for (const Token& token : mailbox[static_cast<std::size_t>(i)]) {
      for (Eigen::Index j = 0; j < dim_; ++j) {
        st.mass[static_cast<std::size_t>(j)] += token.payload[static_cast<std::size_t>(j)];
      }
      st.weight += 1;
    }
  }

  check_conservation();
  ++stats_.rounds;

  if (trace_) {
    for (int i = 0; i < n; ++i) {
      trace_(round_, i, states_[static_cast<std::size_t>(i)]);
    }
  }

  // 5. Stopping test at the end of every D-round block.
  if (round_ % d == 0) {
    int halting = 0;
    for (auto& st : states_) {
      bool within_one = true;
      for (Eigen::Index j = 0; j < dim_; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        if (st.stop_max[jj] - st.stop_min[jj] > 1) {
          within_one = false;
          break;
        }
      }
      if (within_one) {
        st.halted = true;
        st.output = st.stop_min;
        ++halting;
      }
    }
    if (halting > 0) {
      if (halting != n) {
        throw ProtocolError("non-simultaneous halt: " + std::to_string(halting) +
                            " of " + std::to_string(n) + " nodes stopped in round " +
                            std::to_string(round_) + dump_states(states_));
      }
      for (const auto& st : states_) {
        if (st.output != states_.front().output) {
          throw ProtocolError("halted nodes disagree on the output in round " +
                              std::to_string(round_) + dump_states(states_));
        }
      }
      agreed_ = states_.front().output;
      halted_ = true;
    }
  }
  return halted_;
}

const std::vector<std::int64_t>& FtqacInstance::run() {
  while (!step()) {
  }
  return agreed_;
}

const std::vector<std::int64_t>& FtqacInstance::agreed_output() const {
  if (!halted_) throw ProtocolError("consensus instance has not halted yet");
  return agreed_;
}

std::vector<std::int64_t> FtqacInstance::total_mass() const {
  std::vector<std::int64_t> total(static_cast<std::size_t>(dim_), 0);
  for (const auto& st : states_) {
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += st.mass[j];
  }
  return total;
}

std::int64_t FtqacInstance::total_weight() const {
  std::int64_t total = 0;
  for (const auto& st : states_) total += st.weight;
  return total;
}

void FtqacInstance::check_conservation() const {
  if (total_mass() != expected_mass_ || total_weight() != expected_weight_) {
    throw ProtocolError("mass/weight conservation violated in round " +
                        std::to_string(round_) + dump_states(states_));
  }
}

ConsensusResult run_consensus(const std::vector<std::vector<std::int64_t>>& inputs,
                              const Digraph& graph, QuantizationLevel delta,
                              std::uint64_t seed, long max_rounds, RoundTraceFn trace) {
  FtqacInstance instance(inputs, graph, seed, max_rounds);
  if (trace) instance.set_trace(std::move(trace));
  ConsensusResult result;
  result.output = instance.run();
  result.rounds = instance.round();
  result.stats = instance.stats();
  const Eigen::VectorXd scaled = from_lattice(result.output, delta);
  result.outputs.assign(static_cast<std::size_t>(graph.node_count()), scaled);
  return result;
}

}  // namespace qanm

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "qanm/consensus.hpp"
#include "qanm/digraph.hpp"
#include "qanm/errors.hpp"

using qanm::Digraph;
using qanm::FtqacInstance;
using qanm::generate_strongly_connected;
using qanm::NonTerminationError;
using qanm::QuantizationLevel;
using qanm::run_consensus;

namespace {

Digraph two_cycle() { return Digraph(2, {{0, 1}, {1, 0}}); }

Digraph ring(int n) {
  std::vector<qanm::Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({(i + 1) % n, i});
  return Digraph(n, edges);
}

}  // namespace

TEST_CASE("initialization doubles the inputs") {
  {
    Digraph solo(1, {});
    FtqacInstance inst({{7}}, solo, 0);
    CHECK(inst.states()[0].mass == std::vector<std::int64_t>{14});
    CHECK(inst.states()[0].weight == 2);
  }
  {
    FtqacInstance inst({{3}, {5}}, two_cycle(), 0);
    CHECK(inst.states()[0].mass == std::vector<std::int64_t>{6});
    CHECK(inst.states()[1].mass == std::vector<std::int64_t>{10});
    CHECK(inst.total_mass() == std::vector<std::int64_t>{16});
    CHECK(inst.total_weight() == 4);
  }
  {
    FtqacInstance inst({{0}, {0}, {3}}, ring(3), 0);
    CHECK(inst.total_mass() == std::vector<std::int64_t>{6});
    CHECK(inst.total_weight() == 6);
  }
}

TEST_CASE("initialization validates shapes and magnitudes") {
  Digraph g = two_cycle();
  CHECK_THROWS_AS(FtqacInstance({{1}}, g, 0), std::invalid_argument);
  CHECK_THROWS_AS(FtqacInstance({{1}, {1, 2}}, g, 0), std::invalid_argument);
  CHECK_THROWS_AS(FtqacInstance({{std::int64_t{1} << 62}, {0}}, g, 0), qanm::OverflowError);
}

TEST_CASE("single node keeps its value and halts immediately") {
  Digraph solo(1, {});
  FtqacInstance inst({{7}}, solo, 5);
  const bool done = inst.step();
  // One round: the node splits [14] into a kept 7 and a self-token 7,
  // receives it back, and the stop test passes with M = m = [7]... the
  // mass ratio y/z = 14/2 never changes, so it halts at the first check.
  CHECK(done);
  CHECK(inst.round() == 1);
  CHECK(inst.agreed_output() == std::vector<std::int64_t>{7});
  CHECK(inst.states()[0].mass == std::vector<std::int64_t>{14});
  CHECK(inst.states()[0].weight == 2);

  const auto result = run_consensus({{360}}, solo, QuantizationLevel(1e-3), 9);
  CHECK(result.output == std::vector<std::int64_t>{360});
  CHECK(result.outputs[0][0] == doctest::Approx(0.36).epsilon(1e-12));
}

TEST_CASE("two nodes agree on the exact quantized average") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto result = run_consensus({{3}, {5}}, two_cycle(), QuantizationLevel(1.0), seed);
    CHECK(result.output == std::vector<std::int64_t>{4});
    CHECK(result.outputs[0] == result.outputs[1]);
    CHECK(result.outputs[0][0] == 4.0);
  }
}

TEST_CASE("three-node ring stays within one lattice step of the average") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto result =
        run_consensus({{0}, {0}, {3}}, ring(3), QuantizationLevel(0.5), seed);
    // True average of the scaled inputs is 0.5; outputs land on the lattice.
    CHECK((result.output[0] == 0 || result.output[0] == 1));
    CHECK(std::abs(result.outputs[0][0] - 0.5) <= 0.5);
  }
}

TEST_CASE("equal inputs halt at the first stop check") {
  const Digraph g = generate_strongly_connected(8, 0.2, 3);
  const std::vector<std::vector<std::int64_t>> inputs(8, {9, -4});
  const auto result = run_consensus(inputs, g, QuantizationLevel(1.0), 17);
  CHECK(result.rounds == g.diameter());
  CHECK(result.output == std::vector<std::int64_t>{9, -4});
}

TEST_CASE("mass and weight totals are conserved every round") {
  const Digraph g = generate_strongly_connected(9, 0.2, 21);
  FtqacInstance inst({{5, -7},
                      {0, 0},
                      {12, 3},
                      {-4, 9},
                      {1, 1},
                      {8, -8},
                      {30, 2},
                      {-15, 6},
                      {2, 2}},
                     g, 4);
  const auto mass0 = inst.total_mass();
  const auto weight0 = inst.total_weight();
  while (!inst.step()) {
    CHECK(inst.total_mass() == mass0);
    CHECK(inst.total_weight() == weight0);
  }
  CHECK(inst.total_mass() == mass0);
  CHECK(inst.total_weight() == weight0);
}

TEST_CASE("negative and vector-valued inputs satisfy the accuracy bound") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const int n = 2 + static_cast<int>(seed % 9);
    const Digraph g = generate_strongly_connected(n, 0.15, seed);
    std::vector<std::vector<std::int64_t>> inputs;
    qanm::Rng rng(seed * 13 + 1);
    std::vector<std::int64_t> sums(3, 0);
    for (int i = 0; i < n; ++i) {
      std::vector<std::int64_t> row(3);
      for (auto& v : row) v = rng.uniform_int(-10000, 10000);
      for (std::size_t j = 0; j < row.size(); ++j) sums[j] += row[j];
      inputs.push_back(std::move(row));
    }
    const auto result = run_consensus(inputs, g, QuantizationLevel(1.0), seed);
    for (std::size_t j = 0; j < 3; ++j) {
      const double mean = static_cast<double>(sums[j]) / n;
      CHECK(std::abs(static_cast<double>(result.output[j]) - mean) <= 1.0);
    }
  }
}

TEST_CASE("round budget violations raise a diagnostic") {
  // Unequal inputs on a 2-cycle cannot settle in a single round.
  CHECK_THROWS_AS(run_consensus({{0}, {1000}}, two_cycle(), QuantizationLevel(1.0), 1,
                                /*max_rounds=*/1),
                  NonTerminationError);
}

TEST_CASE("runs are reproducible and traceable") {
  const Digraph g = generate_strongly_connected(6, 0.3, 8);
  const std::vector<std::vector<std::int64_t>> inputs{{10}, {20}, {-5}, {0}, {7}, {13}};

  const auto a = run_consensus(inputs, g, QuantizationLevel(1.0), 999);
  const auto b = run_consensus(inputs, g, QuantizationLevel(1.0), 999);
  CHECK(a.output == b.output);
  CHECK(a.rounds == b.rounds);
  CHECK(a.stats.tokens_sent == b.stats.tokens_sent);
  CHECK(a.stats.bits_estimate == b.stats.bits_estimate);

  long records = 0;
  long last_round = 0;
  const auto c = run_consensus(inputs, g, QuantizationLevel(1.0), 999, qanm::kDefaultRoundBudget,
                               [&](long round, int node, const qanm::FtqacNodeState& st) {
                                 ++records;
                                 last_round = round;
                                 CHECK(node >= 0);
                                 CHECK(node < 6);
                                 CHECK(st.weight >= 1);
                               });
  CHECK(c.output == a.output);
  CHECK(records == 6 * a.rounds);
  CHECK(last_round == a.rounds);
}

TEST_CASE("stop broadcasts are counted separately from tokens") {
  const Digraph g = generate_strongly_connected(5, 0.0, 2);  // plain ring
  const auto result = run_consensus({{1}, {2}, {3}, {4}, {100}}, g, QuantizationLevel(1.0), 6);
  // One broadcast per node per out-edge per round; the ring has 5 edges.
  CHECK(result.stats.stop_broadcasts == 5 * result.rounds);
  CHECK(result.stats.tokens_sent > 0);
  CHECK(result.stats.bits_estimate >= result.stats.tokens_sent);
}

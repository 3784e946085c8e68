#ifndef QANM_DIGRAPH_HPP_
#define QANM_DIGRAPH_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qanm {

// Directed edge stored as (receiver, sender): the sender can transmit to the
// receiver. Virtual self-loops are implicit and never appear in edge lists.
struct Edge {
  int receiver = 0;
  int sender = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct ConnectivityReport {
  bool strongly_connected = false;
  // Witness pair when not strongly connected: `from` cannot reach `to`.
  int from = -1;
  int to = -1;
};

// Checks reachability of every ordered node pair by BFS over the explicit
// edges. Does not require a valid Digraph, so it can vet raw edge lists.
ConnectivityReport verify_strong_connectivity(int n, const std::vector<Edge>& edges);

// Strongly connected directed communication graph over nodes 0..n-1.
// Immutable after construction; the diameter (longest shortest directed path,
// self-loops excluded) is computed once. A single-node graph is permitted and
// has diameter 1 so that round-based protocols keep a positive period.
class Digraph {
 public:
  Digraph(int n, std::vector<Edge> edges);

  int node_count() const { return n_; }
  int diameter() const { return diameter_; }

  const std::vector<int>& out_neighbors(int v) const { return out_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& in_neighbors(int v) const { return in_[static_cast<std::size_t>(v)]; }
  int out_degree(int v) const { return static_cast<int>(out_neighbors(v).size()); }

  // Sorted, deduplicated edge list (self-loops excluded).
  const std::vector<Edge>& edges() const { return edges_; }

  // Edge-list text format: header line "n D", then one "receiver sender"
  // line per explicit edge.
  void write_edge_list(std::ostream& os) const;
  static Digraph read_edge_list(std::istream& is);
  static Digraph load_edge_list_file(const std::string& path);

 private:
  int n_;
  int diameter_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

// Random strongly connected digraph: a directed Hamiltonian cycle plus each
// remaining ordered pair independently with the given probability.
// Deterministic for a fixed (n, probability, seed).
Digraph generate_strongly_connected(int n, double extra_edge_probability,
                                    std::uint64_t seed);

}  // namespace qanm

#endif  // QANM_DIGRAPH_HPP_

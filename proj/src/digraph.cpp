#include "qanm/digraph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qanm/errors.hpp"
#include "qanm/rng.hpp"

namespace qanm {

namespace {

// BFS distances from `source` following sender -> receiver edges.
// Unreachable nodes keep distance -1.
std::vector<int> bfs_distances(int n, const std::vector<std::vector<int>>& out,
                               int source) {
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  dist[static_cast<std::size_t>(source)] = 0;
  std::vector<int> frontier{source};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int u : frontier) {
      for (int v : out[static_cast<std::size_t>(u)]) {
        if (dist[static_cast<std::size_t>(v)] < 0) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          next.push_back(v);
        }
      }
    }
    frontier = std::move(next);
  }
  return dist;
}

std::vector<std::vector<int>> build_out_lists(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  for (const Edge& e : edges) {
    out[static_cast<std::size_t>(e.sender)].push_back(e.receiver);
  }
  return out;
}

}  // namespace

ConnectivityReport verify_strong_connectivity(int n, const std::vector<Edge>& edges) {
  if (n < 1) throw std::invalid_argument("node count must be >= 1");
  const auto out = build_out_lists(n, edges);
  for (int s = 0; s < n; ++s) {
    const auto dist = bfs_distances(n, out, s);
    for (int t = 0; t < n; ++t) {
      if (dist[static_cast<std::size_t>(t)] < 0) {
        return {false, s, t};
      }
    }
  }
  return {true, -1, -1};
}

Digraph::Digraph(int n, std::vector<Edge> edges) : n_(n) {
  if (n < 1) throw std::invalid_argument("node count must be >= 1");
  for (const Edge& e : edges) {
    if (e.receiver < 0 || e.receiver >= n || e.sender < 0 || e.sender >= n) {
      throw std::invalid_argument("edge (" + std::to_string(e.receiver) + ", " +
                                  std::to_string(e.sender) + ") out of range for n=" +
                                  std::to_string(n));
    }
    if (e.receiver == e.sender) {
      throw std::invalid_argument("explicit self-loop on node " +
                                  std::to_string(e.sender) +
                                  "; self-loops are implicit");
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  out_.assign(static_cast<std::size_t>(n), {});
  in_.assign(static_cast<std::size_t>(n), {});
  for (const Edge& e : edges_) {
    out_[static_cast<std::size_t>(e.sender)].push_back(e.receiver);
    in_[static_cast<std::size_t>(e.receiver)].push_back(e.sender);
  }

  // Diameter over explicit edges; throws on the first unreachable pair.
  int diameter = 0;
  for (int s = 0; s < n; ++s) {
    const auto dist = bfs_distances(n, out_, s);
    for (int t = 0; t < n; ++t) {
      const int d = dist[static_cast<std::size_t>(t)];
      if (d < 0) throw ConnectivityError(s, t);
      diameter = std::max(diameter, d);
    }
  }
  diameter_ = std::max(diameter, 1);
}

void Digraph::write_edge_list(std::ostream& os) const {
  os << n_ << ' ' << diameter_ << '\n';
  for (const Edge& e : edges_) {
    os << e.receiver << ' ' << e.sender << '\n';
  }
}

Digraph Digraph::read_edge_list(std::istream& is) {
  int n = 0;
  int claimed_diameter = 0;
  if (!(is >> n >> claimed_diameter)) {
    throw std::invalid_argument("edge list: missing 'n D' header");
  }
  std::vector<Edge> edges;
  int r = 0;
  int s = 0;
  while (is >> r >> s) {
    edges.push_back({r, s});
  }
  Digraph g(n, std::move(edges));
  if (g.diameter() != claimed_diameter) {
    throw std::invalid_argument("edge list header claims diameter " +
                                std::to_string(claimed_diameter) + " but computed " +
                                std::to_string(g.diameter()));
  }
  return g;
}

Digraph Digraph::load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return read_edge_list(in);
}

Digraph generate_strongly_connected(int n, double extra_edge_probability,
                                    std::uint64_t seed) {
  if (n < 2) {
    throw std::invalid_argument("generator needs n >= 2, got " + std::to_string(n));
  }
  if (extra_edge_probability < 0.0 || extra_edge_probability > 1.0) {
    throw std::invalid_argument("edge probability must lie in [0, 1]");
  }
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    edges.push_back({(i + 1) % n, i});  // Hamiltonian cycle i -> i+1
  }
  for (int sender = 0; sender < n; ++sender) {
    for (int receiver = 0; receiver < n; ++receiver) {
      if (receiver == sender) continue;
      if (receiver == (sender + 1) % n) continue;  // already in the cycle
      if (rng.uniform01() < extra_edge_probability) {
        edges.push_back({receiver, sender});
      }
    }
  }
  return Digraph(n, std::move(edges));
}

}  // namespace qanm

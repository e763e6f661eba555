#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "diffnet/errors.hpp"
#include "diffnet/rng.hpp"

namespace diffnet {

// Directed graph in sparse in-neighborhood form. The edge ij (j stored in
// in_neighbors(i)) reads "j influences i". No self-loops; neighbor lists are
// sorted and duplicate-free; immutable once constructed.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  // Takes per-node in-neighbor lists; input lists may be unsorted and may
  // contain duplicates. Throws InvalidConfig on self-loops or ids outside
  // [0, n).
  DirectedGraph(int n, std::vector<std::vector<int>> in_nbrs);

  // Edges given as (from, to) pairs, from = influencer.
  static DirectedGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  int node_count() const { return n_; }
  std::int64_t edge_count() const { return edge_count_; }

  const std::vector<int>& in_neighbors(int i) const { return in_[i]; }
  const std::vector<int>& out_neighbors(int i) const { return out_[i]; }

  // True iff the edge (from -> to) exists, i.e. from is in in_neighbors(to).
  bool has_edge(int from, int to) const;

  bool operator==(const DirectedGraph& other) const {
    return n_ == other.n_ && in_ == other.in_;
  }

 private:
  int n_ = 0;
  std::int64_t edge_count_ = 0;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> out_;
};

struct GraphStats {
  int max_degree = 0;      // max over nodes of (in + out) / 2, rounded to nearest
  double avg_degree = 0.0; // edge_count / n
  double clustering = 0.0; // global transitivity of the undirected skeleton
};

// Nodes whose initial action can reach node i along the contact network in
// 1..t1 steps, excluding i itself. Reverse BFS to depth t1.
std::vector<int> causal_in_neighborhood(const DirectedGraph& contact, int i, int t1);

// Graph whose in-neighborhoods are the causal in-neighborhoods at horizon t1.
DirectedGraph causal_graph(const DirectedGraph& contact, int t1);

// Sparsity pattern of B + B^2 + ... + B^t1 with the diagonal removed, where B
// is the contact adjacency. Computed by per-source frontier expansion, never
// dense matrix powers.
DirectedGraph observed_from_contact(const DirectedGraph& contact, int t1);

// True iff every edge of small is an edge of big. Throws SizeMismatch when
// node counts differ.
bool contains_subgraph(const DirectedGraph& big, const DirectedGraph& small);

enum class EdgeMode { directed, undirected };

// Erdos-Renyi graph. Undirected mode links each unordered pair with
// probability p and stores both directions; directed mode links each ordered
// pair independently.
DirectedGraph gen_er(int n, double p, RngStream rng, EdgeMode mode);

struct BaVillageConfig {
  int village_size = 50;
  int seed_size = 20;
  double seed_p = 1.0 / 19.0;
  int attachments_per_arrival = 1;  // m
  // Default orients undirected links old -> new (older node influences the
  // newer one); set true to orient each link by a fair coin instead.
  bool coin_flip_orientation = false;
};

// Barabasi-Albert village: undirected ER seed, then arrivals attach m links
// with probability proportional to current total degree (uniform fallback
// while all degrees are zero).
DirectedGraph gen_ba_village(const BaVillageConfig& cfg, RngStream rng);

// Disjoint union with offset node indices.
DirectedGraph block_diagonal(const std::vector<DirectedGraph>& blocks);

GraphStats stats(const DirectedGraph& g);

// Calls fn(i1, i2) for every ordered pair, diagonal included, whose closed
// in-neighborhoods overlap. Emitted in ascending (i1, i2) order. Built on an
// inverted index, so the cost scales with sum_v |{i : v in closed N(i)}|^2
// rather than n^2.
void for_each_overlapping_pair(const DirectedGraph& g,
                               const std::function<void(int, int)>& fn);

// Materialized variant, for tests and small graphs.
std::vector<std::pair<int, int>> overlapping_pairs(const DirectedGraph& g);

// Edge-list CSV with header "from,to", one row per directed edge, from =
// influencer. Rows are written sorted by (from, to).
void write_edge_list_csv(const DirectedGraph& g, const std::string& path);

// Reads an edge-list CSV. With n < 0 the node count is inferred as
// max id + 1. Rejects self-loops and out-of-range ids.
DirectedGraph read_edge_list_csv(const std::string& path, int n = -1);

}  // namespace diffnet

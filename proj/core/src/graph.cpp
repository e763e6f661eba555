#include "diffnet/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace diffnet {

DirectedGraph::DirectedGraph(int n, std::vector<std::vector<int>> in_nbrs) : n_(n) {
  if (n < 0) throw InvalidConfig("node count must be nonnegative");
  if (static_cast<int>(in_nbrs.size()) != n) throw InvalidConfig("in-neighbor list size != n");
  in_ = std::move(in_nbrs);
  out_.assign(n, {});
  edge_count_ = 0;
  for (int i = 0; i < n; ++i) {
    auto& lst = in_[i];
    std::sort(lst.begin(), lst.end());
    lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
    for (int j : lst) {
      if (j < 0 || j >= n) throw InvalidConfig("neighbor id out of range");
      if (j == i) throw InvalidConfig("self-loop rejected");
      out_[j].push_back(i);
    }
    edge_count_ += static_cast<std::int64_t>(lst.size());
  }
  for (auto& lst : out_) std::sort(lst.begin(), lst.end());
}

DirectedGraph DirectedGraph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> in(n);
  for (const auto& [from, to] : edges) {
    if (to < 0 || to >= n || from < 0 || from >= n) throw InvalidConfig("edge id out of range");
    in[to].push_back(from);
  }
  return DirectedGraph(n, std::move(in));
}

bool DirectedGraph::has_edge(int from, int to) const {
  const auto& lst = in_[to];
  return std::binary_search(lst.begin(), lst.end(), from);
}

std::vector<int> causal_in_neighborhood(const DirectedGraph& contact, int i, int t1) {
  if (t1 < 1) throw InvalidConfig("horizon must be at least 1");
  const int n = contact.node_count();
  std::vector<char> seen(n, 0);
  std::vector<int> frontier{i};
  std::vector<int> next;
  std::vector<int> reached;
  // Reverse BFS: walk in-edges away from i for t1 levels. A node may be
  // reached along walks of several lengths; only the first visit matters for
  // membership.
  for (int depth = 0; depth < t1; ++depth) {
    next.clear();
    for (int v : frontier) {
      for (int j : contact.in_neighbors(v)) {
        if (!seen[j]) {
          seen[j] = 1;
          next.push_back(j);
          if (j != i) reached.push_back(j);
        }
      }
    }
    frontier.swap(next);
    if (frontier.empty()) break;
  }
  std::sort(reached.begin(), reached.end());
  return reached;
}

DirectedGraph causal_graph(const DirectedGraph& contact, int t1) {
  const int n = contact.node_count();
  std::vector<std::vector<int>> in(n);
  for (int i = 0; i < n; ++i) in[i] = causal_in_neighborhood(contact, i, t1);
  return DirectedGraph(n, std::move(in));
}

DirectedGraph observed_from_contact(const DirectedGraph& contact, int t1) {
  if (t1 < 1) throw InvalidConfig("horizon must be at least 1");
  const int n = contact.node_count();
  std::vector<std::vector<int>> in(n);
  std::vector<char> seen(n, 0);
  std::vector<int> frontier, next, touched;
  // Forward frontier expansion per source column j: the pattern of
  // B + B^2 + ... + B^t1 in column j is everything j reaches within t1 steps.
  for (int j = 0; j < n; ++j) {
    frontier.assign(1, j);
    touched.clear();
    for (int depth = 0; depth < t1; ++depth) {
      next.clear();
      for (int v : frontier) {
        for (int i : contact.out_neighbors(v)) {
          if (!seen[i]) {
            seen[i] = 1;
            touched.push_back(i);
            next.push_back(i);
          }
        }
      }
      frontier.swap(next);
      if (frontier.empty()) break;
    }
    for (int i : touched) {
      seen[i] = 0;
      if (i != j) in[i].push_back(j);  // diagonal removed
    }
  }
  return DirectedGraph(n, std::move(in));
}

bool contains_subgraph(const DirectedGraph& big, const DirectedGraph& small) {
  if (big.node_count() != small.node_count()) throw SizeMismatch("subgraph check on unequal n");
  for (int i = 0; i < small.node_count(); ++i) {
    const auto& b = big.in_neighbors(i);
    const auto& s = small.in_neighbors(i);
    if (!std::includes(b.begin(), b.end(), s.begin(), s.end())) return false;
  }
  return true;
}

DirectedGraph gen_er(int n, double p, RngStream rng, EdgeMode mode) {
  if (p < 0.0 || p > 1.0) throw InvalidConfig("edge probability outside [0,1]");
  std::vector<std::pair<int, int>> edges;
  if (mode == EdgeMode::undirected) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (rng.uniform() < p) {
          edges.emplace_back(i, j);
          edges.emplace_back(j, i);
        }
      }
    }
  } else {
    for (int from = 0; from < n; ++from) {
      for (int to = 0; to < n; ++to) {
        if (to == from) continue;
        if (rng.uniform() < p) edges.emplace_back(from, to);
      }
    }
  }
  return DirectedGraph::from_edges(n, edges);
}

DirectedGraph gen_ba_village(const BaVillageConfig& cfg, RngStream rng) {
  const int n = cfg.village_size;
  const int seed = cfg.seed_size;
  const int m = cfg.attachments_per_arrival;
  if (n < 1 || seed < 1 || seed > n) throw InvalidConfig("bad village/seed sizes");
  if (m < 1) throw InvalidConfig("attachments per arrival must be >= 1");
  if (cfg.seed_p < 0.0 || cfg.seed_p > 1.0) throw InvalidConfig("seed probability outside [0,1]");

  std::vector<std::pair<int, int>> edges;
  // repeated_ids holds each node once per incident undirected link, giving
  // degree-proportional sampling by a uniform pick.
  std::vector<int> repeated_ids;

  for (int i = 0; i < seed; ++i) {
    for (int j = i + 1; j < seed; ++j) {
      if (rng.uniform() < cfg.seed_p) {
        edges.emplace_back(i, j);
        edges.emplace_back(j, i);
        repeated_ids.push_back(i);
        repeated_ids.push_back(j);
      }
    }
  }

  std::vector<int> chosen;
  for (int v = seed; v < n; ++v) {
    chosen.clear();
    const int targets = std::min(m, v);
    for (int e = 0; e < targets; ++e) {
      int target = -1;
      for (int attempt = 0; attempt < 64 && target < 0; ++attempt) {
        int candidate;
        if (repeated_ids.empty()) {
          candidate = static_cast<int>(rng.uniform() * v);
          if (candidate >= v) candidate = v - 1;
        } else {
          std::size_t pick =
              static_cast<std::size_t>(rng.uniform() * static_cast<double>(repeated_ids.size()));
          if (pick >= repeated_ids.size()) pick = repeated_ids.size() - 1;
          candidate = repeated_ids[pick];
        }
        if (std::find(chosen.begin(), chosen.end(), candidate) == chosen.end()) {
          target = candidate;
        }
      }
      if (target < 0) {
        // Degenerate fallback: first node not yet chosen.
        for (int u = 0; u < v; ++u) {
          if (std::find(chosen.begin(), chosen.end(), u) == chosen.end()) {
            target = u;
            break;
          }
        }
      }
      chosen.push_back(target);
      bool old_to_new = true;
      if (cfg.coin_flip_orientation) old_to_new = rng.uniform() < 0.5;
      if (old_to_new) {
        edges.emplace_back(target, v);
      } else {
        edges.emplace_back(v, target);
      }
      repeated_ids.push_back(target);
      repeated_ids.push_back(v);
    }
  }
  return DirectedGraph::from_edges(n, edges);
}

DirectedGraph block_diagonal(const std::vector<DirectedGraph>& blocks) {
  int total = 0;
  for (const auto& b : blocks) total += b.node_count();
  std::vector<std::vector<int>> in(total);
  int offset = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.node_count(); ++i) {
      auto& lst = in[offset + i];
      lst.reserve(b.in_neighbors(i).size());
      for (int j : b.in_neighbors(i)) lst.push_back(offset + j);
    }
    offset += b.node_count();
  }
  return DirectedGraph(total, std::move(in));
}

GraphStats stats(const DirectedGraph& g) {
  GraphStats out;
  const int n = g.node_count();
  if (n == 0) return out;

  int max_total = 0;
  for (int i = 0; i < n; ++i) {
    const int total = static_cast<int>(g.in_neighbors(i).size() + g.out_neighbors(i).size());
    max_total = std::max(max_total, total);
  }
  out.max_degree = static_cast<int>(std::llround(max_total / 2.0));
  out.avg_degree = static_cast<double>(g.edge_count()) / n;

  // Undirected skeleton for transitivity.
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    const auto& in = g.in_neighbors(i);
    const auto& outn = g.out_neighbors(i);
    auto& a = adj[i];
    a.reserve(in.size() + outn.size());
    std::merge(in.begin(), in.end(), outn.begin(), outn.end(), std::back_inserter(a));
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  std::int64_t closed = 0, triples = 0;
  for (int v = 0; v < n; ++v) {
    const auto& a = adj[v];
    const std::int64_t d = static_cast<std::int64_t>(a.size());
    triples += d * (d - 1) / 2;
    for (std::size_t x = 0; x < a.size(); ++x) {
      for (std::size_t y = x + 1; y < a.size(); ++y) {
        const auto& ax = adj[a[x]];
        if (std::binary_search(ax.begin(), ax.end(), a[y])) ++closed;
      }
    }
  }
  out.clustering = triples > 0 ? static_cast<double>(closed) / static_cast<double>(triples) : 0.0;
  return out;
}

void for_each_overlapping_pair(const DirectedGraph& g,
                               const std::function<void(int, int)>& fn) {
  const int n = g.node_count();
  std::vector<int> stamp(n, -1);
  std::vector<int> candidates;
  for (int i1 = 0; i1 < n; ++i1) {
    candidates.clear();
    // v runs over the closed in-neighborhood of i1; the inverse image of v is
    // {v} together with v's out-neighbors.
    auto absorb = [&](int v) {
      if (stamp[v] != i1) {
        stamp[v] = i1;
        candidates.push_back(v);
      }
      for (int i2 : g.out_neighbors(v)) {
        if (stamp[i2] != i1) {
          stamp[i2] = i1;
          candidates.push_back(i2);
        }
      }
    };
    absorb(i1);
    for (int v : g.in_neighbors(i1)) absorb(v);
    std::sort(candidates.begin(), candidates.end());
    for (int i2 : candidates) fn(i1, i2);
  }
}

std::vector<std::pair<int, int>> overlapping_pairs(const DirectedGraph& g) {
  std::vector<std::pair<int, int>> out;
  for_each_overlapping_pair(g, [&](int i1, int i2) { out.emplace_back(i1, i2); });
  return out;
}

void write_edge_list_csv(const DirectedGraph& g, const std::string& path) {
  std::vector<std::pair<int, int>> rows;
  rows.reserve(static_cast<std::size_t>(g.edge_count()));
  for (int to = 0; to < g.node_count(); ++to) {
    for (int from : g.in_neighbors(to)) rows.emplace_back(from, to);
  }
  std::sort(rows.begin(), rows.end());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "from,to\n";
  for (const auto& [from, to] : rows) out << from << ',' << to << '\n';
  if (!out) throw IoError("write failed for " + path);
}

DirectedGraph read_edge_list_csv(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty edge list " + path);
  // Tolerate trailing CR and surrounding spaces in the header.
  std::string header;
  for (char ch : line)
    if (!std::isspace(static_cast<unsigned char>(ch))) header.push_back(ch);
  if (header != "from,to") throw IoError("expected header 'from,to' in " + path);

  std::vector<std::pair<int, int>> edges;
  int max_id = -1;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    int from = 0, to = 0;
    if (std::sscanf(line.c_str(), "%d ,%d", &from, &to) != 2 &&
        std::sscanf(line.c_str(), "%d,%d", &from, &to) != 2) {
      throw IoError(path + ": malformed row " + std::to_string(lineno));
    }
    if (from == to) throw InvalidConfig(path + ": self-loop at row " + std::to_string(lineno));
    if (from < 0 || to < 0) throw InvalidConfig(path + ": negative id");
    edges.emplace_back(from, to);
    max_id = std::max({max_id, from, to});
  }
  const int node_count = n >= 0 ? n : max_id + 1;
  if (max_id >= node_count) throw InvalidConfig(path + ": node id out of range");
  return DirectedGraph::from_edges(node_count, edges);
}

}  // namespace diffnet

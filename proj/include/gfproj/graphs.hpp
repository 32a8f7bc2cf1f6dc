#pragma once

#include "gfproj/common.hpp"
#include "gfproj/rng.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gfproj {

using Edge = std::pair<Index, Index>;

// Undirected graph whose edge set always contains every self-loop.
class Graph {
 public:
  explicit Graph(Index n = 0);

  Index size() const { return n_; }
  void add_edge(Index i, Index j);
  bool has_edge(Index i, Index j) const;

  // Number of distinct neighbors, self excluded.
  Index degree(Index i) const;
  std::vector<Index> neighbors(Index i) const;  // self excluded, ascending

  // Pairs (a, b) with a <= b in lexicographic order, self-loops included.
  std::vector<Edge> reduced_edges() const;
  Index reduced_edge_count() const;
  // Pairs (i, j) with i < j that are not edges, ordered by j then i.
  std::vector<Edge> missing_pairs() const;

  // Component label per node; labels are numbered in order of smallest member.
  std::vector<Index> components() const;
  Index component_count() const;
  bool connected() const { return component_count() <= 1; }

  // Induced subgraph on the nodes with keep[i] true, relabeled in order.
  Graph induced(const std::vector<bool>& keep) const;

  std::optional<Matrix> positions;  // n × d node coordinates, if generated spatially

 private:
  Index n_;
  std::vector<char> adj_;
};

// Each unordered pair i < j is an edge with probability 1 − p_miss.
Graph generate_erdos_renyi(Index n, double p_miss, Rng& rng);

// Nodes uniform in the unit square; edge iff Euclidean distance < d_max.
Graph generate_wsn(Index n, double d_max, Rng& rng);

// Merges components sequentially: component k joins the union of components
// 0..k-1 through one edge between uniformly chosen members. Adds c − 1 edges.
void ensure_connected(Graph& g, Rng& rng);

// Rows (e_j ⊗ e_i)ᵀ for every missing pair i < j: W vec(S) = 0 zeroes S_ij.
Matrix topology_constraint_matrix(const Graph& g);

// Columns vec(e_a e_bᵀ + e_b e_aᵀ) for the reduced edge set.
Matrix edge_basis_matrix(const Graph& g);

void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);
void save_edge_list(const std::string& path, const Graph& g);
Graph load_edge_list(const std::string& path);

}  // namespace gfproj

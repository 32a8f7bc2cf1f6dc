#include "gfproj/graphs.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace gfproj {

Graph::Graph(Index n) : n_(n), adj_(static_cast<std::size_t>(n * n), 0) {
  if (n < 0) throw ParameterError("graph size must be non-negative");
  for (Index i = 0; i < n; ++i) adj_[static_cast<std::size_t>(i * n + i)] = 1;
}

void Graph::add_edge(Index i, Index j) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_)
    throw ParameterError("edge endpoint out of range: " + std::to_string(i) + " " +
                         std::to_string(j));
  adj_[static_cast<std::size_t>(i * n_ + j)] = 1;
  adj_[static_cast<std::size_t>(j * n_ + i)] = 1;
}

bool Graph::has_edge(Index i, Index j) const {
  return adj_[static_cast<std::size_t>(i * n_ + j)] != 0;
}

Index Graph::degree(Index i) const {
  Index d = 0;
  for (Index j = 0; j < n_; ++j)
    if (j != i && has_edge(i, j)) ++d;
  return d;
}

std::vector<Index> Graph::neighbors(Index i) const {
  std::vector<Index> out;
  for (Index j = 0; j < n_; ++j)
    if (j != i && has_edge(i, j)) out.push_back(j);
  return out;
}

std::vector<Edge> Graph::reduced_edges() const {
  std::vector<Edge> out;
  for (Index a = 0; a < n_; ++a)
    for (Index b = a; b < n_; ++b)
      if (has_edge(a, b)) out.emplace_back(a, b);
  return out;
}

Index Graph::reduced_edge_count() const {
  return static_cast<Index>(reduced_edges().size());
}

std::vector<Edge> Graph::missing_pairs() const {
  std::vector<Edge> out;
  for (Index j = 0; j < n_; ++j)
    for (Index i = 0; i < j; ++i)
      if (!has_edge(i, j)) out.emplace_back(i, j);
  return out;
}

std::vector<Index> Graph::components() const {
  std::vector<Index> label(static_cast<std::size_t>(n_), -1);
  Index next = 0;
  std::vector<Index> stack;
  for (Index s = 0; s < n_; ++s) {
    if (label[s] >= 0) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      for (Index w = 0; w < n_; ++w)
        if (label[w] < 0 && has_edge(v, w)) {
          label[w] = next;
          stack.push_back(w);
        }
    }
    ++next;
  }
  return label;
}

Index Graph::component_count() const {
  const auto label = components();
  return label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
}

Graph Graph::induced(const std::vector<bool>& keep) const {
  if (static_cast<Index>(keep.size()) != n_) throw ParameterError("induced: mask size mismatch");
  std::vector<Index> map;
  for (Index i = 0; i < n_; ++i)
    if (keep[i]) map.push_back(i);
  Graph g(static_cast<Index>(map.size()));
  for (std::size_t a = 0; a < map.size(); ++a)
    for (std::size_t b = a + 1; b < map.size(); ++b)
      if (has_edge(map[a], map[b])) g.add_edge(static_cast<Index>(a), static_cast<Index>(b));
  if (positions) {
    Matrix p(static_cast<Index>(map.size()), positions->cols());
    for (std::size_t a = 0; a < map.size(); ++a) p.row(static_cast<Index>(a)) = positions->row(map[a]);
    g.positions = p;
  }
  return g;
}

Graph generate_erdos_renyi(Index n, double p_miss, Rng& rng) {
  if (!(p_miss >= 0.0 && p_miss <= 1.0))
    throw ParameterError("missing-edge probability must lie in [0, 1]");
  if (n < 1) throw ParameterError("graph needs at least one node");
  Graph g(n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i)
      if (!rng.bernoulli(p_miss)) g.add_edge(i, j);
  return g;
}

Graph generate_wsn(Index n, double d_max, Rng& rng) {
  if (!(d_max > 0.0)) throw ParameterError("communication radius must be positive");
  if (n < 2) throw ParameterError("sensor network needs at least two nodes");
  Matrix pos(n, 2);
  for (Index i = 0; i < n; ++i) {
    pos(i, 0) = rng.uniform();
    pos(i, 1) = rng.uniform();
  }
  Graph g(n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i)
      if ((pos.row(i) - pos.row(j)).norm() < d_max) g.add_edge(i, j);
  g.positions = pos;
  return g;
}

void ensure_connected(Graph& g, Rng& rng) {
  const auto label = g.components();
  const Index c = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(c));
  for (Index i = 0; i < g.size(); ++i) members[label[i]].push_back(i);
  std::vector<Index> merged = members.empty() ? std::vector<Index>{} : members[0];
  for (Index k = 1; k < c; ++k) {
    const auto& comp = members[k];
    const Index a = merged[rng.index(merged.size())];
    const Index b = comp[rng.index(comp.size())];
    g.add_edge(a, b);
    merged.insert(merged.end(), comp.begin(), comp.end());
  }
}

Matrix topology_constraint_matrix(const Graph& g) {
  const Index n = g.size();
  const auto missing = g.missing_pairs();
  Matrix w = Matrix::Zero(static_cast<Index>(missing.size()), n * n);
  for (std::size_t k = 0; k < missing.size(); ++k) {
    const auto [i, j] = missing[k];
    w(static_cast<Index>(k), i + j * n) = 1.0;
  }
  return w;
}

Matrix edge_basis_matrix(const Graph& g) {
  const Index n = g.size();
  const auto edges = g.reduced_edges();
  Matrix phi = Matrix::Zero(n * n, static_cast<Index>(edges.size()));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [a, b] = edges[k];
    const Index col = static_cast<Index>(k);
    phi(a + b * n, col) += 1.0;
    phi(b + a * n, col) += 1.0;
  }
  return phi;
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "n=" << g.size() << '\n';
  for (const auto& [a, b] : g.reduced_edges()) out << a << ' ' << b << '\n';
  if (g.positions) {
    out << std::setprecision(17);
    for (Index i = 0; i < g.size(); ++i) {
      out << "pos " << i;
      for (Index d = 0; d < g.positions->cols(); ++d) out << ' ' << (*g.positions)(i, d);
      out << '\n';
    }
  }
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  Index n = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("n=", 0) != 0) throw FormatError("edge list must start with 'n=<count>'");
    try {
      n = std::stoll(line.substr(2));
    } catch (const std::exception&) {
      throw FormatError("bad node count line: " + line);
    }
    break;
  }
  if (n < 0) throw FormatError("edge list missing 'n=<count>' header");
  Graph g(n);
  std::vector<std::vector<double>> pos;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (line.rfind("pos", 0) == 0) {
      std::string tag;
      Index i;
      ls >> tag >> i;
      if (!ls || i < 0 || i >= n) throw FormatError("bad position line " + std::to_string(lineno));
      std::vector<double> coords;
      double x;
      while (ls >> x) coords.push_back(x);
      if (pos.empty()) pos.resize(static_cast<std::size_t>(n));
      pos[i] = coords;
      continue;
    }
    Index a, b;
    if (!(ls >> a >> b)) throw FormatError("bad edge line " + std::to_string(lineno) + ": " + line);
    if (a < 0 || b < 0 || a >= n || b >= n)
      throw FormatError("edge endpoint out of range on line " + std::to_string(lineno));
    g.add_edge(a, b);
  }
  if (!pos.empty()) {
    const std::size_t d = pos[0].size();
    Matrix p(n, static_cast<Index>(d));
    for (Index i = 0; i < n; ++i) {
      if (pos[i].size() != d) throw FormatError("positions missing or of unequal dimension");
      for (std::size_t k = 0; k < d; ++k) p(i, static_cast<Index>(k)) = pos[i][k];
    }
    g.positions = p;
  }
  return g;
}

void save_edge_list(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  write_edge_list(out, g);
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return read_edge_list(in);
}

}  // namespace gfproj

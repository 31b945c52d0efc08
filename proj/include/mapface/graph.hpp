#pragma once

#include "errors.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace mapface {

// Vertices are 0-based internally; text formats are 1-based.
struct Edge {
  int u = 0;
  int v = 0;
  bool operator==(const Edge&) const = default;
};

// Undirected multigraph. Loops and parallel edges are allowed.
class Graph {
 public:
  Graph() = default;

  explicit Graph(int n, std::vector<Edge> edges = {}) : n_(n), edges_(std::move(edges)) {
    if (n < 0) throw ValidationError("negative vertex count");
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
        throw ValidationError("edge " + std::to_string(i) + " has an endpoint outside [1.." +
                              std::to_string(n) + "]");
      }
    }
  }

  int num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }

  void add_edge(int u, int v) {
    if (u < 0 || u >= n_ || v < 0 || v >= n_) throw ValidationError("edge endpoint out of range");
    edges_.push_back({u, v});
  }

  // A loop contributes 2.
  std::vector<int> degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(n_), 0);
    for (const Edge& e : edges_) {
      ++deg[static_cast<std::size_t>(e.u)];
      ++deg[static_cast<std::size_t>(e.v)];
    }
    return deg;
  }

  int degree(int v) const { return degrees()[static_cast<std::size_t>(v)]; }

  // Component label per vertex, labels 0..k-1 in order of first vertex.
  std::vector<int> component_labels() const {
    std::vector<int> parent(static_cast<std::size_t>(n_));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
      }
      return x;
    };
    for (const Edge& e : edges_) {
      const int a = find(e.u), b = find(e.v);
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
    std::vector<int> label(static_cast<std::size_t>(n_), -1);
    std::vector<int> root_label(static_cast<std::size_t>(n_), -1);
    int next = 0;
    for (int v = 0; v < n_; ++v) {
      const int r = find(v);
      if (root_label[static_cast<std::size_t>(r)] < 0) root_label[static_cast<std::size_t>(r)] = next++;
      label[static_cast<std::size_t>(v)] = root_label[static_cast<std::size_t>(r)];
    }
    return label;
  }

  int num_components() const {
    int k = 0;
    for (int l : component_labels()) k = std::max(k, l + 1);
    return k;
  }

  bool is_connected() const { return num_components() <= 1; }

  bool is_simple() const {
    std::vector<std::vector<char>> seen(static_cast<std::size_t>(n_), std::vector<char>(static_cast<std::size_t>(n_), 0));
    for (const Edge& e : edges_) {
      if (e.u == e.v) return false;
      auto& cell = seen[static_cast<std::size_t>(std::min(e.u, e.v))][static_cast<std::size_t>(std::max(e.u, e.v))];
      if (cell) return false;
      cell = 1;
    }
    return true;
  }

  bool is_complete() const {
    if (!is_simple()) return false;
    const std::size_t nn = static_cast<std::size_t>(n_);
    return edges_.size() == nn * (nn - (nn > 0 ? 1 : 0)) / 2;
  }

  bool operator==(const Graph&) const = default;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

// Edges of K_n in lexicographic order (0,1), (0,2), ..., (n-2,n-1).
inline Graph complete_graph(int n) {
  Graph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

// Erdos-Renyi G(n,p): each pair independently with probability p.
template <class Rng>
Graph random_gnp(int n, double p, Rng& rng) {
  if (!(p > 0.0 && p <= 1.0)) throw Refusal("gnp probability must lie in (0, 1]");
  Graph g(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (p >= 1.0 || rng.uniform() < p) g.add_edge(u, v);
  return g;
}

inline Graph disjoint_union(const Graph& a, const Graph& b) {
  Graph g(a.num_vertices() + b.num_vertices(), a.edges());
  for (const Edge& e : b.edges()) g.add_edge(e.u + a.num_vertices(), e.v + a.num_vertices());
  return g;
}

// Edge list: "u v" per line, 1-based, '#' starts a comment. The vertex count is
// the largest id seen unless a "# n=N" directive raises it (isolated vertices).
inline Graph parse_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  int n = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      const std::string comment = line.substr(hash + 1);
      const auto pos = comment.find("n=");
      if (pos != std::string::npos && comment.find_first_not_of(" \t") == pos) {
        try {
          n = std::max(n, std::stoi(comment.substr(pos + 2)));
        } catch (const std::exception&) {
          throw ValidationError("line " + std::to_string(lineno) + ": bad n= directive");
        }
      }
      line.resize(hash);
    }
    std::istringstream ls(line);
    long long u = 0, v = 0;
    if (!(ls >> u)) continue;
    if (!(ls >> v)) throw ValidationError("line " + std::to_string(lineno) + ": expected two vertex ids");
    std::string rest;
    if (ls >> rest) throw ValidationError("line " + std::to_string(lineno) + ": trailing token '" + rest + "'");
    if (u < 1 || v < 1 || u > 1000000 || v > 1000000)
      throw ValidationError("line " + std::to_string(lineno) + ": vertex ids must be in [1..1000000]");
    edges.push_back({static_cast<int>(u - 1), static_cast<int>(v - 1)});
    n = std::max({n, static_cast<int>(u), static_cast<int>(v)});
  }
  return Graph(n, std::move(edges));
}

inline Graph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open graph file '" + path + "'");
  return parse_edge_list(in);
}

inline std::string format_edge_list(const Graph& g) {
  std::ostringstream out;
  out << "# n=" << g.num_vertices() << "\n";
  for (const Edge& e : g.edges()) out << e.u + 1 << ' ' << e.v + 1 << '\n';
  return out.str();
}

}  // namespace mapface

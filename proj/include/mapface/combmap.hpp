#pragma once

#include "errors.hpp"
#include "graph.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mapface {

struct ValidationReport {
  bool ok = true;
  std::string message;

  static ValidationReport pass() { return {}; }
  static ValidationReport fail(std::string msg) { return {false, std::move(msg)}; }
};

namespace detail {

inline std::size_t uz(int x) { return static_cast<std::size_t>(x); }

// Checks that `succ` permutes each vertex's darts in a single cycle.
inline ValidationReport check_rotation(int n, const std::vector<int>& dart_vertex,
                                       const std::vector<int>& succ) {
  const std::size_t nd = dart_vertex.size();
  if (succ.size() != nd) return ValidationReport::fail("rotation has wrong length");
  std::vector<int> count(uz(n), 0);
  for (std::size_t d = 0; d < nd; ++d) {
    const int v = dart_vertex[d];
    if (v < 0 || v >= n) return ValidationReport::fail("dart " + std::to_string(d) + " has no valid vertex");
    ++count[uz(v)];
  }
  std::vector<char> hit(nd, 0);
  for (std::size_t d = 0; d < nd; ++d) {
    const int s = succ[d];
    if (s < 0 || static_cast<std::size_t>(s) >= nd)
      return ValidationReport::fail("rotation undefined at dart " + std::to_string(d));
    if (dart_vertex[uz(s)] != dart_vertex[d])
      return ValidationReport::fail("rotation crosses vertices at dart " + std::to_string(d));
    if (hit[uz(s)]) return ValidationReport::fail("rotation is not a permutation at dart " + std::to_string(s));
    hit[uz(s)] = 1;
  }
  std::vector<char> seen(nd, 0);
  std::vector<char> vertex_done(uz(n), 0);
  for (std::size_t d = 0; d < nd; ++d) {
    const int v = dart_vertex[d];
    if (vertex_done[uz(v)]) {
      if (!seen[d]) return ValidationReport::fail("unicyclicity violation at v" + std::to_string(v + 1));
      continue;
    }
    vertex_done[uz(v)] = 1;
    int len = 0;
    int x = static_cast<int>(d);
    do {
      seen[uz(x)] = 1;
      x = succ[uz(x)];
      ++len;
    } while (x != static_cast<int>(d));
    if (len != count[uz(v)]) return ValidationReport::fail("unicyclicity violation at v" + std::to_string(v + 1));
  }
  return ValidationReport::pass();
}

// partner[d] == -1 marks an unpaired dart when `partial` is set.
inline ValidationReport check_matching(const std::vector<int>& partner, bool partial) {
  const std::size_t nd = partner.size();
  for (std::size_t d = 0; d < nd; ++d) {
    const int p = partner[d];
    if (p == -1 && partial) continue;
    if (p < 0 || static_cast<std::size_t>(p) >= nd)
      return ValidationReport::fail("matching undefined at dart " + std::to_string(d));
    if (static_cast<std::size_t>(p) == d) return ValidationReport::fail("fixed-point violation at " + std::to_string(d));
    if (partner[uz(p)] != static_cast<int>(d))
      return ValidationReport::fail("involution violation at " + std::to_string(d));
  }
  return ValidationReport::pass();
}

}  // namespace detail

// Validates a map given as raw permutations over darts 0..N-1.
inline ValidationReport validate(int n, const std::vector<int>& dart_vertex, const std::vector<int>& rotation,
                                 const std::vector<int>& partner, bool partial = false) {
  if (partner.size() != dart_vertex.size()) return ValidationReport::fail("matching has wrong length");
  if (auto r = detail::check_rotation(n, dart_vertex, rotation); !r.ok) return r;
  return detail::check_matching(partner, partial);
}

// Validates a rotation for a graph under the fixed dart numbering (edge e owns
// darts 2e at its first endpoint and 2e+1 at its second).
inline ValidationReport validate(const Graph& g, const std::vector<int>& succ) {
  std::vector<int> dv(2 * g.num_edges());
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    dv[2 * e] = g.edge(e).u;
    dv[2 * e + 1] = g.edge(e).v;
  }
  return detail::check_rotation(g.num_vertices(), dv, succ);
}

// A facial walk, listed as the darts d, phi(d), phi(phi(d)), ... with phi = R o L.
using FaceWalk = std::vector<int>;

// Rotation system over a graph. Darts 2e and 2e+1 belong to edge e, so the
// edge involution is d -> d ^ 1 and is never stored.
class CombMap {
 public:
  CombMap() = default;

  CombMap(Graph g, std::vector<int> succ) : graph_(std::move(g)), succ_(std::move(succ)) {
    if (auto r = validate(graph_, succ_); !r.ok) throw ValidationError(r.message);
    build_vertex_index();
  }

  // Rotation given as one cyclic dart list per vertex.
  static CombMap from_rotation(Graph g, const std::vector<std::vector<int>>& cycles) {
    const std::size_t nd = 2 * g.num_edges();
    if (cycles.size() != static_cast<std::size_t>(g.num_vertices()))
      throw ValidationError("rotation lists " + std::to_string(cycles.size()) + " vertices, graph has " +
                            std::to_string(g.num_vertices()));
    std::vector<int> succ(nd, -1);
    for (const auto& cyc : cycles) {
      for (std::size_t i = 0; i < cyc.size(); ++i) {
        const int d = cyc[i];
        if (d < 0 || static_cast<std::size_t>(d) >= nd) throw ValidationError("rotation names unknown dart " + std::to_string(d));
        if (succ[detail::uz(d)] != -1) throw ValidationError("dart " + std::to_string(d) + " appears twice in the rotation");
        succ[detail::uz(d)] = cyc[(i + 1) % cyc.size()];
      }
    }
    for (std::size_t v = 0; v < cycles.size(); ++v)
      for (int d : cycles[v])
        if (dart_owner(g, d) != static_cast<int>(v))
          throw ValidationError("rotation crosses vertices at dart " + std::to_string(d));
    return CombMap(std::move(g), std::move(succ));
  }

  // Every vertex's darts in increasing id order.
  static CombMap with_sorted_rotation(Graph g) {
    std::vector<std::vector<int>> cycles(static_cast<std::size_t>(g.num_vertices()));
    for (std::size_t d = 0; d < 2 * g.num_edges(); ++d)
      cycles[detail::uz(dart_owner(g, static_cast<int>(d)))].push_back(static_cast<int>(d));
    return from_rotation(std::move(g), cycles);
  }

  // Builds a map from arbitrary permutations. Each pair of `partner` becomes an
  // edge; edges are numbered by their smaller dart, and that dart becomes the
  // even dart of the edge.
  static CombMap from_permutations(int n, const std::vector<int>& dart_vertex, const std::vector<int>& rotation,
                                   const std::vector<int>& partner) {
    if (auto r = validate(n, dart_vertex, rotation, partner); !r.ok) throw ValidationError(r.message);
    const std::size_t nd = dart_vertex.size();
    std::vector<int> relabel(nd, -1);
    Graph g(n);
    for (std::size_t d = 0; d < nd; ++d) {
      const auto p = detail::uz(partner[d]);
      if (d < p) {
        const int e = static_cast<int>(g.num_edges());
        g.add_edge(dart_vertex[d], dart_vertex[p]);
        relabel[d] = 2 * e;
        relabel[p] = 2 * e + 1;
      }
    }
    std::vector<int> succ(nd);
    for (std::size_t d = 0; d < nd; ++d) succ[detail::uz(relabel[d])] = relabel[detail::uz(rotation[d])];
    return CombMap(std::move(g), std::move(succ));
  }

  static int dart_owner(const Graph& g, int d) {
    const Edge& e = g.edge(detail::uz(d / 2));
    return (d & 1) ? e.v : e.u;
  }

  const Graph& graph() const { return graph_; }
  int num_vertices() const { return graph_.num_vertices(); }
  std::size_t num_edges() const { return graph_.num_edges(); }
  std::size_t num_darts() const { return succ_.size(); }

  int vertex_of(int d) const { return dart_owner(graph_, d); }
  int edge_of(int d) const { return d / 2; }
  static int partner(int d) { return d ^ 1; }
  int succ(int d) const { return succ_[detail::uz(d)]; }
  int pred(int d) const { return pred_[detail::uz(d)]; }
  int phi(int d) const { return succ_[detail::uz(d ^ 1)]; }
  const std::vector<int>& rotation() const { return succ_; }

  // Anchor dart of v, or -1 for an isolated vertex.
  int anchor(int v) const { return anchor_[detail::uz(v)]; }

  std::vector<int> vertex_cycle(int v) const {
    std::vector<int> out;
    const int a = anchor(v);
    if (a < 0) return out;
    int d = a;
    do {
      out.push_back(d);
      d = succ(d);
    } while (d != a);
    return out;
  }

  bool operator==(const CombMap& o) const { return graph_ == o.graph_ && succ_ == o.succ_; }

 private:
  void build_vertex_index() {
    anchor_.assign(detail::uz(graph_.num_vertices()), -1);
    pred_.assign(succ_.size(), -1);
    for (std::size_t d = 0; d < succ_.size(); ++d) {
      pred_[detail::uz(succ_[d])] = static_cast<int>(d);
      int& a = anchor_[detail::uz(vertex_of(static_cast<int>(d)))];
      if (a < 0) a = static_cast<int>(d);
    }
  }

  Graph graph_;
  std::vector<int> succ_;
  std::vector<int> pred_;
  std::vector<int> anchor_;
};

// Orbits of phi = R o L, each starting at its least dart, ordered by that dart.
inline std::vector<FaceWalk> trace_faces(const CombMap& m) {
  std::vector<FaceWalk> faces;
  std::vector<char> seen(m.num_darts(), 0);
  for (std::size_t d0 = 0; d0 < m.num_darts(); ++d0) {
    if (seen[d0]) continue;
    FaceWalk walk;
    int d = static_cast<int>(d0);
    while (!seen[detail::uz(d)]) {
      seen[detail::uz(d)] = 1;
      walk.push_back(d);
      d = m.phi(d);
    }
    faces.push_back(std::move(walk));
  }
  return faces;
}

inline std::size_t count_orbits(const CombMap& m) {
  std::size_t c = 0;
  std::vector<char> seen(m.num_darts(), 0);
  for (std::size_t d0 = 0; d0 < m.num_darts(); ++d0) {
    if (seen[d0]) continue;
    ++c;
    for (int d = static_cast<int>(d0); !seen[detail::uz(d)]; d = m.phi(d)) seen[detail::uz(d)] = 1;
  }
  return c;
}

// Faces with the disconnected convention: sum over components, minus the
// number of components, plus one. An isolated vertex is a component with one
// face and so contributes nothing.
inline long long count_faces(const CombMap& m) {
  const Graph& g = m.graph();
  std::vector<int> deg = g.degrees();
  long long isolated = 0;
  for (int d : deg) isolated += (d == 0);
  const long long k = g.num_components();
  return static_cast<long long>(count_orbits(m)) + isolated - k + 1;
}

// Euler genus from face count; throws InternalError if not a non-negative integer.
inline long long genus_from_faces(const Graph& g, long long faces) {
  const long long twice = static_cast<long long>(g.num_edges()) - g.num_vertices() - faces + g.num_components() + 1;
  if (twice < 0 || twice % 2 != 0)
    throw InternalError("Euler characteristic inconsistent: E-V-F+k+1 = " + std::to_string(twice));
  return twice / 2;
}

inline long long genus(const CombMap& m) { return genus_from_faces(m.graph(), count_faces(m)); }

inline nlohmann::json map_to_json(const CombMap& m) {
  nlohmann::json j;
  j["n"] = m.num_vertices();
  auto edges = nlohmann::json::array();
  for (const Edge& e : m.graph().edges()) edges.push_back({e.u + 1, e.v + 1});
  j["edges"] = edges;
  auto rot = nlohmann::json::array();
  for (int v = 0; v < m.num_vertices(); ++v) rot.push_back(m.vertex_cycle(v));
  j["rotation"] = rot;
  return j;
}

inline CombMap map_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    Graph g(n);
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ValidationError("each edge must be a pair of vertex ids");
      const int u = e[0].get<int>(), v = e[1].get<int>();
      if (u < 1 || v < 1 || u > n || v > n) throw ValidationError("edge endpoint outside [1..n]");
      g.add_edge(u - 1, v - 1);
    }
    const auto cycles = j.at("rotation").get<std::vector<std::vector<int>>>();
    return CombMap::from_rotation(std::move(g), cycles);
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed map JSON: ") + ex.what());
  }
}

// Full rotation plus a partial edge pairing. Darts are arbitrary integers
// 0..N-1 with an owning vertex; partner[d] == -1 means d is unpaired.
class PartialMap {
 public:
  PartialMap() = default;

  PartialMap(int n, std::vector<int> dart_vertex, std::vector<int> rotation, std::vector<int> partner)
      : n_(n), dart_vertex_(std::move(dart_vertex)), succ_(std::move(rotation)), partner_(std::move(partner)) {
    if (auto r = validate(n_, dart_vertex_, succ_, partner_, true); !r.ok) throw ValidationError(r.message);
  }

  // Keeps only the edges flagged in `keep` (indexed by edge).
  static PartialMap from_map(const CombMap& m, const std::vector<bool>& keep) {
    std::vector<int> dv(m.num_darts()), partner(m.num_darts(), -1);
    for (std::size_t d = 0; d < m.num_darts(); ++d) {
      dv[d] = m.vertex_of(static_cast<int>(d));
      if (keep.at(d / 2)) partner[d] = static_cast<int>(d ^ 1);
    }
    return PartialMap(m.num_vertices(), std::move(dv), m.rotation(), std::move(partner));
  }

  int num_vertices() const { return n_; }
  std::size_t num_darts() const { return succ_.size(); }
  int vertex_of(int d) const { return dart_vertex_[detail::uz(d)]; }
  int succ(int d) const { return succ_[detail::uz(d)]; }
  int partner(int d) const { return partner_[detail::uz(d)]; }
  bool is_paired(int d) const { return partner_[detail::uz(d)] >= 0; }
  const std::vector<int>& dart_vertices() const { return dart_vertex_; }
  const std::vector<int>& rotation() const { return succ_; }
  const std::vector<int>& matching() const { return partner_; }

  bool complete() const {
    return std::all_of(partner_.begin(), partner_.end(), [](int p) { return p >= 0; });
  }

  CombMap to_map() const {
    if (!complete()) throw ValidationError("partial map still has unpaired darts");
    return CombMap::from_permutations(n_, dart_vertex_, succ_, partner_);
  }

 private:
  int n_ = 0;
  std::vector<int> dart_vertex_;
  std::vector<int> succ_;
  std::vector<int> partner_;
};

struct TemporaryFace {
  std::vector<int> darts;       // paired darts along the face, in walk order
  std::vector<int> open_darts;  // unpaired darts belonging to the face, in walk order
  bool strongly_two_open = false;
  std::size_t openness() const { return open_darts.size(); }
};

// Temporary faces: orbits of d -> R'(L(d)) over paired darts, where R' skips
// unpaired darts. The unpaired darts passed over between L(d) and R'(L(d))
// belong to the face. A vertex without paired darts belongs to no face.
inline std::vector<TemporaryFace> temporary_faces(const PartialMap& pm) {
  const std::size_t nd = pm.num_darts();
  std::vector<TemporaryFace> faces;
  std::vector<char> seen(nd, 0);
  for (std::size_t d0 = 0; d0 < nd; ++d0) {
    if (seen[d0] || !pm.is_paired(static_cast<int>(d0))) continue;
    TemporaryFace f;
    int d = static_cast<int>(d0);
    while (!seen[detail::uz(d)]) {
      seen[detail::uz(d)] = 1;
      f.darts.push_back(d);
      int x = pm.succ(pm.partner(d));
      while (!pm.is_paired(x)) {
        f.open_darts.push_back(x);
        x = pm.succ(x);
      }
      d = x;
    }
    f.strongly_two_open =
        f.open_darts.size() == 2 && pm.vertex_of(f.open_darts[0]) != pm.vertex_of(f.open_darts[1]);
    faces.push_back(std::move(f));
  }
  return faces;
}

// A partial facial walk from the unpaired dart `start` to the unpaired dart
// `end`: start, R(start), then R o L while the current dart is paired.
struct CandidateWalk {
  int start = -1;
  int end = -1;
  std::vector<int> interior;  // paired darts passed, in order
};

// One walk per unpaired dart at a vertex that has at least one paired dart.
inline std::vector<CandidateWalk> candidate_walks(const PartialMap& pm) {
  const std::size_t nd = pm.num_darts();
  std::vector<char> vertex_has_pair(detail::uz(pm.num_vertices()), 0);
  for (std::size_t d = 0; d < nd; ++d)
    if (pm.is_paired(static_cast<int>(d))) vertex_has_pair[detail::uz(pm.vertex_of(static_cast<int>(d)))] = 1;
  std::vector<CandidateWalk> walks;
  for (std::size_t s = 0; s < nd; ++s) {
    const int ds = static_cast<int>(s);
    if (pm.is_paired(ds) || !vertex_has_pair[detail::uz(pm.vertex_of(ds))]) continue;
    CandidateWalk w;
    w.start = ds;
    int c = pm.succ(ds);
    std::size_t guard = 0;
    while (pm.is_paired(c)) {
      w.interior.push_back(c);
      c = pm.succ(pm.partner(c));
      if (++guard > nd) throw InternalError("candidate walk does not terminate");
    }
    w.end = c;
    walks.push_back(std::move(w));
  }
  return walks;
}

struct StepClassification {
  int open1 = 0;                // O_k: 1-open active faces
  int potential = 0;            // PF_k: potential faces
  int strongly_two_open = 0;    // L_k: strongly 2-open temporary faces of the upper part
  int candidate_walks = 0;      // all candidate walks of the upper part
  std::vector<CandidateWalk> active_walks;
  std::vector<int> one_open_darts;  // darts at v_k, sorted by id
  std::vector<int> potential_darts;
  std::vector<int> noncontributing_darts;
};

// Classifies the state of the step that adds v_k to the vertices v_n..v_{k+1}
// (vertex index i-1 is v_i), after each upper vertex has sent exactly one dart
// to v_k and before v_k's rotation matters. The candidate walks are those of
// the upper part alone, with the darts sent to v_k treated as unpaired.
inline StepClassification classify_step(const PartialMap& pm, int k) {
  const int n = pm.num_vertices();
  if (k < 1 || k > n - 2) throw ValidationError("step index must lie in [1..n-2]");
  const int vk = k - 1;
  auto upper = [&](int v) { return v >= k; };
  const std::size_t nd = pm.num_darts();

  std::vector<int> sent(detail::uz(n), 0), free_or_sent(detail::uz(n), 0), deg(detail::uz(n), 0);
  int vk_paired = 0;
  for (std::size_t s = 0; s < nd; ++s) {
    const int d = static_cast<int>(s);
    const int v = pm.vertex_of(d);
    ++deg[detail::uz(v)];
    const int p = pm.partner(d);
    if (upper(v)) {
      if (p < 0) {
        ++free_or_sent[detail::uz(v)];
      } else if (pm.vertex_of(p) == vk) {
        ++sent[detail::uz(v)];
        ++free_or_sent[detail::uz(v)];
      } else if (!upper(pm.vertex_of(p))) {
        throw ValidationError("not a step-k state: upper dart " + std::to_string(d) + " is paired below v_k");
      }
    } else if (v == vk) {
      if (p >= 0) {
        if (!upper(pm.vertex_of(p)))
          throw ValidationError("not a step-k state: dart " + std::to_string(d) + " at v_k is paired below");
        ++vk_paired;
      }
    } else if (p >= 0) {
      throw ValidationError("not a step-k state: vertex v" + std::to_string(v + 1) + " below v_k has a paired dart");
    }
  }
  for (int v = k; v < n; ++v) {
    if (sent[detail::uz(v)] != 1)
      throw ValidationError("not a step-k state: v" + std::to_string(v + 1) + " must send exactly one dart to v_k");
    if (free_or_sent[detail::uz(v)] != k)
      throw ValidationError("not a step-k state: v" + std::to_string(v + 1) + " must have k open darts");
  }
  if (vk_paired != n - k) throw ValidationError("not a step-k state: v_k must have n-k paired darts");

  // The upper part before Random choice 1.
  std::vector<int> up_partner(pm.matching());
  for (std::size_t s = 0; s < nd; ++s) {
    const int d = static_cast<int>(s);
    const int p = pm.partner(d);
    if (!upper(pm.vertex_of(d)) || (p >= 0 && !upper(pm.vertex_of(p)))) up_partner[s] = -1;
  }
  const PartialMap up(n, pm.dart_vertices(), pm.rotation(), std::move(up_partner));

  StepClassification out;
  for (const TemporaryFace& f : temporary_faces(up)) out.strongly_two_open += f.strongly_two_open;

  // Category per upper dart: 0 none, 1 one-open, 2 potential.
  std::vector<int> cat(nd, 0);
  const auto walks = candidate_walks(up);
  out.candidate_walks = static_cast<int>(walks.size());
  for (const CandidateWalk& w : walks) {
    if (!upper(pm.vertex_of(w.start))) continue;
    const bool a = pm.is_paired(w.start), b = pm.is_paired(w.end);
    if (!a || !b) continue;
    if (w.start == w.end) {
      ++out.open1;
      cat[detail::uz(w.start)] = 1;
    } else {
      ++out.potential;
      cat[detail::uz(w.start)] = 2;
      cat[detail::uz(w.end)] = 2;
    }
    out.active_walks.push_back(w);
  }
  for (std::size_t s = 0; s < nd; ++s) {
    const int d = static_cast<int>(s);
    if (pm.vertex_of(d) != vk) continue;
    const int p = pm.partner(d);
    const int c = p >= 0 ? cat[detail::uz(p)] : 0;
    if (c == 1) out.one_open_darts.push_back(d);
    else if (c == 2) out.potential_darts.push_back(d);
    else out.noncontributing_darts.push_back(d);
  }
  return out;
}

}  // namespace mapface

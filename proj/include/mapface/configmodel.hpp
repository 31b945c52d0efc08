#pragma once

#include "combmap.hpp"
#include "embed_random.hpp"
#include "enumerate.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "harmonic.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace mapface {

inline constexpr std::uint64_t kDefaultMatchingBudget = 10000000ULL;

struct DegreeSequence {
  std::vector<int> d;
  int m = 0;
  int d_max = 0;

  DegreeSequence() = default;
  explicit DegreeSequence(std::vector<int> degrees) : d(std::move(degrees)) {
    long long s = 0;
    for (int x : d) {
      if (x < 0) throw ValidationError("degrees must be non-negative");
      s += x;
      d_max = std::max(d_max, x);
    }
    if (s % 2) throw ValidationError("degree sum must be even");
    if (s == 0) throw ValidationError("degree sequence needs at least one edge");
    m = static_cast<int>(s / 2);
  }

  int num_vertices() const { return static_cast<int>(d.size()); }
  int num_darts() const { return 2 * m; }
  bool all_at_least_two() const {
    return std::all_of(d.begin(), d.end(), [](int x) { return x >= 2; });
  }
};

// "3,3,4" -> (3,3,4)
inline DegreeSequence parse_degrees(const std::string& text) {
  std::vector<int> d;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    int x = 0;
    try {
      x = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw ValidationError("bad degree '" + tok + "'");
    }
    if (used != tok.size()) throw ValidationError("bad degree '" + tok + "'");
    d.push_back(x);
  }
  if (d.empty()) throw ValidationError("empty degree sequence");
  return DegreeSequence(std::move(d));
}

// A rotation over 2m darts. Vertex i owns the consecutive block of darts
// starting at d_0 + ... + d_{i-1}.
class FixedRotation {
 public:
  // Cyclic shift inside every block.
  explicit FixedRotation(DegreeSequence ds) : ds_(std::move(ds)) {
    init_blocks();
    for (int v = 0; v < ds_.num_vertices(); ++v) {
      const int b = first_[static_cast<std::size_t>(v)], deg = ds_.d[static_cast<std::size_t>(v)];
      for (int i = 0; i < deg; ++i) succ_[static_cast<std::size_t>(b + i)] = b + (i + 1) % deg;
    }
    finish();
  }

  // Explicit cycles, one per vertex, each a permutation of the vertex's block.
  FixedRotation(DegreeSequence ds, const std::vector<std::vector<int>>& cycles) : ds_(std::move(ds)) {
    init_blocks();
    if (cycles.size() != ds_.d.size()) throw ValidationError("need one rotation cycle per vertex");
    for (std::size_t v = 0; v < cycles.size(); ++v) {
      const auto& c = cycles[v];
      if (c.size() != static_cast<std::size_t>(ds_.d[v]))
        throw ValidationError("rotation cycle of vertex " + std::to_string(v + 1) + " has the wrong length");
      for (std::size_t i = 0; i < c.size(); ++i) {
        const int d = c[i];
        if (d < 0 || d >= ds_.num_darts() || dart_vertex_[static_cast<std::size_t>(d)] != static_cast<int>(v))
          throw ValidationError("rotation crosses vertices at dart " + std::to_string(d));
        if (succ_[static_cast<std::size_t>(d)] != -1) throw ValidationError("dart " + std::to_string(d) + " repeated");
        succ_[static_cast<std::size_t>(d)] = c[(i + 1) % c.size()];
      }
    }
    finish();
  }

  // Uniformly random cyclic order at every vertex.
  template <Chooser C>
  static FixedRotation random(DegreeSequence ds, C& chooser) {
    FixedRotation r(ds);
    std::vector<std::vector<int>> cycles;
    for (int v = 0; v < r.ds_.num_vertices(); ++v) {
      const auto deg = static_cast<std::size_t>(r.ds_.d[static_cast<std::size_t>(v)]);
      const int base = r.first_[static_cast<std::size_t>(v)];
      const std::vector<int> next = random_cycle(deg, chooser);
      std::vector<int> cyc;
      if (deg > 0) {
        int i = 0;
        do {
          cyc.push_back(base + i);
          i = next[static_cast<std::size_t>(i)];
        } while (i != 0);
      }
      cycles.push_back(std::move(cyc));
    }
    return FixedRotation(std::move(ds), cycles);
  }

  const DegreeSequence& degrees() const { return ds_; }
  int m() const { return ds_.m; }
  int num_darts() const { return ds_.num_darts(); }
  int num_vertices() const { return ds_.num_vertices(); }
  int succ(int d) const { return succ_[static_cast<std::size_t>(d)]; }
  int pred(int d) const { return pred_[static_cast<std::size_t>(d)]; }
  int vertex_of(int d) const { return dart_vertex_[static_cast<std::size_t>(d)]; }
  const std::vector<int>& rotation() const { return succ_; }
  const std::vector<int>& dart_vertices() const { return dart_vertex_; }

  std::vector<std::vector<int>> cycles() const {
    std::vector<std::vector<int>> out;
    for (int v = 0; v < num_vertices(); ++v) {
      std::vector<int> c;
      const int deg = ds_.d[static_cast<std::size_t>(v)];
      if (deg > 0) {
        const int b = first_[static_cast<std::size_t>(v)];
        int d = b;
        do {
          c.push_back(d);
          d = succ(d);
        } while (d != b);
      }
      out.push_back(std::move(c));
    }
    return out;
  }

  // Number of cycles of R o L for a perfect matching L.
  long long count_faces(const std::vector<int>& partner) const {
    std::vector<char> seen(partner.size(), 0);
    return count_faces(partner, seen);
  }
  long long count_faces(const std::vector<int>& partner, std::vector<char>& seen) const {
    std::fill(seen.begin(), seen.end(), 0);
    long long c = 0;
    for (std::size_t d0 = 0; d0 < partner.size(); ++d0) {
      if (seen[d0]) continue;
      ++c;
      for (std::size_t d = d0; !seen[d]; d = static_cast<std::size_t>(succ_[static_cast<std::size_t>(partner[d])])) seen[d] = 1;
    }
    return c;
  }

  // The multigraph and map defined by a matching.
  CombMap to_map(const std::vector<int>& partner) const {
    return CombMap::from_permutations(num_vertices(), dart_vertex_, succ_, partner);
  }

 private:
  void init_blocks() {
    const int nd = ds_.num_darts();
    succ_.assign(static_cast<std::size_t>(nd), -1);
    dart_vertex_.assign(static_cast<std::size_t>(nd), -1);
    first_.clear();
    int at = 0;
    for (int v = 0; v < ds_.num_vertices(); ++v) {
      first_.push_back(at);
      for (int i = 0; i < ds_.d[static_cast<std::size_t>(v)]; ++i) dart_vertex_[static_cast<std::size_t>(at++)] = v;
    }
  }
  void finish() {
    pred_.assign(succ_.size(), -1);
    for (std::size_t d = 0; d < succ_.size(); ++d) {
      if (succ_[d] < 0) throw ValidationError("rotation leaves dart " + std::to_string(d) + " undefined");
      pred_[static_cast<std::size_t>(succ_[d])] = static_cast<int>(d);
    }
    if (auto r = detail::check_rotation(num_vertices(), dart_vertex_, succ_); !r.ok) throw ValidationError(r.message);
  }

  DegreeSequence ds_;
  std::vector<int> succ_, pred_, dart_vertex_, first_;
};

// |C_{2^j}| = (2j)! / (j! 2^j) = (2j-1)!!
inline BigInt conjugacy_class_size(unsigned j) {
  BigInt r = 1;
  for (unsigned i = 1; i <= j; ++i) r *= (2 * i - 1);
  return r;
}

namespace detail {

inline std::uint64_t matching_budget(std::uint64_t budget) { return budget ? budget : enumeration_budget(kDefaultMatchingBudget); }

inline void check_matching_budget(int m, std::uint64_t budget) {
  const BigInt size = conjugacy_class_size(static_cast<unsigned>(m));
  if (size > BigInt(budget))
    throw Refusal("there are " + size.str() + " perfect matchings on " + std::to_string(2 * m) +
                  " darts, above the budget of " + std::to_string(budget));
}

// Pairs the least unpaired dart with every larger unpaired dart, recursively.
template <class Visit>
void for_each_matching_rec(std::vector<int>& partner, std::size_t from, Visit& visit) {
  while (from < partner.size() && partner[from] >= 0) ++from;
  if (from == partner.size()) {
    visit(static_cast<const std::vector<int>&>(partner));
    return;
  }
  for (std::size_t x = from + 1; x < partner.size(); ++x) {
    if (partner[x] >= 0) continue;
    partner[from] = static_cast<int>(x);
    partner[x] = static_cast<int>(from);
    for_each_matching_rec(partner, from + 1, visit);
    partner[from] = -1;
    partner[x] = -1;
  }
}

}  // namespace detail

// Calls visit(partner) for every perfect matching extending `fixed`
// (entries -1 are free).
template <class Visit>
void for_each_matching(std::vector<int> fixed, Visit&& visit) {
  detail::for_each_matching_rec(fixed, 0, visit);
}

template <class Visit>
void for_each_matching(int num_darts, Visit&& visit) {
  for_each_matching(std::vector<int>(static_cast<std::size_t>(num_darts), -1), std::forward<Visit>(visit));
}

// Histogram of the number of faces over all |C_{2^m}| matchings.
inline std::map<long long, std::uint64_t> cm_face_distribution(const FixedRotation& R, std::uint64_t budget = 0) {
  detail::check_matching_budget(R.m(), detail::matching_budget(budget));
  std::map<long long, std::uint64_t> hist;
  std::vector<char> seen(static_cast<std::size_t>(R.num_darts()));
  for_each_matching(R.num_darts(), [&](const std::vector<int>& p) { ++hist[R.count_faces(p, seen)]; });
  return hist;
}

// (1/|C_{2^m}|) sum over L of c(R o L).
inline Rational expected_faces_exact_cm(const FixedRotation& R, std::uint64_t budget = 0) {
  BigInt total = 0, count = 0;
  for (const auto& [f, c] : cm_face_distribution(R, budget)) {
    total += BigInt(f) * c;
    count += c;
  }
  return Rational(total, count);
}

// ---------------------------------------------------------------------------
// Possible faces

struct PossibleFace {
  std::vector<int> darts;  // orbit of R o L, starting at its least dart
  std::vector<std::pair<int, int>> edges;  // distinct dart pairs (a < b), sorted
  int root = -1;

  int l() const { return static_cast<int>(darts.size()); }
  int u() const { return static_cast<int>(edges.size()); }
};

// L(d_i) = R^{-1}(d_{i+1}) along the walk. Returns the implied partial
// involution, or nullopt when it is inconsistent or has a fixed point.
inline std::optional<std::vector<int>> implied_pairing(const FixedRotation& R, const std::vector<int>& walk) {
  std::vector<int> partner(static_cast<std::size_t>(R.num_darts()), -1);
  if (walk.empty()) return std::nullopt;
  std::set<int> distinct(walk.begin(), walk.end());
  if (distinct.size() != walk.size()) return std::nullopt;
  for (std::size_t i = 0; i < walk.size(); ++i) {
    const int a = walk[i];
    if (a < 0 || a >= R.num_darts()) return std::nullopt;
    const int b = R.pred(walk[(i + 1) % walk.size()]);
    if (a == b) return std::nullopt;
    auto& pa = partner[static_cast<std::size_t>(a)];
    auto& pb = partner[static_cast<std::size_t>(b)];
    if ((pa >= 0 && pa != b) || (pb >= 0 && pb != a)) return std::nullopt;
    pa = b;
    pb = a;
  }
  return partner;
}

// Builds a PossibleFace from a dart walk; throws if the walk is not realizable.
inline PossibleFace make_possible_face(const FixedRotation& R, std::vector<int> walk) {
  const auto partner = implied_pairing(R, walk);
  if (!partner) throw ValidationError("dart walk is not a face of R o L for any matching L");
  const auto it = std::min_element(walk.begin(), walk.end());
  std::rotate(walk.begin(), it, walk.end());
  PossibleFace f;
  std::set<std::pair<int, int>> es;
  for (int d : walk) {
    const int p = (*partner)[static_cast<std::size_t>(d)];
    es.insert({std::min(d, p), std::max(d, p)});
  }
  f.darts = std::move(walk);
  f.edges.assign(es.begin(), es.end());
  return f;
}

inline bool has_loop(const FixedRotation& R, const PossibleFace& f) {
  return std::any_of(f.edges.begin(), f.edges.end(), [&](auto e) { return R.vertex_of(e.first) == R.vertex_of(e.second); });
}

// No loop, and no two distinct edges of f joining the same pair of vertices.
inline bool is_simple_face(const FixedRotation& R, const PossibleFace& f) {
  std::set<std::pair<int, int>> ends;
  for (auto [a, b] : f.edges) {
    int x = R.vertex_of(a), y = R.vertex_of(b);
    if (x == y) return false;
    if (!ends.insert({std::min(x, y), std::max(x, y)}).second) return false;
  }
  return true;
}

struct FaceOracle {
  int m = 0;
  int kmax = 0;
  std::map<int, BigInt> h, g, h_s, g_s;  // keyed by unique length k
  std::uint64_t nodes = 0;
};

// Visits every possible face with u(f) <= kmax once, walk starting at its least dart.
template <class Visit>
std::uint64_t for_each_possible_face(const FixedRotation& R, int kmax, std::uint64_t budget, Visit&& visit) {
  const int nd = R.num_darts();
  std::vector<int> partner(static_cast<std::size_t>(nd), -1);
  std::vector<int> walk;
  std::uint64_t nodes = 0;
  int edges_used = 0;
  // cur is the last dart on the walk; the next one is R(L(cur)).
  auto rec = [&](auto&& self, int cur) -> void {
    if (++nodes > budget) throw Refusal("possible-face search exceeded the budget of " + std::to_string(budget) + " nodes");
    const int start = walk.front();
    auto step = [&](int x) {
      const int next = R.succ(x);
      if (next == start) {
        visit(walk, partner, edges_used);
        return;
      }
      if (next < start) return;
      if (std::find(walk.begin(), walk.end(), next) != walk.end()) return;  // cannot happen for a permutation
      walk.push_back(next);
      self(self, next);
      walk.pop_back();
    };
    const int p = partner[static_cast<std::size_t>(cur)];
    if (p >= 0) {
      step(p);
      return;
    }
    if (edges_used == kmax) return;
    for (int x = 0; x < nd; ++x) {
      if (x == cur || partner[static_cast<std::size_t>(x)] >= 0) continue;
      partner[static_cast<std::size_t>(cur)] = x;
      partner[static_cast<std::size_t>(x)] = cur;
      ++edges_used;
      step(x);
      --edges_used;
      partner[static_cast<std::size_t>(cur)] = -1;
      partner[static_cast<std::size_t>(x)] = -1;
    }
  };
  for (int d1 = 0; d1 < nd; ++d1) {
    walk.assign(1, d1);
    rec(rec, d1);
  }
  return nodes;
}

// Brute-force h_k, g_k and their simple variants for k <= kmax (default m).
// Roots are the darts of the facial walk, so g_k = sum of l(f) over faces
// with u(f) = k.
inline FaceOracle count_possible_faces(const FixedRotation& R, int kmax = 0, std::uint64_t budget = 0) {
  FaceOracle o;
  o.m = R.m();
  o.kmax = kmax > 0 ? std::min(kmax, R.m()) : R.m();
  budget = budget ? budget : enumeration_budget();
  for (int k = 1; k <= o.kmax; ++k) o.h[k] = o.g[k] = o.h_s[k] = o.g_s[k] = 0;
  o.nodes = for_each_possible_face(R, o.kmax, budget, [&](const std::vector<int>& walk, const std::vector<int>&, int u) {
    const PossibleFace f = make_possible_face(R, walk);
    if (f.u() != u) throw InternalError("edge count mismatch in possible-face search");
    o.h[u] += 1;
    o.g[u] += f.l();
    if (is_simple_face(R, f)) {
      o.h_s[u] += 1;
      o.g_s[u] += f.l();
    }
  });
  return o;
}

// All possible faces as explicit objects (small m).
inline std::vector<PossibleFace> list_possible_faces(const FixedRotation& R, int kmax = 0, std::uint64_t budget = 0) {
  std::vector<PossibleFace> out;
  kmax = kmax > 0 ? std::min(kmax, R.m()) : R.m();
  for_each_possible_face(R, kmax, budget ? budget : enumeration_budget(),
                         [&](const std::vector<int>& walk, const std::vector<int>&, int) { out.push_back(make_possible_face(R, walk)); });
  return out;
}

// (2m-1)(2m-3)...(2m-2k+1)
inline BigInt odd_falling(int m, int k) {
  BigInt r = 1;
  for (int j = 1; j <= k; ++j) r *= (2 * m - 2 * j + 1);
  return r;
}

// sum_k h_k / ((2m-1)(2m-3)...(2m-2k+1))
inline Rational expected_faces_formula(const std::map<int, BigInt>& h, int m) {
  Rational s = 0;
  for (const auto& [k, hk] : h) {
    if (k < 1 || k > m) throw ValidationError("h_k given for k outside [1..m]");
    if (hk != 0) s += Rational(hk, odd_falling(m, k));
  }
  return s;
}

// Number of matchings L for which f is a face of R o L.
inline BigInt face_completion_count(const FixedRotation& R, const PossibleFace& f, std::uint64_t budget = 0) {
  if (!implied_pairing(R, f.darts)) throw ValidationError("face is not realizable");
  detail::check_matching_budget(R.m(), detail::matching_budget(budget));
  const std::size_t len = f.darts.size();
  BigInt count = 0;
  std::vector<int> orbit;
  for_each_matching(R.num_darts(), [&](const std::vector<int>& p) {
    orbit.clear();
    const int s = f.darts.front();
    int d = s;
    do {
      orbit.push_back(d);
      d = R.succ(p[static_cast<std::size_t>(d)]);
    } while (d != s && orbit.size() <= len);
    if (orbit == f.darts) ++count;
  });
  return count;
}

// ((H_m - 1)/2, 4 H_m + 4)
inline std::pair<Rational, Rational> multigraph_bounds(int m) {
  if (m < 1) throw Refusal("multigraph_bounds needs m >= 1");
  const Rational h = harmonic(static_cast<std::uint64_t>(m));
  return {(h - 1) / 2, 4 * h + 4};
}

struct GkBounds {
  BigInt lower;
  BigInt upper;
  std::optional<Rational> simple_h_lower;  // lower bound on h_k^s when 2 <= k <= m - d^2
};

// Closed-form bounds on g_k: lower (2m)(2m-4)...(2m-2k), upper
// 2(2m)(2m-1)(2m-3)...(2m-2k+3); both equal 2m at k = 1. The simple lower
// bound is (1/(4k)) 2m (2m-d^2)(2m-d^2-2)...(2m-d^2-2k+4) on h_k^s.
inline GkBounds gk_bounds(int m, int k, int d_max) {
  if (m < 1 || k < 1 || k > m) throw Refusal("gk_bounds needs 1 <= k <= m");
  GkBounds b;
  if (k == 1) {
    b.lower = b.upper = 2 * m;
  } else {
    b.upper = 2 * BigInt(2 * m);
    for (int j = 1; j <= k - 1; ++j) b.upper *= (2 * m - 2 * j + 1);
    b.lower = 2 * m;
    for (int j = 2; j <= k; ++j) b.lower *= (2 * m - 2 * j);
  }
  const int d2 = d_max * d_max;
  if (k >= 2 && k <= m - d2) {
    BigInt p = 2 * m;
    for (int j = 0; j <= k - 2; ++j) p *= (2 * m - d2 - 2 * j);
    b.simple_h_lower = Rational(p, BigInt(4 * k));
  }
  return b;
}

struct SimpleStatistics {
  Rational lambda;
  std::optional<Rational> mu;
  double simple_probability_reference = 0;  // e^{-lambda - lambda^2}, asymptotic
};

// lambda = sum C(d_i, 2) / 2m; mu_f = sum over distinct vertex pairs {i,j}
// joined by an edge of f of d_i d_j / 2m.
inline SimpleStatistics simple_statistics(const DegreeSequence& ds, const FixedRotation* R = nullptr,
                                          const PossibleFace* f = nullptr) {
  SimpleStatistics s;
  BigInt num = 0;
  for (int x : ds.d) num += BigInt(x) * (x - 1) / 2;
  s.lambda = Rational(num, BigInt(2 * ds.m));
  const double l = to_double(s.lambda);
  s.simple_probability_reference = std::exp(-l - l * l);
  if (f) {
    if (!R) throw ValidationError("mu_f needs the rotation the face lives on");
    if (has_loop(*R, *f)) throw Refusal("mu_f is not defined for faces with a loop");
    std::set<std::pair<int, int>> pairs;
    for (auto [a, b] : f->edges) {
      const int x = R->vertex_of(a), y = R->vertex_of(b);
      pairs.insert({std::min(x, y), std::max(x, y)});
    }
    BigInt t = 0;
    for (auto [x, y] : pairs) t += BigInt(ds.d[static_cast<std::size_t>(x)]) * ds.d[static_cast<std::size_t>(y)];
    s.mu = Rational(t, BigInt(2 * ds.m));
  }
  return s;
}

// Uniform perfect matching of the 2m darts: shuffle, then pair neighbours.
template <Chooser C>
std::vector<int> sample_matching(int num_darts, C& chooser) {
  std::vector<int> order(static_cast<std::size_t>(num_darts));
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[chooser.below(i)]);
  std::vector<int> partner(order.size());
  for (std::size_t i = 0; i + 1 < order.size(); i += 2) {
    partner[static_cast<std::size_t>(order[i])] = order[i + 1];
    partner[static_cast<std::size_t>(order[i + 1])] = order[i];
  }
  return partner;
}

// True when the matching has no loop and no repeated vertex pair.
inline bool matching_is_simple(const FixedRotation& R, const std::vector<int>& partner) {
  std::set<std::pair<int, int>> seen;
  for (std::size_t a = 0; a < partner.size(); ++a) {
    const int b = partner[a];
    if (static_cast<int>(a) > b) continue;
    const int x = R.vertex_of(static_cast<int>(a)), y = R.vertex_of(b);
    if (x == y) return false;
    if (!seen.insert({std::min(x, y), std::max(x, y)}).second) return false;
  }
  return true;
}

struct SimpleSample {
  std::optional<std::vector<int>> matching;  // empty when every attempt failed
  std::uint64_t attempts = 0;
};

template <Chooser C>
SimpleSample sample_simple_matching(const FixedRotation& R, C& chooser, std::uint64_t max_attempts) {
  SimpleSample s;
  while (s.attempts < max_attempts) {
    ++s.attempts;
    auto p = sample_matching(R.num_darts(), chooser);
    if (matching_is_simple(R, p)) {
      s.matching = std::move(p);
      break;
    }
  }
  return s;
}

struct SimpleMapResult {
  std::optional<CombMap> map;
  std::uint64_t attempts = 0;
  bool exhausted() const { return !map.has_value(); }
};

template <Chooser C>
SimpleMapResult sample_simple_map(const FixedRotation& R, C& chooser, std::uint64_t max_attempts) {
  const SimpleSample s = sample_simple_matching(R, chooser, max_attempts);
  SimpleMapResult r;
  r.attempts = s.attempts;
  if (s.matching) r.map = R.to_map(*s.matching);
  return r;
}

// Monte Carlo estimate of E[F_d] over uniform matchings with R fixed.
inline Estimate estimate_cm_faces(const FixedRotation& R, std::uint64_t trials, std::uint64_t seed, unsigned threads = 0) {
  return monte_carlo(trials, seed, threads, [&R]() {
    std::vector<char> seen(static_cast<std::size_t>(R.num_darts()));
    return [&R, seen](Stream& rs) mutable { return R.count_faces(sample_matching(R.num_darts(), rs), seen); };
  });
}

struct SimpleRun {
  Estimate faces;               // over accepted samples
  std::uint64_t accepted = 0;
  std::uint64_t attempts = 0;
  std::uint64_t exhausted = 0;  // trials where max_attempts ran out
  double acceptance_rate() const { return attempts ? static_cast<double>(accepted) / static_cast<double>(attempts) : 0.0; }
};

// `trials` rejection-sampled simple maps; trial i uses substream i.
inline SimpleRun sample_simple_maps(const FixedRotation& R, std::uint64_t trials, std::uint64_t seed,
                                    std::uint64_t max_attempts, unsigned threads = 0) {
  if (trials == 0) throw Refusal("trials must be at least 1");
  const Stream root(seed);
  const unsigned t = std::max(1u, threads ? threads : default_threads());
  struct Part {
    std::uint64_t acc = 0, att = 0, ex = 0, sum = 0;
    unsigned __int128 sq = 0;
  };
  std::vector<Part> parts(t);
  parallel_blocks(trials, t, [&](unsigned w, std::size_t lo, std::size_t hi) {
    Part p;
    std::vector<char> seen(static_cast<std::size_t>(R.num_darts()));
    for (std::size_t i = lo; i < hi; ++i) {
      Stream rs = root.substream(i);
      const SimpleSample s = sample_simple_matching(R, rs, max_attempts);
      p.att += s.attempts;
      if (!s.matching) {
        ++p.ex;
        continue;
      }
      ++p.acc;
      const auto f = static_cast<std::uint64_t>(R.count_faces(*s.matching, seen));
      p.sum += f;
      p.sq += static_cast<unsigned __int128>(f) * f;
    }
    parts[w] = p;
  });
  Part all;
  for (const Part& p : parts) {
    all.acc += p.acc;
    all.att += p.att;
    all.ex += p.ex;
    all.sum += p.sum;
    all.sq += p.sq;
  }
  SimpleRun r;
  r.accepted = all.acc;
  r.attempts = all.att;
  r.exhausted = all.ex;
  r.faces = summarize(all.acc, all.sum, all.sq, seed);
  return r;
}

}  // namespace mapface

#pragma once

#include "combmap.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "rational.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

namespace mapface {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1000000000ULL;

// MAPFACE_BUDGET overrides the default when set to a positive integer.
inline std::uint64_t enumeration_budget(std::uint64_t fallback = kDefaultEnumerationBudget) {
  if (const char* env = std::getenv("MAPFACE_BUDGET")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return fallback;
}

struct FaceCensus {
  std::map<long long, std::uint64_t> by_faces;
  std::map<long long, std::uint64_t> by_genus;
  std::uint64_t total = 0;
  bool reduced = false;        // counts were rescaled from a fixed first rotation
  std::uint64_t scale = 1;     // the rescale factor

  Rational expected_faces() const {
    BigInt s = 0;
    for (const auto& [f, c] : by_faces) s += BigInt(f) * c;
    return total ? Rational(s, BigInt(total)) : Rational(0);
  }
  Rational expected_genus() const {
    BigInt s = 0;
    for (const auto& [g, c] : by_genus) s += BigInt(g) * c;
    return total ? Rational(s, BigInt(total)) : Rational(0);
  }

  FaceCensus& operator+=(const FaceCensus& o) {
    for (const auto& [f, c] : o.by_faces) by_faces[f] += c;
    for (const auto& [g, c] : o.by_genus) by_genus[g] += c;
    total += o.total;
    return *this;
  }
  bool operator==(const FaceCensus& o) const {
    return by_faces == o.by_faces && by_genus == o.by_genus && total == o.total;
  }
};

struct CensusJob {
  bool fix_first_rotation = false;
  bool vertex_transitive = false;  // caller asserts the graph is vertex-transitive
  unsigned shard_index = 0;
  unsigned shard_total = 1;
  std::uint64_t budget = 0;  // 0: enumeration_budget()
  unsigned threads = 0;      // 0: available parallelism
};

// Mixed-radix walk over all rotation systems. Vertex v contributes the digit
// space of (deg(v)-1)! cyclic orders: its smallest dart stays first and the
// remaining darts run through their permutations in lexicographic order. The
// last vertex is the fastest digit.
class RotationOdometer {
 public:
  RotationOdometer(const Graph& g, bool fix_first) : succ_(2 * g.num_edges(), -1) {
    const auto dv = darts_by_vertex_sorted(g);
    for (std::size_t v = 0; v < dv.size(); ++v) {
      Digit dg;
      dg.darts = dv[v];
      const std::size_t d = dg.darts.size();
      dg.radix = 1;
      if (!(fix_first && v == 0))
        for (std::size_t i = 2; i < d; ++i) dg.radix = checked_mul(dg.radix, i);
      digits_.push_back(std::move(dg));
    }
    space_ = 1;
    for (const auto& dg : digits_) space_ = checked_mul(space_, dg.radix);
  }

  // Size of the walked space, or UINT64_MAX on overflow.
  std::uint64_t space() const { return space_; }

  // Position at linear index `index` (0 <= index < space()).
  void seek(std::uint64_t index) {
    for (std::size_t v = digits_.size(); v-- > 0;) {
      Digit& dg = digits_[v];
      dg.value = index % dg.radix;
      index /= dg.radix;
      set_nth(dg, dg.value);
      apply(dg);
    }
  }

  // Advances to the next index; returns false after the last one.
  bool advance() {
    for (std::size_t v = digits_.size(); v-- > 0;) {
      Digit& dg = digits_[v];
      if (dg.radix == 1) continue;
      if (dg.value + 1 < dg.radix) {
        ++dg.value;
        std::next_permutation(dg.order.begin() + 1, dg.order.end());
        apply(dg);
        return true;
      }
      dg.value = 0;
      std::sort(dg.order.begin() + 1, dg.order.end());
      apply(dg);
    }
    return false;
  }

  const std::vector<int>& rotation() const { return succ_; }

  static std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (a == UINT64_MAX || b == UINT64_MAX) return UINT64_MAX;
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    return p > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(p);
  }

 private:
  struct Digit {
    std::vector<int> darts;  // sorted
    std::vector<int> order;  // current cyclic order, order[0] == darts[0]
    std::uint64_t radix = 1;
    std::uint64_t value = 0;
  };

  static std::vector<std::vector<int>> darts_by_vertex_sorted(const Graph& g) {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(g.num_vertices()));
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      out[static_cast<std::size_t>(g.edge(e).u)].push_back(static_cast<int>(2 * e));
      out[static_cast<std::size_t>(g.edge(e).v)].push_back(static_cast<int>(2 * e + 1));
    }
    return out;
  }

  // The index-th permutation (lexicographic) of darts[1..] via the factorial number system.
  static void set_nth(Digit& dg, std::uint64_t index) {
    dg.order = dg.darts;
    if (dg.order.size() <= 2 || dg.radix == 1) return;
    std::vector<int> pool(dg.darts.begin() + 1, dg.darts.end());
    std::uint64_t block = dg.radix;
    std::size_t pos = 1;
    while (!pool.empty()) {
      block /= pool.size();
      const std::size_t pick = static_cast<std::size_t>(index / block);
      index %= block;
      dg.order[pos++] = pool[pick];
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      if (block == 0) block = 1;
    }
  }

  void apply(const Digit& dg) {
    const std::size_t d = dg.order.size();
    for (std::size_t i = 0; i < d; ++i) succ_[static_cast<std::size_t>(dg.order[i])] = dg.order[(i + 1) % d];
  }

  std::vector<Digit> digits_;
  std::vector<int> succ_;
  std::uint64_t space_ = 1;
};

namespace detail {

inline void check_reduction(const Graph& g, const CensusJob& job) {
  if (!job.fix_first_rotation) return;
  if (g.num_vertices() == 0) throw Refusal("fix-first needs at least one vertex");
  if (!g.is_complete() && !job.vertex_transitive)
    throw Refusal("fixing the first rotation is only valid for vertex-transitive graphs; "
                  "this graph is not complete and was not asserted vertex-transitive");
}

inline std::uint64_t first_rotation_count(const Graph& g) {
  std::uint64_t s = 1;
  const int d = g.num_vertices() > 0 ? g.degree(0) : 0;
  for (int i = 2; i < d; ++i) s *= static_cast<std::uint64_t>(i);
  return s;
}

// Visits the rotations of the job's shard, splitting it across threads. Each
// worker calls visit(worker, rotation); `make_state` creates per-worker state.
template <class State, class MakeState, class Visit>
std::vector<State> walk_rotations(const Graph& g, const CensusJob& job, MakeState&& make_state, Visit&& visit) {
  check_reduction(g, job);
  if (job.shard_total == 0 || job.shard_index >= job.shard_total) throw Refusal("shard index must be below shard total");
  RotationOdometer probe(g, job.fix_first_rotation);
  const std::uint64_t space = probe.space();
  const std::uint64_t budget = job.budget ? job.budget : enumeration_budget();
  if (space == UINT64_MAX || space > budget)
    throw Refusal("rotation space has " + (space == UINT64_MAX ? std::string("more than 2^64") : std::to_string(space)) +
                  " embeddings, above the budget of " + std::to_string(budget));
  const auto lo = static_cast<std::uint64_t>(static_cast<unsigned __int128>(space) * job.shard_index / job.shard_total);
  const auto hi =
      static_cast<std::uint64_t>(static_cast<unsigned __int128>(space) * (job.shard_index + 1) / job.shard_total);
  const unsigned threads = job.threads ? job.threads : default_threads();
  std::vector<State> states(std::max(1u, threads));
  parallel_blocks(hi - lo, threads, [&](unsigned w, std::size_t a, std::size_t b) {
    State st = make_state();
    if (a < b) {
      RotationOdometer odo(g, job.fix_first_rotation);
      odo.seek(lo + a);
      for (std::size_t i = a; i < b; ++i) {
        visit(st, odo.rotation());
        if (i + 1 < b) odo.advance();
      }
    }
    states[w] = std::move(st);
  });
  return states;
}

struct FaceCountState {
  std::vector<std::uint64_t> by_orbits;
  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 0;
};

inline std::size_t count_orbits_stamped(const std::vector<int>& succ, FaceCountState& st) {
  if (++st.epoch == 0) {
    std::fill(st.stamp.begin(), st.stamp.end(), 0);
    st.epoch = 1;
  }
  std::size_t c = 0;
  const std::size_t nd = succ.size();
  for (std::size_t d0 = 0; d0 < nd; ++d0) {
    if (st.stamp[d0] == st.epoch) continue;
    ++c;
    for (std::size_t d = d0; st.stamp[d] != st.epoch; d = static_cast<std::size_t>(succ[d ^ 1])) st.stamp[d] = st.epoch;
  }
  return c;
}

}  // namespace detail

// Exact histogram of face counts (and genera) over every rotation system.
// With fix_first_rotation the first vertex keeps one rotation and counts are
// multiplied by (deg(v1)-1)!; this is refused unless the graph is complete or
// asserted vertex-transitive.
inline FaceCensus face_distribution(const Graph& g, const CensusJob& job = {}) {
  const std::size_t nd = 2 * g.num_edges();
  auto states = detail::walk_rotations<detail::FaceCountState>(
      g, job,
      [&] {
        detail::FaceCountState s;
        s.by_orbits.assign(nd + 2, 0);
        s.stamp.assign(nd, 0);
        return s;
      },
      [](detail::FaceCountState& s, const std::vector<int>& succ) { ++s.by_orbits[detail::count_orbits_stamped(succ, s)]; });
  std::vector<int> deg = g.degrees();
  long long isolated = 0;
  for (int d : deg) isolated += (d == 0);
  const long long offset = isolated - g.num_components() + 1;
  FaceCensus c;
  c.reduced = job.fix_first_rotation;
  c.scale = job.fix_first_rotation ? detail::first_rotation_count(g) : 1;
  for (const auto& s : states) {
    for (std::size_t o = 0; o < s.by_orbits.size(); ++o) {
      if (!s.by_orbits[o]) continue;
      const long long f = static_cast<long long>(o) + offset;
      const std::uint64_t cnt = s.by_orbits[o] * c.scale;
      c.by_faces[f] += cnt;
      c.by_genus[genus_from_faces(g, f)] += cnt;
      c.total += cnt;
    }
  }
  return c;
}

// Same census; the genus view is filled alongside.
inline FaceCensus genus_distribution(const Graph& g, const CensusJob& job = {}) { return face_distribution(g, job); }

inline Rational expected_faces_exact(const Graph& g, const CensusJob& job = {}) {
  return face_distribution(g, job).expected_faces();
}

// Product of (deg(v)-1)! over all vertices, exactly.
inline BigInt rotation_system_count(const Graph& g) {
  BigInt t = 1;
  for (int d : g.degrees())
    if (d > 1) t *= factorial(static_cast<unsigned>(d - 1));
  return t;
}

// Average number of faces of K_n whose walk visits k distinct vertices along k
// distinct edges, each once. K_n is vertex-transitive and the statistic is
// invariant under relabelling, so the census fixes the first rotation.
inline Rational expected_short_faces_exact(int n, int k, const CensusJob& base = {}) {
  if (n < 3) throw Refusal("short-face census needs n >= 3");
  if (k < 3 || k > n) throw Refusal("face size k must satisfy 3 <= k <= n");
  const Graph g = complete_graph(n);
  if (base.shard_total != 1) throw Refusal("short-face census does not support sharding");
  CensusJob job = base;
  job.fix_first_rotation = true;
  struct State {
    std::uint64_t hits = 0;
    std::uint64_t maps = 0;
    std::vector<char> seen;
    std::vector<char> vseen;
    std::vector<int> walk;
  };
  const std::size_t nd = 2 * g.num_edges();
  std::vector<int> owner(nd);
  for (std::size_t d = 0; d < nd; ++d) owner[d] = CombMap::dart_owner(g, static_cast<int>(d));
  auto states = detail::walk_rotations<State>(
      g, job,
      [&] {
        State s;
        s.seen.assign(nd, 0);
        s.vseen.assign(static_cast<std::size_t>(n), 0);
        return s;
      },
      [&](State& s, const std::vector<int>& succ) {
        ++s.maps;
        std::fill(s.seen.begin(), s.seen.end(), 0);
        for (std::size_t d0 = 0; d0 < nd; ++d0) {
          if (s.seen[d0]) continue;
          s.walk.clear();
          for (std::size_t d = d0; !s.seen[d]; d = static_cast<std::size_t>(succ[d ^ 1])) {
            s.seen[d] = 1;
            s.walk.push_back(static_cast<int>(d));
          }
          if (static_cast<int>(s.walk.size()) != k) continue;
          bool ok = true;
          for (int d : s.walk) {
            char& v = s.vseen[static_cast<std::size_t>(owner[static_cast<std::size_t>(d)])];
            if (v) ok = false;
            v = 1;
          }
          for (int d : s.walk) s.vseen[static_cast<std::size_t>(owner[static_cast<std::size_t>(d)])] = 0;
          // k distinct vertices on a closed walk of length k >= 3 in a simple
          // graph already force k distinct edges, each used once.
          if (ok) ++s.hits;
        }
      });
  std::uint64_t hits = 0, maps = 0;
  for (const auto& s : states) {
    hits += s.hits;
    maps += s.maps;
  }
  return Rational(BigInt(hits), BigInt(maps));
}

}  // namespace mapface

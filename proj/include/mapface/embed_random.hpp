#pragma once

#include "combmap.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace mapface {

// ---------------------------------------------------------------------------
// Uniform random embeddings

namespace detail {

// Per-vertex dart lists under the fixed numbering, in increasing id order.
inline std::vector<std::vector<int>> darts_by_vertex(const Graph& g) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(g.num_vertices()));
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    out[uz(g.edge(e).u)].push_back(static_cast<int>(2 * e));
    out[uz(g.edge(e).v)].push_back(static_cast<int>(2 * e + 1));
  }
  return out;
}

}  // namespace detail

// Reusable sampler for one graph: draws a rotation and counts faces without
// allocating. Consumes randomness exactly like sample_uniform.
class UniformFaceSampler {
 public:
  explicit UniformFaceSampler(const Graph& g)
      : darts_(detail::darts_by_vertex(g)),
        succ_(2 * g.num_edges()),
        seen_(2 * g.num_edges()),
        scratch_(),
        offset_(static_cast<long long>(std::count_if(darts_.begin(), darts_.end(), [](const auto& v) { return v.empty(); })) -
                g.num_components() + 1) {
    std::size_t dmax = 0;
    for (const auto& v : darts_) dmax = std::max(dmax, v.size());
    scratch_.resize(dmax);
  }

  template <Chooser C>
  void draw(C& chooser) {
    for (const auto& dv : darts_) {
      const std::size_t d = dv.size();
      std::iota(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(d), 0);
      single_cycle_shuffle(std::span<int>(scratch_.data(), d), chooser);
      for (std::size_t i = 0; i < d; ++i) succ_[detail::uz(dv[i])] = dv[detail::uz(scratch_[i])];
    }
  }

  long long faces() {
    std::fill(seen_.begin(), seen_.end(), 0);
    long long orbits = 0;
    for (std::size_t d0 = 0; d0 < succ_.size(); ++d0) {
      if (seen_[d0]) continue;
      ++orbits;
      for (int d = static_cast<int>(d0); !seen_[detail::uz(d)]; d = succ_[detail::uz(d ^ 1)]) seen_[detail::uz(d)] = 1;
    }
    return orbits + offset_;
  }

  template <Chooser C>
  long long operator()(C& chooser) {
    draw(chooser);
    return faces();
  }

  const std::vector<int>& rotation() const { return succ_; }

 private:
  std::vector<std::vector<int>> darts_;
  std::vector<int> succ_;
  std::vector<char> seen_;
  std::vector<int> scratch_;
  long long offset_;
};

// Each vertex gets an independent uniform cyclic order of its darts.
template <Chooser C>
CombMap sample_uniform(const Graph& g, C& chooser) {
  UniformFaceSampler s(g);
  s.draw(chooser);
  return CombMap(g, s.rotation());
}

// ---------------------------------------------------------------------------
// Slot space for K_n: vertex v (index i-1 stands for v_i) owns darts
// v*(n-1) + s for slots s = 0..n-2.

namespace detail {

struct SlotState {
  int n = 0;
  int per = 0;  // n - 1
  std::vector<int> vertex;
  std::vector<int> succ;     // -1 while undefined
  std::vector<int> partner;  // -1 while unpaired

  explicit SlotState(int n_) : n(n_), per(n_ - 1) {
    const std::size_t nd = uz(n * per);
    vertex.resize(nd);
    succ.assign(nd, -1);
    partner.assign(nd, -1);
    for (std::size_t d = 0; d < nd; ++d) vertex[d] = static_cast<int>(d) / per;
  }

  int dart(int v, int s) const { return v * per + s; }

  void set_slot_rotation(int v) {
    for (int s = 0; s < per; ++s) succ[uz(dart(v, s))] = dart(v, (s + 1) % per);
  }

  void pair(int a, int b) {
    partner[uz(a)] = b;
    partner[uz(b)] = a;
  }

  // Follows phi = R o L from `from` until it returns (closed face) or runs
  // into a dart whose partner or successor is still undefined.
  bool closes(int from) const {
    int x = from;
    for (std::size_t guard = 0; guard <= vertex.size(); ++guard) {
      const int p = partner[uz(x)];
      if (p < 0) return false;
      const int nx = succ[uz(p)];
      if (nx < 0) return false;
      if (nx == from) return true;
      x = nx;
    }
    throw InternalError("face trace does not terminate");
  }

  // Start: v_n and v_{n-1} joined through their slot 0, rotations in slot order.
  void start() {
    set_slot_rotation(n - 1);
    set_slot_rotation(n - 2);
    pair(dart(n - 1, 0), dart(n - 2, 0));
  }

  // Placeholder slot-order rotation for vertices whose rotation is undefined.
  std::vector<int> total_rotation() const {
    std::vector<int> r(succ);
    for (std::size_t d = 0; d < r.size(); ++d)
      if (r[d] < 0) r[d] = vertex[d] * per + (static_cast<int>(d) % per + 1) % per;
    return r;
  }

  PartialMap partial(bool placeholder_rotation) const {
    return PartialMap(n, vertex, placeholder_rotation ? total_rotation() : succ, partner);
  }
};

}  // namespace detail

struct ProcessALog {
  std::vector<int> faces_closed;  // indexed by k (entries 1..n-2 used)
  int two_closure_events = 0;     // single pairings that completed two faces
};

// Random process A on K_n. Every vertex keeps its slot order as rotation; the
// randomness only decides the edge pairing.
template <Chooser C>
std::pair<CombMap, ProcessALog> sample_process_A(int n, C& chooser) {
  if (n < 3) throw Refusal("process A needs n >= 3");
  detail::SlotState st(n);
  for (int v = 0; v < n; ++v) st.set_slot_rotation(v);
  st.pair(st.dart(n - 1, 0), st.dart(n - 2, 0));
  ProcessALog log;
  log.faces_closed.assign(detail::uz(n - 1), 0);

  constexpr int kU = -1;
  for (int k = n - 2; k >= 1; --k) {
    const int vk = k - 1;
    std::vector<int> symbols;
    for (int v = k; v < n; ++v) symbols.push_back(v);
    for (int i = 0; i < k - 1; ++i) symbols.push_back(kU);
    int first = 0;
    if (k > 1) {
      symbols.pop_back();  // slot 0 takes one of the u's
      first = 1;
    }
    for (int s = first; s < n - 1; ++s) {
      const std::size_t pick = chooser.below(symbols.size());
      const int sym = symbols[pick];
      symbols.erase(symbols.begin() + static_cast<std::ptrdiff_t>(pick));
      if (sym == kU) continue;
      std::vector<int> open;
      for (int t = 0; t < n - 1; ++t)
        if (st.partner[detail::uz(st.dart(sym, t))] < 0) open.push_back(st.dart(sym, t));
      const int other = open[chooser.below(open.size())];
      const int d = st.dart(vk, s);
      st.pair(d, other);
      const bool a = st.closes(d);
      const bool b = st.closes(other);
      // Both directions find the same face when it runs through the edge twice.
      bool same = false;
      if (a && b) {
        int x = d;
        do {
          if (x == other) same = true;
          x = st.succ[detail::uz(st.partner[detail::uz(x)])];
        } while (x != d && !same);
      }
      const int closed = (a ? 1 : 0) + (b ? 1 : 0) - (same ? 1 : 0);
      log.faces_closed[detail::uz(k)] += closed;
      if (closed == 2) ++log.two_closure_events;
    }
  }
  return {CombMap::from_permutations(n, st.vertex, st.succ, st.partner), std::move(log)};
}

struct ProcessStep {
  int k = 0;
  int open1 = 0;               // O_k
  int potential = 0;           // PF_k
  int strongly_two_open = 0;   // L_k
  int faces_closed = 0;
  int temporary_faces_after = 0;
  int closed_by_open1 = 0;
  int closed_by_potential = 0;
  int closed_by_noncontributing = 0;
  int max_closures_per_choice = 0;
};

struct ProcessTrace {
  int n = 0;
  std::vector<ProcessStep> steps;  // k = n-2 down to 1
  int total_closed() const {
    int t = 0;
    for (const auto& s : steps) t += s.faces_closed;
    return t;
  }
};

// Random process B on K_n: Random choice 1 sends one open dart of every upper
// vertex to v_k; v_k's darts are then ordered 1-open, potential,
// non-contributing (ties by dart id) and its rotation is grown one successor
// at a time, never closing the cycle early.
template <Chooser C>
std::pair<CombMap, ProcessTrace> sample_process_B(int n, C& chooser, bool record = true) {
  if (n < 3) throw Refusal("process B needs n >= 3");
  detail::SlotState st(n);
  st.start();
  ProcessTrace trace;
  trace.n = n;
  const int per = n - 1;

  for (int k = n - 2; k >= 1; --k) {
    const int vk = k - 1;
    ProcessStep step;
    step.k = k;
    // Random choice 1.
    for (int v = k; v < n; ++v) {
      std::vector<int> open;
      for (int t = 0; t < per; ++t)
        if (st.partner[detail::uz(st.dart(v, t))] < 0) open.push_back(st.dart(v, t));
      if (static_cast<int>(open.size()) != k) throw InternalError("upper vertex has wrong number of open darts");
      st.pair(st.dart(vk, v - k), open[chooser.below(open.size())]);
    }

    std::vector<int> order;
    std::vector<int> category(detail::uz(per), 2);
    const StepClassification cls = classify_step(st.partial(true), k);
    step.open1 = cls.open1;
    step.potential = cls.potential;
    step.strongly_two_open = cls.strongly_two_open;
    for (int d : cls.one_open_darts) {
      order.push_back(d);
      category[detail::uz(d % per)] = 0;
    }
    for (int d : cls.potential_darts) {
      order.push_back(d);
      category[detail::uz(d % per)] = 1;
    }
    for (int d : cls.noncontributing_darts) order.push_back(d);

    // Random choice 2.
    std::vector<int> pred(detail::uz(per), -1), succ(detail::uz(per), -1);
    auto forefather = [&](int s) {
      while (pred[detail::uz(s)] >= 0) s = pred[detail::uz(s)];
      return s;
    };
    for (std::size_t i = 0; i < order.size(); ++i) {
      const int s = order[i] % per;
      const int ff = forefather(s);
      int target = ff;
      if (i + 1 < order.size()) {
        std::vector<int> options;
        for (int t = 0; t < per; ++t)
          if (pred[detail::uz(t)] < 0 && t != ff) options.push_back(t);
        target = options[chooser.below(options.size())];
      }
      succ[detail::uz(s)] = target;
      pred[detail::uz(target)] = s;
      const int a = st.dart(vk, s);
      st.succ[detail::uz(a)] = st.dart(vk, target);
      const int w = st.partner[detail::uz(a)];
      int closed = 0;
      if (w >= 0 && st.closes(w)) closed = 1;
      step.faces_closed += closed;
      step.max_closures_per_choice = std::max(step.max_closures_per_choice, closed);
      if (closed) {
        const int c = category[detail::uz(s)];
        if (c == 0) ++step.closed_by_open1;
        else if (c == 1) ++step.closed_by_potential;
        else ++step.closed_by_noncontributing;
      }
    }
    if (record) step.temporary_faces_after = static_cast<int>(temporary_faces(st.partial(true)).size());
    trace.steps.push_back(step);
  }
  return {CombMap::from_permutations(n, st.vertex, st.succ, st.partner), std::move(trace)};
}

// ---------------------------------------------------------------------------
// Monte Carlo harness

struct Estimate {
  double mean = 0;
  double stderr_ = 0;
  std::uint64_t trials = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  std::uint64_t seed = 0;
  // Exact integer moments; the floating summary is derived from these.
  std::uint64_t sum = 0;
  unsigned __int128 sum_sq = 0;

  double stddev() const { return stderr_ * std::sqrt(static_cast<double>(trials)); }
  // Two-sided normal interval with quantile z.
  std::pair<double, double> interval(double z) const { return {mean - z * stderr_, mean + z * stderr_}; }
};

inline Estimate summarize(std::uint64_t trials, std::uint64_t sum, unsigned __int128 sum_sq, std::uint64_t seed) {
  Estimate e;
  e.trials = trials;
  e.seed = seed;
  e.sum = sum;
  e.sum_sq = sum_sq;
  if (trials == 0) return e;
  const long double n = static_cast<long double>(trials);
  const long double mean = static_cast<long double>(sum) / n;
  long double var = 0;
  if (trials > 1) {
    // (n*sum_sq - sum^2) is computed exactly in 128 bits.
    const unsigned __int128 s = sum;
    const unsigned __int128 num = static_cast<unsigned __int128>(trials) * sum_sq - s * s;
    var = static_cast<long double>(num) / (n * (n - 1));
  }
  e.mean = static_cast<double>(mean);
  e.stderr_ = static_cast<double>(std::sqrt(var / n));
  e.ci_lo = e.mean - 1.96 * e.stderr_;
  e.ci_hi = e.mean + 1.96 * e.stderr_;
  return e;
}

// Runs `trials` independent draws of a non-negative integer statistic. Trial i
// uses Stream(seed).substream(i); workers only own disjoint index ranges and
// integer sums are exact, so the result does not depend on `threads`.
// `make` builds one per-worker functor taking a Stream&.
template <class Make>
Estimate monte_carlo(std::uint64_t trials, std::uint64_t seed, unsigned threads, Make&& make) {
  if (trials == 0) throw Refusal("trials must be at least 1");
  const Stream root(seed);
  std::vector<std::uint64_t> sums(std::max(1u, threads == 0 ? default_threads() : threads), 0);
  std::vector<unsigned __int128> sq(sums.size(), 0);
  parallel_blocks(trials, static_cast<unsigned>(sums.size()), [&](unsigned w, std::size_t lo, std::size_t hi) {
    auto stat = make();
    std::uint64_t s = 0;
    unsigned __int128 q = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      Stream rs = root.substream(i);
      const long long x = stat(rs);
      if (x < 0) throw InternalError("negative statistic in Monte Carlo run");
      s += static_cast<std::uint64_t>(x);
      q += static_cast<unsigned __int128>(x) * static_cast<unsigned __int128>(x);
    }
    sums[w] = s;
    sq[w] = q;
  });
  std::uint64_t s = 0;
  unsigned __int128 q = 0;
  for (std::size_t w = 0; w < sums.size(); ++w) {
    s += sums[w];
    q += sq[w];
  }
  return summarize(trials, s, q, seed);
}

// Face counts of `trials` runs, collected per trial index.
template <class Make>
std::vector<long long> monte_carlo_values(std::uint64_t trials, std::uint64_t seed, unsigned threads, Make&& make) {
  const Stream root(seed);
  std::vector<long long> out(trials);
  parallel_blocks(trials, threads, [&](unsigned, std::size_t lo, std::size_t hi) {
    auto stat = make();
    for (std::size_t i = lo; i < hi; ++i) {
      Stream rs = root.substream(i);
      out[i] = stat(rs);
    }
  });
  return out;
}

enum class Process { uniform, A, B };

inline Process parse_process(const std::string& s) {
  if (s == "uniform") return Process::uniform;
  if (s == "A" || s == "a") return Process::A;
  if (s == "B" || s == "b") return Process::B;
  throw ValidationError("unknown process '" + s + "' (expected uniform, A or B)");
}

inline const char* process_name(Process p) {
  switch (p) {
    case Process::uniform: return "uniform";
    case Process::A: return "A";
    case Process::B: return "B";
  }
  return "?";
}

// A per-worker statistic: face count of one embedding drawn by `process`.
// Processes A and B are defined on K_n only.
inline auto face_sampler_factory(const Graph& g, Process process) {
  if (process != Process::uniform && !g.is_complete())
    throw Refusal(std::string("process ") + process_name(process) + " is defined on complete graphs only");
  if (process != Process::uniform && g.num_vertices() < 3)
    throw Refusal(std::string("process ") + process_name(process) + " needs n >= 3");
  return [g, process]() {
    return [sampler = UniformFaceSampler(g), n = g.num_vertices(), process](Stream& rs) mutable -> long long {
      switch (process) {
        case Process::uniform: return sampler(rs);
        case Process::A: return count_faces(sample_process_A(n, rs).first);
        case Process::B: return count_faces(sample_process_B(n, rs, false).first);
      }
      return 0;
    };
  };
}

inline Estimate estimate_expected_faces(const Graph& g, std::uint64_t trials, std::uint64_t seed, unsigned threads = 0,
                                        Process process = Process::uniform) {
  return monte_carlo(trials, seed, threads, face_sampler_factory(g, process));
}

struct GnpResult {
  Estimate estimate;
  double reference = 0;  // ln(p n^2)
  double ratio = 0;
  std::uint64_t rejected = 0;  // disconnected samples discarded (connected-only mode)
};

// Face count of a uniform embedding of G(n,p). With connected_only, each trial
// redraws the graph from its own substream until it is connected.
inline GnpResult gnp_experiment(int n, double p, std::uint64_t trials, std::uint64_t seed, unsigned threads = 0,
                                bool connected_only = false, std::uint64_t max_attempts = 100000) {
  if (n < 1) throw Refusal("gnp needs n >= 1");
  if (!(p > 0.0 && p <= 1.0)) throw Refusal("gnp probability must lie in (0, 1]");
  std::vector<std::uint64_t> rejected(std::max(1u, threads == 0 ? default_threads() : threads), 0);
  std::atomic<unsigned> next_worker{0};
  GnpResult r;
  r.estimate = monte_carlo(trials, seed, static_cast<unsigned>(rejected.size()), [&]() {
    const unsigned slot = next_worker++;
    return [&, slot](Stream& rs) -> long long {
      for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
        Graph g = random_gnp(n, p, rs);
        if (connected_only && !g.is_connected()) {
          ++rejected[slot];
          continue;
        }
        UniformFaceSampler s(g);
        return s(rs);
      }
      throw Refusal("no connected G(n,p) sample within " + std::to_string(max_attempts) + " attempts");
    };
  });
  for (auto x : rejected) r.rejected += x;
  r.reference = std::log(p * static_cast<double>(n) * static_cast<double>(n));
  r.ratio = r.reference != 0 ? r.estimate.mean / r.reference : 0;
  return r;
}

// Histogram of face counts over `trials` runs.
inline std::map<long long, std::uint64_t> face_histogram(const Graph& g, std::uint64_t trials, std::uint64_t seed,
                                                         unsigned threads = 0, Process process = Process::uniform) {
  const auto values = monte_carlo_values(trials, seed, threads, face_sampler_factory(g, process));
  std::map<long long, std::uint64_t> h;
  for (long long v : values) ++h[v];
  return h;
}

}  // namespace mapface

#pragma once

#include <mapface/combmap.hpp>
#include <mapface/graph.hpp>
#include <mapface/rational.hpp>
#include <mapface/rng.hpp>

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

namespace mapface::testing {

// Pearson chi-square goodness of fit. `expected` holds probabilities over the
// same keys as `observed`; bins are merged so that every expected count is at
// least 5. Returns the upper-tail p-value.
inline double chi_square_p(const std::map<long long, std::uint64_t>& observed, const std::map<long long, Rational>& expected) {
  std::uint64_t total = 0;
  for (const auto& [k, c] : observed) total += c;
  for (const auto& [k, c] : observed)
    if (!expected.count(k)) return 0.0;  // an impossible outcome occurred
  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  double o = 0, e = 0;
  for (const auto& [k, p] : expected) {
    auto it = observed.find(k);
    o += it == observed.end() ? 0.0 : static_cast<double>(it->second);
    e += to_double(p) * static_cast<double>(total);
    if (e >= 5) {
      bins.push_back({o, e});
      o = e = 0;
    }
  }
  if (e > 0) {
    if (bins.empty()) bins.push_back({o, e});
    else {
      bins.back().first += o;
      bins.back().second += e;
    }
  }
  if (bins.size() < 2) return 1.0;
  double stat = 0;
  for (auto [ob, ex] : bins) stat += (ob - ex) * (ob - ex) / ex;
  boost::math::chi_squared dist(static_cast<double>(bins.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Exact probability of every face count of a sampler driven through its whole
// choice tree. `run` takes a ChoiceTreeWalker& and returns the face count.
template <class Run>
std::map<long long, Rational> exact_choice_distribution(Run&& run) {
  ChoiceTreeWalker w;
  std::map<long long, Rational> dist;
  do {
    w.rewind();
    const long long f = run(w);
    const auto den = w.leaf_denominator();
    dist[f] += Rational(BigInt(1), BigInt(static_cast<std::uint64_t>(den)));
  } while (w.next());
  return dist;
}

inline std::map<long long, Rational> normalize(const std::map<long long, std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (const auto& [k, c] : counts) total += c;
  std::map<long long, Rational> p;
  for (const auto& [k, c] : counts) p[k] = Rational(BigInt(c), BigInt(total));
  return p;
}

// Small graphs of mixed shape: complete, cycles, trees, multigraphs with
// loops, and disconnected unions with isolated vertices.
inline std::vector<Graph> mixed_graphs() {
  std::vector<Graph> out;
  for (int n = 1; n <= 7; ++n) out.push_back(complete_graph(n));
  Graph cycle(6);
  for (int i = 0; i < 6; ++i) cycle.add_edge(i, (i + 1) % 6);
  out.push_back(cycle);
  Graph star(6);
  for (int i = 1; i < 6; ++i) star.add_edge(0, i);
  out.push_back(star);
  Graph path(5);
  for (int i = 0; i + 1 < 5; ++i) path.add_edge(i, i + 1);
  out.push_back(path);
  Graph multi(3);
  multi.add_edge(0, 0);
  multi.add_edge(0, 1);
  multi.add_edge(0, 1);
  multi.add_edge(1, 2);
  multi.add_edge(2, 2);
  multi.add_edge(1, 2);
  out.push_back(multi);
  Graph petersen(10);
  for (int i = 0; i < 5; ++i) {
    petersen.add_edge(i, (i + 1) % 5);
    petersen.add_edge(i, i + 5);
    petersen.add_edge(5 + i, 5 + (i + 2) % 5);
  }
  out.push_back(petersen);
  out.push_back(disjoint_union(complete_graph(4), complete_graph(3)));
  out.push_back(disjoint_union(disjoint_union(cycle, Graph(2)), multi));
  out.push_back(disjoint_union(complete_graph(5), path));
  return out;
}

}  // namespace mapface::testing

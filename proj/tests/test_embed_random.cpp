#include "support.hpp"

#include <mapface/embed_random.hpp>
#include <mapface/enumerate.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

using namespace mapface;
using mapface::testing::chi_square_p;
using mapface::testing::exact_choice_distribution;

namespace {

const std::map<long long, Rational> kK4{{2, Rational(14, 16)}, {4, Rational(2, 16)}};

std::map<long long, Rational> census_probabilities(const Graph& g) {
  const FaceCensus c = face_distribution(g);
  std::map<long long, Rational> p;
  for (const auto& [f, cnt] : c.by_faces) p[f] = Rational(BigInt(cnt), BigInt(c.total));
  return p;
}

}  // namespace

TEST(Stream, SubstreamsAreReproducible) {
  const Stream root(42);
  Stream a = root.substream(5), b = root.substream(5), c = root.substream(6);
  for (int i = 0; i < 10; ++i) {
    const auto x = a(), y = b(), z = c();
    EXPECT_EQ(x, y);
    EXPECT_NE(x, z);
  }
}

TEST(Stream, BelowIsUniform) {
  Stream rng(1);
  std::map<long long, std::uint64_t> obs;
  for (int i = 0; i < 70000; ++i) ++obs[static_cast<long long>(rng.below(7))];
  std::map<long long, Rational> exp;
  for (int i = 0; i < 7; ++i) exp[i] = Rational(1, 7);
  EXPECT_GT(chi_square_p(obs, exp), 0.001);
  EXPECT_EQ(rng.below(1), 0u);
}

// Every one of the (d-1)! cycles comes from exactly one choice sequence.
TEST(SingleCycleShuffle, ExactlyUniformForSmallDegrees) {
  for (std::size_t d = 1; d <= 5; ++d) {
    std::map<std::vector<int>, Rational> freq;
    ChoiceTreeWalker w;
    do {
      w.rewind();
      const auto cyc = random_cycle(d, w);
      // single cycle
      std::size_t len = 0;
      int x = 0;
      do {
        x = cyc[static_cast<std::size_t>(x)];
        ++len;
      } while (x != 0);
      EXPECT_EQ(len, d);
      freq[cyc] += Rational(BigInt(1), BigInt(static_cast<std::uint64_t>(w.leaf_denominator())));
    } while (w.next());
    const BigInt cycles = factorial(static_cast<unsigned>(d > 0 ? d - 1 : 0));
    EXPECT_EQ(BigInt(freq.size()), cycles);
    for (const auto& [c, p] : freq) EXPECT_EQ(p, Rational(BigInt(1), cycles));
  }
}

TEST(SampleUniform, TriangleAlwaysHasTwoFaces) {
  Stream rng(2);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(count_faces(sample_uniform(complete_graph(3), rng)), 2);
}

TEST(SampleUniform, ExactDistributionOverChoiceTreeMatchesCensus) {
  for (int n = 3; n <= 5; ++n) {
    const Graph g = complete_graph(n);
    const auto dist = exact_choice_distribution([&](ChoiceTreeWalker& w) { return count_faces(sample_uniform(g, w)); });
    EXPECT_EQ(dist, census_probabilities(g)) << "n=" << n;
  }
  EXPECT_EQ(census_probabilities(complete_graph(4)), kK4);
}

TEST(SampleUniform, K4PlanarFrequency) {
  const auto h = face_histogram(complete_graph(4), 1000000, 99, 0);
  const double p = static_cast<double>(h.at(4)) / 1e6;
  const double sigma = std::sqrt(0.125 * 0.875 / 1e6);
  EXPECT_NEAR(p, 0.125, 3 * sigma);
}

TEST(SampleUniform, K5MeanFaces) {
  const Estimate e = estimate_expected_faces(complete_graph(5), 1000000, 7, 0);
  EXPECT_NEAR(e.mean, 19572.0 / 7776.0, 3 * e.stderr_);
}

TEST(ProcessA, ThreeVerticesAlwaysTwoFaces) {
  Stream rng(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(count_faces(sample_process_A(3, rng).first), 2);
}

TEST(ProcessA, ExactChoiceTreeAtFourMatchesTable) {
  const auto dist = exact_choice_distribution([](ChoiceTreeWalker& w) { return count_faces(sample_process_A(4, w).first); });
  EXPECT_EQ(dist, kK4);
}

TEST(ProcessA, ExactChoiceTreeAtFiveMatchesCensus) {
  const auto dist = exact_choice_distribution([](ChoiceTreeWalker& w) { return count_faces(sample_process_A(5, w).first); });
  EXPECT_EQ(dist, census_probabilities(complete_graph(5)));
}

TEST(ProcessA, ClosureLogSumsToFaces) {
  Stream rng(31);
  for (int n = 3; n <= 8; ++n) {
    for (int rep = 0; rep < 200; ++rep) {
      const auto [map, log] = sample_process_A(n, rng);
      int closed = 0;
      for (int c : log.faces_closed) closed += c;
      EXPECT_EQ(closed, count_faces(map));
    }
  }
}

TEST(ProcessA, K5MeanWithinThreeSigma) {
  const Estimate e = estimate_expected_faces(complete_graph(5), 100000, 5, 0, Process::A);
  EXPECT_NEAR(e.mean, 19572.0 / 7776.0, 3 * e.stderr_);
}

TEST(ProcessB, ExactChoiceTreeAtFourMatchesTable) {
  const auto dist = exact_choice_distribution([](ChoiceTreeWalker& w) { return count_faces(sample_process_B(4, w).first); });
  EXPECT_EQ(dist, kK4);
}

TEST(ProcessB, ExactChoiceTreeAtFiveMatchesCensus) {
  const auto dist = exact_choice_distribution([](ChoiceTreeWalker& w) { return count_faces(sample_process_B(5, w).first); });
  EXPECT_EQ(dist, census_probabilities(complete_graph(5)));
}

TEST(ProcessB, TraceInvariants) {
  Stream rng(37);
  for (int n = 3; n <= 9; ++n) {
    for (int rep = 0; rep < 300; ++rep) {
      const auto [map, trace] = sample_process_B(n, rng);
      ASSERT_EQ(static_cast<int>(trace.steps.size()), n - 2);
      EXPECT_EQ(trace.total_closed(), count_faces(map));
      for (const ProcessStep& s : trace.steps) {
        const int active = s.open1 + s.potential;
        EXPECT_LE(active, n - 1);
        EXPECT_EQ(active == n - 1, s.k == 1);
        EXPECT_LE(s.faces_closed, s.potential + (s.k == 1 ? 1 : 0));
        EXPECT_LE(s.max_closures_per_choice, 1);
        EXPECT_EQ(s.closed_by_open1 + s.closed_by_potential + s.closed_by_noncontributing, s.faces_closed);
        EXPECT_EQ(s.closed_by_noncontributing, 0);
      }
    }
  }
}

TEST(ProcessB, PotentialFacesFirstMoment) {
  const int n = 5;
  const std::uint64_t trials = 100000;
  std::vector<double> sum(static_cast<std::size_t>(n), 0), sq(static_cast<std::size_t>(n), 0);
  const Stream root(41);
  for (std::uint64_t i = 0; i < trials; ++i) {
    Stream rs = root.substream(i);
    const auto trace = sample_process_B(n, rs).second;
    for (const ProcessStep& s : trace.steps) {
      sum[static_cast<std::size_t>(s.k)] += s.potential;
      sq[static_cast<std::size_t>(s.k)] += static_cast<double>(s.potential) * s.potential;
    }
  }
  for (int k = 1; k <= n - 2; ++k) {
    const double mean = sum[static_cast<std::size_t>(k)] / trials;
    const double var = sq[static_cast<std::size_t>(k)] / trials - mean * mean;
    const double se = std::sqrt(std::max(var, 0.0) / trials);
    EXPECT_LE(mean, static_cast<double>(n - k) / k + 3 * se) << "k=" << k;
  }
}

TEST(ProcessB, K4ChiSquare) {
  const auto h = face_histogram(complete_graph(4), 100000, 43, 0, Process::B);
  EXPECT_GT(chi_square_p(h, kK4), 0.001);
}

TEST(ProcessA, RefusesTinyN) {
  Stream rng(1);
  EXPECT_THROW(sample_process_A(2, rng), Refusal);
  EXPECT_THROW(sample_process_B(2, rng), Refusal);
  EXPECT_THROW(face_sampler_factory(Graph(4, {{0, 1}}), Process::A), Refusal);
}

TEST(MonteCarlo, TreesGiveExactlyOne) {
  Graph path(6);
  for (int i = 0; i + 1 < 6; ++i) path.add_edge(i, i + 1);
  const Estimate e = estimate_expected_faces(path, 1000, 1, 2);
  EXPECT_EQ(e.mean, 1.0);
  EXPECT_EQ(e.stderr_, 0.0);
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  for (Process p : {Process::uniform, Process::A, Process::B}) {
    const Estimate a = estimate_expected_faces(complete_graph(6), 20000, 77, 1, p);
    const Estimate b = estimate_expected_faces(complete_graph(6), 20000, 77, 3, p);
    const Estimate c = estimate_expected_faces(complete_graph(6), 20000, 77, 8, p);
    EXPECT_EQ(a.sum, b.sum);
    EXPECT_EQ(a.sum, c.sum);
    EXPECT_TRUE(a.sum_sq == b.sum_sq && a.sum_sq == c.sum_sq);
    EXPECT_EQ(a.mean, c.mean);
    EXPECT_EQ(a.stderr_, c.stderr_);
  }
}

TEST(MonteCarlo, EstimateFields) {
  const Estimate e = estimate_expected_faces(complete_graph(5), 5000, 3, 2);
  EXPECT_EQ(e.trials, 5000u);
  EXPECT_EQ(e.seed, 3u);
  EXPECT_DOUBLE_EQ(e.ci_lo, e.mean - 1.96 * e.stderr_);
  EXPECT_DOUBLE_EQ(e.ci_hi, e.mean + 1.96 * e.stderr_);
  EXPECT_THROW(estimate_expected_faces(complete_graph(5), 0, 3, 2), Refusal);
}

TEST(Gnp, FullProbabilityIsCompleteGraph) {
  const GnpResult r = gnp_experiment(2, 1.0, 100, 4, 1);
  EXPECT_EQ(r.estimate.mean, 1.0);
  const GnpResult k7 = gnp_experiment(7, 1.0, 200000, 4, 0);
  EXPECT_NEAR(k7.estimate.mean, 3.1265, 3 * k7.estimate.stderr_);
  EXPECT_NEAR(k7.reference, std::log(49.0), 1e-12);
}

TEST(Gnp, ConnectedOnlyRejects) {
  const GnpResult r = gnp_experiment(12, 0.15, 2000, 8, 2, true);
  EXPECT_GT(r.rejected, 0u);
  EXPECT_THROW(gnp_experiment(12, 0.0, 10, 1), Refusal);
  EXPECT_THROW(gnp_experiment(40, 0.001, 10, 1, 1, true, 5), Refusal);
}

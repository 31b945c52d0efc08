#include "support.hpp"

#include <mapface/configmodel.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace mapface;
using mapface::testing::chi_square_p;

namespace {

// Every sequence here has m <= 6.
const std::vector<std::vector<int>> kBattery{
    {2},          {1, 1},       {4},          {3, 3},          {2, 2, 2},       {1, 2, 3},       {3, 3, 2},
    {3, 3, 3, 3}, {2, 2, 3, 3}, {4, 4},       {3, 3, 4},       {2, 2, 2, 2, 2}, {1, 1, 1, 1, 2}, {5, 5},
    {6, 6},       {4, 4, 4},    {2, 2, 2, 2, 2, 2},            {3, 3, 2, 2, 2}, {5, 3, 2, 2},    {1, 1, 1, 1, 1, 1, 1, 1, 2, 2}};

// Canonical walk (least dart first) of every face of R o L.
std::vector<std::vector<int>> faces_of(const FixedRotation& R, const std::vector<int>& partner) {
  std::vector<std::vector<int>> out;
  std::vector<char> seen(partner.size(), 0);
  for (std::size_t d0 = 0; d0 < partner.size(); ++d0) {
    if (seen[d0]) continue;
    std::vector<int> walk;
    for (int d = static_cast<int>(d0); !seen[static_cast<std::size_t>(d)]; d = R.succ(partner[static_cast<std::size_t>(d)])) {
      seen[static_cast<std::size_t>(d)] = 1;
      walk.push_back(d);
    }
    out.push_back(std::move(walk));
  }
  return out;
}

}  // namespace

TEST(DegreeSequence, Validation) {
  EXPECT_THROW(DegreeSequence({3}), ValidationError);
  EXPECT_THROW(DegreeSequence({0, 0}), ValidationError);
  EXPECT_THROW(DegreeSequence({-1, 3}), ValidationError);
  const DegreeSequence ds = parse_degrees("3,3,4");
  EXPECT_EQ(ds.m, 5);
  EXPECT_EQ(ds.d_max, 4);
  EXPECT_TRUE(ds.all_at_least_two());
  EXPECT_THROW(parse_degrees("3,x"), ValidationError);
  EXPECT_THROW(parse_degrees("3,3 "), ValidationError);
}

TEST(FixedRotation, ExplicitCyclesAndErrors) {
  const DegreeSequence ds({3, 3});
  const FixedRotation R(ds, {{0, 2, 1}, {3, 4, 5}});
  EXPECT_EQ(R.succ(0), 2);
  EXPECT_EQ(R.pred(0), 1);
  EXPECT_THROW(FixedRotation(ds, {{0, 1, 3}, {2, 4, 5}}), ValidationError);
  EXPECT_THROW(FixedRotation(ds, {{0, 1}, {3, 4, 5}}), ValidationError);
  Stream rng(1);
  const FixedRotation Q = FixedRotation::random(ds, rng);
  EXPECT_EQ(Q.cycles().size(), 2u);
}

TEST(ConjugacyClass, Sizes) {
  EXPECT_EQ(conjugacy_class_size(0), BigInt(1));
  EXPECT_EQ(conjugacy_class_size(3), BigInt(15));
  EXPECT_EQ(conjugacy_class_size(5), BigInt(945));
  for (unsigned j = 0; j <= 12; ++j)
    EXPECT_EQ(conjugacy_class_size(j), factorial(2 * j) / (factorial(j) * (BigInt(1) << j)));
}

TEST(SampleMatching, SingleEdge) {
  Stream rng(2);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(sample_matching(2, rng), (std::vector<int>{1, 0}));
}

TEST(SampleMatching, UniformOverFifteen) {
  std::map<std::vector<int>, long long> index;
  for_each_matching(6, [&](const std::vector<int>& p) { index.emplace(p, static_cast<long long>(index.size())); });
  ASSERT_EQ(index.size(), 15u);
  Stream rng(3);
  std::map<long long, std::uint64_t> obs;
  const FixedRotation R(DegreeSequence({3, 3}));
  for (int i = 0; i < 100000; ++i) {
    const auto p = sample_matching(6, rng);
    ++obs[index.at(p)];
    if (i < 1000) {
      // degree sequence preserved
      EXPECT_EQ(R.to_map(p).graph().degrees(), (std::vector<int>{3, 3}));
    }
  }
  std::map<long long, Rational> exp;
  for (long long i = 0; i < 15; ++i) exp[i] = Rational(1, 15);
  EXPECT_GT(chi_square_p(obs, exp), 0.001);
}

TEST(ExactCm, SingleLoop) {
  const FixedRotation R(DegreeSequence({2}));
  EXPECT_EQ(expected_faces_exact_cm(R), Rational(2));
  const FaceOracle o = count_possible_faces(R);
  EXPECT_EQ(o.h.at(1), BigInt(2));
  EXPECT_EQ(expected_faces_formula(o.h, 1), Rational(2));
}

TEST(ExactCm, FormulaOnEmptyH) { EXPECT_EQ(expected_faces_formula({{1, 0}, {2, 0}}, 2), Rational(0)); }

TEST(ExactCm, BudgetRefusal) {
  const FixedRotation R(DegreeSequence({6, 6, 6}));  // m = 9, 34459425 matchings
  try {
    cm_face_distribution(R);
    FAIL() << "expected a refusal";
  } catch (const Refusal& r) {
    EXPECT_NE(std::string(r.what()).find("34459425"), std::string::npos);
  }
  EXPECT_THROW(count_possible_faces(R, 0, 100), Refusal);
}

// The whole battery under the cyclic-shift rotation and a random one.
TEST(Oracle, FormulaEqualsEnumerationAcrossBattery) {
  Stream rng(5);
  for (const auto& d : kBattery) {
    const DegreeSequence ds(d);
    for (int variant = 0; variant < 2; ++variant) {
      const FixedRotation R = variant == 0 ? FixedRotation(ds) : FixedRotation::random(ds, rng);
      const int m = ds.m;
      const auto hist = cm_face_distribution(R);
      const Rational exact = expected_faces_exact_cm(R);
      const FaceOracle o = count_possible_faces(R);
      EXPECT_EQ(expected_faces_formula(o.h, m), exact);
      // Both enumerations count the same faces.
      BigInt total_faces = 0, via_h = 0;
      for (const auto& [f, c] : hist) total_faces += BigInt(f) * c;
      for (const auto& [k, hk] : o.h) via_h += hk * conjugacy_class_size(static_cast<unsigned>(m - k));
      EXPECT_EQ(total_faces, via_h);
      const auto [lo, hi] = multigraph_bounds(m);
      EXPECT_LE(lo, exact);
      EXPECT_LE(exact, hi);
      // The g_k lemmas assume every degree is at least 2.
      const bool lemmas = ds.all_at_least_two();
      if (lemmas) EXPECT_EQ(o.g.at(1), BigInt(2 * m));
      for (int k = 1; k <= m; ++k) {
        const BigInt hk = o.h.at(k), gk = o.g.at(k);
        EXPECT_LE(BigInt(k) * hk, gk);
        EXPECT_LE(gk, BigInt(2 * k) * hk);
        if (lemmas) {
          const GkBounds b = gk_bounds(m, k, ds.d_max);
          EXPECT_LE(b.lower, gk) << "k=" << k;
          EXPECT_LE(gk, b.upper) << "k=" << k;
        }
        EXPECT_LE(o.h_s.at(k), hk);
        EXPECT_LE(o.g_s.at(k), gk);
      }
    }
  }
}

// Tallies the faces of every R o L and compares with the possible faces:
// the two sets agree and each face occurs in |C_{2^{m-u}}| maps.
TEST(Oracle, CompletionCountDependsOnlyOnUniqueLength) {
  for (const auto& d : kBattery) {
    const DegreeSequence ds(d);
    const FixedRotation R(ds);
    std::map<std::vector<int>, std::uint64_t> tally;
    for_each_matching(R.num_darts(), [&](const std::vector<int>& p) {
      for (auto& f : faces_of(R, p)) ++tally[f];
    });
    const auto faces = list_possible_faces(R);
    EXPECT_EQ(faces.size(), tally.size());
    for (const PossibleFace& f : faces) {
      EXPECT_LE(f.u(), f.l());
      EXPECT_LE(f.l(), 2 * f.u());
      EXPECT_EQ(BigInt(tally.at(f.darts)), conjugacy_class_size(static_cast<unsigned>(ds.m - f.u())));
    }
    // Direct completion counts on the first few faces.
    for (std::size_t i = 0; i < std::min<std::size_t>(faces.size(), 4); ++i)
      EXPECT_EQ(face_completion_count(R, faces[i]), conjugacy_class_size(static_cast<unsigned>(ds.m - faces[i].u())));
  }
}

TEST(Oracle, CompletionExamples) {
  const FixedRotation R3(DegreeSequence({3, 3}));
  for (const PossibleFace& f : list_possible_faces(R3)) {
    if (f.u() == 1) EXPECT_EQ(face_completion_count(R3, f), BigInt(3));
    if (f.u() == 3) EXPECT_EQ(face_completion_count(R3, f), BigInt(1));
  }
  const FixedRotation R4(DegreeSequence({2, 2, 2, 2}));
  int seen = 0;
  for (const PossibleFace& f : list_possible_faces(R4)) {
    if (f.u() != 2) continue;
    EXPECT_EQ(face_completion_count(R4, f), BigInt(3));
    ++seen;
  }
  EXPECT_GT(seen, 0);
}

TEST(Oracle, UnrealizableWalkRejected) {
  const FixedRotation R(DegreeSequence({3, 3}));
  EXPECT_THROW(make_possible_face(R, {0, 0}), ValidationError);
  EXPECT_FALSE(implied_pairing(R, {}).has_value());
  PossibleFace bogus;
  bogus.darts = {0, 0};
  EXPECT_THROW(face_completion_count(R, bogus), ValidationError);
}

TEST(FixedRIndependence, SmallSequences) {
  Stream rng(11);
  for (const auto& d : kBattery) {
    const DegreeSequence ds(d);
    if (ds.m > 5) continue;
    const Rational base = expected_faces_exact_cm(FixedRotation(ds));
    for (int rep = 0; rep < 3; ++rep) EXPECT_EQ(expected_faces_exact_cm(FixedRotation::random(ds, rng)), base);
  }
}

TEST(Bounds, MultigraphExamples) {
  EXPECT_EQ(multigraph_bounds(3), std::make_pair(Rational(5, 12), Rational(34, 3)));
  EXPECT_EQ(multigraph_bounds(1), std::make_pair(Rational(0), Rational(8)));
  EXPECT_THROW(multigraph_bounds(0), Refusal);
}

TEST(Bounds, GkExamples) {
  const GkBounds b = gk_bounds(5, 2, 3);
  EXPECT_EQ(b.upper, BigInt(180));
  EXPECT_EQ(b.lower, BigInt(60));
  const GkBounds one = gk_bounds(7, 1, 3);
  EXPECT_EQ(one.lower, BigInt(14));
  EXPECT_EQ(one.upper, BigInt(14));
  EXPECT_THROW(gk_bounds(5, 6, 3), Refusal);
  EXPECT_THROW(gk_bounds(5, 0, 3), Refusal);
  EXPECT_FALSE(gk_bounds(5, 2, 3).simple_h_lower.has_value());
  EXPECT_TRUE(gk_bounds(12, 2, 3).simple_h_lower.has_value());
}

// The closed-form lower bound on h^s_k against brute force for 3 <= k <= m - d^2.
TEST(Bounds, SimpleLowerBoundAgainstBruteForce) {
  int checked = 0;
  for (const std::vector<int>& d : {std::vector<int>(7, 2), std::vector<int>(8, 2), std::vector<int>(9, 2),
                                    std::vector<int>{2, 2, 2, 2, 2, 2, 2, 2, 2, 2}, std::vector<int>(8, 3)}) {
    const DegreeSequence ds(d);
    const int kmax = ds.m - ds.d_max * ds.d_max;
    if (kmax < 3) continue;
    const FixedRotation R(ds);
    const FaceOracle o = count_possible_faces(R, kmax);
    for (int k = 3; k <= kmax; ++k) {
      const GkBounds b = gk_bounds(ds.m, k, ds.d_max);
      ASSERT_TRUE(b.simple_h_lower.has_value());
      ++checked;
      EXPECT_GE(Rational(o.h_s.at(k)), *b.simple_h_lower) << "m=" << ds.m << " k=" << k;
    }
  }
  EXPECT_GT(checked, 0);
}

// At k = 2 the closed form is positive but no simple face exists: two distinct
// non-parallel edges close up only by turning around at a degree-1 vertex.
TEST(Bounds, SimpleLowerBoundFailsAtTwoUniqueEdges) {
  const DegreeSequence ds(std::vector<int>(6, 2));
  const FaceOracle o = count_possible_faces(FixedRotation(ds), 2);
  EXPECT_EQ(o.h_s.at(2), BigInt(0));
  EXPECT_EQ(*gk_bounds(6, 2, 2).simple_h_lower, Rational(12));
}

TEST(SimpleStatistics, Lambda) {
  for (int n : {2, 4, 10, 100}) {
    EXPECT_EQ(simple_statistics(DegreeSequence(std::vector<int>(static_cast<std::size_t>(n), 3))).lambda,
              Rational(1));
    EXPECT_EQ(simple_statistics(DegreeSequence(std::vector<int>(static_cast<std::size_t>(n), 2))).lambda, Rational(1, 2));
  }
  const auto s = simple_statistics(DegreeSequence({3, 3, 3, 3}));
  EXPECT_NEAR(s.simple_probability_reference, std::exp(-2.0), 1e-15);
}

TEST(SimpleStatistics, MuOfFaces) {
  const DegreeSequence ds({3, 3, 3, 3});
  const FixedRotation R(ds);
  const PossibleFace empty;
  EXPECT_EQ(*simple_statistics(ds, &R, &empty).mu, Rational(0));
  int loops = 0, simple = 0;
  for (const PossibleFace& f : list_possible_faces(R, 3)) {
    if (has_loop(R, f)) {
      EXPECT_THROW(simple_statistics(ds, &R, &f), Refusal);
      ++loops;
      continue;
    }
    const auto st = simple_statistics(ds, &R, &f);
    // Each distinct vertex pair of the face contributes 9/12.
    std::set<std::pair<int, int>> pairs;
    for (auto [a, b] : f.edges) pairs.insert({std::min(R.vertex_of(a), R.vertex_of(b)), std::max(R.vertex_of(a), R.vertex_of(b))});
    EXPECT_EQ(*st.mu, Rational(static_cast<long long>(9 * pairs.size()), 12));
    ++simple;
  }
  EXPECT_GT(loops, 0);
  EXPECT_GT(simple, 0);
}

TEST(SimpleMaps, TwoLeavesAlwaysSimple) {
  const FixedRotation R(DegreeSequence({1, 1}));
  const SimpleRun r = sample_simple_maps(R, 1000, 1, 10, 2);
  EXPECT_EQ(r.accepted, 1000u);
  EXPECT_EQ(r.acceptance_rate(), 1.0);
}

TEST(SimpleMaps, TwoCubicVerticesNeverSimple) {
  const FixedRotation R(DegreeSequence({3, 3}));
  Stream rng(4);
  const SimpleMapResult r = sample_simple_map(R, rng, 500);
  EXPECT_TRUE(r.exhausted());
  EXPECT_EQ(r.attempts, 500u);
  int simple = 0;
  for_each_matching(6, [&](const std::vector<int>& p) { simple += matching_is_simple(R, p); });
  EXPECT_EQ(simple, 0);
}

TEST(SimpleMaps, CubicAcceptanceNearReference) {
  const DegreeSequence ds(std::vector<int>(100, 3));
  const FixedRotation R(ds);
  // Draw until 10^4 samples are accepted.
  const Stream root(2024);
  std::uint64_t accepted = 0, attempts = 0, trial = 0;
  while (accepted < 10000) {
    Stream rs = root.substream(trial++);
    const SimpleSample s = sample_simple_matching(R, rs, 1000);
    attempts += s.attempts;
    if (s.matching) {
      ++accepted;
      EXPECT_TRUE(matching_is_simple(R, *s.matching));
    }
  }
  const double rate = static_cast<double>(accepted) / static_cast<double>(attempts);
  EXPECT_NEAR(rate, std::exp(-2.0), 0.05);
}

TEST(Sampling, CmEstimateMatchesExact) {
  const FixedRotation R(DegreeSequence({3, 3, 3, 3}));
  const Estimate e = estimate_cm_faces(R, 200000, 9, 0);
  EXPECT_NEAR(e.mean, to_double(expected_faces_exact_cm(R)), 4 * e.stderr_);
  const Estimate again = estimate_cm_faces(R, 200000, 9, 3);
  EXPECT_EQ(e.sum, again.sum);
}

#include "ptmatch/matcher.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "ptmatch/errors.h"
#include "peel_fuzz.h"
#include "test_util.h"

namespace ptmatch {
namespace {

using testing::make_peel_instance;
using testing::PeelInstance;
using testing::satisfies_hypotheses;
using testing::shuffled_edges;

CandidateMatrix from_rows(std::vector<std::vector<Vertex>> rows) {
  CandidateMatrix b;
  b.n = rows.size();
  b.rows = std::move(rows);
  return b;
}

void expect_bijection(const Matching& m) {
  EXPECT_EQ(m.assign.size(), m.n);
  EXPECT_EQ(m.origin.size(), m.n);
  EXPECT_NO_THROW(Permutation{m.assign});
}

// Peeled pairs must be edges of B; they are disjoint because assign is a
// bijection.
void expect_peeled_in_b(const Matching& m, const CandidateMatrix& b) {
  for (Vertex ip = 0; ip < m.n; ++ip) {
    if (m.origin[ip] == Origin::kPeeled) EXPECT_TRUE(b.get(m.assign[ip], ip));
  }
}

TEST(ApproximateMatchingTest, IdentityPattern) {
  const auto b = from_rows({{0}, {1}, {2}, {3}});
  const auto m = approximate_matching(b);
  EXPECT_EQ(m.assign, (std::vector<Vertex>{0, 1, 2, 3}));
  for (auto o : m.origin) EXPECT_EQ(o, Origin::kPeeled);
}

TEST(ApproximateMatchingTest, AllZerosExtendsToIdentity) {
  const auto m = approximate_matching(from_rows({{}, {}, {}}));
  EXPECT_EQ(m.assign, (std::vector<Vertex>{0, 1, 2}));
  for (auto o : m.origin) EXPECT_EQ(o, Origin::kExtended);
}

TEST(ApproximateMatchingTest, LexicographicSelection) {
  // Smallest edge (0,1) first, then (1,0); row 2 keeps column 2.
  const auto m = approximate_matching(from_rows({{1, 2}, {0, 1}, {1, 2}}));
  EXPECT_EQ(m.assign, (std::vector<Vertex>{1, 0, 2}));
}

// Literal transcription of the peel: scan all remaining edges for the
// lexicographically smallest one, delete its row and column, repeat.
Matching literal_peel(const CandidateMatrix& b) {
  const std::size_t n = b.n;
  std::set<Edge> remaining;
  for (Vertex i = 0; i < n; ++i) {
    for (Vertex ip : b.rows[i]) remaining.insert({i, ip});
  }
  std::vector<Vertex> partial(n, kUnassigned);
  std::vector<Origin> origin(n, Origin::kExtended);
  while (!remaining.empty()) {
    const auto [i, ip] = *remaining.begin();
    partial[ip] = i;
    origin[ip] = Origin::kPeeled;
    for (auto it = remaining.begin(); it != remaining.end();) {
      it = (it->first == i || it->second == ip) ? remaining.erase(it) : std::next(it);
    }
  }
  return extend_to_bijection(partial, origin);
}

TEST(ApproximateMatchingTest, SweepEqualsLiteralPeel) {
  RandomStream rng(3, "peel");
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.below(30);
    CandidateMatrix b;
    b.n = n;
    b.rows.assign(n, {});
    const double density = rng.uniform() * 0.3;
    for (Vertex i = 0; i < n; ++i) {
      for (Vertex ip = 0; ip < n; ++ip) {
        if (rng.uniform() < density) b.rows[i].push_back(ip);
      }
    }
    const auto m = approximate_matching(b);
    EXPECT_EQ(m, literal_peel(b));
    expect_bijection(m);
    expect_peeled_in_b(m, b);
  }
}

TEST(ApproximateMatchingTest, InOrderRejectsForeignEdge) {
  const auto b = from_rows({{0}, {1}});
  const std::vector<Edge> order = {{0, 1}};
  EXPECT_THROW(approximate_matching_in_order(b, order), InputError);
}

TEST(ApproximateMatchingTest, InOrderFollowsGivenOrder) {
  const auto b = from_rows({{0, 1}, {0, 1}});
  const std::vector<Edge> order = {{1, 0}, {0, 0}, {0, 1}, {1, 1}};
  const auto m = approximate_matching_in_order(b, order);
  EXPECT_EQ(m.assign, (std::vector<Vertex>{1, 0}));
}

TEST(PeelGuaranteeTest, PlantedInstanceN200) {
  RandomStream rng(200, "fuzz");
  const auto inst = make_peel_instance(200, 30, 0.05, true, rng);
  ASSERT_TRUE(satisfies_hypotheses(inst));
  const auto m = approximate_matching(inst.b);
  EXPECT_LE(matching_mismatches(m, inst.pi), 120u);
  for (int r = 0; r < 20; ++r) {
    const auto order = shuffled_edges(inst.b, rng);
    EXPECT_LE(matching_mismatches(approximate_matching_in_order(inst.b, order), inst.pi), 120u);
  }
}

TEST(PeelGuaranteeTest, RandomFuzz) {
  RandomStream rng(7, "fuzz");
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 4 + rng.below(80);
    const std::size_t k = rng.below(n / 4 + 1);
    const auto inst = make_peel_instance(n, k, rng.uniform() * 0.5, rng.bernoulli(0.5), rng);
    ASSERT_TRUE(satisfies_hypotheses(inst));
    const auto lex = approximate_matching(inst.b);
    expect_bijection(lex);
    EXPECT_LE(matching_mismatches(lex, inst.pi), 4 * k);
    const auto order = shuffled_edges(inst.b, rng);
    const auto any = approximate_matching_in_order(inst.b, order);
    expect_peeled_in_b(any, inst.b);
    EXPECT_LE(matching_mismatches(any, inst.pi), 4 * k);
  }
}

// n = 4, k = 1: every permutation, every choice of the bad vertex, and every
// filling of the 7 free entries (row pi(x) and column x).
TEST(PeelGuaranteeTest, ExhaustiveN4) {
  const std::size_t n = 4;
  std::vector<Vertex> perm = {0, 1, 2, 3};
  RandomStream rng(4, "orders");
  std::size_t cases = 0;
  do {
    const Permutation pi(perm);
    for (Vertex x = 0; x < n; ++x) {
      std::vector<Edge> free_cells;
      for (Vertex c = 0; c < n; ++c) free_cells.emplace_back(pi(x), c);
      for (Vertex r = 0; r < n; ++r) {
        if (r != pi(x)) free_cells.emplace_back(r, x);
      }
      ASSERT_EQ(free_cells.size(), 7u);
      for (unsigned mask = 0; mask < (1u << 7); ++mask) {
        PeelInstance inst;
        inst.k = 1;
        inst.pi = pi;
        inst.good.assign(n, 1);
        inst.good[x] = 0;
        inst.b.n = n;
        inst.b.rows.assign(n, {});
        for (Vertex i = 0; i < n; ++i) {
          if (i != x) inst.b.rows[pi(i)].push_back(i);
        }
        for (unsigned bit = 0; bit < 7; ++bit) {
          if (mask & (1u << bit)) inst.b.rows[free_cells[bit].first].push_back(free_cells[bit].second);
        }
        for (auto& row : inst.b.rows) std::sort(row.begin(), row.end());
        ASSERT_TRUE(satisfies_hypotheses(inst));
        EXPECT_LE(matching_mismatches(approximate_matching(inst.b), inst.pi), 4u);
        for (int r = 0; r < 5; ++r) {
          const auto order = shuffled_edges(inst.b, rng);
          EXPECT_LE(matching_mismatches(approximate_matching_in_order(inst.b, order), inst.pi),
                    4u);
        }
        ++cases;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(cases, 24u * 4u * 128u);
}

TEST(PeelGuaranteeTest, NoBadVerticesRecoversExactly) {
  RandomStream rng(5, "fuzz");
  for (int t = 0; t < 50; ++t) {
    const auto inst = make_peel_instance(40, 0, 0.3, true, rng);
    EXPECT_EQ(matching_mismatches(approximate_matching(inst.b), inst.pi), 0u);
  }
}

TEST(MismatchTest, Examples) {
  const Permutation truth(std::vector<Vertex>{3, 1, 0, 2});
  Matching same{4, truth.forward(), std::vector<Origin>(4, Origin::kPeeled)};
  EXPECT_EQ(matching_mismatches(same, truth), 0u);
  Matching swapped = same;
  std::swap(swapped.assign[0], swapped.assign[2]);
  EXPECT_EQ(matching_mismatches(swapped, truth), 2u);
  EXPECT_DOUBLE_EQ(4.0 * (1.0 - overlap_fraction(swapped.to_permutation(), truth)), 2.0);
  EXPECT_THROW(matching_mismatches(same, Permutation::identity(5)), InputError);
}

TEST(MismatchTest, ConsistentWithOverlapFraction) {
  RandomStream rng(6, "fuzz");
  for (int t = 0; t < 50; ++t) {
    const auto inst = make_peel_instance(60, 10, 0.2, true, rng);
    const auto m = approximate_matching(inst.b);
    const double overlap = overlap_fraction(m.to_permutation(), inst.pi);
    EXPECT_DOUBLE_EQ(static_cast<double>(matching_mismatches(m, inst.pi)), 60.0 * (1.0 - overlap));
  }
}

TEST(ExtendTest, FillsInIncreasingOrder) {
  const auto m = extend_to_bijection({kUnassigned, 0, kUnassigned, 1},
                                     std::vector<Origin>(4, Origin::kPeeled));
  EXPECT_EQ(m.assign, (std::vector<Vertex>{2, 0, 3, 1}));
  EXPECT_EQ(m.origin[0], Origin::kExtended);
  EXPECT_EQ(m.origin[1], Origin::kPeeled);
}

TEST(ExtendTest, RejectsNonInjective) {
  EXPECT_THROW(extend_to_bijection({0, 0}, std::vector<Origin>(2, Origin::kPeeled)), InputError);
}

TEST(MatchingIoTest, RoundTrip) {
  const auto m = approximate_matching(from_rows({{1}, {}, {0, 2}}));
  std::stringstream ss;
  write_matching(ss, m);
  EXPECT_EQ(read_matching(ss), m);
}

TEST(MatchingIoTest, OriginColumnOptional) {
  std::istringstream in("0 1\n1 0\n");
  const auto m = read_matching(in);
  EXPECT_EQ(m.assign, (std::vector<Vertex>{1, 0}));
}

TEST(MatchingIoTest, RejectsNonBijection) {
  std::istringstream dup("0 1\n1 1\n");
  EXPECT_THROW(read_matching(dup), InputError);
  std::istringstream bad("0 1 sideways\n1 0\n");
  EXPECT_THROW(read_matching(bad), InputError);
}

}  // namespace
}  // namespace ptmatch

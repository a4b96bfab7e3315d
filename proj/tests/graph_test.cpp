#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "botgnn/graph/graph.hpp"
#include "botgnn/graph/normalize.hpp"
#include "test_graphs.hpp"

namespace botgnn {
namespace {

TEST(BuildGraph, CollapsesDuplicatesAndOrientations) {
  const Graph g = Graph::from_edges(EdgeList{{0, 1}, {1, 0}, {1, 2}}, 3);
  EXPECT_EQ(g.m(), 2u);
  auto nb = g.neighbors(1);
  EXPECT_EQ(std::vector<NodeId>(nb.begin(), nb.end()), (std::vector<NodeId>{0, 2}));
}

TEST(BuildGraph, EmptyEdgeList) {
  const Graph g = Graph::from_edges(EdgeList{}, 4);
  EXPECT_EQ(g.n(), 4u);
  EXPECT_EQ(g.m(), 0u);
  for (NodeId i = 0; i < 4; ++i) EXPECT_EQ(g.degree(i), 0u);
}

TEST(BuildGraph, SelfLoopStoredOnceCountsOne) {
  const Graph g = Graph::from_edges(EdgeList{{2, 2}}, 3);
  EXPECT_EQ(g.m(), 1u);
  EXPECT_EQ(g.degree(2), 1u);
  EXPECT_TRUE(g.has_self_loop(2));
  EXPECT_EQ(g.self_loop_count(), 1u);
}

TEST(BuildGraph, OutOfRangeNamesThePair) {
  try {
    Graph::from_edges(EdgeList{{0, 1}, {1, 7}}, 3);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("(1,7)"), std::string::npos);
  }
}

TEST(BuildGraph, RandomGraphsKeepInvariants) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = testing_graphs::random_graph(40, 0.1, seed, /*loops=*/seed % 2 == 0);
    std::size_t entries = 0;
    for (NodeId i = 0; i < g.n(); ++i) {
      auto nb = g.neighbors(i);
      entries += nb.size();
      EXPECT_TRUE(std::adjacent_find(nb.begin(), nb.end(), std::greater_equal<>()) == nb.end());
      for (NodeId j : nb) {
        ASSERT_LT(j, g.n());
        EXPECT_TRUE(g.has_edge(j, i));
      }
    }
    EXPECT_EQ(entries, 2 * (g.m() - g.self_loop_count()) + g.self_loop_count());
  }
}

TEST(AddSelfLoops, Triangle) {
  const Graph g = add_self_loops(testing_graphs::cycle(3));
  EXPECT_EQ(g.m(), 6u);
  for (NodeId i = 0; i < 3; ++i) EXPECT_EQ(g.degree(i), 3u);
}

TEST(AddSelfLoops, Idempotent) {
  const Graph once = add_self_loops(testing_graphs::random_graph(30, 0.2, 3));
  EXPECT_EQ(add_self_loops(once), once);
}

TEST(AddSelfLoops, SingleNode) {
  const Graph g = add_self_loops(Graph::from_edges(EdgeList{}, 1));
  EXPECT_EQ(g.m(), 1u);
  EXPECT_EQ(g.degree(0), 1u);
}

TEST(AddSelfLoops, RaisesDegreeOnlyWhereMissing) {
  const Graph g = Graph::from_edges(EdgeList{{0, 0}, {0, 1}, {1, 2}}, 3);
  const Graph h = add_self_loops(g);
  EXPECT_EQ(h.degree(0), g.degree(0));
  EXPECT_EQ(h.degree(1), g.degree(1) + 1);
  EXPECT_EQ(h.degree(2), g.degree(2) + 1);
}

TEST(Normalize, SymmetricTwoNodesWithLoops) {
  const Graph g = add_self_loops(Graph::from_edges(EdgeList{{0, 1}}, 2));
  const auto a = normalize(g, Normalization::kSymmetric);
  ASSERT_EQ(a.nnz(), 4u);
  for (double v : a.values()) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(Normalize, RegularGraphSourceDegree) {
  const Graph g = testing_graphs::cycle(7);  // 2-regular
  const auto a = normalize(g, Normalization::kSourceDegree);
  for (double v : a.values()) EXPECT_DOUBLE_EQ(v, 0.5);
  const auto sums = testing_graphs::column_sums(a);
  for (double s : sums) EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Normalize, PathSourceDegree) {
  const Graph g = testing_graphs::path(3);
  const auto a = normalize(g, Normalization::kSourceDegree);
  EXPECT_DOUBLE_EQ(a.entry(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(a.entry(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(a.entry(1, 2), 1.0);
  EXPECT_DOUBLE_EQ(a.entry(2, 1), 0.5);
  EXPECT_DOUBLE_EQ(a.entry(0, 2), 0.0);
}

TEST(Normalize, ZeroDegreeNodesGiveZeros) {
  const Graph g = Graph::from_edges(EdgeList{{0, 1}}, 3);
  for (auto mode : {Normalization::kSourceDegree, Normalization::kSymmetric,
                    Normalization::kRowStochastic}) {
    const auto a = normalize(g, mode);
    Tensor2 x(3, 1, 1.0);
    const Tensor2 y = spmm(a, x);
    EXPECT_EQ(y(2, 0), 0.0);
    EXPECT_TRUE(y.all_finite());
  }
}

TEST(NormalizeProperty, SourceDegreeColumnsSumToOne) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Graph g = testing_graphs::random_graph(50, 0.08, seed, seed % 3 == 0);
    const auto a = normalize(g, Normalization::kSourceDegree);
    const auto sums = testing_graphs::column_sums(a);
    for (NodeId j = 0; j < g.n(); ++j) {
      if (g.degree(j) > 0) EXPECT_NEAR(sums[j], 1.0, 1e-12);
      else EXPECT_EQ(sums[j], 0.0);
    }
  }
}

TEST(NormalizeProperty, SymmetricModeIsExactlySymmetric) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Graph g = testing_graphs::random_graph(50, 0.1, seed, true);
    const auto a = normalize(g, Normalization::kSymmetric);
    for (NodeId i = 0; i < g.n(); ++i) {
      for (NodeId j : g.neighbors(i)) EXPECT_EQ(a.entry(i, j), a.entry(j, i));
    }
  }
}

TEST(NormalizeProperty, SourceDegreeOnOnesTracksDegrees) {
  // Non-constant degrees must give a non-constant A 1.
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Graph g = add_self_loops(testing_graphs::random_graph(40, 0.1, seed));
    const auto d = g.degrees();
    if (std::adjacent_find(d.begin(), d.end(), std::not_equal_to<>()) == d.end()) continue;
    const Tensor2 y = spmm(normalize(g, Normalization::kSourceDegree), Tensor2(g.n(), 1, 1.0));
    const auto [lo, hi] = std::minmax_element(y.values().begin(), y.values().end());
    EXPECT_GT(*hi - *lo, 1e-9) << "seed " << seed;
  }
}

TEST(NormalizeProperty, RowStochasticFixesOnes) {
  const Graph g = add_self_loops(testing_graphs::random_graph(40, 0.1, 5));
  const Tensor2 y = spmm(normalize(g, Normalization::kRowStochastic), Tensor2(g.n(), 1, 1.0));
  for (double v : y.values()) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(NormalizeProperty, PermutationCommutes) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = testing_graphs::random_graph(30, 0.15, seed, true);
    const auto perm = testing_graphs::random_permutation(g.n(), seed + 100);
    for (auto mode : {Normalization::kSourceDegree, Normalization::kSymmetric,
                      Normalization::kRowStochastic}) {
      const auto a = normalize(g, mode);
      const auto b = normalize(permute(g, perm), mode);
      for (NodeId i = 0; i < g.n(); ++i) {
        for (NodeId j : g.neighbors(i)) EXPECT_EQ(a.entry(i, j), b.entry(perm[i], perm[j]));
      }
    }
  }
}

TEST(Spmm, SelfLoopOnlyIsIdentity) {
  const Graph g = add_self_loops(Graph::from_edges(EdgeList{}, 4));
  const Tensor2 x{{1, -2}, {3, 4}, {0.5, 6}, {7, 8}};
  for (auto mode : {Normalization::kSourceDegree, Normalization::kSymmetric}) {
    EXPECT_EQ(spmm(normalize(g, mode), x), x);
  }
}

TEST(Spmm, SourceDegreeOnOnes) {
  const Graph g = testing_graphs::random_graph(25, 0.2, 11);
  const Tensor2 y = spmm(normalize(g, Normalization::kSourceDegree), Tensor2(g.n(), 1, 1.0));
  for (NodeId i = 0; i < g.n(); ++i) {
    double expected = 0.0;
    for (NodeId j : g.neighbors(i)) expected += 1.0 / static_cast<double>(g.degree(j));
    EXPECT_DOUBLE_EQ(y(i, 0), expected);
  }
}

TEST(Spmm, SymmetricTwoNodeHandComputed) {
  // [[.5 .5] [.5 .5]] * [1 3]^T = [2 2]^T
  const Graph g = add_self_loops(Graph::from_edges(EdgeList{{0, 1}}, 2));
  const Tensor2 y = spmm(normalize(g, Normalization::kSymmetric), Tensor2{{1}, {3}});
  EXPECT_EQ(y, (Tensor2{{2}, {2}}));
}

TEST(Spmm, TransposedMatchesDense) {
  const Graph g = testing_graphs::random_graph(20, 0.25, 4, true);
  const auto a = normalize(g, Normalization::kSourceDegree);
  Tensor2 x(g.n(), 3);
  for (std::size_t i = 0; i < x.size(); ++i) x.values()[i] = std::sin(static_cast<double>(i));
  const Tensor2 y = spmm_transposed(a, x);
  for (NodeId i = 0; i < g.n(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      double s = 0.0;
      for (NodeId j = 0; j < g.n(); ++j) s += a.entry(j, i) * x(j, c);
      EXPECT_NEAR(y(i, c), s, 1e-14);
    }
  }
}

TEST(Spmm, DimensionMismatch) {
  const auto a = normalize(testing_graphs::cycle(5), Normalization::kSymmetric);
  EXPECT_THROW(spmm(a, Tensor2(4, 2)), InputError);
}

TEST(Permute, IdentityIsEqual) {
  const Graph g = testing_graphs::random_graph(15, 0.3, 2);
  std::vector<NodeId> id(g.n());
  std::iota(id.begin(), id.end(), 0u);
  EXPECT_EQ(permute(g, id), g);
}

TEST(Permute, SwapRelabelsEdge) {
  const Graph g = Graph::from_edges(EdgeList{{0, 2}}, 3);
  const std::vector<NodeId> perm{1, 0, 2};
  EXPECT_EQ(permute(g, perm).edges(), (EdgeList{{1, 2}}));
}

TEST(Permute, PreservesDegreeMultiset) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = testing_graphs::random_graph(30, 0.1, seed);
    auto d1 = g.degrees();
    auto d2 = permute(g, testing_graphs::random_permutation(g.n(), seed)).degrees();
    std::sort(d1.begin(), d1.end());
    std::sort(d2.begin(), d2.end());
    EXPECT_EQ(d1, d2);
  }
}

TEST(Permute, RejectsNonBijection) {
  const Graph g = testing_graphs::cycle(3);
  EXPECT_THROW(permute(g, std::vector<NodeId>{0, 0, 1}), InputError);
  EXPECT_THROW(permute(g, std::vector<NodeId>{0, 1}), InputError);
  EXPECT_THROW(permute(g, std::vector<NodeId>{0, 1, 3}), InputError);
}

TEST(Components, LargestAndInduced) {
  const Graph g = Graph::from_edges(EdgeList{{0, 1}, {2, 3}, {3, 4}}, 6);
  std::size_t count = 0;
  const auto nodes = largest_component(g, &count);
  EXPECT_EQ(count, 3u);
  EXPECT_EQ(nodes, (std::vector<NodeId>{2, 3, 4}));
  const Graph sub = induced_subgraph(g, nodes);
  EXPECT_EQ(sub.edges(), (EdgeList{{0, 1}, {1, 2}}));
}

}  // namespace
}  // namespace botgnn

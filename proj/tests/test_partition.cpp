#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "episim/partition.hpp"

using namespace episim;

namespace {

// Disjoint cover with each piece connected and diameters matching BFS.
void expect_valid(const Graph& g, const Partition& p) {
  std::vector<int> seen(g.node_count(), 0);
  for (std::size_t i = 0; i < p.g(); ++i) {
    ASSERT_FALSE(p.pieces[i].empty());
    EXPECT_EQ(p.piece_sizes[i], p.pieces[i].size());
    for (NodeId v : p.pieces[i]) {
      ++seen[v];
      EXPECT_EQ(p.piece_of[v], i);
    }
    const auto tree = bfs_tree(g, p.pieces[i], p.pieces[i].front());
    EXPECT_EQ(tree.order.size(), p.pieces[i].size());
    EXPECT_LE(tree.height(), p.piece_diameters[i]);
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

}  // namespace

TEST(Partition, RingSquareSegments) {
  const Graph g = gen_ring(100);
  const Partition p = partition_ring(g, true);
  EXPECT_EQ(p.g(), 10u);
  EXPECT_EQ(p.max_diameter(), 9u);
  EXPECT_FALSE(p.ragged);
  expect_valid(g, p);
}

TEST(Partition, RingLenientFoldsRemainder) {
  const Graph g = gen_ring(103);
  EXPECT_THROW(partition_ring(g, true), InvalidParameter);
  const Partition p = partition_ring(g);
  EXPECT_TRUE(p.ragged);
  EXPECT_EQ(p.g(), 10u);
  EXPECT_EQ(p.pieces.back().size(), 13u);
  expect_valid(g, p);
}

TEST(Partition, RingRejectsOtherFamilies) { EXPECT_THROW(partition_ring(gen_grid(16, 2)), InvalidFamily); }

TEST(Partition, GridPiecesForUnitBudget) {
  const Graph g = gen_grid(4096, 2);
  const Partition p = partition_grid(g, 1.0, true);
  EXPECT_EQ(p.g(), 16u);
  EXPECT_EQ(p.max_diameter(), 30u);
  for (auto s : p.piece_sizes) EXPECT_EQ(s, 256u);
  expect_valid(g, p);
}

TEST(Partition, GridLenient) {
  const Graph g = gen_grid(1024, 2);
  const Partition p = partition_grid(g, 1.0);
  expect_valid(g, p);
  EXPECT_TRUE(p.ragged);
  EXPECT_THROW(partition_grid(g, 1.0, true), InvalidParameter);
}

TEST(Partition, RggChunkCountsOnSixthPowers) {
  for (std::size_t n : {64u, 729u, 4096u}) {
    const auto chunks = rgg_tiling(n, 0.05, 1.0).chunks_per_axis;
    const auto expected = static_cast<std::size_t>(std::llround(std::cbrt(static_cast<double>(n))));
    EXPECT_EQ(chunks * chunks, expected) << n;
  }
}

TEST(Partition, RggPartitionIsValid) {
  const std::size_t n = 2000;
  const double r = std::sqrt(5.0 * std::log(2000.0) / 2000.0);
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = gen_rgg(n, r, seed);
    try {
      const Partition p = partition_rgg(g);
      expect_valid(g, p);
      ++ok;
    } catch (const PartitionDegenerate&) {
    }
  }
  EXPECT_GE(ok, 1);
}

TEST(Partition, RggDegenerateAndComplete) {
  EXPECT_THROW(partition_rgg(gen_rgg(3, 0.05, 1)), PartitionDegenerate);
  const Graph single = gen_rgg(1, std::sqrt(2.0), 0);
  const Partition p = partition_rgg(single);
  EXPECT_EQ(p.g(), 1u);
  EXPECT_THROW(partition_rgg(gen_rgg(4, 0.0, 1)), InvalidParameter);
}

TEST(Partition, BfsTreeRejectsDisconnectedPiece) {
  const Graph g = gen_line(5);
  const std::vector<NodeId> piece{0, 2};
  EXPECT_THROW(bfs_tree(g, piece, 0), ConnectivityError);
}

TEST(Partition, DiameterOfWholeGraph) {
  EXPECT_EQ(diameter(gen_ring(10)), 5u);
  EXPECT_EQ(diameter(gen_grid(25, 2)), 8u);
}

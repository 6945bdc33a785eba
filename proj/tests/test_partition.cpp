#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pc2im/errors.hpp"
#include "pc2im/partition.hpp"

using namespace pc2im;

namespace {

PointCloud cloud_from(std::initializer_list<RawPoint> points) {
  PointCloud cloud;
  cloud.points = points;
  return cloud;
}

std::vector<uint32_t> iota_indices(std::size_t n) {
  std::vector<uint32_t> v(n);
  std::iota(v.begin(), v.end(), 0u);
  return v;
}

// Walks the tree and checks the spatial ordering at every interior node.
void check_node(const PartitionNode& node, const PointCloud& cloud,
                std::vector<uint32_t>& leaf_points) {
  if (node.is_leaf()) {
    CHECK(node.tile_id >= 0);
    CHECK(std::is_sorted(node.indices.begin(), node.indices.end()));
    leaf_points.insert(leaf_points.end(), node.indices.begin(),
                       node.indices.end());
    return;
  }
  REQUIRE(node.left);
  REQUIRE(node.right);
  std::vector<uint32_t> left_points, right_points;
  check_node(*node.left, cloud, left_points);
  check_node(*node.right, cloud, right_points);
  double left_max = -1e300, right_min = 1e300;
  for (uint32_t i : left_points) {
    left_max = std::max(left_max, cloud.points[i].coord(node.axis));
  }
  for (uint32_t i : right_points) {
    right_min = std::min(right_min, cloud.points[i].coord(node.axis));
  }
  CHECK(left_max <= right_min);
  CHECK(node.median_value == right_min);
  // Left always receives floor(n/2) of the subtree's points.
  std::size_t total = left_points.size() + right_points.size();
  CHECK(left_points.size() == total / 2);
  leaf_points.insert(leaf_points.end(), left_points.begin(), left_points.end());
  leaf_points.insert(leaf_points.end(), right_points.begin(),
                     right_points.end());
}

}  // namespace

TEST_CASE("median_split takes the floor(n/2) smallest along the axis") {
  PointCloud cloud = cloud_from({{5, 0, 0},
                                 {1, 0, 0},
                                 {3, 0, 0},
                                 {2, 0, 0},
                                 {4, 0, 0}});
  SplitResult split = median_split(iota_indices(5), cloud, Axis::X);
  CHECK(split.left == std::vector<uint32_t>{1, 3});   // x = 1, 2
  CHECK(split.right == std::vector<uint32_t>{0, 2, 4});
}

TEST_CASE("median_split breaks coordinate ties by global index") {
  PointCloud cloud = cloud_from({{7, 0, 0}, {7, 0, 0}, {7, 0, 0}, {7, 0, 0}});
  SplitResult split = median_split(iota_indices(4), cloud, Axis::X);
  CHECK(split.left == std::vector<uint32_t>{0, 1});
  CHECK(split.right == std::vector<uint32_t>{2, 3});
}

TEST_CASE("median_split rejects degenerate input") {
  PointCloud cloud = cloud_from({{0, 0, 0}});
  CHECK_THROWS_AS(median_split(iota_indices(1), cloud, Axis::X), SimError);
  std::vector<uint32_t> oob = {0, 5};
  CHECK_THROWS_AS(median_split(oob, cloud, Axis::X), SimError);
}

TEST_CASE("median_split depends only on the coordinate order") {
  PointCloud cloud = generate_cloud(CloudKind::Clustered, 200, 17);
  PointCloud warped = cloud;
  for (RawPoint& p : warped.points) {
    p.x = std::exp(p.x);           // strictly increasing
    p.y = 2.0 * p.y - 3.0;
    p.z = std::atan(p.z * 5.0);
  }
  for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
    SplitResult a = median_split(iota_indices(200), cloud, axis);
    SplitResult b = median_split(iota_indices(200), warped, axis);
    CHECK(a.left == b.left);
    CHECK(a.right == b.right);
  }
}

TEST_CASE("msp_partition splits down to capacity and preserves every point") {
  PointCloud cloud = generate_cloud(CloudKind::Uniform, 1000, 23);
  PartitionResult result = msp_partition(cloud, 200);

  std::size_t total = 0;
  std::set<uint32_t> seen;
  for (const Tile& tile : result.tiles) {
    CHECK(tile.size() <= 200);
    CHECK(tile.size() == tile.global_indices.size());
    CHECK(std::is_sorted(tile.global_indices.begin(),
                         tile.global_indices.end()));
    for (uint32_t g : tile.global_indices) {
      CHECK(seen.insert(g).second);  // disjoint
    }
    total += tile.size();
  }
  CHECK(total == 1000);
  CHECK(seen.size() == 1000);
  CHECK(*seen.rbegin() == 999);

  std::vector<uint32_t> leaf_points;
  check_node(*result.root, cloud, leaf_points);
  CHECK(leaf_points.size() == 1000);
}

TEST_CASE("msp_partition keeps everything in one tile when it fits") {
  PointCloud cloud = generate_cloud(CloudKind::Uniform, 64, 2);
  PartitionResult result = msp_partition(cloud, 64);
  REQUIRE(result.tiles.size() == 1);
  CHECK(result.root->is_leaf());
  CHECK(result.tiles[0].size() == 64);
  CHECK(utilization(result.tiles, 64) == 1.0);
}

TEST_CASE("msp_partition splits along the widest axis, ties to the lowest") {
  PointCloud cloud = cloud_from({{0, 0, 0},
                                 {1, 5, 0},
                                 {2, 10, 0},
                                 {3, 2, 0}});
  PartitionResult result = msp_partition(cloud, 2);
  CHECK(result.root->axis == int(Axis::Y));  // y extent 10 > x extent 3

  PointCloud tied = cloud_from({{0, 0, 0},
                                {1, 1, 0},
                                {2, 2, 0},
                                {2, 1, 0}});
  result = msp_partition(tied, 2);
  CHECK(result.root->axis == int(Axis::X));  // x and y both span 2
}

TEST_CASE("msp_partition is invariant under positive affine rescaling") {
  PointCloud cloud = generate_cloud(CloudKind::Gaussian, 300, 31);
  PointCloud scaled = cloud;
  for (RawPoint& p : scaled.points) {
    p.x = 4.0 * p.x + 100.0;  // one common positive scale, per-axis offsets
    p.y = 4.0 * p.y - 7.0;
    p.z = 4.0 * p.z;
  }
  PartitionResult a = msp_partition(cloud, 64);
  PartitionResult b = msp_partition(scaled, 64);
  REQUIRE(a.tiles.size() == b.tiles.size());
  for (std::size_t i = 0; i < a.tiles.size(); ++i) {
    CHECK(a.tiles[i].global_indices == b.tiles[i].global_indices);
    // The quantized images agree too: each tile's lattice spans its own box.
    CHECK(a.tiles[i].points == b.tiles[i].points);
  }
}

TEST_CASE("msp_partition validates arguments") {
  PointCloud cloud = generate_cloud(CloudKind::Uniform, 8, 1);
  CHECK_THROWS_AS(msp_partition(cloud, 0), SimError);
  CHECK_THROWS_AS(msp_partition(PointCloud{}, 16), SimError);
}

TEST_CASE("utilization averages the fill ratio") {
  PointCloud cloud = generate_cloud(CloudKind::Uniform, 96, 5);
  PartitionResult result = msp_partition(cloud, 64);
  REQUIRE(result.tiles.size() == 2);  // 48 + 48
  CHECK(utilization(result.tiles, 64) == doctest::Approx(0.75));
}

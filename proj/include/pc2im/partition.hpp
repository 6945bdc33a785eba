#pragma once

#include <memory>
#include <span>
#include <vector>

#include "pc2im/pointcloud.hpp"

namespace pc2im {

enum class Axis { X = 0, Y = 1, Z = 2 };
const char* axis_name(Axis axis);

struct SplitResult {
  std::vector<uint32_t> left;   // floor(n/2) smallest along the axis
  std::vector<uint32_t> right;  // both sides ascending by global index
};

// Median split along one axis. Coordinate ties are broken by global index so
// the split is a pure function of the inputs.
SplitResult median_split(std::span<const uint32_t> indices,
                         const PointCloud& cloud, Axis axis);

struct PartitionNode {
  // Interior node: axis >= 0, children set, indices empty.
  // Leaf: axis == -1, indices = global point indices, tile_id set.
  int axis = -1;
  double median_value = 0.0;  // smallest coordinate on the right side
  std::unique_ptr<PartitionNode> left;
  std::unique_ptr<PartitionNode> right;
  std::vector<uint32_t> indices;
  int tile_id = -1;

  bool is_leaf() const { return axis < 0; }
};

struct PartitionResult {
  std::unique_ptr<PartitionNode> root;
  std::vector<Tile> tiles;  // depth-first (left-to-right) leaf order
};

// Recursive median partitioning: splits along the axis with the widest raw
// extent until every leaf holds at most `capacity` points, then quantizes
// each leaf into a Tile.
PartitionResult msp_partition(const PointCloud& cloud, uint32_t capacity);

// Mean fill ratio of the tiles against a common capacity.
double utilization(std::span<const Tile> tiles, uint32_t capacity);

}  // namespace pc2im

#include "pc2im/partition.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "pc2im/errors.hpp"

namespace pc2im {

const char* axis_name(Axis axis) {
  switch (axis) {
    case Axis::X:
      return "x";
    case Axis::Y:
      return "y";
    case Axis::Z:
      return "z";
  }
  return "?";
}

SplitResult median_split(std::span<const uint32_t> indices,
                         const PointCloud& cloud, Axis axis) {
  if (indices.size() < 2) {
    throw_invalid("median_split: need at least 2 indices");
  }
  const int a = static_cast<int>(axis);
  for (uint32_t idx : indices) {
    if (idx >= cloud.size()) {
      throw_invalid("median_split: index " + std::to_string(idx) +
                    " out of range");
    }
  }

  std::vector<uint32_t> order(indices.begin(), indices.end());
  std::sort(order.begin(), order.end(), [&](uint32_t lhs, uint32_t rhs) {
    double cl = cloud.points[lhs].coord(a);
    double cr = cloud.points[rhs].coord(a);
    if (cl != cr) return cl < cr;
    return lhs < rhs;
  });

  const std::size_t half = order.size() / 2;
  SplitResult split;
  split.left.assign(order.begin(), order.begin() + half);
  split.right.assign(order.begin() + half, order.end());
  std::sort(split.left.begin(), split.left.end());
  std::sort(split.right.begin(), split.right.end());
  return split;
}

namespace {

Axis widest_axis(const PointCloud& cloud, std::span<const uint32_t> indices) {
  double best_extent = -1.0;
  int best_axis = 0;
  for (int a = 0; a < 3; ++a) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (uint32_t idx : indices) {
      double v = cloud.points[idx].coord(a);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_extent) {  // ties resolve to the lowest axis index
      best_extent = hi - lo;
      best_axis = a;
    }
  }
  return static_cast<Axis>(best_axis);
}

std::unique_ptr<PartitionNode> build_node(const PointCloud& cloud,
                                          std::vector<uint32_t> indices,
                                          uint32_t capacity,
                                          PartitionResult& result) {
  auto node = std::make_unique<PartitionNode>();
  if (indices.size() <= capacity) {
    node->tile_id = static_cast<int>(result.tiles.size());
    std::vector<RawPoint> pts;
    pts.reserve(indices.size());
    for (uint32_t idx : indices) pts.push_back(cloud.points[idx]);
    result.tiles.push_back(quantize_tile(pts, indices, capacity));
    node->indices = std::move(indices);
    return node;
  }

  Axis axis = widest_axis(cloud, indices);
  SplitResult split = median_split(indices, cloud, axis);
  node->axis = static_cast<int>(axis);
  double median = std::numeric_limits<double>::infinity();
  for (uint32_t idx : split.right) {
    median = std::min(median, cloud.points[idx].coord(node->axis));
  }
  node->median_value = median;
  node->left = build_node(cloud, std::move(split.left), capacity, result);
  node->right = build_node(cloud, std::move(split.right), capacity, result);
  return node;
}

}  // namespace

PartitionResult msp_partition(const PointCloud& cloud, uint32_t capacity) {
  if (capacity == 0) throw_invalid("msp_partition: capacity must be positive");
  if (cloud.points.empty()) throw_invalid("msp_partition: empty cloud");

  std::vector<uint32_t> all(cloud.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = uint32_t(i);

  PartitionResult result;
  result.root = build_node(cloud, std::move(all), capacity, result);
  return result;
}

double utilization(std::span<const Tile> tiles, uint32_t capacity) {
  if (tiles.empty()) throw_invalid("utilization: no tiles");
  if (capacity == 0) throw_invalid("utilization: capacity must be positive");
  double sum = 0.0;
  for (const Tile& t : tiles) sum += double(t.size()) / double(capacity);
  return sum / double(tiles.size());
}

}  // namespace pc2im

#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "pc2im/geometry.hpp"
#include "pc2im/pointcloud.hpp"

namespace pc2im::test {

// Tile of n seeded-random quantized points, full 16-bit range. Bypasses the
// raw-coordinate path so quantization behavior cannot mask other modules.
inline Tile random_tile(std::size_t n, uint64_t seed,
                        uint32_t capacity = 2048) {
  std::mt19937_64 rng(seed);
  Tile tile;
  tile.capacity = capacity;
  tile.points.reserve(n);
  tile.global_indices.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    tile.points.push_back(QuantPoint{uint16_t(rng()), uint16_t(rng()),
                                     uint16_t(rng())});
    tile.global_indices.push_back(uint32_t(i));
  }
  tile.quant_scale = {1.0, 1.0, 1.0};
  return tile;
}

// Plain quadratic FPS: recomputes every point's distance to the whole
// sampled set each step. Deliberately shares no code with exact_fps.
inline std::vector<uint32_t> brute_fps(const Tile& tile, std::size_t m,
                                       uint32_t seed_index, Metric metric) {
  std::vector<uint32_t> selected;
  if (m == 0) return selected;
  selected.push_back(seed_index);
  while (selected.size() < m) {
    uint64_t best_dist = 0;
    uint32_t best = 0;
    bool have = false;
    for (uint32_t i = 0; i < tile.size(); ++i) {
      uint64_t to_set = UINT64_MAX;
      for (uint32_t s : selected) {
        uint64_t d = metric == Metric::L1
                         ? uint64_t(l1(tile.points[i], tile.points[s]))
                         : l2_sq(tile.points[i], tile.points[s]);
        to_set = std::min(to_set, d);
      }
      if (!have || to_set > best_dist) {
        best_dist = to_set;
        best = i;
        have = true;
      }
    }
    selected.push_back(best);
  }
  return selected;
}

}  // namespace pc2im::test

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pc2im/pointcloud.hpp"

namespace pc2im {

// L1 distances between 16-bit quantized points fit in 19 bits
// (3 * 65535 = 196605 < 2^19). The CAM stores exactly this width.
using Distance19 = uint32_t;
inline constexpr Distance19 kDistance19Max = (1u << 19) - 1;  // 524287
inline constexpr Distance19 kL1Max = 3 * kQuantMax;           // 196605

enum class Metric { L1, L2 };

struct QueryConfig {
  uint32_t radius = 0;         // ball radius R, quantized units
  double scale_factor = 1.6;   // lattice range L = round(scale_factor * R)
  uint32_t max_neighbors = 1;  // K, nearest-K truncation
};

uint64_t l2_sq(QuantPoint a, QuantPoint b);
Distance19 l1(QuantPoint a, QuantPoint b);

// Farthest point sampling, exact reference form: keep per-point minimum
// distance to the sampled set, each step take the argmax (ties -> lowest
// index). The first centroid is seed_index. Returns tile-local indices.
std::vector<uint32_t> exact_fps(const Tile& tile, std::size_t m,
                                uint32_t seed_index, Metric metric);

// Nearest-K points within Euclidean radius R of the center point, ordered by
// (squared distance, index). The center itself is a neighbor at distance 0.
std::vector<uint32_t> ball_query(const Tile& tile, uint32_t center_idx,
                                 uint32_t radius, uint32_t max_neighbors);

uint64_t lattice_range(const QueryConfig& cfg);

// L1 ("lattice") approximation of ball_query: nearest-K by L1 distance among
// points with l1 <= round(scale_factor * R).
std::vector<uint32_t> lattice_query(const Tile& tile, uint32_t center_idx,
                                    const QueryConfig& cfg);

// k nearest points to an arbitrary center (not necessarily in the tile),
// ordered by (distance, index).
std::vector<uint32_t> knn(const Tile& tile, QuantPoint center, uint32_t k,
                          Metric metric);

// Inverse-distance interpolation weights with epsilon = 1:
// w_i = (1/(d_i+1)) / sum_j (1/(d_j+1)). Always sums to 1.
std::vector<double> interpolate_weights(std::span<const Distance19> distances);

}  // namespace pc2im

#include "pc2im/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "pc2im/errors.hpp"

namespace pc2im {

namespace {

inline uint32_t absdiff(uint16_t a, uint16_t b) {
  return a > b ? uint32_t(a - b) : uint32_t(b - a);
}

uint64_t metric_dist(QuantPoint a, QuantPoint b, Metric metric) {
  return metric == Metric::L1 ? uint64_t(l1(a, b)) : l2_sq(a, b);
}

// Shared nearest-K selection: keep candidates ordered by (distance, index).
std::vector<uint32_t> nearest_k(std::vector<std::pair<uint64_t, uint32_t>>&& c,
                                uint32_t k) {
  std::sort(c.begin(), c.end());
  if (c.size() > k) c.resize(k);
  std::vector<uint32_t> out;
  out.reserve(c.size());
  for (const auto& [d, idx] : c) out.push_back(idx);
  return out;
}

}  // namespace

uint64_t l2_sq(QuantPoint a, QuantPoint b) {
  uint64_t dx = absdiff(a.qx, b.qx);
  uint64_t dy = absdiff(a.qy, b.qy);
  uint64_t dz = absdiff(a.qz, b.qz);
  return dx * dx + dy * dy + dz * dz;
}

Distance19 l1(QuantPoint a, QuantPoint b) {
  return absdiff(a.qx, b.qx) + absdiff(a.qy, b.qy) + absdiff(a.qz, b.qz);
}

std::vector<uint32_t> exact_fps(const Tile& tile, std::size_t m,
                                uint32_t seed_index, Metric metric) {
  const std::size_t n = tile.size();
  if (m > n) {
    throw_invalid("exact_fps: m = " + std::to_string(m) + " exceeds tile size " +
                  std::to_string(n));
  }
  if (m == 0) return {};
  if (seed_index >= n) throw_invalid("exact_fps: seed_index out of range");

  std::vector<uint32_t> selected;
  selected.reserve(m);
  selected.push_back(seed_index);

  std::vector<uint64_t> min_dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    min_dist[i] = metric_dist(tile.points[i], tile.points[seed_index], metric);
  }
  while (selected.size() < m) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (min_dist[i] > min_dist[best]) best = i;  // ties keep the lowest index
    }
    selected.push_back(uint32_t(best));
    for (std::size_t i = 0; i < n; ++i) {
      min_dist[i] = std::min(
          min_dist[i], metric_dist(tile.points[i], tile.points[best], metric));
    }
  }
  return selected;
}

std::vector<uint32_t> ball_query(const Tile& tile, uint32_t center_idx,
                                 uint32_t radius, uint32_t max_neighbors) {
  if (center_idx >= tile.size()) throw_invalid("ball_query: center out of range");
  if (max_neighbors == 0) throw_invalid("ball_query: max_neighbors must be >= 1");
  const uint64_t r_sq = uint64_t(radius) * uint64_t(radius);
  std::vector<std::pair<uint64_t, uint32_t>> candidates;
  for (uint32_t i = 0; i < tile.size(); ++i) {
    uint64_t d = l2_sq(tile.points[i], tile.points[center_idx]);
    if (d <= r_sq) candidates.emplace_back(d, i);
  }
  return nearest_k(std::move(candidates), max_neighbors);
}

uint64_t lattice_range(const QueryConfig& cfg) {
  if (!(cfg.scale_factor > 0.0)) {
    throw_invalid("lattice_range: scale_factor must be positive");
  }
  return uint64_t(round_half_up(cfg.scale_factor * double(cfg.radius)));
}

std::vector<uint32_t> lattice_query(const Tile& tile, uint32_t center_idx,
                                    const QueryConfig& cfg) {
  if (center_idx >= tile.size()) {
    throw_invalid("lattice_query: center out of range");
  }
  if (cfg.max_neighbors == 0) {
    throw_invalid("lattice_query: max_neighbors must be >= 1");
  }
  const uint64_t range = lattice_range(cfg);
  std::vector<std::pair<uint64_t, uint32_t>> candidates;
  for (uint32_t i = 0; i < tile.size(); ++i) {
    uint64_t d = l1(tile.points[i], tile.points[center_idx]);
    if (d <= range) candidates.emplace_back(d, i);
  }
  return nearest_k(std::move(candidates), cfg.max_neighbors);
}

std::vector<uint32_t> knn(const Tile& tile, QuantPoint center, uint32_t k,
                          Metric metric) {
  if (k == 0) throw_invalid("knn: k must be >= 1");
  if (k > tile.size()) {
    throw_invalid("knn: k = " + std::to_string(k) + " exceeds tile size " +
                  std::to_string(tile.size()));
  }
  std::vector<std::pair<uint64_t, uint32_t>> candidates;
  candidates.reserve(tile.size());
  for (uint32_t i = 0; i < tile.size(); ++i) {
    candidates.emplace_back(metric_dist(tile.points[i], center, metric), i);
  }
  return nearest_k(std::move(candidates), k);
}

std::vector<double> interpolate_weights(
    std::span<const Distance19> distances) {
  if (distances.empty()) throw_invalid("interpolate_weights: no distances");
  std::vector<double> weights(distances.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < distances.size(); ++i) {
    weights[i] = 1.0 / (double(distances[i]) + 1.0);
    sum += weights[i];
  }
  for (double& w : weights) w /= sum;
  return weights;
}

}  // namespace pc2im

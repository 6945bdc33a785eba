#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pc2im {

inline constexpr uint32_t kQuantMax = 65535;   // per-axis quantized range
inline constexpr uint32_t kPointBits = 48;     // 3 x 16-bit components

// All integer rounding goes through round-half-up (0.5 rounds toward +inf),
// which keeps quantization monotone in the input.
inline int64_t round_half_up(double v) {
  return static_cast<int64_t>(std::floor(v + 0.5));
}

struct RawPoint {
  double x = 0.0, y = 0.0, z = 0.0;
  double coord(int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
};

struct PointCloud {
  std::vector<RawPoint> points;
  std::string source;  // origin string for reports ("file:..." etc.)

  std::size_t size() const { return points.size(); }
};

struct QuantPoint {
  uint16_t qx = 0, qy = 0, qz = 0;
  uint16_t coord(int axis) const {
    return axis == 0 ? qx : (axis == 1 ? qy : qz);
  }
  friend bool operator==(const QuantPoint&, const QuantPoint&) = default;
};

// A tile is a leaf of the spatial partition: quantized points plus the
// affine map back to raw coordinates. quant_scale is in raw units per
// quantization step and is 0 on an axis with zero extent.
struct Tile {
  std::vector<QuantPoint> points;
  std::vector<uint32_t> global_indices;  // ascending, distinct
  RawPoint quant_origin;
  std::array<double, 3> quant_scale{0.0, 0.0, 0.0};
  uint32_t capacity = 0;

  std::size_t size() const { return points.size(); }
};

enum class CloudFormat { XyzAscii, F32leBinary };
enum class CloudKind { Uniform, Gaussian, Clustered };

CloudFormat cloud_format_from_string(const std::string& name);
CloudKind cloud_kind_from_string(const std::string& name);

PointCloud load_cloud(const std::string& path, CloudFormat format);
void save_cloud(const PointCloud& cloud, const std::string& path,
                CloudFormat format);

// Deterministic synthetic clouds: identical (kind, n, seed) always yields the
// identical cloud. Uniform fills the unit cube; gaussian is sigma=0.2 around
// the cube center; clustered draws 8 seeded gaussian blobs.
PointCloud generate_cloud(CloudKind kind, std::size_t n, uint64_t seed);

// Maps each point onto the 16-bit lattice spanned by the bounding box of the
// given points (round half up). Throws if the point count exceeds capacity.
Tile quantize_tile(std::span<const RawPoint> points,
                   std::span<const uint32_t> global_indices,
                   uint32_t capacity);

RawPoint dequantize(const Tile& tile, QuantPoint p);

}  // namespace pc2im

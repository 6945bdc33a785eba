#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pc2im/costmodel.hpp"
#include "pc2im/geometry.hpp"
#include "pc2im/pointcloud.hpp"

namespace pc2im {

// Physical arrangement of the in-memory distance array: groups of columns,
// each column holding a fixed number of stacked points. The default is
// 4 groups x 16 columns x 32 points = 2048 points of 48 bits each.
struct ApdCimGeometry {
  uint32_t ptg_count = 4;
  uint32_t ptc_per_ptg = 16;
  uint32_t points_per_ptc = 32;

  uint32_t capacity() const { return ptg_count * ptc_per_ptg * points_per_ptc; }
};

inline constexpr uint32_t kExternalReference = 0xffffffffu;

// One full sweep of distances from the current reference to every loaded
// point, aligned to tile-local indices. reference_index is kExternalReference
// when the reference operand did not come from the array itself.
struct DistanceBatch {
  std::vector<Distance19> distances;
  uint32_t reference_index = kExternalReference;
  uint64_t cycles_used = 0;
};

// Behavioral model of the L1 distance array. Distances are exact; the cycle
// model produces a fixed number of results per cycle across all groups.
class ApdCimArray {
 public:
  explicit ApdCimArray(AccessCounters& counters, ApdCimGeometry geometry = {},
                       uint32_t distances_per_cycle = 16);

  void load_tile(const Tile& tile);
  void set_reference(uint32_t local_index);
  void set_reference_point(QuantPoint reference);  // operand from a buffer
  DistanceBatch compute_all();

  uint32_t loaded_count() const { return uint32_t(points_.size()); }
  const QuantPoint& point(uint32_t local_index) const;
  const ApdCimGeometry& geometry() const { return geometry_; }

  // Optional per-cycle trace: one CSV line per compute cycle.
  void set_trace(std::ostream* trace) { trace_ = trace; }

 private:
  AccessCounters& counters_;
  ApdCimGeometry geometry_;
  uint32_t distances_per_cycle_;
  std::vector<QuantPoint> points_;
  QuantPoint reference_{};
  uint32_t reference_index_ = kExternalReference;
  bool reference_valid_ = false;
  std::ostream* trace_ = nullptr;
};

}  // namespace pc2im

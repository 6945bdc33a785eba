#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pc2im/apdcim.hpp"
#include "pc2im/costmodel.hpp"
#include "pc2im/geometry.hpp"

namespace pc2im {

// One temporary-distance pair. The two 19-bit slots hold the previous
// running-minimum candidate and the latest streamed distance; the effective
// value is always the smaller slot, so an update only ever overwrites the
// larger one ("ping-pong" at cell level, no read-back of the minimum).
struct TdPair {
  Distance19 upper = kDistance19Max;
  Distance19 lower = kDistance19Max;
  uint32_t point_index = 0;
  bool search_enabled = true;

  Distance19 effective() const { return upper < lower ? upper : lower; }
};

enum class CompareResult { UpperLarger, LowerLarger };

// Which slot an update would overwrite; equal slots resolve to upper.
CompareResult in_situ_compare(const TdPair& pair);

enum class CamMode { Search, Load };

struct SearchResult {
  Distance19 max_value = 0;
  uint32_t centroid_index = 0;
  uint64_t cycles = 0;
};

// Content-addressable array of temporary-distance pairs, addressed
// group-major (16 groups x 128 pairs). Pair address == tile-local point
// index. Mode gates which operations are legal: a loading array only accepts
// init writes, a searching array only accepts updates and searches.
class CamArray {
 public:
  static constexpr uint32_t kGroupCount = 16;
  static constexpr uint32_t kPairsPerGroup = 128;
  static constexpr uint32_t kCapacity = kGroupCount * kPairsPerGroup;
  static constexpr uint32_t kPairBits = 2 * 19;

  explicit CamArray(AccessCounters& counters);

  void init(uint32_t pair_count);  // load mode: reset all pairs to the max value
  void set_mode(CamMode mode) { mode_ = mode; }
  CamMode mode() const { return mode_; }
  uint32_t pair_count() const { return uint32_t(pairs_.size()); }
  const TdPair& pair(uint32_t address) const;

  // Search-mode operations.
  void update_pair(uint32_t address, Distance19 distance);
  uint64_t stream_update(const DistanceBatch& batch);  // returns fill latency
  std::pair<Distance19, uint64_t> bit_cam_max();       // always 19 cycles
  uint32_t data_cam_index(Distance19 value);           // 1 cycle
  SearchResult find_centroid();                        // max search + index lookup

  void set_trace(std::ostream* trace) { trace_ = trace; }

 private:
  void require_mode(CamMode mode, const char* op) const;

  AccessCounters& counters_;
  std::vector<TdPair> pairs_;
  CamMode mode_ = CamMode::Load;
  std::ostream* trace_ = nullptr;
};

inline constexpr uint64_t kBitCamCycles = 19;  // one per distance bit
inline constexpr uint64_t kDataCamCycles = 1;

struct CamWorkItem {
  uint32_t target_array = 0;  // 0 or 1
  uint64_t cycles = 0;
};

// Two CAM arrays sharing the datapath: while one is searched for the current
// tile, the other is loaded for the next. step() advances simulated time by
// the slower of the two work items; swap_roles() flips modes at the tile
// boundary.
class PingPongCam {
 public:
  explicit PingPongCam(AccessCounters& counters);

  CamArray& search_cam() { return arrays_[active_]; }
  CamArray& load_cam() { return arrays_[active_ ^ 1]; }
  uint32_t search_array() const { return active_; }
  uint32_t load_array() const { return active_ ^ 1; }

  uint64_t step(std::optional<CamWorkItem> search_work,
                std::optional<CamWorkItem> load_work);
  void swap_roles();
  uint64_t total_cycles() const { return total_cycles_; }

 private:
  CamArray arrays_[2];
  uint32_t active_ = 0;
  uint64_t total_cycles_ = 0;
};

}  // namespace pc2im

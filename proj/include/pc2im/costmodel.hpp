#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pc2im {

// Simulation stages used to bucket access counters. "Load" covers moving
// tiles/weights into the on-chip arrays, "Preprocess" covers sampling and
// grouping on the distance/CAM engines, "Feature" covers MAC work and
// feature-buffer traffic.
enum class Stage { Load = 0, Preprocess = 1, Feature = 2 };
inline constexpr std::size_t kStageCount = 3;

const char* stage_name(Stage stage);

struct StageCounters {
  uint64_t dram_bits_read = 0;
  uint64_t dram_bits_written = 0;
  uint64_t sram_bits_read = 0;
  uint64_t sram_bits_written = 0;
  uint64_t cim_distance_results = 0;
  // CAM work in pair-cycles: one pair active for one cycle.
  uint64_t cam_pair_update_cycles = 0;
  uint64_t cam_search_cycles = 0;
  uint64_t mac_ops_16b = 0;
  uint64_t total_cycles = 0;

  StageCounters& operator+=(const StageCounters& other);
  friend bool operator==(const StageCounters&, const StageCounters&) = default;
};

struct AccessCounters {
  std::array<StageCounters, kStageCount> stages{};

  StageCounters& at(Stage s) { return stages[static_cast<std::size_t>(s)]; }
  const StageCounters& at(Stage s) const {
    return stages[static_cast<std::size_t>(s)];
  }
  StageCounters total() const;

  AccessCounters& operator+=(const AccessCounters& other);
  friend bool operator==(const AccessCounters&, const AccessCounters&) = default;
};

// Per-event energy parameters (picojoules). The SRAM/DRAM/MAC numbers follow
// the 40nm prototype figures; the CAM pair-cycle and CIM distance costs are
// calibration placeholders that callers may override.
struct EnergyParams {
  double sram_pj_per_bit = 0.7;
  double dram_pj_per_bit = 4.5;
  double mac_pj_per_16b_op = 1.0 / 2.53;
  double cam_pj_per_pair_cycle = 0.01;
  double cim_dist_pj_per_result = 1.0 / 2.53;
  double clock_hz = 250.0e6;

  void validate() const;  // throws SimError on non-positive entries
  friend bool operator==(const EnergyParams&, const EnergyParams&) = default;
};

struct EnergyBreakdown {
  double dram_pj = 0.0;
  double sram_pj = 0.0;
  double cim_pj = 0.0;
  double cam_pj = 0.0;
  double mac_pj = 0.0;

  double total_pj() const {
    return dram_pj + sram_pj + cim_pj + cam_pj + mac_pj;
  }
};

EnergyBreakdown energy(const StageCounters& counters, const EnergyParams& params);
double latency_s(uint64_t cycles, double clock_hz);

// A report is just parameters plus counters; all energy/latency figures are
// recomputed on demand so they can never drift from the counters.
struct Report {
  EnergyParams params;
  AccessCounters counters;

  EnergyBreakdown stage_energy(Stage s) const {
    return energy(counters.at(s), params);
  }
  double total_energy_pj() const;
  double stage_latency_s(Stage s) const {
    return latency_s(counters.at(s).total_cycles, params.clock_hz);
  }
  double total_latency_s() const {
    return latency_s(counters.total().total_cycles, params.clock_hz);
  }
};

// Counter-wise sum; throws if the reports carry different energy parameters.
Report merge_reports(std::span<const Report> reports);

// Digital global-FPS baseline: every sampling step re-reads the full cloud
// from DRAM, vs. the tiled flow that reads each point once.
struct GlobalFpsTraffic {
  uint64_t dram_bits_baseline = 0;
  uint64_t dram_bits_tiled = 0;
  double reduction = 0.0;  // 1 - tiled/baseline
};
GlobalFpsTraffic baseline_global_fps_traffic(uint64_t n, uint64_t m,
                                             uint64_t bits_per_point = 48);

// Digital local-FPS baseline: per sampling step the tile's points are read
// from on-chip SRAM and every temporary-distance entry is read and written
// back. Splits the traffic into its two components.
struct LocalFpsBreakdown {
  uint64_t point_access_bits = 0;
  uint64_t td_update_bits = 0;
  double point_share = 0.0;
  double td_share = 0.0;
};
LocalFpsBreakdown baseline_local_fps_breakdown(uint64_t n, uint64_t m,
                                               uint64_t td_bits = 19);

}  // namespace pc2im

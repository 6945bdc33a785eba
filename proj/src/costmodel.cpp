#include "pc2im/costmodel.hpp"

#include <string>

#include "pc2im/errors.hpp"

namespace pc2im {

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::Load:
      return "load";
    case Stage::Preprocess:
      return "preprocess";
    case Stage::Feature:
      return "feature";
  }
  return "?";
}

StageCounters& StageCounters::operator+=(const StageCounters& other) {
  dram_bits_read += other.dram_bits_read;
  dram_bits_written += other.dram_bits_written;
  sram_bits_read += other.sram_bits_read;
  sram_bits_written += other.sram_bits_written;
  cim_distance_results += other.cim_distance_results;
  cam_pair_update_cycles += other.cam_pair_update_cycles;
  cam_search_cycles += other.cam_search_cycles;
  mac_ops_16b += other.mac_ops_16b;
  total_cycles += other.total_cycles;
  return *this;
}

StageCounters AccessCounters::total() const {
  StageCounters sum;
  for (const auto& s : stages) sum += s;
  return sum;
}

AccessCounters& AccessCounters::operator+=(const AccessCounters& other) {
  for (std::size_t i = 0; i < kStageCount; ++i) stages[i] += other.stages[i];
  return *this;
}

void EnergyParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw_config(std::string("energy parameter must be positive: ") + name);
    }
  };
  check(sram_pj_per_bit, "sram_pj_per_bit");
  check(dram_pj_per_bit, "dram_pj_per_bit");
  check(mac_pj_per_16b_op, "mac_pj_per_16b_op");
  check(cam_pj_per_pair_cycle, "cam_pj_per_pair_cycle");
  check(cim_dist_pj_per_result, "cim_dist_pj_per_result");
  check(clock_hz, "clock_hz");
}

EnergyBreakdown energy(const StageCounters& c, const EnergyParams& p) {
  EnergyBreakdown e;
  e.dram_pj =
      double(c.dram_bits_read + c.dram_bits_written) * p.dram_pj_per_bit;
  e.sram_pj =
      double(c.sram_bits_read + c.sram_bits_written) * p.sram_pj_per_bit;
  e.cim_pj = double(c.cim_distance_results) * p.cim_dist_pj_per_result;
  e.cam_pj = double(c.cam_pair_update_cycles + c.cam_search_cycles) *
             p.cam_pj_per_pair_cycle;
  e.mac_pj = double(c.mac_ops_16b) * p.mac_pj_per_16b_op;
  return e;
}

double latency_s(uint64_t cycles, double clock_hz) {
  if (!(clock_hz > 0.0)) throw_config("clock_hz must be positive");
  return double(cycles) / clock_hz;
}

double Report::total_energy_pj() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < kStageCount; ++i) {
    sum += energy(counters.stages[i], params).total_pj();
  }
  return sum;
}

Report merge_reports(std::span<const Report> reports) {
  if (reports.empty()) throw_invalid("merge_reports: no reports given");
  Report merged = reports.front();
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (!(reports[i].params == merged.params)) {
      throw_invalid("merge_reports: mismatched energy parameters");
    }
    merged.counters += reports[i].counters;
  }
  return merged;
}

GlobalFpsTraffic baseline_global_fps_traffic(uint64_t n, uint64_t m,
                                             uint64_t bits_per_point) {
  if (m < 1 || m > n) throw_invalid("baseline_global_fps_traffic: need 1 <= m <= n");
  if (bits_per_point == 0) throw_invalid("bits_per_point must be positive");
  GlobalFpsTraffic t;
  t.dram_bits_baseline = m * n * bits_per_point;
  t.dram_bits_tiled = n * bits_per_point;
  t.reduction = 1.0 - 1.0 / double(m);
  return t;
}

LocalFpsBreakdown baseline_local_fps_breakdown(uint64_t n, uint64_t m,
                                               uint64_t td_bits) {
  if (m > n) throw_invalid("baseline_local_fps_breakdown: need m <= n");
  if (td_bits == 0) throw_invalid("td_bits must be positive");
  LocalFpsBreakdown b;
  b.point_access_bits = m * n * 48;
  // Each step touches every temporary-distance entry: read for the compare,
  // write for the (possible) update; modeled as one read plus one write.
  b.td_update_bits = m * n * 2 * td_bits;
  uint64_t total = b.point_access_bits + b.td_update_bits;
  if (total > 0) {
    b.point_share = double(b.point_access_bits) / double(total);
    b.td_share = double(b.td_update_bits) / double(total);
  }
  return b;
}

}  // namespace pc2im

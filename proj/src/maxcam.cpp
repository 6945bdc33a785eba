#include "pc2im/maxcam.hpp"

#include <ostream>
#include <string>

#include "pc2im/errors.hpp"

namespace pc2im {

CompareResult in_situ_compare(const TdPair& pair) {
  // Equal slots resolve to upper so an update on a tie overwrites upper.
  return pair.upper >= pair.lower ? CompareResult::UpperLarger
                                  : CompareResult::LowerLarger;
}

CamArray::CamArray(AccessCounters& counters) : counters_(counters) {}

void CamArray::require_mode(CamMode mode, const char* op) const {
  if (mode_ != mode) {
    throw_invalid(std::string("CamArray: ") + op + " issued in " +
                  (mode_ == CamMode::Search ? "search" : "load") + " mode");
  }
}

void CamArray::init(uint32_t pair_count) {
  require_mode(CamMode::Load, "init");
  if (pair_count > kCapacity) {
    throw_capacity("CamArray: " + std::to_string(pair_count) +
                   " pairs exceed capacity " + std::to_string(kCapacity));
  }
  pairs_.assign(pair_count, TdPair{});
  for (uint32_t i = 0; i < pair_count; ++i) pairs_[i].point_index = i;
  counters_.at(Stage::Load).sram_bits_written +=
      uint64_t(pair_count) * kPairBits;
}

const TdPair& CamArray::pair(uint32_t address) const {
  if (address >= pairs_.size()) throw_invalid("CamArray: address out of range");
  return pairs_[address];
}

void CamArray::update_pair(uint32_t address, Distance19 distance) {
  require_mode(CamMode::Search, "update_pair");
  if (address >= pairs_.size()) throw_invalid("CamArray: address out of range");
  if (distance > kDistance19Max) {
    throw_invalid("CamArray: distance exceeds 19 bits");
  }
  TdPair& p = pairs_[address];
  // One compare plus one write on this pair; the running minimum survives in
  // the untouched slot.
  if (in_situ_compare(p) == CompareResult::UpperLarger) {
    p.upper = distance;
  } else {
    p.lower = distance;
  }
  counters_.at(Stage::Preprocess).cam_pair_update_cycles += 1;
}

uint64_t CamArray::stream_update(const DistanceBatch& batch) {
  require_mode(CamMode::Search, "stream_update");
  if (batch.distances.size() != pairs_.size()) {
    throw_invalid("CamArray: misaligned batch (" +
                  std::to_string(batch.distances.size()) + " distances, " +
                  std::to_string(pairs_.size()) + " pairs)");
  }
  for (uint32_t i = 0; i < pairs_.size(); ++i) {
    update_pair(i, batch.distances[i]);
  }
  // Updates overlap the distance stream; only the pipeline fill shows up as
  // extra latency.
  uint64_t fill = pairs_.empty() ? 0 : 1;
  counters_.at(Stage::Preprocess).total_cycles += fill;
  return fill;
}

std::pair<Distance19, uint64_t> CamArray::bit_cam_max() {
  require_mode(CamMode::Search, "bit_cam_max");
  std::vector<uint32_t> survivors;
  survivors.reserve(pairs_.size());
  for (uint32_t i = 0; i < pairs_.size(); ++i) {
    if (pairs_[i].search_enabled) survivors.push_back(i);
  }
  if (survivors.empty()) {
    throw_invalid("CamArray: bit_cam_max with no enabled pairs");
  }

  auto& c = counters_.at(Stage::Preprocess);
  Distance19 max_value = 0;
  // Serial scan from MSB to LSB. A pair whose bit mismatches a set result bit
  // drops out (its precharger is disabled); if nobody has the bit, everyone
  // stays. Runs the full 19 cycles regardless of content.
  for (int bit = 18; bit >= 0; --bit) {
    c.cam_search_cycles += survivors.size();
    std::vector<uint32_t> with_bit;
    with_bit.reserve(survivors.size());
    for (uint32_t idx : survivors) {
      if (pairs_[idx].effective() >> bit & 1u) with_bit.push_back(idx);
    }
    if (!with_bit.empty()) {
      max_value |= 1u << bit;
      survivors.swap(with_bit);
    }
    if (trace_) *trace_ << bit << ',' << survivors.size() << '\n';
  }
  c.total_cycles += kBitCamCycles;
  // Exclusion flags are transient; nothing to restore on the stored pairs.
  return {max_value, kBitCamCycles};
}

uint32_t CamArray::data_cam_index(Distance19 value) {
  require_mode(CamMode::Search, "data_cam_index");
  auto& c = counters_.at(Stage::Preprocess);
  c.total_cycles += kDataCamCycles;
  uint32_t enabled = 0;
  uint32_t found = kCapacity;
  // Bit-parallel match across all enabled pairs; lowest address wins.
  for (uint32_t i = 0; i < pairs_.size(); ++i) {
    if (!pairs_[i].search_enabled) continue;
    ++enabled;
    if (found == kCapacity && pairs_[i].effective() == value) found = i;
  }
  c.cam_search_cycles += enabled;
  if (found == kCapacity) {
    throw_invalid("CamArray: value " + std::to_string(value) +
                  " not present in any enabled pair");
  }
  return found;
}

SearchResult CamArray::find_centroid() {
  auto [max_value, search_cycles] = bit_cam_max();
  uint32_t index = data_cam_index(max_value);
  return {max_value, index, search_cycles + kDataCamCycles};
}

PingPongCam::PingPongCam(AccessCounters& counters)
    : arrays_{CamArray(counters), CamArray(counters)} {
  arrays_[0].set_mode(CamMode::Search);
  arrays_[1].set_mode(CamMode::Load);
}

uint64_t PingPongCam::step(std::optional<CamWorkItem> search_work,
                           std::optional<CamWorkItem> load_work) {
  if (search_work && load_work &&
      search_work->target_array == load_work->target_array) {
    throw_invalid("PingPongCam: both work items target one array");
  }
  if (search_work && search_work->target_array != search_array()) {
    throw_invalid("PingPongCam: search work targets the loading array");
  }
  if (load_work && load_work->target_array != load_array()) {
    throw_invalid("PingPongCam: load work targets the searching array");
  }
  uint64_t search_cycles = search_work ? search_work->cycles : 0;
  uint64_t load_cycles = load_work ? load_work->cycles : 0;
  uint64_t step_cycles = std::max(search_cycles, load_cycles);
  total_cycles_ += step_cycles;
  return step_cycles;
}

void PingPongCam::swap_roles() {
  active_ ^= 1;
  arrays_[active_].set_mode(CamMode::Search);
  arrays_[active_ ^ 1].set_mode(CamMode::Load);
}

}  // namespace pc2im

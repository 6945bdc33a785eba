#include "pc2im/apdcim.hpp"

#include <ostream>
#include <string>

#include "pc2im/errors.hpp"

namespace pc2im {

ApdCimArray::ApdCimArray(AccessCounters& counters, ApdCimGeometry geometry,
                         uint32_t distances_per_cycle)
    : counters_(counters),
      geometry_(geometry),
      distances_per_cycle_(distances_per_cycle) {
  if (geometry_.capacity() == 0) {
    throw_invalid("ApdCimArray: zero-capacity geometry");
  }
  if (distances_per_cycle_ == 0) {
    throw_invalid("ApdCimArray: distances_per_cycle must be positive");
  }
}

void ApdCimArray::load_tile(const Tile& tile) {
  if (tile.size() > geometry_.capacity()) {
    throw_capacity("ApdCimArray: tile of " + std::to_string(tile.size()) +
                   " points exceeds array capacity " +
                   std::to_string(geometry_.capacity()));
  }
  points_ = tile.points;
  reference_valid_ = false;
  counters_.at(Stage::Load).sram_bits_written += uint64_t(points_.size()) * kPointBits;
}

void ApdCimArray::set_reference(uint32_t local_index) {
  if (local_index >= points_.size()) {
    throw_invalid("ApdCimArray: reference index " + std::to_string(local_index) +
                  " out of range (loaded " + std::to_string(points_.size()) + ")");
  }
  reference_ = points_[local_index];
  reference_index_ = local_index;
  reference_valid_ = true;
  auto& c = counters_.at(Stage::Preprocess);
  c.sram_bits_read += kPointBits;
  c.total_cycles += 1;
}

void ApdCimArray::set_reference_point(QuantPoint reference) {
  reference_ = reference;
  reference_index_ = kExternalReference;
  reference_valid_ = true;
  auto& c = counters_.at(Stage::Preprocess);
  c.sram_bits_read += kPointBits;
  c.total_cycles += 1;
}

const QuantPoint& ApdCimArray::point(uint32_t local_index) const {
  if (local_index >= points_.size()) {
    throw_invalid("ApdCimArray: point index out of range");
  }
  return points_[local_index];
}

DistanceBatch ApdCimArray::compute_all() {
  if (!reference_valid_) {
    throw_invalid("ApdCimArray: compute_all without a reference");
  }
  DistanceBatch batch;
  batch.reference_index = reference_index_;
  batch.distances.reserve(points_.size());
  for (const QuantPoint& p : points_) {
    batch.distances.push_back(l1(p, reference_));
  }
  const uint64_t n = points_.size();
  batch.cycles_used = (n + distances_per_cycle_ - 1) / distances_per_cycle_;

  auto& c = counters_.at(Stage::Preprocess);
  c.cim_distance_results += n;
  c.total_cycles += batch.cycles_used;

  if (trace_) {
    for (uint64_t cycle = 0; cycle < batch.cycles_used; ++cycle) {
      *trace_ << cycle << ',' << cycle % geometry_.points_per_ptc;
      uint64_t base = cycle * distances_per_cycle_;
      for (uint64_t k = 0; k < distances_per_cycle_ && base + k < n; ++k) {
        *trace_ << ',' << batch.distances[base + k];
      }
      *trace_ << '\n';
    }
  }
  return batch;
}

}  // namespace pc2im

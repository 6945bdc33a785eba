#include "pc2im/sccim.hpp"

#include <ostream>
#include <string>

#include "pc2im/errors.hpp"

namespace pc2im {

WeightNibbles split_weight(int16_t w) {
  uint16_t u = uint16_t(w);
  WeightNibbles n;
  for (int m = 0; m < 4; ++m) n.nibbles[m] = (u >> (4 * m)) & 0xf;
  return n;
}

int16_t reassemble_weight(const WeightNibbles& n) {
  int32_t v = n.signed_top() << 12;
  for (int m = 0; m < 3; ++m) v += int32_t(n.nibbles[m]) << (4 * m);
  return int16_t(v);
}

InputClusters split_input(int16_t x) {
  uint16_t u = uint16_t(x);
  InputClusters c;
  for (int j = 0; j < 4; ++j) {
    uint8_t cluster = 0;
    for (int p = 0; p < 4; ++p) cluster |= (u >> (j + 4 * p) & 1u) << p;
    c.clusters[j] = cluster;
  }
  return c;
}

int16_t reassemble_input(const InputClusters& c) {
  uint16_t u = 0;
  for (int j = 0; j < 4; ++j) {
    for (int p = 0; p < 4; ++p) {
      u |= uint16_t(c.clusters[j] >> p & 1u) << (j + 4 * p);
    }
  }
  return int16_t(u);
}

uint32_t cluster_block_multiply(uint8_t cluster, uint8_t nibble) {
  if (cluster > 0xf || nibble > 0xf) {
    throw_invalid("cluster_block_multiply: operands must be 4-bit");
  }
  uint32_t result = 0;
  for (int p = 0; p < 4; ++p) {
    if (cluster >> p & 1u) result |= uint32_t(nibble) << (4 * p);
  }
  return result;
}

FuaOutput fused_add(uint8_t in_a, uint8_t in_b, uint8_t nib_a, uint8_t nib_b) {
  if (in_a > 0xf || in_b > 0xf || nib_a > 0xf || nib_b > 0xf) {
    throw_invalid("fused_add: operands must be 4-bit");
  }
  FuaOutput out;
  for (int p = 0; p < 4; ++p) {
    bool a = in_a >> p & 1u;
    bool b = in_b >> p & 1u;
    uint32_t sel = 0;
    if (a && b) {
      uint32_t s = uint32_t(nib_a) + uint32_t(nib_b);
      sel = s & 0xf;
      out.carries[p] = uint8_t(s >> 4);  // 0 or 1
    } else if (a) {
      sel = nib_a;
    } else if (b) {
      sel = nib_b;
    }
    out.dense |= sel << (4 * p);
  }
  return out;
}

int64_t signed_merge(uint64_t unsigned_contrib, int64_t weight_sign_correction,
                     int64_t input_sign_correction) {
  return int64_t(unsigned_contrib) + weight_sign_correction +
         input_sign_correction;
}

namespace {

// Unsigned 16x16 product out of cluster-block pieces only: the bit-level
// identity xu * wu = sum_j sum_m cbm(cluster_j, nibble_m) << (j + 4m).
uint64_t unsigned_split_product(uint16_t xu, uint16_t wu) {
  InputClusters c = split_input(int16_t(xu));
  WeightNibbles n = split_weight(int16_t(wu));
  uint64_t total = 0;
  for (int j = 0; j < 4; ++j) {
    for (int m = 0; m < 4; ++m) {
      total += uint64_t(cluster_block_multiply(c.clusters[j], n.nibbles[m]))
               << (j + 4 * m);
    }
  }
  return total;
}

// Two's-complement corrections: x = xu - sx*2^16, w = wu - sw*2^16, so
// x*w = xu*wu - sx*wu*2^16 - sw*xu*2^16 + sx*sw*2^32. The sign bits only
// select shifted operands; no multiplier is involved.
int64_t weight_sign_correction(uint16_t xu, uint16_t wu) {
  return (wu & 0x8000) ? -(int64_t(xu) << 16) : 0;
}

int64_t input_sign_correction(uint16_t xu, uint16_t wu) {
  int64_t corr = (xu & 0x8000) ? -(int64_t(wu) << 16) : 0;
  if ((xu & 0x8000) && (wu & 0x8000)) corr += int64_t(1) << 32;
  return corr;
}

}  // namespace

int64_t signed_product(int16_t x, int16_t w) {
  uint16_t xu = uint16_t(x);
  uint16_t wu = uint16_t(w);
  return signed_merge(unsigned_split_product(xu, wu),
                      weight_sign_correction(xu, wu),
                      input_sign_correction(xu, wu));
}

MacResult mac_16rows(std::span<const int16_t, kMacRows> inputs,
                     std::span<const int16_t, kMacRows> weights,
                     std::ostream* trace) {
  std::array<InputClusters, kMacRows> in;
  std::array<WeightNibbles, kMacRows> wn;
  for (uint32_t r = 0; r < kMacRows; ++r) {
    in[r] = split_input(inputs[r]);
    wn[r] = split_weight(weights[r]);
  }

  // One outer iteration per cluster cycle; the four weight-nibble lanes run
  // spatially in parallel within the cycle.
  uint64_t unsigned_total = 0;
  for (int j = 0; j < 4; ++j) {
    for (int m = 0; m < 4; ++m) {
      uint64_t dense_sum = 0;   // dense adder tree over the 8 row pairs
      uint64_t sparse_sum = 0;  // sparse tree over the pairs' carry words
      for (uint32_t pair = 0; pair < kMacRows / 2; ++pair) {
        uint32_t r0 = 2 * pair;
        uint32_t r1 = 2 * pair + 1;
        FuaOutput fua =
            fused_add(in[r0].clusters[j], in[r1].clusters[j],
                      wn[r0].nibbles[m], wn[r1].nibbles[m]);
        dense_sum += fua.dense;
        for (int p = 0; p < 4; ++p) {
          sparse_sum += uint64_t(fua.carries[p]) << (4 * p + 4);
        }
      }
      if (trace) {
        *trace << j << ',' << m << ',' << dense_sum << ',' << sparse_sum
               << '\n';
      }
      unsigned_total += (dense_sum + sparse_sum) << (j + 4 * m);
    }
  }

  int64_t corrections = 0;
  for (uint32_t r = 0; r < kMacRows; ++r) {
    uint16_t xu = uint16_t(inputs[r]);
    uint16_t wu = uint16_t(weights[r]);
    corrections += weight_sign_correction(xu, wu);
    corrections += input_sign_correction(xu, wu);
  }
  return {signed_merge(unsigned_total, corrections, 0), kMacCycles};
}

MacResult bs_mac_16rows(std::span<const int16_t, kMacRows> inputs,
                        std::span<const int16_t, kMacRows> weights) {
  // One input bit per cycle across all rows; bit 15 carries negative weight.
  int64_t acc = 0;
  for (int t = 0; t < 16; ++t) {
    int64_t cycle_sum = 0;
    for (uint32_t r = 0; r < kMacRows; ++r) {
      if (uint16_t(inputs[r]) >> t & 1u) cycle_sum += weights[r];
    }
    acc += (t == 15 ? -cycle_sum : cycle_sum) << t;
  }
  return {acc, kBitSerialMacCycles};
}

AdderTreeStats adder_tree_stats(const SccimTileConfig& config) {
  if (config.rows == 0 || config.rows % 2 != 0) {
    throw_invalid("adder_tree_stats: rows must be positive and even");
  }
  AdderTreeStats stats;
  stats.naive_inputs = config.rows;
  stats.dense_inputs = config.rows / 2;   // one fused output per row pair
  stats.sparse_inputs = config.rows / 2;  // one carry word per row pair
  stats.reduction_ratio =
      double(stats.dense_inputs) / double(stats.naive_inputs);
  return stats;
}

SccimTile::SccimTile(uint32_t columns) {
  if (columns == 0) throw_invalid("SccimTile: need at least one column");
  columns_.resize(columns);
  for (auto& col : columns_) col.fill(0);
}

void SccimTile::set_column(uint32_t column,
                           std::span<const int16_t, kMacRows> weights) {
  if (column >= columns_.size()) throw_invalid("SccimTile: column out of range");
  for (uint32_t r = 0; r < kMacRows; ++r) columns_[column][r] = weights[r];
}

MacResult SccimTile::mac(std::span<const int16_t, kMacRows> inputs,
                         uint32_t column, bool bit_serial) const {
  if (column >= columns_.size()) throw_invalid("SccimTile: column out of range");
  std::span<const int16_t, kMacRows> w(columns_[column]);
  return bit_serial ? bs_mac_16rows(inputs, w) : mac_16rows(inputs, w);
}

}  // namespace pc2im

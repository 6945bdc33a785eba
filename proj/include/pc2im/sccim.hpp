#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace pc2im {

inline constexpr uint32_t kMacRows = 16;

// A 16-bit weight split into four consecutive 4-bit nibbles; nibbles[0] is
// the least significant. nibbles[3] is stored unsigned here but interpreted
// as a signed [-8, 7] nibble when reassembling.
struct WeightNibbles {
  std::array<uint8_t, 4> nibbles{};

  int signed_top() const {
    return int(nibbles[3]) - ((nibbles[3] & 0x8) ? 16 : 0);
  }
};

WeightNibbles split_weight(int16_t w);
int16_t reassemble_weight(const WeightNibbles& n);

// A 16-bit input split into four interleaved 4-bit clusters: cluster j, lane
// p holds input bit (j + 4p), worth 2^(j+4p). The lane holding bit 15
// (cluster 3, lane 3) is the sign lane.
struct InputClusters {
  std::array<uint8_t, 4> clusters{};
};

InputClusters split_input(int16_t x);
int16_t reassemble_input(const InputClusters& c);

// Product of one 4-bit cluster with one 4-bit nibble: each set lane selects
// the nibble into its 4-bit field of the result (select-or-zero, no
// multiplier). sum_p bit_p * nibble * 2^(4p), at most 0xFFFF.
uint32_t cluster_block_multiply(uint8_t cluster, uint8_t nibble);

// Fused adder output for one row pair: a dense (16+1)-bit concatenation plus
// one carry bit per lane at significance 2^(4p+4). The 17th dense bit is
// reserved for the sign-extension path and stays clear on the unsigned one.
struct FuaOutput {
  uint32_t dense = 0;
  std::array<uint8_t, 4> carries{};

  uint64_t combined() const {
    uint64_t v = dense;
    for (int p = 0; p < 4; ++p) v += uint64_t(carries[p]) << (4 * p + 4);
    return v;
  }
};

// Merges two rows' cluster-block products in one pass. Per lane:
//   (0,0) -> 0, (1,0) -> nib_a, (0,1) -> nib_b,
//   (1,1) -> (nib_a + nib_b) mod 16 with the carry going to the sparse path.
// combined() always equals cluster_block_multiply(in_a, nib_a) +
// cluster_block_multiply(in_b, nib_b).
FuaOutput fused_add(uint8_t in_a, uint8_t in_b, uint8_t nib_a, uint8_t nib_b);

// Periphery merge of the unsigned concatenated contribution with the two
// sign-correction terms (selected, shifted complements; no multiplier).
int64_t signed_merge(uint64_t unsigned_contrib, int64_t weight_sign_correction,
                     int64_t input_sign_correction);

// One row's exact signed product routed through the split/concatenate path.
int64_t signed_product(int16_t x, int16_t w);

struct MacResult {
  int64_t sum = 0;
  uint64_t cycles = 0;
};

// 16-row multiply-accumulate in 4 cluster cycles: per cycle one input
// cluster, all four weight-nibble lanes in parallel, rows fused in pairs,
// dense/sparse adder trees, shift-accumulate across cluster and nibble
// indices, signs merged in the periphery. Exact for all int16 operands.
MacResult mac_16rows(std::span<const int16_t, kMacRows> inputs,
                     std::span<const int16_t, kMacRows> weights,
                     std::ostream* trace = nullptr);

// Bit-serial reference datapath: one input bit per cycle, 16 cycles.
MacResult bs_mac_16rows(std::span<const int16_t, kMacRows> inputs,
                        std::span<const int16_t, kMacRows> weights);

inline constexpr uint64_t kMacCycles = 4;
inline constexpr uint64_t kBitSerialMacCycles = 16;

struct SccimTileConfig {
  uint32_t rows = 16;
  uint32_t weight_blocks = 8;  // paired 4-bit local weight blocks per slice
  uint32_t block_pairs = 4;
};

struct AdderTreeStats {
  uint32_t dense_inputs = 0;   // fused row pairs
  uint32_t sparse_inputs = 0;  // one carry word per pair
  uint32_t naive_inputs = 0;   // unfused rows
  double reduction_ratio = 0.0;
};

AdderTreeStats adder_tree_stats(const SccimTileConfig& config = {});

// Weight storage for one 16-row compute tile: column c holds the weights
// multiplying the 16 broadcast inputs for output column c.
class SccimTile {
 public:
  explicit SccimTile(uint32_t columns);

  void set_column(uint32_t column, std::span<const int16_t, kMacRows> weights);
  MacResult mac(std::span<const int16_t, kMacRows> inputs, uint32_t column,
                bool bit_serial = false) const;
  uint32_t columns() const { return uint32_t(columns_.size()); }

 private:
  std::vector<std::array<int16_t, kMacRows>> columns_;
};

}  // namespace pc2im

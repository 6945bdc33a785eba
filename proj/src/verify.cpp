#include "pc2im/verify.hpp"

#include <array>
#include <random>
#include <string>

#include "pc2im/errors.hpp"
#include "pc2im/sccim.hpp"

namespace pc2im {

namespace {

void record(VerifyReport& report, const std::string& what) {
  ++report.mismatches;
  if (report.first_mismatch.empty()) report.first_mismatch = what;
}

}  // namespace

VerifyReport verify_mac(const VerifyOptions& options) {
  if (options.inject_fault && options.random_macs == 0) {
    throw_invalid("verify_mac: fault injection needs at least one random MAC");
  }
  VerifyReport report;

  // Every (in_a, in_b, nib_a, nib_b) combination: the fused output must equal
  // the two unfused cluster-block products.
  for (uint32_t a = 0; a < 16; ++a) {
    for (uint32_t b = 0; b < 16; ++b) {
      for (uint32_t na = 0; na < 16; ++na) {
        for (uint32_t nb = 0; nb < 16; ++nb) {
          uint64_t fused =
              fused_add(uint8_t(a), uint8_t(b), uint8_t(na), uint8_t(nb))
                  .combined();
          uint64_t split = cluster_block_multiply(uint8_t(a), uint8_t(na)) +
                           uint64_t(cluster_block_multiply(uint8_t(b), uint8_t(nb)));
          ++report.fused_add_checks;
          if (fused != split) {
            record(report, "fused_add(" + std::to_string(a) + "," +
                               std::to_string(b) + "," + std::to_string(na) +
                               "," + std::to_string(nb) + ")");
          }
        }
      }
    }
  }

  // Every 16-bit value must survive both split/reassemble round trips.
  for (uint32_t v = 0; v < 0x10000; ++v) {
    int16_t x = int16_t(uint16_t(v));
    ++report.split_roundtrips;
    if (reassemble_input(split_input(x)) != x) {
      record(report, "input split round trip of " + std::to_string(x));
    }
    ++report.split_roundtrips;
    if (reassemble_weight(split_weight(x)) != x) {
      record(report, "weight split round trip of " + std::to_string(x));
    }
  }

  // Random 16-row MACs against a plain 64-bit integer dot product, on both
  // datapaths. Includes the extreme operands in the first vector.
  std::mt19937_64 rng(options.seed);
  for (uint32_t iter = 0; iter < options.random_macs; ++iter) {
    std::array<int16_t, kMacRows> inputs{};
    std::array<int16_t, kMacRows> weights{};
    if (iter == 0) {
      inputs = {INT16_MIN, INT16_MAX, INT16_MIN, INT16_MAX, -1, 1, 0, -1,
                INT16_MIN, INT16_MIN, INT16_MAX, INT16_MAX, 255, -256, 2, -2};
      weights = {INT16_MIN, INT16_MIN, INT16_MAX, INT16_MAX, -1, -1, 1, 0,
                 INT16_MIN, INT16_MAX, INT16_MIN, INT16_MAX, -256, 255, -2, 2};
    } else {
      for (auto& v : inputs) v = int16_t(uint16_t(rng()));
      for (auto& v : weights) v = int16_t(uint16_t(rng()));
    }
    int64_t expected = 0;
    for (uint32_t r = 0; r < kMacRows; ++r) {
      expected += int64_t(inputs[r]) * int64_t(weights[r]);
    }
    if (options.inject_fault && iter == options.random_macs / 2) {
      expected += 1;  // deliberate corruption; the checker must notice
    }
    ++report.mac_checks;
    if (mac_16rows(inputs, weights).sum != expected) {
      record(report, "mac_16rows vector " + std::to_string(iter));
    }
    ++report.mac_checks;
    if (bs_mac_16rows(inputs, weights).sum != expected) {
      record(report, "bs_mac_16rows vector " + std::to_string(iter));
    }
  }

  return report;
}

}  // namespace pc2im

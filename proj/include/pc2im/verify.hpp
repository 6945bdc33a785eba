#pragma once

#include <cstdint>
#include <string>

namespace pc2im {

struct VerifyOptions {
  uint64_t seed = 1;
  uint32_t random_macs = 256;  // random 16-row MAC vectors per datapath
  bool inject_fault = false;   // negative control: corrupt one product
};

struct VerifyReport {
  uint64_t fused_add_checks = 0;
  uint64_t split_roundtrips = 0;
  uint64_t mac_checks = 0;
  uint64_t mismatches = 0;
  std::string first_mismatch;  // empty when everything agreed

  bool ok() const { return mismatches == 0; }
};

// Exhaustive check of the bit-level MAC identities (every fused-add operand
// combination, every 16-bit split round trip) plus randomized 16-row MACs on
// both the 4-cycle and the bit-serial datapath against a plain integer
// oracle. With inject_fault set, one product is deliberately corrupted; a
// healthy checker must then report a mismatch.
VerifyReport verify_mac(const VerifyOptions& options = {});

}  // namespace pc2im

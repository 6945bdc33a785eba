#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <string>

#include "pc2im/errors.hpp"
#include "pc2im/maxcam.hpp"

using namespace pc2im;

namespace {

// Brute-force argmax of the effective values, lowest address on ties.
std::pair<Distance19, uint32_t> brute_max(const CamArray& cam) {
  Distance19 best = 0;
  uint32_t best_idx = 0;
  for (uint32_t i = 0; i < cam.pair_count(); ++i) {
    if (cam.pair(i).effective() > best) {
      best = cam.pair(i).effective();
      best_idx = i;
    }
  }
  return {best, best_idx};
}

DistanceBatch batch_of(std::vector<Distance19> distances) {
  DistanceBatch batch;
  batch.distances = std::move(distances);
  return batch;
}

}  // namespace

TEST_CASE("pair slots: effective is the minimum, ties overwrite upper") {
  TdPair p;
  CHECK(p.effective() == kDistance19Max);
  CHECK(in_situ_compare(p) == CompareResult::UpperLarger);

  p.upper = 5;
  p.lower = 9;
  CHECK(p.effective() == 5);
  CHECK(in_situ_compare(p) == CompareResult::LowerLarger);

  p.lower = 5;
  CHECK(in_situ_compare(p) == CompareResult::UpperLarger);
}

TEST_CASE("init resets pairs in load mode only") {
  AccessCounters counters;
  CamArray cam(counters);
  CHECK(cam.mode() == CamMode::Load);
  cam.init(10);
  CHECK(cam.pair_count() == 10);
  CHECK(cam.pair(3).point_index == 3);
  CHECK(cam.pair(3).effective() == kDistance19Max);
  CHECK(counters.at(Stage::Load).sram_bits_written == 10 * CamArray::kPairBits);

  cam.set_mode(CamMode::Search);
  CHECK_THROWS_AS(cam.init(10), SimError);
  CHECK_THROWS_AS(cam.pair(10), SimError);

  AccessCounters c2;
  CamArray cam2(c2);
  CHECK_THROWS_AS(cam2.init(CamArray::kCapacity + 1), SimError);
}

TEST_CASE("update_pair overwrites the larger slot and validates input") {
  AccessCounters counters;
  CamArray cam(counters);
  cam.init(4);

  CHECK_THROWS_AS(cam.update_pair(0, 1), SimError);  // still loading
  cam.set_mode(CamMode::Search);

  cam.update_pair(0, 100);
  CHECK(cam.pair(0).effective() == 100);
  cam.update_pair(0, 300);          // larger value lands in the other slot
  CHECK(cam.pair(0).effective() == 100);
  cam.update_pair(0, 40);           // overwrites the 300
  CHECK(cam.pair(0).effective() == 40);

  CHECK_THROWS_AS(cam.update_pair(4, 1), SimError);
  CHECK_THROWS_AS(cam.update_pair(0, kDistance19Max + 1), SimError);
  CHECK(counters.at(Stage::Preprocess).cam_pair_update_cycles == 3);
}

TEST_CASE("effective value tracks the scalar running minimum") {
  std::mt19937_64 rng(1234);
  for (int seq = 0; seq < 300; ++seq) {
    AccessCounters counters;
    CamArray cam(counters);
    cam.init(1);
    cam.set_mode(CamMode::Search);
    Distance19 running = kDistance19Max;
    int len = 1 + int(rng() % 64);
    for (int i = 0; i < len; ++i) {
      Distance19 d = Distance19(rng() % (kDistance19Max + 1));
      cam.update_pair(0, d);
      running = std::min(running, d);
      CHECK(cam.pair(0).effective() == running);
    }
  }
}

TEST_CASE("stream_update requires an aligned batch and costs one fill cycle") {
  AccessCounters counters;
  CamArray cam(counters);
  cam.init(3);
  cam.set_mode(CamMode::Search);

  CHECK_THROWS_AS(cam.stream_update(batch_of({1, 2})), SimError);
  try {
    cam.stream_update(batch_of({1, 2}));
  } catch (const SimError& e) {
    CHECK(std::string(e.what()).find("misaligned") != std::string::npos);
  }

  uint64_t before = counters.at(Stage::Preprocess).total_cycles;
  CHECK(cam.stream_update(batch_of({5, 6, 7})) == 1);
  CHECK(counters.at(Stage::Preprocess).total_cycles == before + 1);
  CHECK(cam.pair(0).effective() == 5);
  CHECK(cam.pair(2).effective() == 7);
}

TEST_CASE("bit_cam_max finds the maximum in exactly 19 cycles") {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 50; ++iter) {
    AccessCounters counters;
    CamArray cam(counters);
    uint32_t n = 1 + uint32_t(rng() % 300);
    cam.init(n);
    cam.set_mode(CamMode::Search);
    DistanceBatch batch;
    for (uint32_t i = 0; i < n; ++i) {
      batch.distances.push_back(Distance19(rng() % (kDistance19Max + 1)));
    }
    cam.stream_update(batch);

    auto [value, cycles] = cam.bit_cam_max();
    CHECK(cycles == 19);
    CHECK(value == brute_max(cam).first);
  }
}

TEST_CASE("bit_cam_max traces 19 bit positions and rejects empty arrays") {
  AccessCounters counters;
  CamArray cam(counters);
  cam.init(0);
  cam.set_mode(CamMode::Search);
  CHECK_THROWS_AS(cam.bit_cam_max(), SimError);

  cam.set_mode(CamMode::Load);
  cam.init(4);
  cam.set_mode(CamMode::Search);
  cam.stream_update(batch_of({1, 2, 3, 4}));
  std::ostringstream trace;
  cam.set_trace(&trace);
  cam.bit_cam_max();
  std::string lines = trace.str();
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 19);
}

TEST_CASE("data_cam_index matches the lowest address") {
  AccessCounters counters;
  CamArray cam(counters);
  cam.init(5);
  cam.set_mode(CamMode::Search);
  cam.stream_update(batch_of({9, 4, 9, 1, 4}));

  CHECK(cam.data_cam_index(9) == 0);
  CHECK(cam.data_cam_index(4) == 1);
  CHECK(cam.data_cam_index(1) == 3);
  CHECK_THROWS_AS(cam.data_cam_index(2), SimError);
}

TEST_CASE("find_centroid equals brute force and costs 20 cycles") {
  std::mt19937_64 rng(4242);
  for (int iter = 0; iter < 100; ++iter) {
    AccessCounters counters;
    CamArray cam(counters);
    uint32_t n = 1 + uint32_t(rng() % 500);
    cam.init(n);
    cam.set_mode(CamMode::Search);
    DistanceBatch batch;
    for (uint32_t i = 0; i < n; ++i) {
      // Narrow value range provokes ties.
      batch.distances.push_back(Distance19(rng() % 7));
    }
    cam.stream_update(batch);

    SearchResult got = cam.find_centroid();
    auto [want_value, want_idx] = brute_max(cam);
    CHECK(got.max_value == want_value);
    CHECK(got.centroid_index == want_idx);
    CHECK(got.cycles == kBitCamCycles + kDataCamCycles);
  }
}

TEST_CASE("search work is charged in pair-cycles") {
  AccessCounters counters;
  CamArray cam(counters);
  cam.init(2);
  cam.set_mode(CamMode::Search);
  cam.stream_update(batch_of({3, 5}));

  uint64_t before = counters.at(Stage::Preprocess).cam_search_cycles;
  cam.bit_cam_max();
  // Bits 18..3 keep both pairs alive (nobody matches), bit 2 isolates the 5:
  // 17 cycles at 2 pairs + 2 cycles at 1 pair.
  CHECK(counters.at(Stage::Preprocess).cam_search_cycles - before == 36);

  before = counters.at(Stage::Preprocess).cam_search_cycles;
  cam.data_cam_index(5);
  CHECK(counters.at(Stage::Preprocess).cam_search_cycles - before == 2);
}

TEST_CASE("ping-pong roles gate the work items") {
  AccessCounters counters;
  PingPongCam pp(counters);
  CHECK(pp.search_cam().mode() == CamMode::Search);
  CHECK(pp.load_cam().mode() == CamMode::Load);

  CHECK_THROWS_AS(pp.step(CamWorkItem{pp.load_array(), 5}, std::nullopt),
                  SimError);
  CHECK_THROWS_AS(pp.step(std::nullopt, CamWorkItem{pp.search_array(), 5}),
                  SimError);
  CHECK_THROWS_AS(pp.step(CamWorkItem{0, 1}, CamWorkItem{0, 1}), SimError);

  CHECK(pp.step(CamWorkItem{pp.search_array(), 7},
                CamWorkItem{pp.load_array(), 4}) == 7);
  pp.swap_roles();
  CHECK(pp.search_cam().mode() == CamMode::Search);
  CHECK(pp.step(CamWorkItem{pp.search_array(), 2},
                CamWorkItem{pp.load_array(), 9}) == 9);
  CHECK(pp.total_cycles() == 16);
}

TEST_CASE("ping-pong overlap beats back-to-back execution") {
  // Three tiles with load 10 and search 25 each: serial is 105, the
  // pipeline hides two of the three loads.
  AccessCounters counters;
  PingPongCam pp(counters);
  pp.step(std::nullopt, CamWorkItem{pp.load_array(), 10});
  uint64_t serial = 10;
  for (int t = 0; t < 3; ++t) {
    pp.swap_roles();
    std::optional<CamWorkItem> load;
    if (t < 2) load = CamWorkItem{pp.load_array(), 10};
    pp.step(CamWorkItem{pp.search_array(), 25}, load);
    serial += 25 + (t < 2 ? 10 : 0);
  }
  CHECK(serial == 105);
  CHECK(pp.total_cycles() == 85);  // 10 + 3 * 25
}

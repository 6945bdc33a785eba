// Acceptance gate for the simulator: one self-contained check per release
// criterion, one PASS/FAIL line each, nonzero exit if anything failed.
// Checks favor independent oracles (plain loops, quadratic reference
// algorithms) over the code paths they are judging.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "pc2im/json_io.hpp"
#include "pc2im/pipeline.hpp"
#include "pc2im/verify.hpp"

using namespace pc2im;
using pc2im::test::random_tile;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

void check_close(double got, double want, double rel_tol,
                 const std::string& what) {
  double tol = rel_tol * std::max(std::abs(want), 1e-300);
  if (!(std::abs(got - want) <= tol)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": got " << got << ", want " << want;
    throw std::runtime_error(msg.str());
  }
}

void criterion(int num, const std::string& name,
               const std::function<std::string()>& body) {
  try {
    std::string detail = body();
    std::printf("PASS: %2d %s%s%s\n", num, name.c_str(),
                detail.empty() ? "" : " ", detail.c_str());
  } catch (const std::exception& e) {
    ++g_failures;
    std::printf("FAIL: %2d %s: %s\n", num, name.c_str(), e.what());
  }
  std::fflush(stdout);
}

// 1. MAC datapath self-check: exhaustive fused-add identities, exhaustive
// split round trips, 1e5 random MAC vectors on both datapaths, under 30 s.
std::string c1_verify_mac() {
  auto t0 = std::chrono::steady_clock::now();
  VerifyOptions options;
  options.seed = 1;
  options.random_macs = 100000;
  VerifyReport report = verify_mac(options);
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  check(report.ok(), "mismatch: " + report.first_mismatch);
  check(report.fused_add_checks == 65536, "fused-add combinations missing");
  check(report.split_roundtrips == 131072, "split round trips missing");
  check(report.mac_checks == 200000, "random MAC vectors missing");
  check(secs < 30.0, "took " + std::to_string(secs) + " s");

  VerifyOptions inject = options;
  inject.random_macs = 100;
  inject.inject_fault = true;
  check(!verify_mac(inject).ok(), "injected fault went undetected");
  char buf[64];
  std::snprintf(buf, sizeof buf, "(%.2f s)", secs);
  return buf;
}

// 2. Interleaved clusters finish a 16-bit MAC in 4 cycles instead of 16 and
// halve the adder-tree fan-in.
std::string c2_throughput() {
  std::array<int16_t, kMacRows> in{};
  std::array<int16_t, kMacRows> w{};
  std::mt19937_64 rng(2);
  for (auto& v : in) v = int16_t(uint16_t(rng()));
  for (auto& v : w) v = int16_t(uint16_t(rng()));
  check(mac_16rows(in, w).cycles == 4, "fused MAC cycle count");
  check(bs_mac_16rows(in, w).cycles == 16, "bit-serial MAC cycle count");
  check(double(kMacCycles) / double(kBitSerialMacCycles) == 0.25,
        "cycle ratio");
  AdderTreeStats stats = adder_tree_stats();
  check(stats.naive_inputs == 16 && stats.dense_inputs == 8 &&
            stats.sparse_inputs == 8,
        "adder tree fan-in");
  return "(4 vs 16 cycles, fan-in 8 vs 16)";
}

// 3. Bit-serial CAM max equals a plain argmax with lowest-address ties on
// 1e4 random arrays of 1..2048 values, always in 19 search cycles.
std::string c3_cam_max() {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 10000; ++iter) {
    uint32_t n = uint32_t(rng() % 2048) + 1;
    // Alternate wide and narrow value ranges; narrow ranges force ties.
    uint32_t range = iter % 2 == 0 ? kDistance19Max : 1 + uint32_t(rng() % 17);
    std::vector<Distance19> values(n);
    for (auto& v : values) v = Distance19(rng() % (uint64_t(range) + 1));

    AccessCounters counters;
    CamArray cam(counters);
    cam.init(n);
    cam.set_mode(CamMode::Search);
    for (uint32_t i = 0; i < n; ++i) cam.update_pair(i, values[i]);

    Distance19 want_value = 0;
    uint32_t want_index = 0;
    for (uint32_t i = 0; i < n; ++i) {
      if (values[i] > want_value) {
        want_value = values[i];
        want_index = i;
      }
    }
    SearchResult got = cam.find_centroid();
    check(got.max_value == want_value,
          "max value at iteration " + std::to_string(iter));
    check(got.centroid_index == want_index,
          "tie break at iteration " + std::to_string(iter));
    check(got.cycles == kBitCamCycles + kDataCamCycles,
          "search cycle count at iteration " + std::to_string(iter));
  }
  return "(10000 arrays, 19+1 cycles each)";
}

// 4. A temporary-distance pair tracks the running minimum of everything
// streamed into it, 1e4 random sequences of up to 64 updates.
std::string c4_running_min() {
  std::mt19937_64 rng(4);
  for (int iter = 0; iter < 10000; ++iter) {
    AccessCounters counters;
    CamArray cam(counters);
    cam.init(1);
    cam.set_mode(CamMode::Search);
    std::size_t updates = 1 + rng() % 64;
    Distance19 running = kDistance19Max;
    for (std::size_t u = 0; u < updates; ++u) {
      Distance19 d = Distance19(rng() % (uint64_t(kDistance19Max) + 1));
      cam.update_pair(0, d);
      running = std::min(running, d);
      check(cam.pair(0).effective() == running,
            "running minimum diverged at iteration " + std::to_string(iter));
    }
  }
  return "(10000 sequences)";
}

// 5. Accelerated FPS is bit-for-bit the exact L1 farthest point sampling,
// across 100 random tiles at the small/odd/full sizes.
std::string c5_fps_equivalence() {
  struct Case {
    std::size_t n;
    std::size_t m;
    int tiles;
  };
  // Full-size tiles use m=600 to keep the quadratic oracle affordable.
  const Case cases[] = {{16, 16, 40}, {257, 257, 40}, {2048, 600, 20}};
  int total = 0;
  for (const Case& c : cases) {
    for (int t = 0; t < c.tiles; ++t) {
      Tile tile = random_tile(c.n, 1000 + total);
      AccessCounters counters;
      ApdCimArray apd(counters);
      CamArray cam(counters);
      apd.load_tile(tile);
      cam.init(uint32_t(c.n));
      cam.set_mode(CamMode::Search);
      uint32_t seed_index = uint32_t(total % c.n);
      AccelFpsResult accel = accel_fps(apd, cam, c.m, seed_index);
      std::vector<uint32_t> exact =
          exact_fps(tile, c.m, seed_index, Metric::L1);
      check(accel.centroids == exact,
            "sequence diverged on tile " + std::to_string(total) + " (n=" +
                std::to_string(c.n) + ")");
      ++total;
    }
  }
  return "(100 tiles, n in {16, 257, 2048})";
}

// 6. Tiled sampling reads each point from DRAM once: at n=16384 and 2048
// total samples the read traffic drops by >= 99.9% against the global
// re-read baseline.
std::string c6_dram_reduction() {
  PointCloud cloud = generate_cloud(CloudKind::Uniform, 16384, 123);
  NetworkConfig config;
  LayerConfig layer;
  layer.type = LayerConfig::Type::Psa;
  layer.psa = {256, 6554, 1.6, 32, {3, 32}, 1};
  config.layers = {layer};
  RunOptions options;
  options.capacity = 2048;

  BaselineComparison cmp = compare_baselines(cloud, config, options);
  check(cmp.total_samples == 2048, "expected 8 tiles x 256 samples");
  check(cmp.pc2im_preprocess_dram_read_bits == 16384ull * 48,
        "accelerated flow should read each point once");
  check(cmp.dram_reduction_vs_global == 1.0 - 1.0 / 2048.0,
        "reduction is not exactly 1 - 1/m");
  check(cmp.dram_reduction_vs_global >= 0.999, "reduction below 99.9%");
  char buf[64];
  std::snprintf(buf, sizeof buf, "(reduction %.6f)",
                cmp.dram_reduction_vs_global);
  return buf;
}

// 7. On-chip preprocessing energy sits far below the digital local-FPS
// baseline at default parameters; the ratios are pinned as regressions.
std::string c7_energy_ratio() {
  const struct {
    uint32_t m;
    double pinned_ratio;
  } cases[] = {{128, 0.0080067599254755074}, {512, 0.0081932407993184787}};
  std::ostringstream detail;
  detail << "(";
  for (std::size_t i = 0; i < 2; ++i) {
    PointCloud cloud = generate_cloud(CloudKind::Uniform, 2048, 42);
    NetworkConfig config;
    LayerConfig layer;
    layer.type = LayerConfig::Type::Psa;
    layer.psa = {cases[i].m, 6554, 1.6, 32, {3, 16}, 1};
    config.layers = {layer};
    BaselineComparison cmp = compare_baselines(cloud, config, {});
    check(cmp.pc2im_preprocess_onchip_pj < cmp.local_baseline_preprocess_pj,
          "on-chip energy not below the local baseline at m=" +
              std::to_string(cases[i].m));
    check_close(cmp.onchip_energy_ratio_vs_local, cases[i].pinned_ratio, 1e-9,
                "pinned energy ratio at m=" + std::to_string(cases[i].m));
    detail << "m=" << cases[i].m << " ratio="
           << std::fixed << cmp.onchip_energy_ratio_vs_local << (i == 0 ? ", " : ")");
  }
  return detail.str();
}

// 8. Lattice grouping: with scale factor sqrt(3) the L1 ball contains the
// whole Euclidean ball (1e4 random cases), and at the default factor 1.6
// the recall against the Euclidean oracle stays >= 0.95 (pinned mean).
std::string c8_grouping_quality() {
  std::mt19937_64 rng(8);
  for (int iter = 0; iter < 10000; ++iter) {
    std::size_t n = 2 + rng() % 299;
    Tile tile = random_tile(n, 9000 + iter);
    uint32_t center = uint32_t(rng() % n);
    uint32_t radius = 1 + uint32_t(rng() % 60000);
    QueryConfig cfg{radius, 1.7320509, uint32_t(n)};
    std::vector<uint32_t> lattice = lattice_query(tile, center, cfg);
    std::vector<uint32_t> ball =
        ball_query(tile, center, radius, uint32_t(n));
    for (uint32_t b : ball) {
      check(std::find(lattice.begin(), lattice.end(), b) != lattice.end(),
            "point inside the Euclidean ball missed at iteration " +
                std::to_string(iter));
    }
  }

  double sum = 0.0;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    PointCloud cloud = generate_cloud(CloudKind::Uniform, 2048, seed);
    SampleOptions opt;
    opt.capacity = 2048;
    opt.samples_per_tile = 32;
    opt.query = {6554, 1.6, 32};
    opt.compare_exact = true;
    SampleRun run = run_sample(cloud, opt);
    sum += run.metrics->lattice_recall;
  }
  double mean = sum / 100.0;
  check(mean >= 0.95, "mean recall " + std::to_string(mean) + " below 0.95");
  check_close(mean, 0.97421793749551144, 1e-9, "pinned mean recall");
  char buf[64];
  std::snprintf(buf, sizeof buf, "(superset holds, recall %.4f)", mean);
  return buf;
}

// 9. A network run is a pure function of its inputs: repeated runs and any
// worker-thread count produce identical counters and identical JSON bytes.
std::string c9_determinism() {
  PointCloud cloud = generate_cloud(CloudKind::Clustered, 2000, 77);
  NetworkConfig config;
  LayerConfig psa0;
  psa0.type = LayerConfig::Type::Psa;
  psa0.psa = {64, 6554, 1.6, 16, {3, 16}, 1};
  LayerConfig psa1;
  psa1.type = LayerConfig::Type::Psa;
  psa1.psa = {16, 13108, 1.6, 8, {16, 32}, 2};
  LayerConfig pfp;
  pfp.type = LayerConfig::Type::Pfp;
  pfp.pfp = {3, {32, 16}, 3};
  config.layers = {psa0, psa1, pfp};
  RunOptions options;
  options.capacity = 512;

  SimResult first = run_network(cloud, config, options);
  SimResult second = run_network(cloud, config, options);
  RunOptions threaded = options;
  threaded.threads = 4;
  SimResult parallel = run_network(cloud, config, threaded);

  check(first.tile_count == 4, "expected a 4-tile partition");
  std::string ja = sim_result_to_json(first, true).dump();
  std::string jb = sim_result_to_json(second, true).dump();
  std::string jc = sim_result_to_json(parallel, true).dump();
  check(ja == jb, "repeated runs differ");
  check(ja == jc, "thread count changed the result");
  check(first.report.counters == parallel.report.counters,
        "thread count changed the counters");
  return "(2 runs + 4 threads, identical bytes)";
}

// 10. Per-sample cycle budget on a full 2048-point tile: 1 reference write +
// 128 distance cycles + 1 stream fill + 19 bit-serial search + 1 index
// lookup = 150 cycles, exactly 600 ns at 250 MHz.
std::string c10_cycle_budget() {
  Tile tile = random_tile(2048, 10);
  AccessCounters counters;
  ApdCimArray apd(counters);
  CamArray cam(counters);
  apd.load_tile(tile);
  cam.init(2048);
  cam.set_mode(CamMode::Search);

  AccelFpsResult one = accel_fps(apd, cam, 1, 0);
  check(one.cycles == 150, "per-sample cycles: " + std::to_string(one.cycles));
  check(one.cycles == 1 + 128 + 1 + 19 + 1, "cycle breakdown");
  check(counters.at(Stage::Preprocess).total_cycles == 150,
        "counter total diverged from the returned cycles");

  EnergyParams params;
  check(params.clock_hz == 250.0e6, "default clock");
  check(latency_s(one.cycles, params.clock_hz) == 6.0e-7,
        "latency not exactly 600 ns");
  check(latency_s(1, params.clock_hz) == 4.0e-9, "cycle time not exactly 4 ns");
  return "(150 cycles, 600 ns)";
}

}  // namespace

int main() {
  criterion(1, "MAC datapath self-check", c1_verify_mac);
  criterion(2, "MAC throughput and adder fan-in", c2_throughput);
  criterion(3, "bit-serial CAM max vs argmax oracle", c3_cam_max);
  criterion(4, "temporary-distance pairs track the running minimum",
            c4_running_min);
  criterion(5, "accelerated FPS equals exact L1 FPS", c5_fps_equivalence);
  criterion(6, "DRAM traffic reduction vs global baseline", c6_dram_reduction);
  criterion(7, "on-chip energy vs local baseline", c7_energy_ratio);
  criterion(8, "lattice grouping superset and recall", c8_grouping_quality);
  criterion(9, "deterministic and thread-independent runs", c9_determinism);
  criterion(10, "per-sample cycle and latency budget", c10_cycle_budget);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}

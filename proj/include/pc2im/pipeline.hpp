#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pc2im/apdcim.hpp"
#include "pc2im/costmodel.hpp"
#include "pc2im/geometry.hpp"
#include "pc2im/maxcam.hpp"
#include "pc2im/partition.hpp"
#include "pc2im/pointcloud.hpp"
#include "pc2im/sccim.hpp"

namespace pc2im {

// ---- network configuration -------------------------------------------------

// mlp_dims lists the full width chain [d_in, hidden..., d_out]; the first
// entry must match the incoming feature width (3 for the first layer, which
// consumes coordinate features).
struct PsaLayerConfig {
  uint32_t samples_per_tile = 0;
  uint32_t radius = 0;  // ball radius R in quantized units
  double scale_factor = 1.6;
  uint32_t max_neighbors = 1;
  std::vector<uint32_t> mlp_dims;
  uint64_t weight_seed = 0;
};

struct PfpLayerConfig {
  uint32_t k = 3;  // neighbors used for interpolation
  std::vector<uint32_t> mlp_dims;
  uint64_t weight_seed = 0;
};

struct LayerConfig {
  enum class Type { Psa, Pfp };
  Type type = Type::Psa;
  PsaLayerConfig psa;
  PfpLayerConfig pfp;
};

struct NetworkConfig {
  std::vector<LayerConfig> layers;

  // Checks layer ordering (abstraction layers strictly before propagation
  // layers), feature-width chaining from the 3-wide coordinate features, and
  // per-layer parameter sanity. Throws SimError(Config) on violation.
  void validate(uint32_t capacity) const;

  static NetworkConfig default_config();
};

struct RunOptions {
  uint32_t capacity = 2048;
  EnergyParams energy{};
  uint32_t threads = 1;
  uint32_t fps_seed_index = 0;         // first centroid of every sampling pass
  bool bit_serial_features = false;    // time feature MACs on the 16-cycle path
  bool collect_features = false;       // include final features in the JSON dump
};

// ---- feature plumbing -------------------------------------------------------

struct FeatureTensor {
  uint32_t dim = 0;
  std::vector<int16_t> values;  // row-major, count() x dim

  std::size_t count() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const int16_t> row(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
  std::span<int16_t> row(std::size_t i) {
    return {values.data() + i * dim, dim};
  }
};

// Coordinate features for the first layer: each quantized axis recentred and
// scaled down to [-128, 127] so small MLP weights do not saturate instantly.
FeatureTensor initial_features(std::span<const QuantPoint> points);

struct MlpWeights {
  std::vector<uint32_t> dims;
  // matrices[l] is dims[l+1] x dims[l], row-major by output neuron.
  std::vector<std::vector<int16_t>> matrices;

  static MlpWeights seeded(std::span<const uint32_t> dims, uint64_t seed);
  static MlpWeights identity(uint32_t dim);  // single pass-through layer
};

// ---- sampling / grouping ----------------------------------------------------

struct AccelFpsResult {
  std::vector<uint32_t> centroids;      // tile-local indices
  std::vector<DistanceBatch> batches;   // batches[i]: distances from centroid i
  uint64_t cycles = 0;
};

// Farthest point sampling on the distance array + CAM: per sample one
// reference select, one distance sweep streamed into the running-minimum
// pairs, and one max search. Equals exact_fps with the L1 metric bit for bit.
AccelFpsResult accel_fps(ApdCimArray& apd, CamArray& cam, std::size_t m,
                         uint32_t seed_index);

// Lattice grouping reusing an existing distance batch: no further array
// cycles are spent. Throws if the batch was not computed from `centroid`.
std::vector<uint32_t> fused_grouping(const Tile& tile, uint32_t centroid,
                                     const DistanceBatch& batch,
                                     const QueryConfig& cfg);

// ---- layer runners ----------------------------------------------------------

struct PsaTileOutput {
  std::vector<uint32_t> centroids;                   // local to the layer input
  std::vector<std::vector<uint32_t>> neighborhoods;  // local indices
  std::vector<uint32_t> point_globals;               // local -> cloud-global
  uint64_t feature_computes = 0;  // distinct points pushed through the MLP
};

struct PsaLayerResult {
  std::vector<PsaTileOutput> tiles;
  std::vector<FeatureTensor> pooled;  // per tile, one row per centroid
  Report report;
};

PsaLayerResult run_psa_layer(std::span<const Tile> tiles,
                             const PsaLayerConfig& cfg,
                             const RunOptions& options = {},
                             const std::vector<FeatureTensor>* input_features =
                                 nullptr,
                             const MlpWeights* weights = nullptr);

struct PfpLayerResult {
  FeatureTensor features;                            // one row per target
  std::vector<std::vector<uint32_t>> source_knn;     // per target, k source ids
  Report report;
};

PfpLayerResult run_pfp_layer(const Tile& source, const FeatureTensor& source_features,
                             const Tile& targets, const PfpLayerConfig& cfg,
                             const RunOptions& options = {},
                             const MlpWeights* weights = nullptr);

// ---- whole-network simulation -----------------------------------------------

struct LayerTrace {
  std::string type;  // "psa" | "pfp"
  uint32_t out_dim = 0;
  uint64_t points_out = 0;
  std::vector<PsaTileOutput> psa_tiles;  // empty for pfp layers
};

struct PipelineSummary {
  uint64_t sequential_cycles = 0;  // plain sum of all stage cycles
  uint64_t pipelined_cycles = 0;   // with load/search overlap across tiles
};

struct SimResult {
  uint32_t tile_count = 0;
  std::vector<LayerTrace> layers;
  std::vector<std::vector<uint32_t>> final_globals;  // per tile
  std::vector<FeatureTensor> final_features;         // per tile
  Report report;
  AccessCounters host_counters;                  // partitioning + weight load
  std::vector<AccessCounters> per_tile_counters;
  PipelineSummary pipeline;
};

SimResult run_network(const PointCloud& cloud, const NetworkConfig& config,
                      const RunOptions& options = {});

// ---- baseline comparison ----------------------------------------------------

struct BaselineComparison {
  uint64_t cloud_points = 0;
  uint64_t total_samples = 0;  // first-layer samples summed over tiles
  GlobalFpsTraffic global_traffic;
  double global_baseline_preprocess_dram_pj = 0.0;
  uint64_t local_point_bits = 0;
  uint64_t local_td_bits = 0;
  double local_baseline_preprocess_pj = 0.0;
  uint64_t pc2im_preprocess_dram_read_bits = 0;
  double pc2im_preprocess_dram_pj = 0.0;
  double pc2im_preprocess_onchip_pj = 0.0;
  double dram_reduction_vs_global = 0.0;
  double onchip_energy_ratio_vs_local = 0.0;
  uint64_t feature_cycles_sccim = 0;
  uint64_t feature_cycles_bit_serial = 0;
  double feature_cycle_ratio = 0.0;
};

BaselineComparison compare_baselines(const PointCloud& cloud,
                                     const NetworkConfig& config,
                                     const RunOptions& options = {});

// ---- sampling-only run (CLI `sample`) ----------------------------------------

struct SampleOptions {
  uint32_t capacity = 2048;
  uint32_t samples_per_tile = 0;
  QueryConfig query;
  uint32_t seed_index = 0;
  bool compare_exact = false;
  EnergyParams energy{};
};

struct SampleMetrics {
  double lattice_recall = 0.0;  // vs the Euclidean ball oracle
  double coverage_ratio = 0.0;  // L1-driven FPS coverage vs exact L2 FPS
};

struct SampleTileResult {
  uint32_t tile_id = 0;
  uint32_t size = 0;
  std::vector<uint32_t> centroid_globals;
  std::vector<std::vector<uint32_t>> neighborhood_globals;
};

struct SampleRun {
  std::vector<SampleTileResult> tiles;
  Report report;
  std::optional<SampleMetrics> metrics;
};

SampleRun run_sample(const PointCloud& cloud, const SampleOptions& options);

}  // namespace pc2im

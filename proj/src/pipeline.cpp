#include "pc2im/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "pc2im/errors.hpp"

namespace pc2im {

namespace {

int16_t saturate16(int64_t v) {
  return int16_t(std::clamp<int64_t>(v, INT16_MIN, INT16_MAX));
}

std::vector<uint32_t> nearest_k_from(
    std::vector<std::pair<uint64_t, uint32_t>>&& candidates, uint32_t k) {
  std::sort(candidates.begin(), candidates.end());
  if (candidates.size() > k) candidates.resize(k);
  std::vector<uint32_t> out;
  out.reserve(candidates.size());
  for (const auto& [d, idx] : candidates) out.push_back(idx);
  return out;
}

// Runs fn(i) for i in [0, count) across `threads` workers. Worker assignment
// is nondeterministic but every result lands in its own slot, so outputs are
// independent of the interleaving.
template <typename Fn>
void parallel_for(std::size_t count, uint32_t threads, Fn&& fn) {
  threads = std::max<uint32_t>(threads, 1);
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  uint32_t n_workers = uint32_t(std::min<std::size_t>(threads, count));
  pool.reserve(n_workers);
  for (uint32_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

// ---- network configuration -------------------------------------------------

void NetworkConfig::validate(uint32_t capacity) const {
  if (layers.empty()) throw_config("network: no layers");
  if (layers.front().type != LayerConfig::Type::Psa) {
    throw_config("network: first layer must be an abstraction (psa) layer");
  }
  uint32_t dim = 3;  // coordinate features
  std::size_t level_depth = 1;
  bool seen_pfp = false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerConfig& layer = layers[i];
    const std::string at = "network layer " + std::to_string(i) + ": ";
    if (layer.type == LayerConfig::Type::Psa) {
      if (seen_pfp) throw_config(at + "psa layers must precede pfp layers");
      const PsaLayerConfig& p = layer.psa;
      if (p.samples_per_tile == 0) throw_config(at + "samples_per_tile must be >= 1");
      if (p.samples_per_tile > capacity) {
        throw_config(at + "samples_per_tile exceeds tile capacity");
      }
      if (!(p.scale_factor > 0.0)) throw_config(at + "scale_factor must be positive");
      if (p.max_neighbors == 0) throw_config(at + "max_neighbors must be >= 1");
      if (p.mlp_dims.empty()) throw_config(at + "mlp_dims must be non-empty");
      if (p.mlp_dims.front() != dim) {
        throw_config(at + "mlp input width " + std::to_string(p.mlp_dims.front()) +
                     " does not match incoming feature width " + std::to_string(dim));
      }
      for (uint32_t d : p.mlp_dims) {
        if (d == 0) throw_config(at + "mlp width must be positive");
      }
      dim = p.mlp_dims.back();
      ++level_depth;
    } else {
      seen_pfp = true;
      const PfpLayerConfig& p = layer.pfp;
      if (p.k == 0) throw_config(at + "k must be >= 1");
      if (p.mlp_dims.empty()) throw_config(at + "mlp_dims must be non-empty");
      if (p.mlp_dims.front() != dim) {
        throw_config(at + "mlp input width " + std::to_string(p.mlp_dims.front()) +
                     " does not match incoming feature width " + std::to_string(dim));
      }
      for (uint32_t d : p.mlp_dims) {
        if (d == 0) throw_config(at + "mlp width must be positive");
      }
      if (level_depth < 2) {
        throw_config(at + "no coarser level left to propagate into");
      }
      --level_depth;
      dim = p.mlp_dims.back();
    }
  }
}

NetworkConfig NetworkConfig::default_config() {
  NetworkConfig config;
  LayerConfig psa0;
  psa0.type = LayerConfig::Type::Psa;
  psa0.psa = {/*samples_per_tile=*/256, /*radius=*/6554, /*scale_factor=*/1.6,
              /*max_neighbors=*/32, /*mlp_dims=*/{3, 32, 64}, /*weight_seed=*/1};
  LayerConfig psa1;
  psa1.type = LayerConfig::Type::Psa;
  psa1.psa = {/*samples_per_tile=*/64, /*radius=*/13108, /*scale_factor=*/1.6,
              /*max_neighbors=*/16, /*mlp_dims=*/{64, 128}, /*weight_seed=*/2};
  LayerConfig pfp;
  pfp.type = LayerConfig::Type::Pfp;
  pfp.pfp = {/*k=*/3, /*mlp_dims=*/{128, 64}, /*weight_seed=*/3};
  config.layers = {psa0, psa1, pfp};
  return config;
}

// ---- feature plumbing -------------------------------------------------------

FeatureTensor initial_features(std::span<const QuantPoint> points) {
  FeatureTensor f;
  f.dim = 3;
  f.values.reserve(points.size() * 3);
  for (const QuantPoint& p : points) {
    f.values.push_back(int16_t((int(p.qx) - 32768) >> 8));
    f.values.push_back(int16_t((int(p.qy) - 32768) >> 8));
    f.values.push_back(int16_t((int(p.qz) - 32768) >> 8));
  }
  return f;
}

MlpWeights MlpWeights::seeded(std::span<const uint32_t> dims, uint64_t seed) {
  if (dims.empty()) throw_config("MlpWeights: empty width chain");
  MlpWeights w;
  w.dims.assign(dims.begin(), dims.end());
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    std::vector<int16_t> matrix(std::size_t(dims[l + 1]) * dims[l]);
    for (auto& v : matrix) v = int16_t(int(rng() & 0xf) - 8);  // [-8, 7]
    w.matrices.push_back(std::move(matrix));
  }
  return w;
}

MlpWeights MlpWeights::identity(uint32_t dim) {
  MlpWeights w;
  w.dims = {dim, dim};
  std::vector<int16_t> matrix(std::size_t(dim) * dim, 0);
  for (uint32_t i = 0; i < dim; ++i) matrix[std::size_t(i) * dim + i] = 1;
  w.matrices.push_back(std::move(matrix));
  return w;
}

namespace {

// MLP weights pre-packed into 16-row compute tiles, one tile per 16-wide
// input chunk and layer. Shared read-only across tile workers.
struct CompiledMlp {
  MlpWeights weights;
  std::vector<std::vector<SccimTile>> layer_chunks;

  static CompiledMlp build(MlpWeights w) {
    CompiledMlp mlp;
    mlp.weights = std::move(w);
    const auto& dims = mlp.weights.dims;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      uint32_t d_in = dims[l];
      uint32_t d_out = dims[l + 1];
      uint32_t chunks = (d_in + kMacRows - 1) / kMacRows;
      std::vector<SccimTile> tiles;
      tiles.reserve(chunks);
      const std::vector<int16_t>& matrix = mlp.weights.matrices[l];
      for (uint32_t c = 0; c < chunks; ++c) {
        SccimTile tile(d_out);
        for (uint32_t o = 0; o < d_out; ++o) {
          std::array<int16_t, kMacRows> column{};
          for (uint32_t r = 0; r < kMacRows; ++r) {
            uint32_t in_idx = c * kMacRows + r;
            column[r] = in_idx < d_in
                            ? matrix[std::size_t(o) * d_in + in_idx]
                            : int16_t(0);
          }
          tile.set_column(o, column);
        }
        tiles.push_back(std::move(tile));
      }
      mlp.layer_chunks.push_back(std::move(tiles));
    }
    return mlp;
  }

  uint32_t in_dim() const { return weights.dims.front(); }
  uint32_t out_dim() const { return weights.dims.back(); }

  // One point through the whole stack. Output columns of a chunk compute in
  // parallel, so a chunk costs one MAC latency regardless of width.
  std::vector<int16_t> apply(std::span<const int16_t> input,
                             AccessCounters& counters, bool bit_serial) const {
    if (input.size() != in_dim()) {
      throw_invalid("mlp: input width " + std::to_string(input.size()) +
                    " does not match " + std::to_string(in_dim()));
    }
    auto& f = counters.at(Stage::Feature);
    std::vector<int16_t> current(input.begin(), input.end());
    for (std::size_t l = 0; l < layer_chunks.size(); ++l) {
      uint32_t d_in = weights.dims[l];
      uint32_t d_out = weights.dims[l + 1];
      f.sram_bits_read += uint64_t(d_in) * 16;
      std::vector<int64_t> acc(d_out, 0);
      const auto& tiles = layer_chunks[l];
      for (uint32_t c = 0; c < tiles.size(); ++c) {
        std::array<int16_t, kMacRows> chunk_in{};
        for (uint32_t r = 0; r < kMacRows; ++r) {
          uint32_t in_idx = c * kMacRows + r;
          chunk_in[r] = in_idx < d_in ? current[in_idx] : int16_t(0);
        }
        for (uint32_t o = 0; o < d_out; ++o) {
          acc[o] += tiles[c].mac(chunk_in, o, bit_serial).sum;
          f.mac_ops_16b += kMacRows;
        }
        f.total_cycles += bit_serial ? kBitSerialMacCycles : kMacCycles;
      }
      current.resize(d_out);
      for (uint32_t o = 0; o < d_out; ++o) current[o] = saturate16(acc[o]);
      f.sram_bits_written += uint64_t(d_out) * 16;
    }
    return current;
  }
};

struct LevelState {
  std::vector<QuantPoint> points;
  std::vector<uint32_t> globals;
  FeatureTensor features;

  Tile as_tile(uint32_t capacity) const {
    Tile t;
    t.points = points;
    t.global_indices = globals;
    t.capacity = capacity;
    return t;
  }
};

struct TileLayerWork {
  uint64_t load_cycles = 0;
  uint64_t preprocess_cycles = 0;
  uint64_t feature_cycles = 0;
};

}  // namespace

// ---- sampling / grouping ----------------------------------------------------

AccelFpsResult accel_fps(ApdCimArray& apd, CamArray& cam, std::size_t m,
                         uint32_t seed_index) {
  const uint32_t n = apd.loaded_count();
  if (m > n) {
    throw_invalid("accel_fps: m = " + std::to_string(m) +
                  " exceeds loaded point count " + std::to_string(n));
  }
  if (cam.pair_count() != n) {
    throw_invalid("accel_fps: CAM holds " + std::to_string(cam.pair_count()) +
                  " pairs for " + std::to_string(n) + " points");
  }
  AccelFpsResult result;
  if (m == 0) return result;
  if (seed_index >= n) throw_invalid("accel_fps: seed_index out of range");

  uint32_t current = seed_index;
  for (std::size_t s = 0; s < m; ++s) {
    result.centroids.push_back(current);
    apd.set_reference(current);
    DistanceBatch batch = apd.compute_all();
    uint64_t fill = cam.stream_update(batch);
    SearchResult found = cam.find_centroid();
    result.cycles += 1 + batch.cycles_used + fill + found.cycles;
    result.batches.push_back(std::move(batch));
    current = found.centroid_index;
  }
  return result;
}

std::vector<uint32_t> fused_grouping(const Tile& tile, uint32_t centroid,
                                     const DistanceBatch& batch,
                                     const QueryConfig& cfg) {
  if (centroid >= tile.size()) throw_invalid("fused_grouping: centroid out of range");
  if (batch.reference_index != centroid) {
    throw_invalid("fused_grouping: stale batch (reference " +
                  std::to_string(batch.reference_index) + ", centroid " +
                  std::to_string(centroid) + ")");
  }
  if (batch.distances.size() != tile.size()) {
    throw_invalid("fused_grouping: batch size does not match tile");
  }
  if (cfg.max_neighbors == 0) {
    throw_invalid("fused_grouping: max_neighbors must be >= 1");
  }
  const uint64_t range = lattice_range(cfg);
  std::vector<std::pair<uint64_t, uint32_t>> candidates;
  for (uint32_t i = 0; i < batch.distances.size(); ++i) {
    if (batch.distances[i] <= range) candidates.emplace_back(batch.distances[i], i);
  }
  return nearest_k_from(std::move(candidates), cfg.max_neighbors);
}

// ---- per-tile layer simulation ----------------------------------------------

namespace {

struct PsaStepResult {
  LevelState next;
  PsaTileOutput output;
  TileLayerWork work;
};

PsaStepResult simulate_psa(const LevelState& level, bool first_level,
                           const PsaLayerConfig& cfg, const CompiledMlp& mlp,
                           const RunOptions& options, AccessCounters& counters) {
  const uint32_t n = uint32_t(level.points.size());
  if (cfg.samples_per_tile > n) {
    throw_invalid("psa layer: samples_per_tile = " +
                  std::to_string(cfg.samples_per_tile) +
                  " exceeds tile point count " + std::to_string(n));
  }
  if (level.features.dim != mlp.in_dim()) {
    throw_config("psa layer: feature width does not match mlp input");
  }
  if (level.features.count() != n) {
    throw_invalid("psa layer: one feature row per point required");
  }
  PsaStepResult step;
  TileLayerWork& work = step.work;
  Tile view = level.as_tile(options.capacity);

  // Load phase: level 0 arrives from DRAM, deeper levels from on-chip
  // buffers. Points land in the distance array, pairs in the CAM.
  auto& load = counters.at(Stage::Load);
  if (first_level) {
    load.dram_bits_read += uint64_t(n) * kPointBits;
  } else {
    load.sram_bits_read += uint64_t(n) * kPointBits;
  }
  ApdCimArray apd(counters);
  CamArray cam(counters);
  apd.load_tile(view);
  cam.init(n);
  cam.set_mode(CamMode::Search);
  load.total_cycles += n;  // point write and pair init fill in lockstep
  work.load_cycles = n;

  const uint64_t pre_before = counters.at(Stage::Preprocess).total_cycles;
  AccelFpsResult fps = accel_fps(apd, cam, cfg.samples_per_tile,
                                 options.fps_seed_index);
  QueryConfig qcfg{cfg.radius, cfg.scale_factor, cfg.max_neighbors};
  PsaTileOutput& out = step.output;
  out.centroids = fps.centroids;
  out.point_globals = level.globals;
  out.neighborhoods.reserve(fps.centroids.size());
  for (std::size_t i = 0; i < fps.centroids.size(); ++i) {
    out.neighborhoods.push_back(
        fused_grouping(view, fps.centroids[i], fps.batches[i], qcfg));
  }
  work.preprocess_cycles =
      counters.at(Stage::Preprocess).total_cycles - pre_before;

  // Delayed aggregation: each distinct point that appears in some
  // neighborhood goes through the MLP exactly once; pooling reads the stored
  // per-point results afterwards.
  const uint64_t feat_before = counters.at(Stage::Feature).total_cycles;
  std::vector<int32_t> result_row(n, -1);
  std::vector<uint32_t> distinct;
  for (const auto& hood : out.neighborhoods) {
    for (uint32_t idx : hood) {
      if (result_row[idx] < 0) {
        result_row[idx] = int32_t(distinct.size());
        distinct.push_back(idx);
      }
    }
  }
  std::sort(distinct.begin(), distinct.end());
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    result_row[distinct[i]] = int32_t(i);
  }
  out.feature_computes = distinct.size();

  const uint32_t d_out = mlp.out_dim();
  std::vector<int16_t> computed(distinct.size() * d_out);
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    std::vector<int16_t> f = mlp.apply(level.features.row(distinct[i]),
                                       counters, options.bit_serial_features);
    std::copy(f.begin(), f.end(), computed.begin() + i * d_out);
  }

  // Max pooling per neighborhood; comparators ride along with the feature
  // write-out, so no extra cycles.
  auto& feat = counters.at(Stage::Feature);
  FeatureTensor pooled;
  pooled.dim = d_out;
  pooled.values.resize(out.centroids.size() * std::size_t(d_out));
  for (std::size_t ci = 0; ci < out.centroids.size(); ++ci) {
    std::span<int16_t> dst(pooled.values.data() + ci * d_out, d_out);
    const auto& hood = out.neighborhoods[ci];
    for (std::size_t k = 0; k < hood.size(); ++k) {
      const int16_t* src = computed.data() +
                           std::size_t(result_row[hood[k]]) * d_out;
      for (uint32_t d = 0; d < d_out; ++d) {
        dst[d] = k == 0 ? src[d] : std::max(dst[d], src[d]);
      }
    }
    feat.sram_bits_read += uint64_t(hood.size()) * d_out * 16;
    feat.sram_bits_written += uint64_t(d_out) * 16;
  }
  work.feature_cycles = counters.at(Stage::Feature).total_cycles - feat_before;

  LevelState& next = step.next;
  next.points.reserve(out.centroids.size());
  next.globals.reserve(out.centroids.size());
  for (uint32_t c : out.centroids) {
    next.points.push_back(level.points[c]);
    next.globals.push_back(level.globals[c]);
  }
  next.features = std::move(pooled);
  return step;
}

struct PfpStepResult {
  FeatureTensor features;
  std::vector<std::vector<uint32_t>> source_knn;
  TileLayerWork work;
};

PfpStepResult simulate_pfp(const LevelState& source, const LevelState& target,
                           const PfpLayerConfig& cfg, const CompiledMlp& mlp,
                           const RunOptions& options, AccessCounters& counters) {
  const uint32_t n_src = uint32_t(source.points.size());
  if (cfg.k > n_src) {
    throw_invalid("pfp layer: k = " + std::to_string(cfg.k) +
                  " exceeds source point count " + std::to_string(n_src));
  }
  if (source.features.dim != mlp.in_dim()) {
    throw_config("pfp layer: feature width does not match mlp input");
  }
  if (source.features.count() != n_src) {
    throw_invalid("pfp layer: one feature row per source point required");
  }
  PfpStepResult step;
  TileLayerWork& work = step.work;

  // Source points move from on-chip buffers into the distance array.
  auto& load = counters.at(Stage::Load);
  load.sram_bits_read += uint64_t(n_src) * kPointBits;
  ApdCimArray apd(counters);
  Tile source_view = source.as_tile(options.capacity);
  apd.load_tile(source_view);
  load.total_cycles += n_src;
  work.load_cycles = n_src;

  const uint64_t pre_before = counters.at(Stage::Preprocess).total_cycles;
  const uint64_t feat_before = counters.at(Stage::Feature).total_cycles;
  const uint32_t src_dim = source.features.dim;
  auto& pre = counters.at(Stage::Preprocess);
  auto& feat = counters.at(Stage::Feature);

  step.features.dim = mlp.out_dim();
  step.features.values.reserve(target.points.size() * mlp.out_dim());
  for (std::size_t t = 0; t < target.points.size(); ++t) {
    apd.set_reference_point(target.points[t]);
    DistanceBatch batch = apd.compute_all();
    pre.total_cycles += 1;  // sorter pipeline fill behind the distance stream

    std::vector<std::pair<uint64_t, uint32_t>> candidates;
    candidates.reserve(n_src);
    for (uint32_t i = 0; i < n_src; ++i) candidates.emplace_back(batch.distances[i], i);
    std::vector<uint32_t> nearest = nearest_k_from(std::move(candidates), cfg.k);

    std::vector<Distance19> dists;
    dists.reserve(nearest.size());
    for (uint32_t idx : nearest) dists.push_back(batch.distances[idx]);
    std::vector<double> w = interpolate_weights(dists);

    std::vector<int16_t> interp(src_dim);
    for (uint32_t d = 0; d < src_dim; ++d) {
      double acc = 0.0;
      for (std::size_t i = 0; i < nearest.size(); ++i) {
        acc += w[i] * double(source.features.row(nearest[i])[d]);
      }
      interp[d] = saturate16(round_half_up(acc));
    }
    feat.mac_ops_16b += uint64_t(nearest.size()) * src_dim;
    feat.sram_bits_read += uint64_t(nearest.size()) * src_dim * 16;

    std::vector<int16_t> out_f =
        mlp.apply(interp, counters, options.bit_serial_features);
    step.features.values.insert(step.features.values.end(), out_f.begin(),
                                out_f.end());
    step.source_knn.push_back(std::move(nearest));
  }
  work.preprocess_cycles = pre.total_cycles - pre_before;
  work.feature_cycles = feat.total_cycles - feat_before;
  return step;
}

}  // namespace

// ---- public layer runners ---------------------------------------------------

PsaLayerResult run_psa_layer(std::span<const Tile> tiles,
                             const PsaLayerConfig& cfg,
                             const RunOptions& options,
                             const std::vector<FeatureTensor>* input_features,
                             const MlpWeights* weights) {
  if (tiles.empty()) throw_invalid("run_psa_layer: no tiles");
  options.energy.validate();
  if (input_features && input_features->size() != tiles.size()) {
    throw_invalid("run_psa_layer: feature tensor count does not match tiles");
  }
  CompiledMlp mlp = CompiledMlp::build(
      weights ? *weights : MlpWeights::seeded(cfg.mlp_dims, cfg.weight_seed));

  PsaLayerResult result;
  result.tiles.resize(tiles.size());
  result.pooled.resize(tiles.size());
  std::vector<AccessCounters> counters(tiles.size());
  parallel_for(tiles.size(), options.threads, [&](std::size_t i) {
    LevelState level;
    level.points = tiles[i].points;
    level.globals = tiles[i].global_indices;
    level.features = input_features ? (*input_features)[i]
                                    : initial_features(tiles[i].points);
    PsaStepResult step =
        simulate_psa(level, /*first_level=*/true, cfg, mlp, options, counters[i]);
    result.tiles[i] = std::move(step.output);
    result.pooled[i] = std::move(step.next.features);
  });

  result.report.params = options.energy;
  for (const auto& c : counters) result.report.counters += c;
  return result;
}

PfpLayerResult run_pfp_layer(const Tile& source,
                             const FeatureTensor& source_features,
                             const Tile& targets, const PfpLayerConfig& cfg,
                             const RunOptions& options,
                             const MlpWeights* weights) {
  options.energy.validate();
  if (source_features.count() != source.size()) {
    throw_invalid("run_pfp_layer: one feature row per source point required");
  }
  CompiledMlp mlp = CompiledMlp::build(
      weights ? *weights : MlpWeights::seeded(cfg.mlp_dims, cfg.weight_seed));

  LevelState src{source.points, source.global_indices, source_features};
  LevelState dst{targets.points, targets.global_indices, {}};
  AccessCounters counters;
  PfpStepResult step = simulate_pfp(src, dst, cfg, mlp, options, counters);

  PfpLayerResult result;
  result.features = std::move(step.features);
  result.source_knn = std::move(step.source_knn);
  result.report.params = options.energy;
  result.report.counters = counters;
  return result;
}

// ---- whole-network simulation -----------------------------------------------

namespace {

// Two-stage schedule: while tile t occupies the search-mode array, tile t+1
// fills the load-mode one; a step takes the longer of the two.
uint64_t pingpong_schedule(std::span<const TileLayerWork> work) {
  if (work.empty()) return 0;
  AccessCounters scratch;
  PingPongCam pp(scratch);
  pp.step(std::nullopt, CamWorkItem{pp.load_array(), work[0].load_cycles});
  for (std::size_t t = 0; t < work.size(); ++t) {
    pp.swap_roles();
    std::optional<CamWorkItem> load;
    if (t + 1 < work.size()) {
      load = CamWorkItem{pp.load_array(), work[t + 1].load_cycles};
    }
    pp.step(CamWorkItem{pp.search_array(), work[t].preprocess_cycles}, load);
  }
  return pp.total_cycles();
}

struct TileRunResult {
  AccessCounters counters;
  std::vector<PsaTileOutput> psa_outputs;
  std::vector<TileLayerWork> work;       // one per layer
  std::vector<uint64_t> points_out;      // one per layer
  LevelState final_level;
};

TileRunResult run_tile(const Tile& tile, const NetworkConfig& config,
                       const std::vector<CompiledMlp>& mlps,
                       const RunOptions& options) {
  TileRunResult run;
  std::vector<LevelState> levels;
  levels.push_back(LevelState{tile.points, tile.global_indices,
                              initial_features(tile.points)});
  for (std::size_t li = 0; li < config.layers.size(); ++li) {
    const LayerConfig& layer = config.layers[li];
    if (layer.type == LayerConfig::Type::Psa) {
      PsaStepResult step =
          simulate_psa(levels.back(), levels.size() == 1, layer.psa, mlps[li],
                       options, run.counters);
      run.psa_outputs.push_back(std::move(step.output));
      run.work.push_back(step.work);
      run.points_out.push_back(step.next.points.size());
      levels.push_back(std::move(step.next));
    } else {
      LevelState& source = levels.back();
      LevelState& target = levels[levels.size() - 2];
      PfpStepResult step = simulate_pfp(source, target, layer.pfp, mlps[li],
                                        options, run.counters);
      run.work.push_back(step.work);
      target.features = std::move(step.features);
      run.points_out.push_back(target.points.size());
      levels.pop_back();
    }
  }
  run.final_level = std::move(levels.back());
  return run;
}

}  // namespace

SimResult run_network(const PointCloud& cloud, const NetworkConfig& config,
                      const RunOptions& options) {
  options.energy.validate();
  config.validate(options.capacity);
  const uint64_t n = cloud.size();
  if (n == 0) throw_invalid("run_network: empty cloud");

  SimResult result;

  // Host-side partitioning pass: one full cloud read, quantized tiles written
  // back out. Host cycles are not accelerator cycles and stay uncounted.
  auto& host_pre = result.host_counters.at(Stage::Preprocess);
  host_pre.dram_bits_read += n * kPointBits;
  host_pre.dram_bits_written += n * kPointBits;

  PartitionResult partition = msp_partition(cloud, options.capacity);
  const std::size_t tile_count = partition.tiles.size();
  result.tile_count = uint32_t(tile_count);

  // Weights load once into the MAC arrays for the whole run.
  std::vector<CompiledMlp> mlps;
  mlps.reserve(config.layers.size());
  uint64_t weight_bits = 0;
  for (const LayerConfig& layer : config.layers) {
    const auto& dims = layer.type == LayerConfig::Type::Psa
                           ? layer.psa.mlp_dims
                           : layer.pfp.mlp_dims;
    uint64_t seed = layer.type == LayerConfig::Type::Psa
                        ? layer.psa.weight_seed
                        : layer.pfp.weight_seed;
    mlps.push_back(CompiledMlp::build(MlpWeights::seeded(dims, seed)));
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      weight_bits += uint64_t(dims[l]) * dims[l + 1] * 16;
    }
  }
  auto& host_load = result.host_counters.at(Stage::Load);
  host_load.dram_bits_read += weight_bits;
  host_load.sram_bits_written += weight_bits;

  std::vector<TileRunResult> runs(tile_count);
  parallel_for(tile_count, options.threads, [&](std::size_t i) {
    runs[i] = run_tile(partition.tiles[i], config, mlps, options);
  });

  // Merge per-tile counters in tile order (deterministic under any thread
  // count), then lay the ping-pong schedule over the per-layer work items.
  result.report.params = options.energy;
  result.report.counters = result.host_counters;
  result.per_tile_counters.reserve(tile_count);
  for (const auto& run : runs) {
    result.per_tile_counters.push_back(run.counters);
    result.report.counters += run.counters;
  }

  result.pipeline.sequential_cycles =
      result.report.counters.total().total_cycles;
  uint64_t pipelined = 0;
  for (std::size_t li = 0; li < config.layers.size(); ++li) {
    std::vector<TileLayerWork> layer_work(tile_count);
    for (std::size_t t = 0; t < tile_count; ++t) layer_work[t] = runs[t].work[li];
    pipelined += pingpong_schedule(layer_work);
    for (const auto& w : layer_work) pipelined += w.feature_cycles;
  }
  result.pipeline.pipelined_cycles = pipelined;

  for (std::size_t li = 0; li < config.layers.size(); ++li) {
    LayerTrace trace;
    const LayerConfig& layer = config.layers[li];
    trace.type = layer.type == LayerConfig::Type::Psa ? "psa" : "pfp";
    trace.out_dim = layer.type == LayerConfig::Type::Psa
                        ? layer.psa.mlp_dims.back()
                        : layer.pfp.mlp_dims.back();
    for (const auto& run : runs) trace.points_out += run.points_out[li];
    if (layer.type == LayerConfig::Type::Psa) {
      std::size_t psa_idx = 0;
      for (std::size_t k = 0; k < li; ++k) {
        if (config.layers[k].type == LayerConfig::Type::Psa) ++psa_idx;
      }
      for (const auto& run : runs) {
        trace.psa_tiles.push_back(run.psa_outputs[psa_idx]);
      }
    }
    result.layers.push_back(std::move(trace));
  }

  result.final_globals.reserve(tile_count);
  result.final_features.reserve(tile_count);
  for (auto& run : runs) {
    result.final_globals.push_back(std::move(run.final_level.globals));
    result.final_features.push_back(std::move(run.final_level.features));
  }
  return result;
}

// ---- baseline comparison ----------------------------------------------------

BaselineComparison compare_baselines(const PointCloud& cloud,
                                     const NetworkConfig& config,
                                     const RunOptions& options) {
  RunOptions sc_options = options;
  sc_options.bit_serial_features = false;
  SimResult sc = run_network(cloud, config, sc_options);

  RunOptions bs_options = options;
  bs_options.bit_serial_features = true;
  SimResult bs = run_network(cloud, config, bs_options);

  BaselineComparison cmp;
  cmp.cloud_points = cloud.size();
  cmp.total_samples =
      uint64_t(sc.tile_count) * config.layers.front().psa.samples_per_tile;
  cmp.global_traffic =
      baseline_global_fps_traffic(cmp.cloud_points, cmp.total_samples);
  const EnergyParams& p = options.energy;
  cmp.global_baseline_preprocess_dram_pj =
      double(cmp.global_traffic.dram_bits_baseline) * p.dram_pj_per_bit;

  // Local digital baseline: per sampling step the tile's points stream out of
  // SRAM and every temporary-distance entry is read and written; propagation
  // layers re-read the source points once per query.
  std::vector<uint64_t> level_sizes;
  for (std::size_t t = 0; t < sc.tile_count; ++t) {
    uint64_t level_n = 0;
    std::size_t level_depth = 0;
    std::vector<uint64_t> stack;  // sizes of coarser levels
    for (const LayerConfig& layer : config.layers) {
      if (layer.type == LayerConfig::Type::Psa) {
        level_n = level_depth == 0
                      ? sc.layers.front().psa_tiles[t].point_globals.size()
                      : stack.back();
        LocalFpsBreakdown b =
            baseline_local_fps_breakdown(level_n, layer.psa.samples_per_tile);
        cmp.local_point_bits += b.point_access_bits;
        cmp.local_td_bits += b.td_update_bits;
        stack.push_back(layer.psa.samples_per_tile);
        ++level_depth;
      } else {
        uint64_t n_src = stack.back();
        stack.pop_back();
        uint64_t n_target = stack.empty()
                                ? sc.layers.front().psa_tiles[t].point_globals.size()
                                : stack.back();
        cmp.local_point_bits += n_target * n_src * kPointBits;
        --level_depth;
      }
    }
  }
  cmp.local_baseline_preprocess_pj =
      double(cmp.local_point_bits + cmp.local_td_bits) * p.sram_pj_per_bit;

  const StageCounters& pre = sc.report.counters.at(Stage::Preprocess);
  EnergyBreakdown pre_energy = energy(pre, p);
  cmp.pc2im_preprocess_dram_read_bits = pre.dram_bits_read;
  cmp.pc2im_preprocess_dram_pj = pre_energy.dram_pj;
  cmp.pc2im_preprocess_onchip_pj = pre_energy.total_pj() - pre_energy.dram_pj;
  cmp.dram_reduction_vs_global =
      1.0 - double(pre.dram_bits_read) /
                double(cmp.global_traffic.dram_bits_baseline);
  cmp.onchip_energy_ratio_vs_local =
      cmp.pc2im_preprocess_onchip_pj / cmp.local_baseline_preprocess_pj;

  cmp.feature_cycles_sccim =
      sc.report.counters.at(Stage::Feature).total_cycles;
  cmp.feature_cycles_bit_serial =
      bs.report.counters.at(Stage::Feature).total_cycles;
  cmp.feature_cycle_ratio =
      cmp.feature_cycles_bit_serial == 0
          ? 0.0
          : double(cmp.feature_cycles_sccim) /
                double(cmp.feature_cycles_bit_serial);
  return cmp;
}

// ---- sampling-only run --------------------------------------------------------

SampleRun run_sample(const PointCloud& cloud, const SampleOptions& options) {
  options.energy.validate();
  if (options.samples_per_tile == 0) {
    throw_invalid("run_sample: samples_per_tile must be >= 1");
  }
  PartitionResult partition = msp_partition(cloud, options.capacity);

  SampleRun run;
  run.report.params = options.energy;
  double recall_sum = 0.0;
  uint64_t recall_count = 0;
  double coverage_sum = 0.0;

  for (std::size_t ti = 0; ti < partition.tiles.size(); ++ti) {
    const Tile& tile = partition.tiles[ti];
    AccessCounters counters;
    auto& load = counters.at(Stage::Load);
    load.dram_bits_read += uint64_t(tile.size()) * kPointBits;
    ApdCimArray apd(counters);
    CamArray cam(counters);
    apd.load_tile(tile);
    cam.init(uint32_t(tile.size()));
    cam.set_mode(CamMode::Search);
    load.total_cycles += tile.size();

    AccelFpsResult fps =
        accel_fps(apd, cam, options.samples_per_tile, options.seed_index);

    SampleTileResult tile_result;
    tile_result.tile_id = uint32_t(ti);
    tile_result.size = uint32_t(tile.size());
    for (std::size_t i = 0; i < fps.centroids.size(); ++i) {
      uint32_t c = fps.centroids[i];
      tile_result.centroid_globals.push_back(tile.global_indices[c]);
      std::vector<uint32_t> hood =
          fused_grouping(tile, c, fps.batches[i], options.query);
      std::vector<uint32_t> hood_globals;
      hood_globals.reserve(hood.size());
      for (uint32_t idx : hood) hood_globals.push_back(tile.global_indices[idx]);
      tile_result.neighborhood_globals.push_back(std::move(hood_globals));

      if (options.compare_exact) {
        std::vector<uint32_t> ball = ball_query(
            tile, c, options.query.radius, options.query.max_neighbors);
        std::size_t hits = 0;
        for (uint32_t b : ball) {
          if (std::find(hood.begin(), hood.end(), b) != hood.end()) ++hits;
        }
        recall_sum += double(hits) / double(ball.size());
        ++recall_count;
      }
    }

    if (options.compare_exact) {
      auto coverage = [&](const std::vector<uint32_t>& centroids) {
        double worst = 0.0;
        for (std::size_t i = 0; i < tile.size(); ++i) {
          uint64_t best = UINT64_MAX;
          for (uint32_t c : centroids) {
            best = std::min(best, l2_sq(tile.points[i], tile.points[c]));
          }
          worst = std::max(worst, std::sqrt(double(best)));
        }
        return worst;
      };
      std::vector<uint32_t> exact = exact_fps(tile, options.samples_per_tile,
                                              options.seed_index, Metric::L2);
      double cov_exact = coverage(exact);
      double cov_accel = coverage(fps.centroids);
      coverage_sum += cov_exact > 0.0 ? cov_accel / cov_exact : 1.0;
    }

    run.report.counters += counters;
    run.tiles.push_back(std::move(tile_result));
  }

  if (options.compare_exact) {
    SampleMetrics metrics;
    metrics.lattice_recall =
        recall_count > 0 ? recall_sum / double(recall_count) : 1.0;
    metrics.coverage_ratio = coverage_sum / double(partition.tiles.size());
    run.metrics = metrics;
  }
  return run;
}

}  // namespace pc2im

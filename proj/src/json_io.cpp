#include "pc2im/json_io.hpp"

#include <fstream>

#include "pc2im/errors.hpp"

namespace pc2im {

Json counters_to_json(const StageCounters& c) {
  return Json{{"dram_bits_read", c.dram_bits_read},
              {"dram_bits_written", c.dram_bits_written},
              {"sram_bits_read", c.sram_bits_read},
              {"sram_bits_written", c.sram_bits_written},
              {"cim_distance_results", c.cim_distance_results},
              {"cam_pair_update_cycles", c.cam_pair_update_cycles},
              {"cam_search_cycles", c.cam_search_cycles},
              {"mac_ops_16b", c.mac_ops_16b},
              {"total_cycles", c.total_cycles}};
}

Json energy_to_json(const EnergyBreakdown& e) {
  return Json{{"dram", e.dram_pj}, {"sram", e.sram_pj}, {"cim", e.cim_pj},
              {"cam", e.cam_pj},   {"mac", e.mac_pj},   {"total", e.total_pj()}};
}

Json params_to_json(const EnergyParams& p) {
  return Json{{"sram_pj_per_bit", p.sram_pj_per_bit},
              {"dram_pj_per_bit", p.dram_pj_per_bit},
              {"mac_pj_per_16b_op", p.mac_pj_per_16b_op},
              {"cam_pj_per_pair_cycle", p.cam_pj_per_pair_cycle},
              {"cim_dist_pj_per_result", p.cim_dist_pj_per_result},
              {"clock_hz", p.clock_hz}};
}

Json report_to_json(const Report& report) {
  Json stages = Json::array();
  for (std::size_t i = 0; i < kStageCount; ++i) {
    Stage s = Stage(i);
    stages.push_back(Json{{"stage", stage_name(s)},
                          {"counters", counters_to_json(report.counters.at(s))},
                          {"energy_pj", energy_to_json(report.stage_energy(s))},
                          {"latency_s", report.stage_latency_s(s)}});
  }
  StageCounters total = report.counters.total();
  return Json{{"config", params_to_json(report.params)},
              {"counters", counters_to_json(total)},
              {"energy_pj", energy_to_json(energy(total, report.params))},
              {"latency_s", report.total_latency_s()},
              {"stages", std::move(stages)}};
}

namespace {

Json partition_node_to_json(const PartitionNode& node) {
  Json j;
  if (node.is_leaf()) {
    j["points"] = node.indices.size();
    j["tile_id"] = node.tile_id;
  } else {
    j["axis"] = axis_name(Axis(node.axis));
    j["median"] = node.median_value;
    j["left"] = partition_node_to_json(*node.left);
    j["right"] = partition_node_to_json(*node.right);
  }
  return j;
}

}  // namespace

Json partition_to_json(const PartitionResult& partition) {
  Json tiles = Json::array();
  for (const Tile& tile : partition.tiles) {
    Json t;
    t["size"] = tile.size();
    t["capacity"] = tile.capacity;
    t["origin"] = {tile.quant_origin.x, tile.quant_origin.y, tile.quant_origin.z};
    t["scale"] = {tile.quant_scale[0], tile.quant_scale[1], tile.quant_scale[2]};
    t["global_indices"] = tile.global_indices;
    tiles.push_back(std::move(t));
  }
  return Json{{"tile_count", partition.tiles.size()},
              {"utilization", utilization(partition.tiles,
                                          partition.tiles.empty()
                                              ? 1
                                              : partition.tiles[0].capacity)},
              {"tree", partition_node_to_json(*partition.root)},
              {"tiles", std::move(tiles)}};
}

Json sample_to_json(const SampleRun& run) {
  Json tiles = Json::array();
  for (const SampleTileResult& t : run.tiles) {
    tiles.push_back(Json{{"tile_id", t.tile_id},
                         {"size", t.size},
                         {"centroids", t.centroid_globals},
                         {"neighborhoods", t.neighborhood_globals}});
  }
  Json j{{"tiles", std::move(tiles)}, {"report", report_to_json(run.report)}};
  if (run.metrics) {
    j["metrics"] = Json{{"lattice_recall", run.metrics->lattice_recall},
                        {"coverage_ratio", run.metrics->coverage_ratio}};
  }
  return j;
}

Json sim_result_to_json(const SimResult& result, bool include_features) {
  Json layers = Json::array();
  for (const LayerTrace& trace : result.layers) {
    Json l{{"type", trace.type},
           {"out_dim", trace.out_dim},
           {"points_out", trace.points_out}};
    if (!trace.psa_tiles.empty()) {
      Json tiles = Json::array();
      for (const PsaTileOutput& t : trace.psa_tiles) {
        std::vector<uint32_t> centroid_globals;
        centroid_globals.reserve(t.centroids.size());
        for (uint32_t c : t.centroids) {
          centroid_globals.push_back(t.point_globals[c]);
        }
        tiles.push_back(Json{{"centroids", std::move(centroid_globals)},
                             {"feature_computes", t.feature_computes}});
      }
      l["tiles"] = std::move(tiles);
    }
    layers.push_back(std::move(l));
  }

  Json j{{"tile_count", result.tile_count},
         {"layers", std::move(layers)},
         {"pipeline",
          Json{{"sequential_cycles", result.pipeline.sequential_cycles},
               {"pipelined_cycles", result.pipeline.pipelined_cycles},
               {"pipelined_latency_s",
                latency_s(result.pipeline.pipelined_cycles,
                          result.report.params.clock_hz)}}},
         {"report", report_to_json(result.report)},
         {"final_points", result.final_globals}};
  if (include_features) {
    Json feats = Json::array();
    for (const FeatureTensor& f : result.final_features) {
      feats.push_back(Json{{"dim", f.dim}, {"values", f.values}});
    }
    j["final_features"] = std::move(feats);
  }
  return j;
}

Json comparison_to_json(const BaselineComparison& cmp) {
  return Json{
      {"cloud_points", cmp.cloud_points},
      {"total_samples", cmp.total_samples},
      {"global_baseline",
       Json{{"dram_bits", cmp.global_traffic.dram_bits_baseline},
            {"dram_pj", cmp.global_baseline_preprocess_dram_pj}}},
      {"tiled",
       Json{{"dram_bits", cmp.global_traffic.dram_bits_tiled},
            {"reduction", cmp.global_traffic.reduction}}},
      {"local_baseline",
       Json{{"point_access_bits", cmp.local_point_bits},
            {"td_update_bits", cmp.local_td_bits},
            {"onchip_pj", cmp.local_baseline_preprocess_pj}}},
      {"pc2im_preprocess",
       Json{{"dram_bits_read", cmp.pc2im_preprocess_dram_read_bits},
            {"dram_pj", cmp.pc2im_preprocess_dram_pj},
            {"onchip_pj", cmp.pc2im_preprocess_onchip_pj}}},
      {"dram_reduction_vs_global", cmp.dram_reduction_vs_global},
      {"onchip_energy_ratio_vs_local", cmp.onchip_energy_ratio_vs_local},
      {"feature_cycles",
       Json{{"sccim", cmp.feature_cycles_sccim},
            {"bit_serial", cmp.feature_cycles_bit_serial},
            {"ratio", cmp.feature_cycle_ratio}}}};
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw_parse(path + ": " + e.what());
  }
}

namespace {

double require_positive(const Json& v, const char* key) {
  if (!v.is_number()) throw_config(std::string(key) + " must be a number");
  double d = v.get<double>();
  if (!(d > 0.0)) throw_config(std::string(key) + " must be positive");
  return d;
}

}  // namespace

void apply_energy_overrides(const Json& node, EnergyParams& params) {
  if (!node.is_object()) throw_config("energy: expected an object");
  for (const auto& [key, value] : node.items()) {
    if (key == "sram_pj_per_bit") {
      params.sram_pj_per_bit = require_positive(value, key.c_str());
    } else if (key == "dram_pj_per_bit") {
      params.dram_pj_per_bit = require_positive(value, key.c_str());
    } else if (key == "mac_pj_per_16b_op") {
      params.mac_pj_per_16b_op = require_positive(value, key.c_str());
    } else if (key == "cam_pj_per_pair_cycle") {
      params.cam_pj_per_pair_cycle = require_positive(value, key.c_str());
    } else if (key == "cim_dist_pj_per_result") {
      params.cim_dist_pj_per_result = require_positive(value, key.c_str());
    } else if (key == "clock_hz") {
      params.clock_hz = require_positive(value, key.c_str());
    } else {
      throw_config("energy: unknown key \"" + key + "\"");
    }
  }
}

namespace {

template <typename T>
T get_or(const Json& node, const char* key, T fallback) {
  auto it = node.find(key);
  if (it == node.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw_config(std::string("layer field \"") + key + "\" has the wrong type");
  }
}

}  // namespace

NetworkConfig network_from_json(const Json& node, EnergyParams* params) {
  if (!node.is_object()) throw_config("network config: expected an object");
  auto layers_it = node.find("layers");
  if (layers_it == node.end() || !layers_it->is_array()) {
    throw_config("network config: missing \"layers\" array");
  }
  NetworkConfig config;
  for (const Json& lj : *layers_it) {
    if (!lj.is_object()) throw_config("network config: layer must be an object");
    std::string type = get_or<std::string>(lj, "type", "");
    LayerConfig layer;
    if (type == "psa") {
      layer.type = LayerConfig::Type::Psa;
      PsaLayerConfig& p = layer.psa;
      p.samples_per_tile = get_or<uint32_t>(lj, "samples_per_tile", 0);
      p.radius = get_or<uint32_t>(lj, "radius", 0);
      p.scale_factor = get_or<double>(lj, "scale_factor", p.scale_factor);
      p.max_neighbors = get_or<uint32_t>(lj, "max_neighbors", p.max_neighbors);
      p.mlp_dims = get_or<std::vector<uint32_t>>(lj, "mlp_dims", {});
      p.weight_seed = get_or<uint64_t>(lj, "weight_seed", p.weight_seed);
    } else if (type == "pfp") {
      layer.type = LayerConfig::Type::Pfp;
      PfpLayerConfig& p = layer.pfp;
      p.k = get_or<uint32_t>(lj, "k", p.k);
      p.mlp_dims = get_or<std::vector<uint32_t>>(lj, "mlp_dims", {});
      p.weight_seed = get_or<uint64_t>(lj, "weight_seed", p.weight_seed);
    } else {
      throw_config("network config: layer type must be \"psa\" or \"pfp\"");
    }
    config.layers.push_back(std::move(layer));
  }
  if (params) {
    auto energy_it = node.find("energy");
    if (energy_it != node.end()) apply_energy_overrides(*energy_it, *params);
  }
  return config;
}

RunOptions run_options_from_json(const Json& node) {
  if (!node.is_object()) throw_config("run options: expected an object");
  RunOptions options;
  options.capacity = get_or<uint32_t>(node, "capacity", options.capacity);
  options.threads = get_or<uint32_t>(node, "threads", options.threads);
  options.fps_seed_index =
      get_or<uint32_t>(node, "fps_seed_index", options.fps_seed_index);
  options.bit_serial_features =
      get_or<bool>(node, "bit_serial_features", options.bit_serial_features);
  options.collect_features =
      get_or<bool>(node, "collect_features", options.collect_features);
  auto energy_it = node.find("energy");
  if (energy_it != node.end()) apply_energy_overrides(*energy_it, options.energy);
  return options;
}

SampleOptions sample_options_from_json(const Json& node) {
  if (!node.is_object()) throw_config("sample options: expected an object");
  SampleOptions options;
  options.capacity = get_or<uint32_t>(node, "capacity", options.capacity);
  options.samples_per_tile =
      get_or<uint32_t>(node, "samples_per_tile", options.samples_per_tile);
  options.query.radius = get_or<uint32_t>(node, "radius", options.query.radius);
  options.query.scale_factor =
      get_or<double>(node, "scale_factor", options.query.scale_factor);
  options.query.max_neighbors =
      get_or<uint32_t>(node, "max_neighbors", options.query.max_neighbors);
  options.seed_index = get_or<uint32_t>(node, "seed_index", options.seed_index);
  options.compare_exact =
      get_or<bool>(node, "compare_exact", options.compare_exact);
  auto energy_it = node.find("energy");
  if (energy_it != node.end()) apply_energy_overrides(*energy_it, options.energy);
  return options;
}

}  // namespace pc2im

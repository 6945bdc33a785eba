#pragma once

#include <string>

#include <json.hpp>

#include "pc2im/costmodel.hpp"
#include "pc2im/partition.hpp"
#include "pc2im/pipeline.hpp"

namespace pc2im {

using Json = nlohmann::ordered_json;

// ---- serialization ------------------------------------------------------------

Json counters_to_json(const StageCounters& c);
Json energy_to_json(const EnergyBreakdown& e);
Json params_to_json(const EnergyParams& p);

// Full report layout: {"config", "counters", "energy_pj", "latency_s",
// "stages"}. counters/energy_pj/latency_s are run totals; stages break the
// same figures down per pipeline stage.
Json report_to_json(const Report& report);

Json partition_to_json(const PartitionResult& partition);
Json sample_to_json(const SampleRun& run);
Json sim_result_to_json(const SimResult& result, bool include_features);
Json comparison_to_json(const BaselineComparison& cmp);

// ---- parsing -------------------------------------------------------------------

// Reads and parses a JSON file; IO failures throw SimError(Io), malformed
// JSON throws SimError(Parse) with the parser's position message.
Json load_json_file(const std::string& path);

// Applies any of the energy/clock keys present under `node` onto `params`,
// leaving absent keys untouched. Unknown keys throw SimError(Config).
void apply_energy_overrides(const Json& node, EnergyParams& params);

// Parses {"layers": [...], "energy": {...}?}. Layer objects carry "type"
// ("psa" | "pfp") plus the per-type fields; missing optional fields keep
// their defaults. Validation happens later against the tile capacity.
NetworkConfig network_from_json(const Json& node, EnergyParams* params = nullptr);

// Optional run fields {"capacity", "threads", "fps_seed_index",
// "bit_serial_features", "collect_features", "energy"} over the defaults.
RunOptions run_options_from_json(const Json& node);

// Optional sampling fields {"capacity", "samples_per_tile", "radius",
// "scale_factor", "max_neighbors", "seed_index", "compare_exact", "energy"}.
SampleOptions sample_options_from_json(const Json& node);

}  // namespace pc2im

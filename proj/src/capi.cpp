#include "pc2im.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "pc2im/errors.hpp"
#include "pc2im/json_io.hpp"
#include "pc2im/pipeline.hpp"
#include "pc2im/verify.hpp"

struct pc2im_cloud {
  pc2im::PointCloud cloud;
};

namespace {

thread_local std::string g_last_error;

pc2im_status status_of(const pc2im::SimError& e) {
  using Kind = pc2im::SimError::Kind;
  switch (e.kind()) {
    case Kind::InvalidArgument: return PC2IM_ERR_INVALID_ARGUMENT;
    case Kind::Parse: return PC2IM_ERR_PARSE;
    case Kind::Io: return PC2IM_ERR_IO;
    case Kind::Capacity: return PC2IM_ERR_CAPACITY;
    case Kind::Config: return PC2IM_ERR_CONFIG;
    case Kind::Verification: return PC2IM_ERR_VERIFY;
  }
  return PC2IM_ERR_INTERNAL;
}

template <typename Fn>
pc2im_status guarded(Fn&& fn) {
  try {
    pc2im_status status = fn();
    if (status == PC2IM_OK) g_last_error.clear();
    return status;
  } catch (const pc2im::SimError& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PC2IM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return PC2IM_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

pc2im_status emit_json(const pc2im::Json& j, char** out_json) {
  *out_json = dup_string(j.dump(2) + "\n");
  if (!*out_json) {
    g_last_error = "out of memory";
    return PC2IM_ERR_INTERNAL;
  }
  return PC2IM_OK;
}

void require(bool ok, const char* what) {
  if (!ok) pc2im::throw_invalid(what);
}

struct SimulateInputs {
  pc2im::NetworkConfig config;
  pc2im::RunOptions options;
};

SimulateInputs parse_simulate_config(const char* config_json) {
  SimulateInputs in;
  if (!config_json) {
    in.config = pc2im::NetworkConfig::default_config();
    return in;
  }
  pc2im::Json node;
  try {
    node = pc2im::Json::parse(config_json);
  } catch (const nlohmann::json::parse_error& e) {
    pc2im::throw_parse(std::string("network config: ") + e.what());
  }
  in.options = pc2im::run_options_from_json(node);
  if (node.contains("layers")) {
    in.config = pc2im::network_from_json(node);
  } else {
    in.config = pc2im::NetworkConfig::default_config();
  }
  return in;
}

}  // namespace

extern "C" {

const char* pc2im_version(void) { return "1.0.0"; }

const char* pc2im_last_error(void) { return g_last_error.c_str(); }

void pc2im_string_free(char* s) { std::free(s); }

pc2im_status pc2im_cloud_load(const char* path, const char* format,
                              pc2im_cloud** out) {
  return guarded([&] {
    require(path && format && out, "null argument");
    auto cloud = std::make_unique<pc2im_cloud>();
    cloud->cloud =
        pc2im::load_cloud(path, pc2im::cloud_format_from_string(format));
    *out = cloud.release();
    return PC2IM_OK;
  });
}

pc2im_status pc2im_cloud_generate(const char* kind, uint64_t n, uint64_t seed,
                                  pc2im_cloud** out) {
  return guarded([&] {
    require(kind && out, "null argument");
    auto cloud = std::make_unique<pc2im_cloud>();
    cloud->cloud =
        pc2im::generate_cloud(pc2im::cloud_kind_from_string(kind), n, seed);
    *out = cloud.release();
    return PC2IM_OK;
  });
}

pc2im_status pc2im_cloud_save(const pc2im_cloud* cloud, const char* path,
                              const char* format) {
  return guarded([&] {
    require(cloud && path && format, "null argument");
    pc2im::save_cloud(cloud->cloud, path,
                      pc2im::cloud_format_from_string(format));
    return PC2IM_OK;
  });
}

size_t pc2im_cloud_size(const pc2im_cloud* cloud) {
  return cloud ? cloud->cloud.size() : 0;
}

void pc2im_cloud_free(pc2im_cloud* cloud) { delete cloud; }

pc2im_status pc2im_partition_json(const pc2im_cloud* cloud, uint32_t capacity,
                                  char** out_json) {
  return guarded([&] {
    require(cloud && out_json, "null argument");
    pc2im::PartitionResult partition =
        pc2im::msp_partition(cloud->cloud, capacity);
    return emit_json(pc2im::partition_to_json(partition), out_json);
  });
}

pc2im_status pc2im_sample_json(const pc2im_cloud* cloud,
                               const char* options_json, char** out_json) {
  return guarded([&] {
    require(cloud && options_json && out_json, "null argument");
    pc2im::Json node;
    try {
      node = pc2im::Json::parse(options_json);
    } catch (const nlohmann::json::parse_error& e) {
      pc2im::throw_parse(std::string("sample options: ") + e.what());
    }
    pc2im::SampleRun run =
        pc2im::run_sample(cloud->cloud, pc2im::sample_options_from_json(node));
    return emit_json(pc2im::sample_to_json(run), out_json);
  });
}

pc2im_status pc2im_simulate_json(const pc2im_cloud* cloud,
                                 const char* config_json, char** out_json) {
  return guarded([&] {
    require(cloud && out_json, "null argument");
    SimulateInputs in = parse_simulate_config(config_json);
    pc2im::SimResult result =
        pc2im::run_network(cloud->cloud, in.config, in.options);
    return emit_json(
        pc2im::sim_result_to_json(result, in.options.collect_features),
        out_json);
  });
}

pc2im_status pc2im_compare_json(const pc2im_cloud* cloud,
                                const char* config_json, char** out_json) {
  return guarded([&] {
    require(cloud && out_json, "null argument");
    SimulateInputs in = parse_simulate_config(config_json);
    pc2im::BaselineComparison cmp =
        pc2im::compare_baselines(cloud->cloud, in.config, in.options);
    return emit_json(pc2im::comparison_to_json(cmp), out_json);
  });
}

pc2im_status pc2im_verify_mac(uint64_t seed, uint32_t random_macs,
                              int inject_fault, char** out_json) {
  return guarded([&] {
    pc2im::VerifyOptions options;
    options.seed = seed;
    options.random_macs = random_macs;
    options.inject_fault = inject_fault != 0;
    pc2im::VerifyReport report = pc2im::verify_mac(options);

    // Under fault injection success means the checker caught the corruption.
    bool ok = options.inject_fault ? !report.ok() : report.ok();
    if (out_json) {
      pc2im::Json j{{"fused_add_checks", report.fused_add_checks},
                    {"split_roundtrips", report.split_roundtrips},
                    {"mac_checks", report.mac_checks},
                    {"mismatches", report.mismatches},
                    {"first_mismatch", report.first_mismatch},
                    {"fault_injected", options.inject_fault},
                    {"ok", ok}};
      pc2im_status status = emit_json(j, out_json);
      if (status != PC2IM_OK) return status;
    }
    if (!ok) {
      g_last_error = options.inject_fault
                         ? "fault injection went undetected"
                         : "MAC datapath mismatch: " + report.first_mismatch;
      return PC2IM_ERR_VERIFY;
    }
    return PC2IM_OK;
  });
}

pc2im_status pc2im_report_summary(const char* json_text, char** out_text) {
  return guarded([&] {
    require(json_text && out_text, "null argument");
    pc2im::Json doc;
    try {
      doc = pc2im::Json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      pc2im::throw_parse(std::string("report: ") + e.what());
    }
    const pc2im::Json* report = nullptr;
    if (doc.contains("stages") && doc.contains("counters")) {
      report = &doc;
    } else if (doc.contains("report")) {
      report = &doc.at("report");
    }
    if (!report || !report->contains("stages")) {
      pc2im::throw_parse("report: no report object found");
    }

    std::string text;
    char line[160];
    std::snprintf(line, sizeof line, "%-12s %14s %14s %16s\n", "stage",
                  "cycles", "latency_s", "energy_pj");
    text += line;
    for (const pc2im::Json& stage : report->at("stages")) {
      std::snprintf(line, sizeof line, "%-12s %14llu %14.6g %16.6g\n",
                    stage.at("stage").get<std::string>().c_str(),
                    static_cast<unsigned long long>(
                        stage.at("counters").at("total_cycles").get<uint64_t>()),
                    stage.at("latency_s").get<double>(),
                    stage.at("energy_pj").at("total").get<double>());
      text += line;
    }
    std::snprintf(line, sizeof line, "%-12s %14llu %14.6g %16.6g\n", "total",
                  static_cast<unsigned long long>(
                      report->at("counters").at("total_cycles").get<uint64_t>()),
                  report->at("latency_s").get<double>(),
                  report->at("energy_pj").at("total").get<double>());
    text += line;
    if (doc.contains("pipeline")) {
      const pc2im::Json& p = doc.at("pipeline");
      std::snprintf(line, sizeof line, "%-12s %14llu %14.6g\n", "pipelined",
                    static_cast<unsigned long long>(
                        p.at("pipelined_cycles").get<uint64_t>()),
                    p.at("pipelined_latency_s").get<double>());
      text += line;
    }
    *out_text = dup_string(text);
    if (!*out_text) {
      g_last_error = "out of memory";
      return PC2IM_ERR_INTERNAL;
    }
    return PC2IM_OK;
  });
}

}  // extern "C"

// Command-line front end. Talks to the simulator exclusively through the
// C API; JSON assembly and flag parsing happen here.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pc2im.h"

using Json = nlohmann::ordered_json;

namespace {

int exit_code(pc2im_status status) {
  switch (status) {
    case PC2IM_OK:
      return 0;
    case PC2IM_ERR_PARSE:
    case PC2IM_ERR_IO:
      return 2;
    case PC2IM_ERR_VERIFY:
      return 3;
    default:
      return 1;
  }
}

int fail(pc2im_status status) {
  std::cerr << "pc2im: " << pc2im_last_error() << "\n";
  return exit_code(status);
}

int fail_io(const std::string& message) {
  std::cerr << "pc2im: " << message << "\n";
  return 2;
}

// "-" means stdout.
int write_text(const std::string& path, const char* text) {
  if (path == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) return fail_io("cannot open " + path + " for writing");
  out << text;
  out.close();
  if (!out) return fail_io("write to " + path + " failed");
  return 0;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  return bool(in);
}

struct CloudHandle {
  pc2im_cloud* cloud = nullptr;
  ~CloudHandle() { pc2im_cloud_free(cloud); }
};

struct StringHandle {
  char* text = nullptr;
  ~StringHandle() { pc2im_string_free(text); }
};

// Loads a config file into `doc` (kept as an object when absent). Returns 0
// or the exit code of a failure.
int load_config_object(const std::string& path, Json& doc) {
  doc = Json::object();
  if (path.empty()) return 0;
  std::string text;
  if (!read_file(path, text)) return fail_io("cannot open " + path);
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    return fail_io(path + ": " + e.what());
  }
  if (!doc.is_object()) return fail_io(path + ": expected a JSON object");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"point-cloud accelerator simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pc2im_version()));

  // gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a synthetic cloud");
  std::string gen_kind = "uniform";
  uint64_t gen_n = 2048;
  uint64_t gen_seed = 1;
  std::string gen_out;
  std::string gen_format = "xyz_ascii";
  gen->add_option("--kind", gen_kind, "uniform | gaussian | clustered");
  gen->add_option("--n", gen_n, "number of points")->required();
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output path")->required();
  gen->add_option("--format", gen_format, "xyz_ascii | f32le_binary");

  // shared input options -------------------------------------------------
  std::string in_path;
  std::string in_format = "xyz_ascii";
  std::string out_path = "-";
  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("--in", in_path, "input cloud path")->required();
    cmd->add_option("--format", in_format, "xyz_ascii | f32le_binary");
    cmd->add_option("--out", out_path, "output path, - for stdout");
  };

  // partition ------------------------------------------------------------
  auto* partition = app.add_subcommand("partition", "median-split a cloud into tiles");
  uint32_t capacity = 2048;
  add_input(partition);
  partition->add_option("--capacity", capacity, "max points per tile");

  // sample ----------------------------------------------------------------
  auto* sample = app.add_subcommand("sample", "farthest point sampling + grouping");
  add_input(sample);
  std::string config_path;
  uint32_t samples = 0;
  uint32_t radius = 0;
  double scale_factor = 0.0;
  uint32_t max_neighbors = 0;
  uint32_t seed_index = 0;
  bool compare_exact = false;
  sample->add_option("--config", config_path, "JSON options file");
  auto* samples_opt = sample->add_option("--samples", samples, "centroids per tile");
  auto* capacity_opt = sample->add_option("--capacity", capacity, "max points per tile");
  auto* radius_opt = sample->add_option("--radius", radius, "ball radius, quantized units");
  auto* scale_opt = sample->add_option("--scale", scale_factor, "lattice scale factor");
  auto* neighbors_opt = sample->add_option("--neighbors", max_neighbors, "neighbors per centroid");
  auto* seed_idx_opt = sample->add_option("--seed-index", seed_index, "first centroid index");
  sample->add_flag("--compare-exact", compare_exact,
                   "also run the exact references and report metrics");

  // simulate ----------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "run a network on the accelerator model");
  add_input(simulate);
  uint32_t threads = 0;
  bool bit_serial = false;
  bool collect_features = false;
  bool compare = false;
  simulate->add_option("--config", config_path, "network JSON (defaults built in)");
  auto* sim_capacity_opt = simulate->add_option("--capacity", capacity, "max points per tile");
  auto* threads_opt = simulate->add_option("--threads", threads, "tile worker threads");
  auto* sim_seed_opt = simulate->add_option("--seed-index", seed_index, "first centroid index");
  simulate->add_flag("--bit-serial", bit_serial, "time MACs on the bit-serial path");
  simulate->add_flag("--collect-features", collect_features, "include final features");
  simulate->add_flag("--compare", compare, "report baseline comparison instead");

  // verify-mac ------------------------------------------------------------
  auto* verify = app.add_subcommand("verify-mac", "check the MAC datapath identities");
  uint64_t verify_seed = 1;
  uint32_t verify_macs = 256;
  bool inject_fault = false;
  verify->add_option("--seed", verify_seed, "random vector seed");
  verify->add_option("--macs", verify_macs, "random MAC vectors per datapath");
  verify->add_option("--out", out_path, "output path, - for stdout");
#ifdef PC2IM_ENABLE_FAULT_INJECTION
  verify->add_flag("--inject-fault", inject_fault,
                   "negative control: corrupt one product on purpose");
#endif

  // report -------------------------------------------------------------------
  auto* report = app.add_subcommand("report", "summarize a result JSON");
  std::string report_in;
  report->add_option("--in", report_in, "JSON produced by sample/simulate")->required();
  report->add_option("--out", out_path, "output path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (gen->parsed()) {
    CloudHandle cloud;
    pc2im_status status =
        pc2im_cloud_generate(gen_kind.c_str(), gen_n, gen_seed, &cloud.cloud);
    if (status != PC2IM_OK) return fail(status);
    status = pc2im_cloud_save(cloud.cloud, gen_out.c_str(), gen_format.c_str());
    if (status != PC2IM_OK) return fail(status);
    std::cout << gen_out << ": " << pc2im_cloud_size(cloud.cloud)
              << " points\n";
    return 0;
  }

  CloudHandle cloud;
  if (partition->parsed() || sample->parsed() || simulate->parsed()) {
    pc2im_status status =
        pc2im_cloud_load(in_path.c_str(), in_format.c_str(), &cloud.cloud);
    if (status != PC2IM_OK) return fail(status);
  }

  if (partition->parsed()) {
    StringHandle json;
    pc2im_status status =
        pc2im_partition_json(cloud.cloud, capacity, &json.text);
    if (status != PC2IM_OK) return fail(status);
    return write_text(out_path, json.text);
  }

  if (sample->parsed()) {
    Json options;
    if (int code = load_config_object(config_path, options)) return code;
    if (*samples_opt) options["samples_per_tile"] = samples;
    if (*capacity_opt) options["capacity"] = capacity;
    if (*radius_opt) options["radius"] = radius;
    if (*scale_opt) options["scale_factor"] = scale_factor;
    if (*neighbors_opt) options["max_neighbors"] = max_neighbors;
    if (*seed_idx_opt) options["seed_index"] = seed_index;
    if (compare_exact) options["compare_exact"] = true;
    StringHandle json;
    pc2im_status status =
        pc2im_sample_json(cloud.cloud, options.dump().c_str(), &json.text);
    if (status != PC2IM_OK) return fail(status);
    return write_text(out_path, json.text);
  }

  if (simulate->parsed()) {
    Json config;
    if (int code = load_config_object(config_path, config)) return code;
    if (*sim_capacity_opt) config["capacity"] = capacity;
    if (*threads_opt) config["threads"] = threads;
    if (*sim_seed_opt) config["fps_seed_index"] = seed_index;
    if (bit_serial) config["bit_serial_features"] = true;
    if (collect_features) config["collect_features"] = true;
    StringHandle json;
    std::string config_text = config.dump();
    pc2im_status status =
        compare ? pc2im_compare_json(cloud.cloud, config_text.c_str(), &json.text)
                : pc2im_simulate_json(cloud.cloud, config_text.c_str(), &json.text);
    if (status != PC2IM_OK) return fail(status);
    return write_text(out_path, json.text);
  }

  if (verify->parsed()) {
    StringHandle json;
    pc2im_status status = pc2im_verify_mac(verify_seed, verify_macs,
                                           inject_fault ? 1 : 0, &json.text);
    if (json.text) {
      if (int code = write_text(out_path, json.text)) return code;
    }
    if (status != PC2IM_OK) {
      std::cerr << "pc2im: " << pc2im_last_error() << "\n";
      return exit_code(status);
    }
    return 0;
  }

  if (report->parsed()) {
    std::string text;
    if (!read_file(report_in, text)) return fail_io("cannot open " + report_in);
    StringHandle summary;
    pc2im_status status = pc2im_report_summary(text.c_str(), &summary.text);
    if (status != PC2IM_OK) return fail(status);
    return write_text(out_path, summary.text);
  }

  return 0;
}

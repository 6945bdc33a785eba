#include "pc2im/pointcloud.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "pc2im/errors.hpp"

namespace pc2im {

namespace {

bool all_finite(const RawPoint& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

float read_f32le(const unsigned char* p) {
  uint32_t u = uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
               uint32_t(p[3]) << 24;
  return std::bit_cast<float>(u);
}

void write_f32le(float v, unsigned char* p) {
  uint32_t u = std::bit_cast<uint32_t>(v);
  p[0] = u & 0xff;
  p[1] = (u >> 8) & 0xff;
  p[2] = (u >> 16) & 0xff;
  p[3] = (u >> 24) & 0xff;
}

PointCloud parse_xyz_ascii(const std::string& text, const std::string& path) {
  PointCloud cloud;
  cloud.source = "file:" + path;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;  // blank line
    if (line[first] == '#') continue;          // comment line
    std::istringstream fields(line);
    RawPoint p;
    std::string extra;
    if (!(fields >> p.x >> p.y >> p.z)) {
      throw_parse(path + ":" + std::to_string(line_no) +
                  ": expected three reals");
    }
    if (fields >> extra) {
      throw_parse(path + ":" + std::to_string(line_no) +
                  ": trailing data after three reals");
    }
    if (!all_finite(p)) {
      throw_parse(path + ":" + std::to_string(line_no) +
                  ": non-finite coordinate");
    }
    cloud.points.push_back(p);
  }
  if (cloud.points.empty()) {
    throw_parse(path + ": no points (empty cloud)");
  }
  return cloud;
}

PointCloud parse_f32le(const std::string& bytes, const std::string& path) {
  constexpr std::size_t kRecord = 12;  // 3 x f32
  if (bytes.empty()) throw_parse(path + ": no points (empty cloud)");
  if (bytes.size() % kRecord != 0) {
    throw_parse(path + ": truncated record at byte offset " +
                std::to_string((bytes.size() / kRecord) * kRecord));
  }
  PointCloud cloud;
  cloud.source = "file:" + path;
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t off = 0; off < bytes.size(); off += kRecord) {
    RawPoint p;
    p.x = read_f32le(data + off);
    p.y = read_f32le(data + off + 4);
    p.z = read_f32le(data + off + 8);
    if (!all_finite(p)) {
      throw_parse(path + ": non-finite coordinate at byte offset " +
                  std::to_string(off));
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

double uniform01(std::mt19937_64& rng) {
  // 53 mantissa bits; [0, 1). Hand-rolled so results do not depend on the
  // standard library's distribution implementation.
  return double(rng() >> 11) * 0x1.0p-53;
}

double normal01(std::mt19937_64& rng) {
  // Box-Muller, cosine branch only. u1 in (0, 1] keeps the log finite.
  double u1 = (double(rng() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

CloudFormat cloud_format_from_string(const std::string& name) {
  if (name == "xyz_ascii" || name == "xyz") return CloudFormat::XyzAscii;
  if (name == "f32le_binary" || name == "f32") return CloudFormat::F32leBinary;
  throw_invalid("unknown cloud format: " + name);
}

CloudKind cloud_kind_from_string(const std::string& name) {
  if (name == "uniform") return CloudKind::Uniform;
  if (name == "gaussian") return CloudKind::Gaussian;
  if (name == "clustered") return CloudKind::Clustered;
  throw_invalid("unknown cloud kind: " + name);
}

PointCloud load_cloud(const std::string& path, CloudFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw_io("read failure on " + path);
  switch (format) {
    case CloudFormat::XyzAscii:
      return parse_xyz_ascii(buf.str(), path);
    case CloudFormat::F32leBinary:
      return parse_f32le(buf.str(), path);
  }
  throw_invalid("bad cloud format");
}

void save_cloud(const PointCloud& cloud, const std::string& path,
                CloudFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open " + path + " for writing");
  if (format == CloudFormat::XyzAscii) {
    char line[128];
    for (const auto& p : cloud.points) {
      std::snprintf(line, sizeof line, "%.17g %.17g %.17g\n", p.x, p.y, p.z);
      out << line;
    }
  } else {
    unsigned char rec[12];
    for (const auto& p : cloud.points) {
      write_f32le(float(p.x), rec);
      write_f32le(float(p.y), rec + 4);
      write_f32le(float(p.z), rec + 8);
      out.write(reinterpret_cast<const char*>(rec), sizeof rec);
    }
  }
  out.flush();
  if (!out) throw_io("write failure on " + path);
}

PointCloud generate_cloud(CloudKind kind, std::size_t n, uint64_t seed) {
  if (n == 0) throw_invalid("generate_cloud: n must be positive");
  PointCloud cloud;
  cloud.points.reserve(n);
  std::mt19937_64 rng(seed);
  switch (kind) {
    case CloudKind::Uniform: {
      cloud.source = "generated:uniform";
      for (std::size_t i = 0; i < n; ++i) {
        cloud.points.push_back(
            {uniform01(rng), uniform01(rng), uniform01(rng)});
      }
      break;
    }
    case CloudKind::Gaussian: {
      cloud.source = "generated:gaussian";
      constexpr double kSigma = 0.2;
      for (std::size_t i = 0; i < n; ++i) {
        cloud.points.push_back({0.5 + kSigma * normal01(rng),
                                0.5 + kSigma * normal01(rng),
                                0.5 + kSigma * normal01(rng)});
      }
      break;
    }
    case CloudKind::Clustered: {
      cloud.source = "generated:clustered";
      constexpr std::size_t kBlobs = 8;
      constexpr double kBlobSigma = 0.05;
      std::array<RawPoint, kBlobs> centers;
      for (auto& c : centers) {
        c = {uniform01(rng), uniform01(rng), uniform01(rng)};
      }
      for (std::size_t i = 0; i < n; ++i) {
        const RawPoint& c = centers[rng() % kBlobs];
        cloud.points.push_back({c.x + kBlobSigma * normal01(rng),
                                c.y + kBlobSigma * normal01(rng),
                                c.z + kBlobSigma * normal01(rng)});
      }
      break;
    }
  }
  cloud.source += ":n=" + std::to_string(n) + ":seed=" + std::to_string(seed);
  return cloud;
}

Tile quantize_tile(std::span<const RawPoint> points,
                   std::span<const uint32_t> global_indices,
                   uint32_t capacity) {
  if (points.size() != global_indices.size()) {
    throw_invalid("quantize_tile: points/global_indices size mismatch");
  }
  if (points.empty()) throw_invalid("quantize_tile: empty tile");
  if (points.size() > capacity) {
    throw_capacity("quantize_tile: " + std::to_string(points.size()) +
                   " points exceed capacity " + std::to_string(capacity));
  }
  for (const auto& p : points) {
    if (!all_finite(p)) throw_invalid("quantize_tile: non-finite coordinate");
  }

  RawPoint lo = points[0];
  RawPoint hi = points[0];
  for (const auto& p : points) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    hi.z = std::max(hi.z, p.z);
  }

  Tile tile;
  tile.capacity = capacity;
  tile.quant_origin = lo;
  std::array<double, 3> extent = {hi.x - lo.x, hi.y - lo.y, hi.z - lo.z};
  for (int a = 0; a < 3; ++a) {
    tile.quant_scale[a] = extent[a] > 0.0 ? extent[a] / double(kQuantMax) : 0.0;
  }

  auto quant_axis = [&](double v, int a) -> uint16_t {
    if (extent[a] <= 0.0) return 0;  // degenerate axis
    double t = (v - lo.coord(a)) / extent[a] * double(kQuantMax);
    int64_t q = round_half_up(t);
    q = std::clamp<int64_t>(q, 0, kQuantMax);
    return uint16_t(q);
  };

  tile.points.reserve(points.size());
  for (const auto& p : points) {
    tile.points.push_back(
        {quant_axis(p.x, 0), quant_axis(p.y, 1), quant_axis(p.z, 2)});
  }
  tile.global_indices.assign(global_indices.begin(), global_indices.end());
  return tile;
}

RawPoint dequantize(const Tile& tile, QuantPoint p) {
  return {tile.quant_origin.x + double(p.qx) * tile.quant_scale[0],
          tile.quant_origin.y + double(p.qy) * tile.quant_scale[1],
          tile.quant_origin.z + double(p.qz) * tile.quant_scale[2]};
}

}  // namespace pc2im

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <zlib.h>

#include <json.hpp>

#include "forgescope/benchmark/benchmark.hpp"
#include "forgescope/core/error.hpp"

// .phz container: "PHZ1" magic, u64 LE uncompressed size, then one zlib
// stream of [u32 LE manifest length | manifest JSON | array payloads].
// Arrays are row-major little-endian; the manifest records name, dtype
// (f32/u8), shape and byte offset into the payload region.

namespace forgescope::benchmark {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'P', 'H', 'Z', '1'};

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

struct NamedArray {
  std::string name;
  std::string dtype;  // "f32" | "u8"
  int rows = 0;
  int cols = 0;
  std::vector<uint8_t> bytes;
};

NamedArray pack_f32(const std::string& name, const Plane<float>& p) {
  NamedArray a{name, "f32", p.rows(), p.cols(), {}};
  a.bytes.resize(p.size() * 4);
  for (size_t i = 0; i < p.size(); ++i) {
    uint32_t bits;
    std::memcpy(&bits, &p.raw()[i], 4);
    for (int b = 0; b < 4; ++b) a.bytes[4 * i + b] = uint8_t(bits >> (8 * b));
  }
  return a;
}

NamedArray pack_u8(const std::string& name, const Plane<uint8_t>& p) {
  NamedArray a{name, "u8", p.rows(), p.cols(), {}};
  a.bytes = p.raw();
  return a;
}

void write_phz(const fs::path& path, const std::vector<NamedArray>& arrays,
               const std::optional<double>& detection) {
  nlohmann::json manifest;
  manifest["arrays"] = nlohmann::json::array();
  size_t offset = 0;
  for (const auto& a : arrays) {
    manifest["arrays"].push_back({{"name", a.name},
                                  {"dtype", a.dtype},
                                  {"shape", {a.rows, a.cols}},
                                  {"byte_offset", offset}});
    offset += a.bytes.size();
  }
  if (detection) manifest["detection"] = *detection;
  const std::string mtext = manifest.dump();

  std::vector<uint8_t> raw;
  raw.reserve(4 + mtext.size() + offset);
  put_u32(raw, uint32_t(mtext.size()));
  raw.insert(raw.end(), mtext.begin(), mtext.end());
  for (const auto& a : arrays) raw.insert(raw.end(), a.bytes.begin(), a.bytes.end());

  uLongf comp_cap = compressBound(uLong(raw.size()));
  std::vector<uint8_t> comp(comp_cap);
  if (compress2(comp.data(), &comp_cap, raw.data(), uLong(raw.size()),
                Z_DEFAULT_COMPRESSION) != Z_OK)
    raise(ErrorCode::IoError, "deflate failed for " + path.string());
  comp.resize(comp_cap);

  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(kMagic, 4);
    uint8_t size8[8];
    for (int i = 0; i < 8; ++i) size8[i] = uint8_t(uint64_t(raw.size()) >> (8 * i));
    out.write(reinterpret_cast<const char*>(size8), 8);
    out.write(reinterpret_cast<const char*>(comp.data()), std::streamsize(comp.size()));
    if (!out) raise(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) raise(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace

std::filesystem::path save_output(const std::filesystem::path& folder,
                                  const std::string& image_name,
                                  const methods::MethodOutput& output) {
  std::vector<NamedArray> arrays;
  if (output.heatmap) arrays.push_back(pack_f32("heatmap", *output.heatmap));
  if (output.mask) arrays.push_back(pack_u8("mask", *output.mask));
  const fs::path path = folder / (image_name + ".phz");
  write_phz(path, arrays, output.detection);
  return path;
}

std::filesystem::path save_extras(const std::filesystem::path& folder,
                                  const std::string& image_name,
                                  const std::map<std::string, Plane<float>>& extras) {
  std::vector<NamedArray> arrays;
  for (const auto& [name, plane] : extras) arrays.push_back(pack_f32(name, plane));
  const fs::path path = folder / (image_name + "_extra.phz");
  write_phz(path, arrays, std::nullopt);
  return path;
}

methods::MethodOutput load_output(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::FileNotFound, "cannot open " + path.string());
  std::vector<uint8_t> file((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
  if (file.size() < 12 || std::memcmp(file.data(), kMagic, 4) != 0)
    raise(ErrorCode::CorruptOutput, path.string() + ": not a phz file");
  uint64_t raw_size = 0;
  for (int i = 0; i < 8; ++i) raw_size |= uint64_t(file[4 + i]) << (8 * i);
  if (raw_size < 4 || raw_size > (uint64_t(1) << 33))
    raise(ErrorCode::CorruptOutput, path.string() + ": implausible payload size");

  std::vector<uint8_t> raw(raw_size);
  uLongf got = uLongf(raw_size);
  const int zrc = uncompress(raw.data(), &got, file.data() + 12, uLong(file.size() - 12));
  if (zrc != Z_OK || got != raw_size)
    raise(ErrorCode::CorruptOutput, path.string() + ": bad deflate stream");

  uint32_t mlen = 0;
  for (int i = 0; i < 4; ++i) mlen |= uint32_t(raw[i]) << (8 * i);
  if (4 + size_t(mlen) > raw.size())
    raise(ErrorCode::CorruptOutput, path.string() + ": manifest overruns payload");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(raw.begin() + 4, raw.begin() + 4 + mlen);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::CorruptOutput, path.string() + ": bad manifest: " + e.what());
  }

  const uint8_t* payload = raw.data() + 4 + mlen;
  const size_t payload_size = raw.size() - 4 - mlen;
  methods::MethodOutput out;
  try {
    for (const auto& a : manifest.at("arrays")) {
      const std::string name = a.at("name").get<std::string>();
      const std::string dtype = a.at("dtype").get<std::string>();
      const int rows = a.at("shape").at(0).get<int>();
      const int cols = a.at("shape").at(1).get<int>();
      const size_t offset = a.at("byte_offset").get<size_t>();
      if (rows < 0 || cols < 0)
        raise(ErrorCode::CorruptOutput, path.string() + ": negative shape");
      const size_t count = size_t(rows) * size_t(cols);
      const size_t width = dtype == "f32" ? 4 : 1;
      if (dtype != "f32" && dtype != "u8")
        raise(ErrorCode::CorruptOutput, path.string() + ": unknown dtype " + dtype);
      if (offset + count * width > payload_size)
        raise(ErrorCode::CorruptOutput, path.string() + ": array overruns payload");
      if (name == "heatmap" && dtype == "f32") {
        Plane<float> p(rows, cols);
        for (size_t i = 0; i < count; ++i) {
          uint32_t bits = 0;
          for (int b = 0; b < 4; ++b)
            bits |= uint32_t(payload[offset + 4 * i + b]) << (8 * b);
          std::memcpy(&p.raw()[i], &bits, 4);
        }
        out.heatmap = std::move(p);
      } else if (name == "mask" && dtype == "u8") {
        Plane<uint8_t> p(rows, cols);
        std::memcpy(p.data(), payload + offset, count);
        out.mask = std::move(p);
      } else {
        raise(ErrorCode::CorruptOutput, path.string() + ": unexpected array " + name);
      }
    }
    if (manifest.contains("detection"))
      out.detection = manifest.at("detection").get<double>();
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::CorruptOutput, path.string() + ": bad manifest: " + e.what());
  }
  return out;
}

}  // namespace forgescope::benchmark

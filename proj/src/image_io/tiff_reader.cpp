// Minimal TIFF reader: first IFD, strip-organized, chunky planar layout,
// 8- or 16-bit unsigned samples, uncompressed or deflate, predictor 1/2,
// photometric 0/1/2, either byte order. Extra samples (alpha) are dropped
// and 16-bit data is scaled to 8-bit by /257.

#include <zlib.h>

#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "forgescope/core/error.hpp"
#include "forgescope/image_io/image_io.hpp"
#include "src/image_io/codecs_internal.hpp"

namespace forgescope::image_io {

namespace {

struct IfdEntry {
  uint16_t type = 0;
  uint32_t count = 0;
  size_t value_pos = 0;  // absolute offset of the value bytes
};

class TiffFile {
public:
  explicit TiffFile(const std::vector<uint8_t>& bytes) : b_(bytes) {
    if (b_.size() < 8) raise(ErrorCode::CorruptImage, "TIFF too short");
    if (b_[0] == 'I' && b_[1] == 'I') little_ = true;
    else if (b_[0] == 'M' && b_[1] == 'M') little_ = false;
    else raise(ErrorCode::CorruptImage, "bad TIFF byte-order mark");
    if (u16(2) != 42) raise(ErrorCode::CorruptImage, "bad TIFF magic");
    parse_ifd(u32(4));
  }

  uint16_t u16(size_t pos) const {
    check(pos, 2);
    return little_ ? uint16_t(b_[pos] | (b_[pos + 1] << 8))
                   : uint16_t((b_[pos] << 8) | b_[pos + 1]);
  }
  uint32_t u32(size_t pos) const {
    check(pos, 4);
    return little_ ? (uint32_t(b_[pos]) | (uint32_t(b_[pos + 1]) << 8) |
                      (uint32_t(b_[pos + 2]) << 16) | (uint32_t(b_[pos + 3]) << 24))
                   : ((uint32_t(b_[pos]) << 24) | (uint32_t(b_[pos + 1]) << 16) |
                      (uint32_t(b_[pos + 2]) << 8) | uint32_t(b_[pos + 3]));
  }

  bool has(uint16_t tag) const { return entries_.count(tag) > 0; }

  std::vector<uint32_t> values(uint16_t tag) const {
    auto it = entries_.find(tag);
    if (it == entries_.end()) raise(ErrorCode::CorruptImage, "missing TIFF tag " + std::to_string(tag));
    const IfdEntry& e = it->second;
    std::vector<uint32_t> out;
    out.reserve(e.count);
    for (uint32_t i = 0; i < e.count; ++i) {
      switch (e.type) {
        case 1: check(e.value_pos + i, 1); out.push_back(b_[e.value_pos + i]); break;  // BYTE
        case 3: out.push_back(u16(e.value_pos + 2 * i)); break;                        // SHORT
        case 4: out.push_back(u32(e.value_pos + 4 * i)); break;                        // LONG
        default:
          raise(ErrorCode::CorruptImage, "unexpected type for TIFF tag " + std::to_string(tag));
      }
    }
    return out;
  }

  uint32_t scalar(uint16_t tag, uint32_t fallback) const {
    if (!has(tag)) return fallback;
    auto v = values(tag);
    if (v.empty()) raise(ErrorCode::CorruptImage, "empty TIFF tag " + std::to_string(tag));
    return v[0];
  }

  const uint8_t* slice(size_t pos, size_t n) const {
    check(pos, n);
    return b_.data() + pos;
  }

  bool little() const { return little_; }

private:
  void parse_ifd(uint32_t offset) {
    const uint16_t n = u16(offset);
    size_t pos = offset + 2;
    for (uint16_t i = 0; i < n; ++i, pos += 12) {
      const uint16_t tag = u16(pos);
      IfdEntry e;
      e.type = u16(pos + 2);
      e.count = u32(pos + 4);
      static const size_t type_size[] = {0, 1, 1, 2, 4, 8, 1, 1, 2, 4, 8, 4, 8};
      const size_t ts = e.type <= 12 ? type_size[e.type] : 0;
      const size_t total = ts * e.count;
      e.value_pos = (total <= 4 && ts > 0) ? pos + 8 : u32(pos + 8);
      entries_[tag] = e;
    }
  }

  void check(size_t pos, size_t n) const {
    if (pos + n > b_.size()) raise(ErrorCode::CorruptImage, "TIFF offset past end of file");
  }

  const std::vector<uint8_t>& b_;
  bool little_ = true;
  std::map<uint16_t, IfdEntry> entries_;
};

std::vector<uint8_t> inflate_strip(const uint8_t* data, size_t size, size_t expected) {
  std::vector<uint8_t> out(expected);
  uLongf dest_len = uLongf(expected);
  if (uncompress(out.data(), &dest_len, data, uLong(size)) != Z_OK || dest_len != expected)
    raise(ErrorCode::CorruptImage, "deflate strip decode failed");
  return out;
}

}  // namespace

Image decode_tiff(const std::vector<uint8_t>& bytes) {
  TiffFile tiff(bytes);

  const uint32_t width = tiff.scalar(256, 0);
  const uint32_t height = tiff.scalar(257, 0);
  if (width == 0 || height == 0) raise(ErrorCode::CorruptImage, "missing TIFF dimensions");

  const uint32_t spp = tiff.scalar(277, 1);
  if (spp < 1 || spp > 4) raise(ErrorCode::UnsupportedFormat, "unsupported sample count");
  uint32_t bits = 8;
  if (tiff.has(258)) {
    const auto v = tiff.values(258);
    bits = v[0];
    for (uint32_t x : v)
      if (x != bits) raise(ErrorCode::UnsupportedFormat, "mixed TIFF bit depths");
  }
  if (bits != 8 && bits != 16) raise(ErrorCode::UnsupportedFormat, "only 8/16-bit TIFF");

  const uint32_t compression = tiff.scalar(259, 1);
  if (compression != 1 && compression != 8 && compression != 32946)
    raise(ErrorCode::UnsupportedFormat, "only uncompressed or deflate TIFF");
  const uint32_t photometric = tiff.scalar(262, 1);
  if (photometric > 2) raise(ErrorCode::UnsupportedFormat, "unsupported photometric");
  if (photometric == 2 && spp < 3) raise(ErrorCode::CorruptImage, "RGB needs 3 samples");
  const uint32_t predictor = tiff.scalar(317, 1);
  if (predictor != 1 && predictor != 2)
    raise(ErrorCode::UnsupportedFormat, "unsupported predictor");
  if (spp > 1 && tiff.scalar(284, 1) != 1)
    raise(ErrorCode::UnsupportedFormat, "planar TIFF not supported");
  if (tiff.scalar(339, 1) != 1)
    raise(ErrorCode::UnsupportedFormat, "only unsigned integer samples");
  if (tiff.has(322) || tiff.has(323))
    raise(ErrorCode::UnsupportedFormat, "tiled TIFF not supported");

  const uint32_t rows_per_strip = tiff.scalar(278, 0xFFFFFFFFu);
  const auto offsets = tiff.values(273);
  const auto counts = tiff.values(279);
  const uint64_t n_strips =
      (uint64_t(height) + rows_per_strip - 1) / rows_per_strip;
  if (offsets.size() != n_strips || counts.size() != n_strips)
    raise(ErrorCode::CorruptImage, "strip table does not match image height");

  const size_t bytes_per_sample = bits / 8;
  const size_t row_bytes = size_t(width) * spp * bytes_per_sample;
  std::vector<uint8_t> samples;
  samples.reserve(row_bytes * height);

  for (size_t s = 0; s < n_strips; ++s) {
    const uint32_t first_row = uint32_t(s) * rows_per_strip;
    const uint32_t rows = std::min(rows_per_strip, height - first_row);
    const size_t expected = row_bytes * rows;
    std::vector<uint8_t> strip;
    if (compression == 1) {
      if (counts[s] < expected) raise(ErrorCode::CorruptImage, "short uncompressed strip");
      const uint8_t* p = tiff.slice(offsets[s], expected);
      strip.assign(p, p + expected);
    } else {
      strip = inflate_strip(tiff.slice(offsets[s], counts[s]), counts[s], expected);
    }
    if (predictor == 2) {
      for (uint32_t r = 0; r < rows; ++r) {
        uint8_t* row = strip.data() + size_t(r) * row_bytes;
        if (bits == 8) {
          for (size_t i = spp; i < size_t(width) * spp; ++i)
            row[i] = uint8_t(row[i] + row[i - spp]);
        } else {
          // Differences are per 16-bit sample in the file's byte order.
          for (size_t i = spp; i < size_t(width) * spp; ++i) {
            uint8_t* cur = row + 2 * i;
            uint8_t* prev = row + 2 * (i - spp);
            uint16_t c = tiff.little() ? uint16_t(cur[0] | (cur[1] << 8))
                                       : uint16_t((cur[0] << 8) | cur[1]);
            const uint16_t p = tiff.little() ? uint16_t(prev[0] | (prev[1] << 8))
                                             : uint16_t((prev[0] << 8) | prev[1]);
            c = uint16_t(c + p);
            if (tiff.little()) { cur[0] = uint8_t(c); cur[1] = uint8_t(c >> 8); }
            else { cur[0] = uint8_t(c >> 8); cur[1] = uint8_t(c); }
          }
        }
      }
    }
    samples.insert(samples.end(), strip.begin(), strip.end());
  }

  const int out_ch = photometric == 2 ? 3 : 1;
  Image out(out_ch, int(height), int(width));
  auto sample_at = [&](size_t idx) -> uint8_t {
    if (bits == 8) return samples[idx];
    const size_t o = 2 * idx;
    const uint16_t v = tiff.little() ? uint16_t(samples[o] | (samples[o + 1] << 8))
                                     : uint16_t((samples[o] << 8) | samples[o + 1]);
    return uint8_t(v / 257);
  };
  for (uint32_t y = 0; y < height; ++y) {
    for (uint32_t x = 0; x < width; ++x) {
      const size_t base = (size_t(y) * width + x) * spp;
      for (int c = 0; c < out_ch; ++c) {
        uint8_t v = sample_at(base + size_t(c));
        if (photometric == 0) v = uint8_t(255 - v);
        out.at(c, int(y), int(x)) = v;
      }
    }
  }
  return out;
}

ImageSize probe_tiff_size(const std::vector<uint8_t>& bytes) {
  TiffFile tiff(bytes);
  const uint32_t width = tiff.scalar(256, 0);
  const uint32_t height = tiff.scalar(257, 0);
  if (width == 0 || height == 0) raise(ErrorCode::CorruptImage, "missing TIFF dimensions");
  return {int(height), int(width)};
}

}  // namespace forgescope::image_io

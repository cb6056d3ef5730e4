// Baseline sequential JPEG: marker parse, canonical Huffman entropy decode,
// coefficient extraction, and a float-IDCT pixel path. Progressive,
// arithmetic, 12-bit and CMYK streams are rejected up front.

#include <array>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "forgescope/core/error.hpp"
#include "forgescope/image_io/image_io.hpp"
#include "src/image_io/codecs_internal.hpp"

namespace forgescope::image_io {

namespace {

// Natural index of each zig-zag position.
constexpr std::array<int, 64> kZigZag = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
};

struct ByteReader {
  const uint8_t* data;
  size_t size;
  size_t pos = 0;

  uint8_t u8() {
    if (pos >= size) raise(ErrorCode::CorruptStream, "unexpected end of file");
    return data[pos++];
  }
  uint16_t u16() {
    const uint16_t hi = u8();
    return uint16_t((hi << 8) | u8());
  }
  void skip(size_t n) {
    if (pos + n > size) raise(ErrorCode::CorruptStream, "segment length past end of file");
    pos += n;
  }
};

struct HuffTable {
  bool defined = false;
  std::array<int, 17> mincode{};
  std::array<int, 17> maxcode{};
  std::array<int, 17> valptr{};
  std::vector<uint8_t> values;
};

void build_huff(const std::array<uint8_t, 16>& counts, std::vector<uint8_t> symbols,
                HuffTable& t) {
  int code = 0, k = 0;
  for (int l = 1; l <= 16; ++l) {
    t.valptr[l] = k;
    t.mincode[l] = code;
    code += counts[l - 1];
    k += counts[l - 1];
    t.maxcode[l] = counts[l - 1] ? code - 1 : -1;
    if (code > (1 << l)) raise(ErrorCode::CorruptStream, "overfull huffman table");
    code <<= 1;
  }
  t.values = std::move(symbols);
  t.defined = true;
}

// Entropy-coded segment reader: undoes byte stuffing (FF 00) and treats any
// other marker inside the segment as truncation.
struct BitReader {
  ByteReader& br;
  uint32_t buf = 0;
  int count = 0;

  int next_bit() {
    if (count == 0) {
      uint8_t b = br.u8();
      if (b == 0xFF) {
        const uint8_t b2 = br.u8();
        if (b2 != 0x00)
          raise(ErrorCode::CorruptStream,
                "marker " + std::to_string(b2) + " inside entropy-coded data");
      }
      buf = b;
      count = 8;
    }
    --count;
    return int((buf >> count) & 1);
  }

  int receive(int n) {
    int v = 0;
    while (n--) v = (v << 1) | next_bit();
    return v;
  }

  void byte_align() { count = 0; }
};

int decode_symbol(BitReader& bits, const HuffTable& t) {
  if (!t.defined) raise(ErrorCode::CorruptStream, "undefined huffman table");
  int code = bits.next_bit();
  int l = 1;
  while (code > t.maxcode[l]) {
    if (++l > 16) raise(ErrorCode::CorruptStream, "invalid huffman code");
    code = (code << 1) | bits.next_bit();
  }
  return t.values[size_t(t.valptr[l] + code - t.mincode[l])];
}

int extend(int v, int s) { return v < (1 << (s - 1)) ? v - (1 << s) + 1 : v; }

struct Component {
  int id = 0;
  int h = 1, v = 1;
  int tq = 0;
  int td = 0, ta = 0;
  int comp_w = 0, comp_h = 0;
  int grid_bx = 0, grid_by = 0;
  Plane<int16_t> coeffs;
  long blocks_stored = 0;
  int pred = 0;
};

class JpegParser {
public:
  explicit JpegParser(const std::vector<uint8_t>& bytes)
      : br_{bytes.data(), bytes.size()} {}

  void parse() {
    if (br_.size < 2 || br_.data[0] != 0xFF || br_.data[1] != 0xD8)
      raise(ErrorCode::NotAJpeg, "missing SOI marker");
    br_.pos = 2;
    while (true) {
      uint8_t b = br_.u8();
      if (b != 0xFF) raise(ErrorCode::CorruptStream, "expected marker, got stray byte");
      uint8_t m = br_.u8();
      while (m == 0xFF) m = br_.u8();  // fill bytes
      switch (m) {
        case 0xD8: raise(ErrorCode::CorruptStream, "duplicate SOI");
        case 0xD9: finish(); return;
        case 0xC0: case 0xC1: parse_sof(); break;
        case 0xC2: raise(ErrorCode::UnsupportedJpeg, "progressive JPEG");
        case 0xC9: case 0xCA: case 0xCB: case 0xCD: case 0xCE: case 0xCF:
          raise(ErrorCode::UnsupportedJpeg, "arithmetic-coded JPEG");
        case 0xC3: case 0xC5: case 0xC6: case 0xC7:
          raise(ErrorCode::UnsupportedJpeg, "unsupported SOF type");
        case 0xC8: raise(ErrorCode::UnsupportedJpeg, "JPG extensions");
        case 0xC4: parse_dht(); break;
        case 0xDB: parse_dqt(); break;
        case 0xDD: parse_dri(); break;
        case 0xDA: parse_sos_and_scan(); break;
        case 0x01:
        case 0xD0: case 0xD1: case 0xD2: case 0xD3:
        case 0xD4: case 0xD5: case 0xD6: case 0xD7:
          raise(ErrorCode::CorruptStream, "unexpected restart/TEM marker");
        default: {  // APPn, COM, DNL, anything else with a length field
          const uint16_t len = br_.u16();
          if (len < 2) raise(ErrorCode::CorruptStream, "bad segment length");
          br_.skip(size_t(len) - 2);
          break;
        }
      }
    }
  }

  int width = 0, height = 0;
  int h_max = 1, v_max = 1;
  std::vector<Component> comps;
  std::array<QTable, 4> qtable{};
  std::array<bool, 4> qtable_defined{};
  bool any_scan = false;

private:
  void parse_sof() {
    if (frame_seen_) raise(ErrorCode::CorruptStream, "multiple frames");
    frame_seen_ = true;
    const uint16_t len = br_.u16();
    const int precision = br_.u8();
    if (precision != 8)
      raise(ErrorCode::UnsupportedJpeg, std::to_string(precision) + "-bit precision");
    height = br_.u16();
    width = br_.u16();
    if (height == 0) raise(ErrorCode::UnsupportedJpeg, "DNL-deferred image height");
    if (width == 0) raise(ErrorCode::CorruptStream, "zero image width");
    const int nf = br_.u8();
    if (nf != 1 && nf != 3)
      raise(ErrorCode::UnsupportedJpeg,
            std::to_string(nf) + "-component image (only grayscale and YCbCr)");
    if (len != 8 + 3 * nf) raise(ErrorCode::CorruptStream, "bad SOF length");
    comps.resize(size_t(nf));
    for (auto& c : comps) {
      c.id = br_.u8();
      const uint8_t hv = br_.u8();
      c.h = hv >> 4;
      c.v = hv & 15;
      if (c.h < 1 || c.h > 4 || c.v < 1 || c.v > 4)
        raise(ErrorCode::CorruptStream, "invalid sampling factors");
      c.tq = br_.u8();
      if (c.tq > 3) raise(ErrorCode::CorruptStream, "invalid quantization table id");
      h_max = std::max(h_max, c.h);
      v_max = std::max(v_max, c.v);
    }
    for (auto& c : comps) {
      c.comp_w = (width * c.h + h_max - 1) / h_max;
      c.comp_h = (height * c.v + v_max - 1) / v_max;
      c.grid_bx = (c.comp_w + 7) / 8;
      c.grid_by = (c.comp_h + 7) / 8;
      c.coeffs = Plane<int16_t>(c.grid_by * 8, c.grid_bx * 8);
    }
  }

  void parse_dqt() {
    int remaining = br_.u16() - 2;
    while (remaining > 0) {
      const uint8_t pqtq = br_.u8();
      const int pq = pqtq >> 4, tq = pqtq & 15;
      if (pq > 1 || tq > 3) raise(ErrorCode::CorruptStream, "bad DQT header");
      for (int k = 0; k < 64; ++k) {
        const uint16_t q = pq ? br_.u16() : br_.u8();
        if (q == 0) raise(ErrorCode::CorruptStream, "zero quantization step");
        qtable[tq][size_t(kZigZag[k])] = q;
      }
      qtable_defined[tq] = true;
      remaining -= 1 + 64 * (pq ? 2 : 1);
    }
    if (remaining != 0) raise(ErrorCode::CorruptStream, "bad DQT length");
  }

  void parse_dht() {
    int remaining = br_.u16() - 2;
    while (remaining > 0) {
      const uint8_t tcth = br_.u8();
      const int tc = tcth >> 4, th = tcth & 15;
      if (tc > 1 || th > 3) raise(ErrorCode::CorruptStream, "bad DHT header");
      std::array<uint8_t, 16> counts;
      int total = 0;
      for (auto& c : counts) {
        c = br_.u8();
        total += c;
      }
      if (total > 256) raise(ErrorCode::CorruptStream, "huffman table too large");
      std::vector<uint8_t> symbols(static_cast<size_t>(total));
      for (auto& s : symbols) s = br_.u8();
      build_huff(counts, std::move(symbols), (tc ? ac_ : dc_)[th]);
      remaining -= 1 + 16 + total;
    }
    if (remaining != 0) raise(ErrorCode::CorruptStream, "bad DHT length");
  }

  void parse_dri() {
    if (br_.u16() != 4) raise(ErrorCode::CorruptStream, "bad DRI length");
    restart_interval_ = br_.u16();
  }

  void parse_sos_and_scan() {
    if (!frame_seen_) raise(ErrorCode::CorruptStream, "scan before frame header");
    const uint16_t len = br_.u16();
    const int ns = br_.u8();
    if (ns < 1 || ns > 4 || size_t(ns) > comps.size())
      raise(ErrorCode::CorruptStream, "bad scan component count");
    if (len != 6 + 2 * ns) raise(ErrorCode::CorruptStream, "bad SOS length");
    std::vector<size_t> scan;
    for (int i = 0; i < ns; ++i) {
      const int cs = br_.u8();
      size_t idx = comps.size();
      for (size_t j = 0; j < comps.size(); ++j)
        if (comps[j].id == cs) idx = j;
      if (idx == comps.size())
        raise(ErrorCode::CorruptStream, "scan references unknown component");
      const uint8_t tdta = br_.u8();
      comps[idx].td = tdta >> 4;
      comps[idx].ta = tdta & 15;
      if (comps[idx].td > 3 || comps[idx].ta > 3)
        raise(ErrorCode::CorruptStream, "bad entropy table ids");
      scan.push_back(idx);
    }
    const int ss = br_.u8(), se = br_.u8(), ahal = br_.u8();
    if (ss != 0 || se != 63 || ahal != 0)
      raise(ErrorCode::UnsupportedJpeg, "non-baseline spectral selection");
    decode_scan(scan);
    any_scan = true;
  }

  void decode_scan(const std::vector<size_t>& scan) {
    BitReader bits{br_};
    for (size_t i : scan) comps[i].pred = 0;
    int rst_index = 0;
    long mcu_index = 0;
    auto restart_boundary = [&] {
      return restart_interval_ > 0 && mcu_index > 0 &&
             mcu_index % restart_interval_ == 0;
    };
    auto handle_restart = [&] {
      bits.byte_align();
      const uint8_t b1 = br_.u8(), b2 = br_.u8();
      if (b1 != 0xFF || b2 != uint8_t(0xD0 + rst_index))
        raise(ErrorCode::CorruptStream, "restart marker missing or out of order");
      rst_index = (rst_index + 1) & 7;
      for (size_t i : scan) comps[i].pred = 0;
    };

    if (scan.size() == 1) {
      // Non-interleaved: one block per MCU over the component's own grid.
      Component& c = comps[scan[0]];
      const long total = long(c.grid_bx) * c.grid_by;
      for (; mcu_index < total; ++mcu_index) {
        if (restart_boundary()) handle_restart();
        const int by = int(mcu_index / c.grid_bx);
        const int bx = int(mcu_index % c.grid_bx);
        decode_block(bits, c, by, bx, true);
      }
    } else {
      const int mcus_x = (width + 8 * h_max - 1) / (8 * h_max);
      const int mcus_y = (height + 8 * v_max - 1) / (8 * v_max);
      for (int my = 0; my < mcus_y; ++my) {
        for (int mx = 0; mx < mcus_x; ++mx, ++mcu_index) {
          if (restart_boundary()) handle_restart();
          for (size_t i : scan) {
            Component& c = comps[i];
            for (int v = 0; v < c.v; ++v) {
              for (int h = 0; h < c.h; ++h) {
                const int by = my * c.v + v;
                const int bx = mx * c.h + h;
                // MCU padding blocks are decoded (bits must be consumed)
                // but never stored.
                const bool store = by < c.grid_by && bx < c.grid_bx;
                decode_block(bits, c, by, bx, store);
              }
            }
          }
        }
      }
    }
  }

  void decode_block(BitReader& bits, Component& c, int by, int bx, bool store) {
    const int s = decode_symbol(bits, dc_[c.td]);
    if (s > 11) raise(ErrorCode::CorruptStream, "DC category out of range");
    if (s) c.pred += extend(bits.receive(s), s);
    if (c.pred < -32768 || c.pred > 32767)
      raise(ErrorCode::CorruptStream, "DC value out of range");
    const int row0 = by * 8, col0 = bx * 8;
    if (store) c.coeffs.at(row0, col0) = int16_t(c.pred);
    int k = 1;
    while (k < 64) {
      const int rs = decode_symbol(bits, ac_[c.ta]);
      const int r = rs >> 4, sz = rs & 15;
      if (sz == 0) {
        if (r == 15) { k += 16; continue; }
        break;  // EOB
      }
      if (sz > 10) raise(ErrorCode::CorruptStream, "AC category out of range");
      k += r;
      if (k > 63) raise(ErrorCode::CorruptStream, "AC index past end of block");
      const int v = extend(bits.receive(sz), sz);
      if (store) {
        const int nat = kZigZag[k];
        c.coeffs.at(row0 + nat / 8, col0 + nat % 8) = int16_t(v);
      }
      ++k;
    }
    if (store) ++c.blocks_stored;
  }

  void finish() const {
    if (!frame_seen_ || !any_scan)
      raise(ErrorCode::CorruptStream, "no frame or scan before EOI");
    for (const auto& c : comps) {
      if (c.blocks_stored != long(c.grid_bx) * c.grid_by)
        raise(ErrorCode::CorruptStream, "incomplete scan data for component " +
                                            std::to_string(c.id));
      if (!qtable_defined[size_t(c.tq)])
        raise(ErrorCode::CorruptStream, "component references undefined qtable");
    }
  }

  ByteReader br_;
  HuffTable dc_[4], ac_[4];
  int restart_interval_ = 0;
  bool frame_seen_ = false;
};

// alpha(u)/2 * cos((2n+1) u pi / 16), the 1-D IDCT basis.
const std::array<std::array<double, 8>, 8>& idct_basis() {
  static const auto table = [] {
    std::array<std::array<double, 8>, 8> t{};
    for (int u = 0; u < 8; ++u) {
      const double alpha = u == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
      for (int n = 0; n < 8; ++n)
        t[size_t(u)][size_t(n)] =
            0.5 * alpha * std::cos((2.0 * n + 1.0) * u * 3.14159265358979323846 / 16.0);
    }
    return t;
  }();
  return table;
}

void idct_8x8(const double in[64], double out[64]) {
  const auto& b = idct_basis();
  double tmp[64];
  for (int u = 0; u < 8; ++u)
    for (int m = 0; m < 8; ++m) {
      double acc = 0.0;
      for (int v = 0; v < 8; ++v) acc += b[size_t(v)][size_t(m)] * in[u * 8 + v];
      tmp[u * 8 + m] = acc;
    }
  for (int n = 0; n < 8; ++n)
    for (int m = 0; m < 8; ++m) {
      double acc = 0.0;
      for (int u = 0; u < 8; ++u) acc += b[size_t(u)][size_t(n)] * tmp[u * 8 + m];
      out[n * 8 + m] = acc;
    }
}

uint8_t clamp_u8(double v) {
  return uint8_t(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

Plane<uint8_t> component_samples(const Component& c, const QTable& q) {
  Plane<uint8_t> samples(c.comp_h, c.comp_w);
  double block[64], pixels[64];
  for (int by = 0; by < c.grid_by; ++by) {
    for (int bx = 0; bx < c.grid_bx; ++bx) {
      for (int i = 0; i < 64; ++i)
        block[i] = double(c.coeffs.at(by * 8 + i / 8, bx * 8 + i % 8)) * q[size_t(i)];
      idct_8x8(block, pixels);
      for (int n = 0; n < 8; ++n) {
        const int y = by * 8 + n;
        if (y >= c.comp_h) break;
        for (int m = 0; m < 8; ++m) {
          const int x = bx * 8 + m;
          if (x >= c.comp_w) break;
          samples.at(y, x) = clamp_u8(pixels[n * 8 + m] + 128.0);
        }
      }
    }
  }
  return samples;
}

}  // namespace

std::pair<DctCoefficients, QTables> decode_jpeg_data(const std::vector<uint8_t>& bytes) {
  JpegParser p(bytes);
  p.parse();
  DctCoefficients dct;
  dct.image_width = p.width;
  dct.image_height = p.height;
  for (const auto& c : p.comps) {
    JpegComponent out;
    out.id = c.id;
    out.h_samp = c.h;
    out.v_samp = c.v;
    out.q_table_id = c.tq;
    out.width = c.comp_w;
    out.height = c.comp_h;
    out.coeffs = c.coeffs;
    dct.components.push_back(std::move(out));
  }
  QTables qt;
  int max_id = -1;
  for (int i = 0; i < 4; ++i)
    if (p.qtable_defined[size_t(i)]) max_id = i;
  for (int i = 0; i <= max_id; ++i) {
    if (!p.qtable_defined[size_t(i)])
      raise(ErrorCode::CorruptStream, "non-contiguous quantization table ids");
    qt.tables.push_back(p.qtable[size_t(i)]);
  }
  if (qt.tables.empty()) raise(ErrorCode::CorruptStream, "no quantization table");
  return {std::move(dct), std::move(qt)};
}

Image decode_jpeg(const std::vector<uint8_t>& bytes) {
  JpegParser p(bytes);
  p.parse();
  std::vector<Plane<uint8_t>> planes;
  planes.reserve(p.comps.size());
  for (const auto& c : p.comps)
    planes.push_back(component_samples(c, p.qtable[size_t(c.tq)]));

  if (p.comps.size() == 1) {
    Image out(1, p.height, p.width);
    for (int y = 0; y < p.height; ++y)
      for (int x = 0; x < p.width; ++x) out.at(0, y, x) = planes[0].at(y, x);
    return out;
  }

  // Replicated (box) chroma upsampling, then BT.601 YCbCr -> RGB.
  auto sample = [&](size_t i, int y, int x) {
    const Component& c = p.comps[i];
    const int sy = std::min(y * c.v / p.v_max, c.comp_h - 1);
    const int sx = std::min(x * c.h / p.h_max, c.comp_w - 1);
    return double(planes[i].at(sy, sx));
  };
  Image out(3, p.height, p.width);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      const double Y = sample(0, y, x);
      const double cb = sample(1, y, x) - 128.0;
      const double cr = sample(2, y, x) - 128.0;
      out.at(0, y, x) = clamp_u8(Y + 1.402 * cr);
      out.at(1, y, x) = clamp_u8(Y - 0.344136 * cb - 0.714136 * cr);
      out.at(2, y, x) = clamp_u8(Y + 1.772 * cb);
    }
  }
  return out;
}

ImageSize probe_jpeg_size(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 0xFF || bytes[1] != 0xD8)
    raise(ErrorCode::NotAJpeg, "missing SOI marker");
  ByteReader br{bytes.data(), bytes.size(), 2};
  while (true) {
    uint8_t b = br.u8();
    if (b != 0xFF) raise(ErrorCode::CorruptStream, "expected marker");
    uint8_t m = br.u8();
    while (m == 0xFF) m = br.u8();
    // Any SOF variant carries the dimensions, including ones the full
    // decoder rejects.
    if (m >= 0xC0 && m <= 0xCF && m != 0xC4 && m != 0xC8 && m != 0xCC) {
      br.u16();
      br.u8();
      const int h = br.u16();
      const int w = br.u16();
      if (h == 0 || w == 0) raise(ErrorCode::CorruptStream, "zero dimension in SOF");
      return {h, w};
    }
    if (m == 0xD9 || m == 0xDA)
      raise(ErrorCode::CorruptStream, "no frame header before scan");
    const uint16_t len = br.u16();
    if (len < 2) raise(ErrorCode::CorruptStream, "bad segment length");
    br.skip(size_t(len) - 2);
  }
}

}  // namespace forgescope::image_io

#include "support/fixtures.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <random>

#include "forgescope/core/error.hpp"
#include "forgescope/image_io/image_io.hpp"
#include "support/jpeg_ref.hpp"
#include "support/synthetic.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using forgescope::Image;
using forgescope::Mask;

TempDir::TempDir() {
  std::random_device rd;
  std::mt19937_64 rng(rd());
  for (int attempt = 0; attempt < 16; ++attempt) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "forgescope-%016llx",
                  static_cast<unsigned long long>(rng()));
    fs::path candidate = fs::temp_directory_path() / buf;
    std::error_code ec;
    if (fs::create_directory(candidate, ec) && !ec) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("could not create temp dir");
}

TempDir::~TempDir() {
  if (!path_.empty()) {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
}

void write_bytes(const fs::path& path, const std::vector<uint8_t>& bytes) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

struct TiffBuilder {
  std::vector<uint8_t> bytes;
  bool big = false;

  void u8(uint8_t v) { bytes.push_back(v); }
  void u16(uint16_t v) {
    if (big) { u8(uint8_t(v >> 8)); u8(uint8_t(v)); }
    else { u8(uint8_t(v)); u8(uint8_t(v >> 8)); }
  }
  void u32(uint32_t v) {
    if (big) { u16(uint16_t(v >> 16)); u16(uint16_t(v)); }
    else { u16(uint16_t(v)); u16(uint16_t(v >> 16)); }
  }
};

struct Tag {
  uint16_t id;
  uint16_t type;  // 3 = SHORT, 4 = LONG
  uint32_t value;
};

}  // namespace

std::vector<uint8_t> make_tiff(const Image& image, const TiffOptions& o) {
  const int h = image.height(), w = image.width(), spp = image.channels();
  const int bps = o.bits / 8;
  const size_t row_bytes = size_t(w) * spp * bps;

  std::vector<uint8_t> samples(row_bytes * h);
  const bool big = o.big_endian;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < spp; ++c) {
        const size_t i = (size_t(y) * w + x) * spp + c;
        if (o.bits == 8) {
          samples[i] = image.at(c, y, x);
        } else {
          const uint16_t v = uint16_t(image.at(c, y, x) * 257);
          samples[2 * i] = big ? uint8_t(v >> 8) : uint8_t(v);
          samples[2 * i + 1] = big ? uint8_t(v) : uint8_t(v >> 8);
        }
      }
    }
  }

  if (o.predictor == 2) {
    for (int y = 0; y < h; ++y) {
      uint8_t* row = samples.data() + size_t(y) * row_bytes;
      if (o.bits == 8) {
        for (size_t i = size_t(w) * spp; i-- > size_t(spp);)
          row[i] = uint8_t(row[i] - row[i - spp]);
      } else {
        for (size_t i = size_t(w) * spp; i-- > size_t(spp);) {
          uint8_t* cur = row + 2 * i;
          const uint8_t* prev = row + 2 * (i - spp);
          uint16_t cv = big ? uint16_t((cur[0] << 8) | cur[1])
                            : uint16_t(cur[0] | (cur[1] << 8));
          const uint16_t pv = big ? uint16_t((prev[0] << 8) | prev[1])
                                  : uint16_t(prev[0] | (prev[1] << 8));
          cv = uint16_t(cv - pv);
          if (big) { cur[0] = uint8_t(cv >> 8); cur[1] = uint8_t(cv); }
          else { cur[0] = uint8_t(cv); cur[1] = uint8_t(cv >> 8); }
        }
      }
    }
  }

  std::vector<uint8_t> strip = samples;
  if (o.deflate) {
    uLongf len = compressBound(uLong(samples.size()));
    strip.resize(len);
    if (compress2(strip.data(), &len, samples.data(), uLong(samples.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK)
      throw std::runtime_error("deflate failed");
    strip.resize(len);
  }

  const uint32_t data_offset = 8;
  const uint32_t ifd_offset = uint32_t(data_offset + strip.size() + (strip.size() & 1));

  std::vector<Tag> tags = {
      {256, 3, uint32_t(w)},
      {257, 3, uint32_t(h)},
      {258, 3, uint32_t(o.bits)},
      {259, 3, o.deflate ? 8u : 1u},
      {262, 3, o.photometric >= 0 ? uint32_t(o.photometric) : (spp >= 3 ? 2u : 1u)},
      {273, 4, data_offset},
      {277, 3, uint32_t(spp)},
      {278, 3, uint32_t(h)},
      {279, 4, uint32_t(strip.size())},
  };
  if (o.predictor != 1) tags.push_back({317, 3, uint32_t(o.predictor)});
  if (o.tiled) {
    tags.push_back({322, 3, uint32_t(w)});
    tags.push_back({323, 3, uint32_t(h)});
  }

  TiffBuilder b;
  b.big = o.big_endian;
  b.u8(o.big_endian ? 'M' : 'I');
  b.u8(o.big_endian ? 'M' : 'I');
  b.u16(42);
  b.u32(ifd_offset);
  b.bytes.insert(b.bytes.end(), strip.begin(), strip.end());
  if (strip.size() & 1) b.u8(0);

  b.u16(uint16_t(tags.size()));
  for (const Tag& t : tags) {
    b.u16(t.id);
    b.u16(t.type);
    b.u32(1);
    if (t.type == 3) {
      b.u16(uint16_t(t.value));
      b.u16(0);
    } else {
      b.u32(t.value);
    }
  }
  b.u32(0);
  return b.bytes;
}

void make_columbia_fixture(const fs::path& root) {
  Image tif(1, 8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) tif.at(0, y, x) = uint8_t(90 + 10 * y + x);

  Image mask_img(1, 8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) mask_img.at(0, y, x) = y < 4 ? 255 : 0;
  const std::vector<uint8_t> mask_jpg = ref_encode_jpeg(mask_img, 100);
  const std::vector<uint8_t> tif_bytes = make_tiff(tif);

  char name[64];
  for (int i = 0; i < 180; ++i) {
    std::snprintf(name, sizeof(name), "4cam_splc/splc_%04d.tif", i);
    write_bytes(root / name, tif_bytes);
    std::snprintf(name, sizeof(name), "4cam_splc/edgemask/splc_%04d_edgemask.jpg", i);
    write_bytes(root / name, mask_jpg);
  }
  for (int i = 0; i < 183; ++i) {
    std::snprintf(name, sizeof(name), "4cam_auth/auth_%04d.tif", i);
    write_bytes(root / name, tif_bytes);
  }
}

forgescope::datasets::DatasetDescriptor make_benchmark_fixture(const fs::path& root,
                                                               int height, int width) {
  char name[64];
  for (int i = 0; i < 4; ++i) {
    std::snprintf(name, sizeof(name), "forged/img_%02d.jpg", i);
    write_bytes(root / name,
                ref_encode_jpeg(blob_image(height, width, 100 + i, 3.0), 90));

    Mask region(height, width, 0);
    for (int r = height / 4; r < 3 * height / 4; ++r)
      for (int c = width / 4; c < 3 * width / 4; ++c) region.at(r, c) = 1;
    Image mask_png(1, height, width);
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) mask_png.at(0, r, c) = region.at(r, c) ? 255 : 0;
    std::snprintf(name, sizeof(name), "masks/img_%02d_mask.png", i);
    fs::create_directories((root / name).parent_path());
    forgescope::image_io::write_png(root / name, mask_png);
  }
  for (int i = 0; i < 2; ++i) {
    std::snprintf(name, sizeof(name), "pristine/img_%02d.jpg", 10 + i);
    write_bytes(root / name,
                ref_encode_jpeg(blob_image(height, width, 200 + i, 3.0), 90));
  }

  forgescope::datasets::DatasetDescriptor desc;
  desc.name = "fixture6";
  desc.root = root;
  desc.layout = {"forged/*.jpg", "masks/*.png", "pristine/*.jpg", "", "_mask"};
  desc.counts = forgescope::datasets::DatasetCounts{4, 2};
  desc.mask_rule = forgescope::datasets::MaskRule::Default;
  return desc;
}

}  // namespace testsupport

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "forgescope/core/plane.hpp"
#include "forgescope/datasets/datasets.hpp"

namespace testsupport {

/// Unique directory under the system temp root, removed on destruction.
class TempDir {
public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

void write_bytes(const std::filesystem::path& path, const std::vector<uint8_t>& bytes);

struct TiffOptions {
  int bits = 8;             // 8 or 16 (16-bit samples are value * 257)
  bool big_endian = false;
  int photometric = -1;     // -1: 1 for gray, 2 for RGB
  bool deflate = false;
  int predictor = 1;
  bool tiled = false;       // adds tile tags so the reader must reject
};

/// Hand-assembled strip TIFF carrying the image's literal sample values.
std::vector<uint8_t> make_tiff(const forgescope::Image& image,
                               const TiffOptions& options = {});

/// On-disk tree matching the columbia adapter: 180 forged tif + per-image
/// jpg masks (top half marked) + 183 pristine tif, all 8x8 grayscale.
void make_columbia_fixture(const std::filesystem::path& root);

/// Six-image JPEG dataset (4 forged with PNG masks + 2 pristine) used by the
/// benchmark tests, plus the descriptor that reads it.
forgescope::datasets::DatasetDescriptor make_benchmark_fixture(
    const std::filesystem::path& root, int height = 48, int width = 48);

}  // namespace testsupport

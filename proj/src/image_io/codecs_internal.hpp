#pragma once

#include <cstdint>
#include <vector>

#include "forgescope/core/data_map.hpp"

namespace forgescope::image_io {

ImageSize probe_png_size(const std::vector<uint8_t>& bytes);
ImageSize probe_tiff_size(const std::vector<uint8_t>& bytes);
ImageSize probe_jpeg_size(const std::vector<uint8_t>& bytes);

}  // namespace forgescope::image_io

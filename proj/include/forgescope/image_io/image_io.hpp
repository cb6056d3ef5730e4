#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "forgescope/core/data_map.hpp"
#include "forgescope/core/jpeg_data.hpp"
#include "forgescope/core/plane.hpp"

namespace forgescope::image_io {

enum class ImageFormat { Png, Tiff, Jpeg };

/// Whole-file read. FileNotFound / IoError.
std::vector<uint8_t> read_file(const std::filesystem::path& path);

/// Sniffs magic bytes, never the extension. FileNotFound / UnsupportedFormat.
ImageFormat detect_format(const std::filesystem::path& path);

/// Decode to 8-bit pixels, RGB channel order, alpha dropped, 16-bit samples
/// scaled down by 257. FileNotFound / UnsupportedFormat / CorruptImage
/// (UnsupportedJpeg or CorruptStream for defective JPEGs).
Image read_image(const std::filesystem::path& path);

/// Lossless 8-bit PNG (grayscale or RGB). IoError.
void write_png(const std::filesystem::path& path, const Image& image);

/// Quantized DCT coefficients and quantization tables of a baseline JPEG.
/// NotAJpeg / UnsupportedJpeg / CorruptStream.
std::pair<DctCoefficients, QTables> read_jpeg_data(const std::filesystem::path& path);

/// Image dimensions from the header alone, without a pixel decode.
ImageSize probe_image_size(const std::filesystem::path& path);

// In-memory variants, used by the file-level entry points above.
Image decode_png(const std::vector<uint8_t>& bytes);
Image decode_tiff(const std::vector<uint8_t>& bytes);
Image decode_jpeg(const std::vector<uint8_t>& bytes);
std::pair<DctCoefficients, QTables> decode_jpeg_data(const std::vector<uint8_t>& bytes);

}  // namespace forgescope::image_io

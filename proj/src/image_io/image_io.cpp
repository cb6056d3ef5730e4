#include "forgescope/image_io/image_io.hpp"

#include <fstream>

#include "forgescope/core/error.hpp"
#include "src/image_io/codecs_internal.hpp"

namespace forgescope::image_io {

std::vector<uint8_t> read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec) || ec)
    raise(ErrorCode::FileNotFound, "'" + path.string() + "'");
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (in.bad()) raise(ErrorCode::IoError, "read failed for '" + path.string() + "'");
  return bytes;
}

namespace {

ImageFormat sniff(const std::vector<uint8_t>& bytes, const std::filesystem::path& path) {
  if (bytes.size() >= 8 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' &&
      bytes[3] == 'G')
    return ImageFormat::Png;
  if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8) return ImageFormat::Jpeg;
  if (bytes.size() >= 4 && ((bytes[0] == 'I' && bytes[1] == 'I' && bytes[2] == 42) ||
                            (bytes[0] == 'M' && bytes[1] == 'M' && bytes[3] == 42)))
    return ImageFormat::Tiff;
  raise(ErrorCode::UnsupportedFormat, "unrecognized image format: '" + path.string() + "'");
}

}  // namespace

ImageFormat detect_format(const std::filesystem::path& path) {
  return sniff(read_file(path), path);
}

Image read_image(const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = read_file(path);
  switch (sniff(bytes, path)) {
    case ImageFormat::Png: return decode_png(bytes);
    case ImageFormat::Tiff: return decode_tiff(bytes);
    case ImageFormat::Jpeg: return decode_jpeg(bytes);
  }
  raise(ErrorCode::UnsupportedFormat, "unreachable");
}

std::pair<DctCoefficients, QTables> read_jpeg_data(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec) || ec)
    raise(ErrorCode::FileNotFound, "'" + path.string() + "'");
  return decode_jpeg_data(read_file(path));
}

ImageSize probe_image_size(const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = read_file(path);
  switch (sniff(bytes, path)) {
    case ImageFormat::Png: return probe_png_size(bytes);
    case ImageFormat::Tiff: return probe_tiff_size(bytes);
    case ImageFormat::Jpeg: return probe_jpeg_size(bytes);
  }
  raise(ErrorCode::UnsupportedFormat, "unreachable");
}

}  // namespace forgescope::image_io

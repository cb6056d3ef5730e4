#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <vector>

#include "forgescope/core/error.hpp"
#include "forgescope/image_io/image_io.hpp"
#include "src/image_io/codecs_internal.hpp"

namespace forgescope::image_io {

namespace {

struct MemReader {
  const uint8_t* data;
  size_t size;
  size_t pos;
};

void read_callback(png_structp png, png_bytep out, png_size_t n) {
  auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
  if (r->pos + n > r->size) png_error(png, "read past end of buffer");
  std::memcpy(out, r->data + r->pos, n);
  r->pos += n;
}

void error_callback(png_structp png, png_const_charp) { longjmp(png_jmpbuf(png), 1); }
void warning_callback(png_structp, png_const_charp) {}

}  // namespace

Image decode_png(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
    raise(ErrorCode::CorruptImage, "bad PNG signature");
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, error_callback, warning_callback);
  if (!png) raise(ErrorCode::IoError, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    raise(ErrorCode::IoError, "libpng init failed");
  }

  MemReader reader{bytes.data(), bytes.size(), 0};
  std::vector<uint8_t> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0, height = 0;
  int channels = 0;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    raise(ErrorCode::CorruptImage, "PNG decode failed");
  }

  png_set_read_fn(png, &reader, read_callback);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (bit_depth == 16) png_set_scale_16(png);
  png_set_strip_alpha(png);
  (void)png_set_interlace_handling(png);
  png_read_update_info(png, info);

  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  channels = png_get_channels(png, info);
  const size_t rowbytes = png_get_rowbytes(png, info);
  pixels.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + y * rowbytes;

  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3)
    raise(ErrorCode::CorruptImage, "unexpected channel count after transforms");

  Image out(channels, int(height), int(width));
  for (png_uint_32 y = 0; y < height; ++y)
    for (png_uint_32 x = 0; x < width; ++x)
      for (int c = 0; c < channels; ++c)
        out.at(c, int(y), int(x)) = pixels[y * rowbytes + x * size_t(channels) + size_t(c)];
  return out;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  if (image.channels() != 1 && image.channels() != 3)
    raise(ErrorCode::ShapeMismatch, "PNG output needs 1 or 3 channels");
  if (image.height() < 1 || image.width() < 1)
    raise(ErrorCode::ShapeMismatch, "empty image");

  FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) raise(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, error_callback, warning_callback);
  if (!png) {
    std::fclose(fp);
    raise(ErrorCode::IoError, "libpng init failed");
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    std::fclose(fp);
    raise(ErrorCode::IoError, "libpng init failed");
  }

  // Interleave channel-major pixels into rows before entering libpng.
  const int ch = image.channels(), h = image.height(), w = image.width();
  std::vector<uint8_t> interleaved(size_t(ch) * h * w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < ch; ++c)
        interleaved[(size_t(y) * w + x) * ch + size_t(c)] = image.at(c, y, x);
  std::vector<png_bytep> rows(static_cast<size_t>(h));
  for (int y = 0; y < h; ++y) rows[size_t(y)] = interleaved.data() + size_t(y) * w * ch;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    raise(ErrorCode::IoError, "PNG encode failed");
  }

  png_init_io(png, fp);
  png_set_IHDR(png, info, png_uint_32(w), png_uint_32(h), 8,
               ch == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(fp) != 0) raise(ErrorCode::IoError, "closing '" + path.string() + "' failed");
}

ImageSize probe_png_size(const std::vector<uint8_t>& bytes) {
  // 8-byte signature, IHDR length+tag, then width/height big-endian.
  if (bytes.size() < 24 || png_sig_cmp(bytes.data(), 0, 8) != 0 ||
      std::memcmp(bytes.data() + 12, "IHDR", 4) != 0)
    raise(ErrorCode::CorruptImage, "bad PNG header");
  auto be32 = [&](size_t o) {
    return (uint32_t(bytes[o]) << 24) | (uint32_t(bytes[o + 1]) << 16) |
           (uint32_t(bytes[o + 2]) << 8) | uint32_t(bytes[o + 3]);
  };
  const uint32_t w = be32(16), h = be32(20);
  if (w == 0 || h == 0) raise(ErrorCode::CorruptImage, "zero PNG dimension");
  return {int(h), int(w)};
}

}  // namespace forgescope::image_io

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "forgescope/core/plane.hpp"

namespace forgescope {

/// 8x8 quantization steps in natural (row-major) order, zig-zag already undone.
using QTable = std::array<uint16_t, 64>;

/// Quantization tables by table id (index == id as defined in the stream).
struct QTables {
  std::vector<QTable> tables;

  bool operator==(const QTables&) const = default;
};

/// Raw quantized DCT coefficients of one JPEG component. The coefficient grid
/// stores element (8i+u, 8j+v) as frequency (u,v) of block (i,j); both grid
/// dimensions are multiples of 8. `width`/`height` are the component's pixel
/// dimensions before padding to the block grid.
struct JpegComponent {
  int id = 0;
  int h_samp = 1;
  int v_samp = 1;
  int q_table_id = 0;
  int width = 0;
  int height = 0;
  Plane<int16_t> coeffs;

  int blocks_x() const { return coeffs.cols() / 8; }
  int blocks_y() const { return coeffs.rows() / 8; }
};

/// Per-component coefficient grids plus the image dimensions from the frame
/// header. Component 0 is luma for color images.
struct DctCoefficients {
  std::vector<JpegComponent> components;
  int image_width = 0;
  int image_height = 0;

  const JpegComponent& luma() const { return components.at(0); }
};

}  // namespace forgescope

#pragma once

#include "forgescope/core/plane.hpp"

namespace forgescope::postprocessing {

/// (h - min) / (max - min); a constant plane maps to all zeros.
/// Throws NonFiniteInput on NaN or infinity.
HeatMap zero_one_rescale(const Plane<float>& h);

/// Copies the overlapping top-left region bit-exact, trims excess at the
/// bottom/right and zero-pads any deficit there.
template <typename T>
Plane<T> resize_with_trim_and_pad(const Plane<T>& src, int target_rows, int target_cols) {
  Plane<T> out(target_rows, target_cols);  // zero-initialized
  const int rows = std::min(src.rows(), target_rows);
  const int cols = std::min(src.cols(), target_cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.at(r, c) = src.at(r, c);
  return out;
}

namespace detail {
void check_upscale(int src_rows, int src_cols, int target_rows, int target_cols);
}

/// Nearest-neighbor upscale under the floor mapping src = dst*S/T.
/// Throws DownscaleNotSupported when target is smaller in either dimension.
template <typename T>
Plane<T> upscale_nearest(const Plane<T>& src, int target_rows, int target_cols) {
  detail::check_upscale(src.rows(), src.cols(), target_rows, target_cols);
  Plane<T> out(target_rows, target_cols);
  for (int r = 0; r < target_rows; ++r) {
    const int sr = int(int64_t(r) * src.rows() / target_rows);
    for (int c = 0; c < target_cols; ++c)
      out.at(r, c) = src.at(sr, int(int64_t(c) * src.cols() / target_cols));
  }
  return out;
}

/// upscale_nearest for masks; output stays binary.
Mask upscale_mask(const Mask& mask, int target_rows, int target_cols);

/// Bilinear upscale under the align-corners mapping src = dst*(S-1)/(T-1),
/// clamped to [0,1]. Throws DownscaleNotSupported as above.
HeatMap simple_upscale_heatmap(const HeatMap& heatmap, int target_rows, int target_cols);

}  // namespace forgescope::postprocessing

#include "forgescope/postprocessing/postprocessing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "forgescope/core/error.hpp"

namespace forgescope::postprocessing {

HeatMap zero_one_rescale(const Plane<float>& h) {
  float lo = 0.0f, hi = 0.0f;
  bool first = true;
  for (size_t i = 0; i < h.size(); ++i) {
    const float v = h.data()[i];
    if (!std::isfinite(v)) raise(ErrorCode::NonFiniteInput, "non-finite value in heatmap");
    if (first) {
      lo = hi = v;
      first = false;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  HeatMap out(h.rows(), h.cols());
  if (hi == lo) return out;
  const float range = hi - lo;
  for (size_t i = 0; i < h.size(); ++i)
    out.data()[i] = std::clamp((h.data()[i] - lo) / range, 0.0f, 1.0f);
  return out;
}

namespace detail {

void check_upscale(int src_rows, int src_cols, int target_rows, int target_cols) {
  if (target_rows < src_rows || target_cols < src_cols)
    raise(ErrorCode::DownscaleNotSupported,
          std::to_string(src_rows) + "x" + std::to_string(src_cols) + " -> " +
              std::to_string(target_rows) + "x" + std::to_string(target_cols) +
              "; trim instead");
}

}  // namespace detail

Mask upscale_mask(const Mask& mask, int target_rows, int target_cols) {
  return upscale_nearest(mask, target_rows, target_cols);
}

HeatMap simple_upscale_heatmap(const HeatMap& heatmap, int target_rows, int target_cols) {
  detail::check_upscale(heatmap.rows(), heatmap.cols(), target_rows, target_cols);
  HeatMap out(target_rows, target_cols);
  const auto src_of = [](int dst, int src_n, int dst_n) {
    return dst_n == 1 ? 0.0 : double(dst) * (src_n - 1) / (dst_n - 1);
  };
  for (int r = 0; r < target_rows; ++r) {
    const double sr = src_of(r, heatmap.rows(), target_rows);
    const int r0 = int(sr);
    const int r1 = std::min(r0 + 1, heatmap.rows() - 1);
    const double fr = sr - r0;
    for (int c = 0; c < target_cols; ++c) {
      const double sc = src_of(c, heatmap.cols(), target_cols);
      const int c0 = int(sc);
      const int c1 = std::min(c0 + 1, heatmap.cols() - 1);
      const double fc = sc - c0;
      const double top = heatmap.at(r0, c0) * (1.0 - fc) + heatmap.at(r0, c1) * fc;
      const double bot = heatmap.at(r1, c0) * (1.0 - fc) + heatmap.at(r1, c1) * fc;
      out.at(r, c) = float(std::clamp(top * (1.0 - fr) + bot * fr, 0.0, 1.0));
    }
  }
  return out;
}

}  // namespace forgescope::postprocessing

#include "forgescope/metrics/confusion.hpp"

#include <cmath>
#include <string>

#include "forgescope/core/error.hpp"

namespace forgescope::metrics {

WeightedConfusion weighted_confusion(const HeatMap& heatmap, const Mask& mask) {
  if (!(heatmap.rows() == mask.rows() && heatmap.cols() == mask.cols()))
    raise(ErrorCode::ShapeMismatch, "heatmap " + std::to_string(heatmap.rows()) + "x" +
                                        std::to_string(heatmap.cols()) + " vs mask " +
                                        std::to_string(mask.rows()) + "x" +
                                        std::to_string(mask.cols()));
  WeightedConfusion c;
  const float* h = heatmap.data();
  const uint8_t* m = mask.data();
  const size_t n = heatmap.size();
  for (size_t i = 0; i < n; ++i) {
    const double hv = h[i];
    if (!(hv >= 0.0 && hv <= 1.0))
      raise(ErrorCode::RangeError, "heatmap value " + std::to_string(hv) + " outside [0,1]");
    if (m[i] > 1)
      raise(ErrorCode::RangeError, "mask value " + std::to_string(int(m[i])) + " not binary");
    if (m[i]) {
      c.tp += hv;
      c.fn += 1.0 - hv;
    } else {
      c.fp += hv;
      c.tn += 1.0 - hv;
    }
  }
  return c;
}

WeightedConfusion detection_confusion(double score, int label) {
  if (!(score >= 0.0 && score <= 1.0))
    raise(ErrorCode::RangeError, "detection score " + std::to_string(score) + " outside [0,1]");
  if (label != 0 && label != 1)
    raise(ErrorCode::RangeError, "detection label must be 0 or 1");
  WeightedConfusion c;
  if (label) {
    c.tp = score;
    c.fn = 1.0 - score;
  } else {
    c.fp = score;
    c.tn = 1.0 - score;
  }
  return c;
}

double score(const WeightedConfusion& c, ScoreKind kind) {
  switch (kind) {
    case ScoreKind::F1: {
      const double denom = 2.0 * c.tp + c.fn + c.fp;
      return denom == 0.0 ? 0.0 : 2.0 * c.tp / denom;
    }
    case ScoreKind::Iou: {
      const double denom = c.tp + c.fp + c.fn;
      return denom == 0.0 ? 0.0 : c.tp / denom;
    }
    case ScoreKind::Mcc: {
      const double f1 = c.tp + c.fp;
      const double f2 = c.tp + c.fn;
      const double f3 = c.tn + c.fp;
      const double f4 = c.tn + c.fn;
      if (f1 == 0.0 || f2 == 0.0 || f3 == 0.0 || f4 == 0.0) return 0.0;
      return (c.tp * c.tn - c.fp * c.fn) / std::sqrt(f1 * f2 * f3 * f4);
    }
    case ScoreKind::Precision: {
      const double denom = c.tp + c.fp;
      return denom == 0.0 ? 0.0 : c.tp / denom;
    }
    case ScoreKind::Tpr: {
      const double denom = c.tp + c.fn;
      return denom == 0.0 ? 0.0 : c.tp / denom;
    }
    case ScoreKind::Fpr: {
      const double denom = c.tn + c.fp;
      return denom == 0.0 ? 0.0 : c.fp / denom;
    }
  }
  return 0.0;
}

Mask threshold_heatmap(const HeatMap& heatmap, float threshold) {
  Mask mask(heatmap.rows(), heatmap.cols());
  const float* h = heatmap.data();
  uint8_t* m = mask.data();
  for (size_t i = 0; i < heatmap.size(); ++i) m[i] = h[i] >= threshold ? 1 : 0;
  return mask;
}

}  // namespace forgescope::metrics

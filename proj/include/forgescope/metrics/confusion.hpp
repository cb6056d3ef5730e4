#pragma once

#include "forgescope/core/plane.hpp"

namespace forgescope::metrics {

/// Real-valued confusion counts. For a heatmap H (per-pixel forgery
/// probability) against a binary ground-truth mask M:
///   tp = sum H*M,  fp = sum (1-M)*H,  tn = sum (1-H)*(1-M),  fn = sum M*(1-H)
/// so tp+fp+tn+fn always equals the pixel count, and sums over images add
/// componentwise.
struct WeightedConfusion {
  double tp = 0.0;
  double fp = 0.0;
  double tn = 0.0;
  double fn = 0.0;

  double total() const { return tp + fp + tn + fn; }

  WeightedConfusion& operator+=(const WeightedConfusion& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }

  friend WeightedConfusion operator+(WeightedConfusion a, const WeightedConfusion& b) {
    a += b;
    return a;
  }
};

/// Accumulates the four weighted sums over one heatmap/mask pair.
/// Throws ShapeMismatch (different dims) or RangeError (H outside [0,1],
/// M not in {0,1}).
WeightedConfusion weighted_confusion(const HeatMap& heatmap, const Mask& mask);

/// One image's contribution to a detection-task confusion: the per-image
/// score plays the role of a single-pixel heatmap against the binary
/// forged/pristine label.
WeightedConfusion detection_confusion(double score, int label);

enum class ScoreKind { F1, Iou, Mcc, Precision, Tpr, Fpr };

/// Scalar score from a confusion. Zero-denominator rule: f1/iou/precision/
/// tpr/fpr are 0 when their denominator is 0; mcc is 0 when any factor of
/// its denominator product is 0.
double score(const WeightedConfusion& c, ScoreKind kind);

/// mask(x) = 1 iff H(x) >= threshold.
Mask threshold_heatmap(const HeatMap& heatmap, float threshold = 0.5f);

}  // namespace forgescope::metrics

#include "forgescope/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "forgescope/core/error.hpp"

namespace forgescope::metrics {

namespace {

// Shared by roc_auroc, auroc and the per-image path of mauroc. Groups tied
// scores into a single threshold step, which makes the trapezoid equal the
// midrank statistic P(s+ > s-) + 0.5 P(tie).
double auroc_impl(const std::vector<double>& scores, const std::vector<int>& labels,
                  long pos, long neg, RocCurve* curve) {
  const size_t n = scores.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  if (curve) {
    curve->points.clear();
    curve->points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  }
  double area2 = 0.0;  // twice the unnormalized area, in count units
  long tp = 0, fp = 0;
  size_t i = 0;
  while (i < n) {
    const double s = scores[order[i]];
    const long prev_tp = tp, prev_fp = fp;
    while (i < n && scores[order[i]] == s) {
      if (labels[order[i]]) ++tp; else ++fp;
      ++i;
    }
    area2 += double(fp - prev_fp) * double(tp + prev_tp);
    if (curve) curve->points.push_back({double(fp) / neg, double(tp) / pos, s});
  }
  return area2 / (2.0 * double(pos) * double(neg));
}

void count_classes(const std::vector<int>& labels, long& pos, long& neg) {
  pos = neg = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) raise(ErrorCode::RangeError, "label must be 0 or 1");
    if (l) ++pos; else ++neg;
  }
}

}  // namespace

std::pair<RocCurve, double> roc_auroc(const std::vector<double>& scores,
                                      const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    raise(ErrorCode::ShapeMismatch, "scores/labels length mismatch");
  long pos, neg;
  count_classes(labels, pos, neg);
  if (pos == 0 || neg == 0)
    raise(ErrorCode::SingleClass,
          "roc needs both classes, got " + std::to_string(pos) + " positive / " +
              std::to_string(neg) + " negative");
  RocCurve curve;
  double area = auroc_impl(scores, labels, pos, neg, &curve);
  return {std::move(curve), area};
}

std::optional<double> auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    raise(ErrorCode::ShapeMismatch, "scores/labels length mismatch");
  long pos, neg;
  count_classes(labels, pos, neg);
  if (pos == 0 || neg == 0) return std::nullopt;
  return auroc_impl(scores, labels, pos, neg, nullptr);
}

// ---------------------------------------------------------------------------

void MetricAccumulator::update(const HeatMap& heatmap, const Mask& mask) {
  update(weighted_confusion(heatmap, mask));
}

void MetricAccumulator::update(const WeightedConfusion& confusion) {
  if (mode_ == AggregationMode::PerImageMean)
    score_sum_ += score(confusion, kind_);
  else
    pooled_ += confusion;
  ++count_;
}

void MetricAccumulator::merge(const MetricAccumulator& other) {
  if (other.kind_ != kind_ || other.mode_ != mode_)
    raise(ErrorCode::InvalidConfig, "merging accumulators of different kind or mode");
  score_sum_ += other.score_sum_;
  pooled_ += other.pooled_;
  count_ += other.count_;
}

double MetricAccumulator::compute() const {
  if (count_ == 0) raise(ErrorCode::EmptyAccumulator, "no pairs streamed");
  if (mode_ == AggregationMode::PerImageMean) return score_sum_ / double(count_);
  return score(pooled_, kind_);
}

void MeanAurocAccumulator::update(const HeatMap& heatmap, const Mask& mask) {
  if (!heatmap.same_shape(mask))
    raise(ErrorCode::ShapeMismatch, "heatmap/mask shape mismatch");
  const size_t n = heatmap.size();
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  const float* h = heatmap.data();
  const uint8_t* m = mask.data();
  long pos = 0;
  for (size_t i = 0; i < n; ++i) {
    scores[i] = h[i];
    labels[i] = m[i] ? 1 : 0;
    pos += labels[i];
  }
  const long neg = long(n) - pos;
  if (pos == 0 || neg == 0) {
    ++skipped_;
    return;
  }
  auroc_sum_ += auroc_impl(scores, labels, pos, neg, nullptr);
  ++evaluated_;
}

void MeanAurocAccumulator::merge(const MeanAurocAccumulator& other) {
  auroc_sum_ += other.auroc_sum_;
  evaluated_ += other.evaluated_;
  skipped_ += other.skipped_;
}

double MeanAurocAccumulator::compute() const {
  if (evaluated_ == 0)
    raise(ErrorCode::AllSkipped,
          "no image had both classes (" + std::to_string(skipped_) + " skipped)");
  return auroc_sum_ / double(evaluated_);
}

// ---------------------------------------------------------------------------
// Registry

namespace {

// Plain f1/iou/... on a dataset: binarize at 0.5 (localization) or treat the
// detection score as a 0.5-thresholded label, pool integer counts, score once.
class ThresholdPooledMetric : public Metric {
public:
  ThresholdPooledMetric(std::string name, ScoreKind kind)
      : name_(std::move(name)), kind_(kind) {}

  const std::string& name() const override { return name_; }
  MetricInput input() const override { return MetricInput::Either; }

  void update_localization(const HeatMap& heatmap, const Mask& mask) override {
    if (!heatmap.same_shape(mask))
      raise(ErrorCode::ShapeMismatch, "heatmap/mask shape mismatch");
    const float* h = heatmap.data();
    const uint8_t* m = mask.data();
    for (size_t i = 0; i < heatmap.size(); ++i) {
      const bool p = h[i] >= 0.5f;
      if (m[i]) (p ? pooled_.tp : pooled_.fn) += 1.0;
      else (p ? pooled_.fp : pooled_.tn) += 1.0;
    }
    ++count_;
  }

  void update_detection(double score_value, int label) override {
    const bool p = score_value >= 0.5;
    if (label) (p ? pooled_.tp : pooled_.fn) += 1.0;
    else (p ? pooled_.fp : pooled_.tn) += 1.0;
    ++count_;
  }

  std::optional<double> compute() const override {
    if (count_ == 0) return std::nullopt;
    return score(pooled_, kind_);
  }

private:
  std::string name_;
  ScoreKind kind_;
  WeightedConfusion pooled_;
  long count_ = 0;
};

class WeightedMetric : public Metric {
public:
  WeightedMetric(std::string name, ScoreKind kind, AggregationMode mode)
      : name_(std::move(name)), acc_(kind, mode) {}

  const std::string& name() const override { return name_; }
  MetricInput input() const override {
    // v1 averages per-image scores; with one scalar per image that collapses
    // to nothing meaningful, so v1 consumes localization pairs only.
    return acc_.mode() == AggregationMode::PerImageMean ? MetricInput::Localization
                                                        : MetricInput::Either;
  }

  void update_localization(const HeatMap& heatmap, const Mask& mask) override {
    acc_.update(heatmap, mask);
  }

  void update_detection(double score_value, int label) override {
    if (acc_.mode() == AggregationMode::PerImageMean) return;
    acc_.update(detection_confusion(score_value, label));
  }

  std::optional<double> compute() const override {
    if (acc_.count() == 0) return std::nullopt;
    return acc_.compute();
  }

private:
  std::string name_;
  MetricAccumulator acc_;
};

// Dataset AUROC. Localization pools every pixel of every image; the pixel
// scores go into a 65536-bin histogram so memory stays flat. Heatmaps that
// only take values k/65535 (every 8- or 16-bit derived map) are scored
// exactly; anything else is quantized to 1/65535. Detection keeps the exact
// per-image score list.
class AurocMetric : public Metric {
public:
  static constexpr int kBins = 65536;

  explicit AurocMetric(std::string name) : name_(std::move(name)) {}

  const std::string& name() const override { return name_; }
  MetricInput input() const override { return MetricInput::Either; }

  void update_localization(const HeatMap& heatmap, const Mask& mask) override {
    if (!heatmap.same_shape(mask))
      raise(ErrorCode::ShapeMismatch, "heatmap/mask shape mismatch");
    if (pos_.empty()) {
      pos_.assign(kBins, 0);
      neg_.assign(kBins, 0);
    }
    const float* h = heatmap.data();
    const uint8_t* m = mask.data();
    for (size_t i = 0; i < heatmap.size(); ++i) {
      const double hv = h[i];
      if (!(hv >= 0.0 && hv <= 1.0))
        raise(ErrorCode::RangeError, "heatmap value outside [0,1]");
      const int b = int(std::lround(hv * (kBins - 1)));
      if (m[i]) ++pos_[b]; else ++neg_[b];
    }
  }

  void update_detection(double score_value, int label) override {
    det_scores_.push_back(score_value);
    det_labels_.push_back(label);
  }

  std::optional<double> compute() const override {
    if (!det_scores_.empty()) return auroc(det_scores_, det_labels_);
    if (pos_.empty()) return std::nullopt;
    double total_pos = 0.0, total_neg = 0.0;
    for (int b = 0; b < kBins; ++b) {
      total_pos += double(pos_[b]);
      total_neg += double(neg_[b]);
    }
    if (total_pos == 0.0 || total_neg == 0.0) return std::nullopt;
    double area2 = 0.0, tp = 0.0, fp = 0.0;
    for (int b = kBins - 1; b >= 0; --b) {
      if (pos_[b] == 0 && neg_[b] == 0) continue;
      const double dtp = double(pos_[b]), dfp = double(neg_[b]);
      area2 += dfp * (2.0 * tp + dtp);
      tp += dtp;
      fp += dfp;
    }
    return area2 / (2.0 * total_pos * total_neg);
  }

private:
  std::string name_;
  std::vector<uint64_t> pos_, neg_;
  std::vector<double> det_scores_;
  std::vector<int> det_labels_;
};

class MaurocMetric : public Metric {
public:
  explicit MaurocMetric(std::string name) : name_(std::move(name)) {}

  const std::string& name() const override { return name_; }
  MetricInput input() const override { return MetricInput::Localization; }

  void update_localization(const HeatMap& heatmap, const Mask& mask) override {
    acc_.update(heatmap, mask);
  }
  void update_detection(double, int) override {}

  std::optional<double> compute() const override {
    if (acc_.evaluated() == 0) return std::nullopt;
    return acc_.compute();
  }
  long skipped() const override { return acc_.skipped(); }

private:
  std::string name_;
  MeanAurocAccumulator acc_;
};

// Curve-valued; reports carry numbers, so its report value is always null.
// The curve itself is available through roc_auroc().
class RocMetric : public Metric {
public:
  explicit RocMetric(std::string name) : name_(std::move(name)) {}

  const std::string& name() const override { return name_; }
  MetricInput input() const override { return MetricInput::Either; }
  void update_localization(const HeatMap&, const Mask&) override {}
  void update_detection(double, int) override {}
  std::optional<double> compute() const override { return std::nullopt; }

private:
  std::string name_;
};

struct RegistryEntry {
  const char* name;
  std::function<std::unique_ptr<Metric>(const std::string&)> make;
};

const std::vector<RegistryEntry>& registry() {
  auto plain = [](ScoreKind k) {
    return [k](const std::string& n) -> std::unique_ptr<Metric> {
      return std::make_unique<ThresholdPooledMetric>(n, k);
    };
  };
  auto weighted = [](ScoreKind k, AggregationMode m) {
    return [k, m](const std::string& n) -> std::unique_ptr<Metric> {
      return std::make_unique<WeightedMetric>(n, k, m);
    };
  };
  static const std::vector<RegistryEntry> entries = {
      {"f1", plain(ScoreKind::F1)},
      {"iou", plain(ScoreKind::Iou)},
      {"mcc", plain(ScoreKind::Mcc)},
      {"precision", plain(ScoreKind::Precision)},
      {"tpr", plain(ScoreKind::Tpr)},
      {"fpr", plain(ScoreKind::Fpr)},
      {"auroc", [](const std::string& n) -> std::unique_ptr<Metric> {
         return std::make_unique<AurocMetric>(n);
       }},
      {"mauroc", [](const std::string& n) -> std::unique_ptr<Metric> {
         return std::make_unique<MaurocMetric>(n);
       }},
      {"roc", [](const std::string& n) -> std::unique_ptr<Metric> {
         return std::make_unique<RocMetric>(n);
       }},
      {"f1_weighted_v1", weighted(ScoreKind::F1, AggregationMode::PerImageMean)},
      {"f1_weighted_v2", weighted(ScoreKind::F1, AggregationMode::Pooled)},
      {"iou_weighted_v1", weighted(ScoreKind::Iou, AggregationMode::PerImageMean)},
      {"iou_weighted_v2", weighted(ScoreKind::Iou, AggregationMode::Pooled)},
      {"mcc_weighted_v1", weighted(ScoreKind::Mcc, AggregationMode::PerImageMean)},
      {"mcc_weighted_v2", weighted(ScoreKind::Mcc, AggregationMode::Pooled)},
  };
  return entries;
}

const RegistryEntry* find_entry(const std::string& name) {
  for (const auto& e : registry())
    if (name == e.name) return &e;
  return nullptr;
}

}  // namespace

std::vector<std::unique_ptr<Metric>> MetricCollection::instantiate() const {
  std::vector<std::unique_ptr<Metric>> out;
  out.reserve(names_.size());
  for (const auto& n : names_) {
    const RegistryEntry* e = find_entry(n);
    if (!e) raise(ErrorCode::UnknownMetric, "unknown metric '" + n + "'");
    out.push_back(e->make(n));
  }
  return out;
}

MetricCollection load_metrics(const std::vector<std::string>& names) {
  for (const auto& n : names)
    if (!find_entry(n)) raise(ErrorCode::UnknownMetric, "unknown metric '" + n + "'");
  return MetricCollection(names);
}

const std::vector<std::string>& registered_metrics() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : registry()) v.emplace_back(e.name);
    return v;
  }();
  return names;
}

}  // namespace forgescope::metrics

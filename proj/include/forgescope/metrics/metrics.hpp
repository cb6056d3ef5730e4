#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "forgescope/metrics/confusion.hpp"

namespace forgescope::metrics {

// ---------------------------------------------------------------------------
// ROC / AUROC

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // ascending fpr, thresholds descending
};

/// ROC over thresholds at all distinct scores plus trapezoidal AUROC;
/// ties share a rank, so the area equals P(s+ > s-) + 0.5 P(tie).
/// Throws SingleClass unless both labels occur.
std::pair<RocCurve, double> roc_auroc(const std::vector<double>& scores,
                                      const std::vector<int>& labels);

/// AUROC alone; absent instead of throwing when only one class is present.
std::optional<double> auroc(const std::vector<double>& scores,
                            const std::vector<int>& labels);

// ---------------------------------------------------------------------------
// Aggregation over a dataset

enum class AggregationMode {
  PerImageMean,  // v1: score each pair, average the scores
  Pooled,        // v2: sum confusions, score the total
};

/// Streams (heatmap, mask) pairs and reduces them under v1 or v2 semantics.
/// Single-writer; parallel evaluation merges per-worker accumulators with
/// merge(), which is associative and order-independent.
class MetricAccumulator {
public:
  MetricAccumulator(ScoreKind kind, AggregationMode mode) : kind_(kind), mode_(mode) {}

  void update(const HeatMap& heatmap, const Mask& mask);
  void update(const WeightedConfusion& confusion);
  void merge(const MetricAccumulator& other);

  /// Throws EmptyAccumulator if nothing was streamed.
  double compute() const;

  ScoreKind kind() const { return kind_; }
  AggregationMode mode() const { return mode_; }
  long count() const { return count_; }

private:
  ScoreKind kind_;
  AggregationMode mode_;
  double score_sum_ = 0.0;  // v1 state
  WeightedConfusion pooled_;  // v2 state
  long count_ = 0;
};

/// Mean of per-image AUROCs, thresholding each heatmap against its own mask.
/// Images whose mask holds a single class are skipped and counted.
class MeanAurocAccumulator {
public:
  void update(const HeatMap& heatmap, const Mask& mask);
  void merge(const MeanAurocAccumulator& other);

  /// Throws AllSkipped when every image was single-class (or none streamed).
  double compute() const;

  long evaluated() const { return evaluated_; }
  long skipped() const { return skipped_; }

private:
  double auroc_sum_ = 0.0;
  long evaluated_ = 0;
  long skipped_ = 0;
};

// ---------------------------------------------------------------------------
// Registry / factory

/// What a metric consumes when evaluated per output type by the benchmark.
enum class MetricInput {
  Localization,  // per-image (heatmap-or-mask, ground truth mask)
  Detection,     // per-image (score, label)
  Either,
};

/// One stateful evaluator, instantiated per (metric, output type).
class Metric {
public:
  virtual ~Metric() = default;
  virtual const std::string& name() const = 0;
  virtual MetricInput input() const = 0;
  virtual void update_localization(const HeatMap& heatmap, const Mask& mask) = 0;
  virtual void update_detection(double score, int label) = 0;
  /// nullopt when the metric is undefined for what was streamed (single
  /// class, curve-valued, or not applicable to the output type).
  virtual std::optional<double> compute() const = 0;
  /// Updates this metric refused to use (mauroc: single-class masks).
  virtual long skipped() const { return 0; }
};

/// Ordered set of metric names checked against the registry.
class MetricCollection {
public:
  explicit MetricCollection(std::vector<std::string> names) : names_(std::move(names)) {}

  const std::vector<std::string>& names() const { return names_; }
  size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }

  /// Fresh evaluators, one per name, in request order.
  std::vector<std::unique_ptr<Metric>> instantiate() const;

private:
  std::vector<std::string> names_;
};

/// Factory: validates every name against the registry (UnknownMetric names
/// the offender) and returns the collection in request order.
MetricCollection load_metrics(const std::vector<std::string>& names);

const std::vector<std::string>& registered_metrics();

}  // namespace forgescope::metrics

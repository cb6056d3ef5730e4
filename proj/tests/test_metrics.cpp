#include <doctest.h>

#include <random>

#include "forgescope/metrics/metrics.hpp"
#include "support/checks.hpp"
#include "support/oracles.hpp"

using namespace forgescope;
using namespace forgescope::metrics;
using testsupport::NaiveConfusion;
using testsupport::naive_confusion;
using testsupport::pair_count_auroc;

namespace {

struct RandomPair {
  HeatMap h;
  Mask m;
};

RandomPair random_pair(std::mt19937& rng, int max_dim, bool binary_heat = false) {
  std::uniform_int_distribution<int> dim(1, max_dim);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  std::uniform_int_distribution<int> bit(0, 1);
  RandomPair p;
  const int rows = dim(rng), cols = dim(rng);
  p.h = HeatMap(rows, cols);
  p.m = Mask(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      p.h.at(r, c) = binary_heat ? float(bit(rng)) : unit(rng);
      p.m.at(r, c) = uint8_t(bit(rng));
    }
  }
  return p;
}

constexpr double kTol = 1e-9;

bool close(double a, double b, double tol = kTol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("weighted confusion on a worked example") {
  const HeatMap h = HeatMap::from_data(2, 2, {1.0f, 0.5f, 0.25f, 0.0f});
  const Mask m = Mask::from_data(2, 2, {1, 1, 0, 0});
  const WeightedConfusion c = weighted_confusion(h, m);
  CHECK(c.tp == doctest::Approx(1.5).epsilon(kTol));
  CHECK(c.fn == doctest::Approx(0.5).epsilon(kTol));
  CHECK(c.fp == doctest::Approx(0.25).epsilon(kTol));
  CHECK(c.tn == doctest::Approx(1.75).epsilon(kTol));
  CHECK(score(c, ScoreKind::F1) == doctest::Approx(0.8).epsilon(kTol));
  CHECK(score(c, ScoreKind::Iou) == doctest::Approx(2.0 / 3.0).epsilon(kTol));
  CHECK(score(c, ScoreKind::Mcc) == doctest::Approx(2.5 / std::sqrt(15.75)).epsilon(kTol));
  CHECK(score(c, ScoreKind::Precision) == doctest::Approx(1.5 / 1.75).epsilon(kTol));
  CHECK(score(c, ScoreKind::Tpr) == doctest::Approx(0.75).epsilon(kTol));
  CHECK(score(c, ScoreKind::Fpr) == doctest::Approx(0.125).epsilon(kTol));
}

TEST_CASE("weighted confusion agrees with the naive oracle") {
  std::mt19937 rng(2024);
  for (int i = 0; i < 100; ++i) {
    const RandomPair p = random_pair(rng, 32);
    const WeightedConfusion c = weighted_confusion(p.h, p.m);
    const NaiveConfusion n = naive_confusion(p.h, p.m);
    CHECK(close(c.tp, n.tp));
    CHECK(close(c.fp, n.fp));
    CHECK(close(c.tn, n.tn));
    CHECK(close(c.fn, n.fn));
    CHECK(close(c.total(), double(p.h.size())));
  }
}

TEST_CASE("binary heatmaps give exact integer counts") {
  std::mt19937 rng(7);
  for (int i = 0; i < 50; ++i) {
    const RandomPair p = random_pair(rng, 24, true);
    const WeightedConfusion c = weighted_confusion(p.h, p.m);
    long tp = 0, fp = 0, tn = 0, fn = 0;
    for (int r = 0; r < p.h.rows(); ++r) {
      for (int col = 0; col < p.h.cols(); ++col) {
        const bool hv = p.h.at(r, col) != 0.0f, mv = p.m.at(r, col) != 0;
        (hv ? (mv ? tp : fp) : (mv ? fn : tn))++;
      }
    }
    CHECK(c.tp == double(tp));
    CHECK(c.fp == double(fp));
    CHECK(c.tn == double(tn));
    CHECK(c.fn == double(fn));
  }
}

TEST_CASE("zero denominators score zero") {
  WeightedConfusion none;
  none.tn = 5;
  for (ScoreKind k : {ScoreKind::F1, ScoreKind::Iou, ScoreKind::Mcc,
                      ScoreKind::Precision, ScoreKind::Tpr, ScoreKind::Fpr})
    CHECK(score(none, k) == 0.0);

  WeightedConfusion all;
  all.tp = 3;
  CHECK(score(all, ScoreKind::F1) == 1.0);
  CHECK(score(all, ScoreKind::Fpr) == 0.0);
  CHECK(score(all, ScoreKind::Mcc) == 0.0);  // tn+fp factor is zero
}

TEST_CASE("confusion input validation") {
  const Mask m = Mask::from_data(1, 2, {0, 1});
  CHECK_RAISES(ErrorCode::ShapeMismatch,
               weighted_confusion(HeatMap(2, 2, 0.5f), m));
  CHECK_RAISES(ErrorCode::RangeError,
               weighted_confusion(HeatMap::from_data(1, 2, {0.5f, 1.5f}), m));
  CHECK_RAISES(ErrorCode::RangeError,
               weighted_confusion(HeatMap::from_data(1, 2, {-0.1f, 0.5f}), m));
  CHECK_RAISES(ErrorCode::RangeError,
               weighted_confusion(HeatMap(1, 2, 0.5f), Mask::from_data(1, 2, {0, 2})));
}

TEST_CASE("detection confusion splits the score by label") {
  const WeightedConfusion pos = detection_confusion(0.7, 1);
  CHECK(pos.tp == doctest::Approx(0.7));
  CHECK(pos.fn == doctest::Approx(0.3));
  CHECK(pos.fp == 0.0);
  CHECK(pos.tn == 0.0);
  const WeightedConfusion neg = detection_confusion(0.7, 0);
  CHECK(neg.fp == doctest::Approx(0.7));
  CHECK(neg.tn == doctest::Approx(0.3));
  CHECK(neg.tp == 0.0);
  CHECK(neg.fn == 0.0);
}

TEST_CASE("v1 and v2 aggregation on the two-image example") {
  const HeatMap h1 = HeatMap::from_data(1, 1, {1.0f});
  const Mask m1 = Mask::from_data(1, 1, {1});
  const HeatMap h2 = HeatMap::from_data(1, 4, {0.2f, 0.2f, 0.2f, 0.2f});
  const Mask m2 = Mask::from_data(1, 4, {1, 0, 0, 0});

  MetricAccumulator v1(ScoreKind::F1, AggregationMode::PerImageMean);
  MetricAccumulator v2(ScoreKind::F1, AggregationMode::Pooled);
  for (auto* acc : {&v1, &v2}) {
    acc->update(h1, m1);
    acc->update(h2, m2);
  }
  CHECK(v1.compute() == doctest::Approx(0.611111).epsilon(1e-6));
  CHECK(v2.compute() == doctest::Approx(0.631579).epsilon(1e-6));
}

TEST_CASE("single image makes v1 equal v2") {
  std::mt19937 rng(11);
  const RandomPair p = random_pair(rng, 16);
  for (ScoreKind k : {ScoreKind::F1, ScoreKind::Iou}) {
    MetricAccumulator v1(k, AggregationMode::PerImageMean);
    MetricAccumulator v2(k, AggregationMode::Pooled);
    v1.update(p.h, p.m);
    v2.update(p.h, p.m);
    CHECK(close(v1.compute(), v2.compute()));
  }
}

TEST_CASE("v2 equals the score of the concatenation") {
  std::mt19937 rng(13);
  MetricAccumulator v2(ScoreKind::Iou, AggregationMode::Pooled);
  WeightedConfusion pooled;
  for (int i = 0; i < 5; ++i) {
    const RandomPair p = random_pair(rng, 20);
    v2.update(p.h, p.m);
    pooled += weighted_confusion(p.h, p.m);
  }
  CHECK(close(v2.compute(), score(pooled, ScoreKind::Iou)));
}

TEST_CASE("accumulator merge matches streaming") {
  std::mt19937 rng(17);
  for (AggregationMode mode : {AggregationMode::PerImageMean, AggregationMode::Pooled}) {
    MetricAccumulator whole(ScoreKind::F1, mode);
    MetricAccumulator left(ScoreKind::F1, mode);
    MetricAccumulator right(ScoreKind::F1, mode);
    for (int i = 0; i < 8; ++i) {
      const RandomPair p = random_pair(rng, 12);
      whole.update(p.h, p.m);
      (i < 4 ? left : right).update(p.h, p.m);
    }
    left.merge(right);
    CHECK(close(left.compute(), whole.compute()));
    CHECK(left.count() == whole.count());
  }

  MetricAccumulator a(ScoreKind::F1, AggregationMode::Pooled);
  MetricAccumulator b(ScoreKind::Iou, AggregationMode::Pooled);
  CHECK_RAISES(ErrorCode::InvalidConfig, a.merge(b));
  MetricAccumulator c(ScoreKind::F1, AggregationMode::PerImageMean);
  CHECK_RAISES(ErrorCode::InvalidConfig, a.merge(c));
}

TEST_CASE("empty accumulator refuses to compute") {
  MetricAccumulator acc(ScoreKind::F1, AggregationMode::Pooled);
  CHECK_RAISES(ErrorCode::EmptyAccumulator, acc.compute());
}

TEST_CASE("auroc on the three reference examples") {
  CHECK(roc_auroc({0.1, 0.9}, {0, 1}).second == 1.0);
  CHECK(roc_auroc({0.5, 0.5}, {0, 1}).second == 0.5);
  CHECK(roc_auroc({0.2, 0.4, 0.6, 0.8}, {0, 1, 0, 1}).second == 0.75);
}

TEST_CASE("auroc agrees with pair counting on random sets") {
  std::mt19937 rng(19);
  std::uniform_int_distribution<int> len(2, 60);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> bit(0, 1);
  std::uniform_int_distribution<int> coarse(0, 4);
  int evaluated = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = len(rng);
    std::vector<double> scores(static_cast<size_t>(n));
    std::vector<int> labels(static_cast<size_t>(n));
    const bool ties = i % 2 == 0;  // coarse grid forces score ties
    for (int j = 0; j < n; ++j) {
      scores[size_t(j)] = ties ? coarse(rng) / 4.0 : unit(rng);
      labels[size_t(j)] = bit(rng);
    }
    const double want = pair_count_auroc(scores, labels);
    const std::optional<double> got = auroc(scores, labels);
    if (want < 0.0) {
      CHECK(!got.has_value());
      CHECK_RAISES(ErrorCode::SingleClass, roc_auroc(scores, labels));
    } else {
      REQUIRE(got.has_value());
      CHECK(close(*got, want));
      ++evaluated;
    }
  }
  CHECK(evaluated > 20);
}

TEST_CASE("auroc is invariant under increasing transforms") {
  const std::vector<double> scores = {0.1, 0.35, 0.35, 0.7, 0.9};
  const std::vector<int> labels = {0, 1, 0, 0, 1};
  std::vector<double> warped;
  for (double s : scores) warped.push_back(s * s * s + 2.0);
  CHECK(close(roc_auroc(scores, labels).second, roc_auroc(warped, labels).second));
}

TEST_CASE("roc curve is monotone and spans the unit square") {
  const auto [curve, area] = roc_auroc({0.2, 0.4, 0.6, 0.8, 0.4}, {0, 1, 0, 1, 0});
  REQUIRE(curve.points.size() >= 2);
  CHECK(curve.points.front().fpr == 0.0);
  CHECK(curve.points.front().tpr == 0.0);
  CHECK(curve.points.back().fpr == 1.0);
  CHECK(curve.points.back().tpr == 1.0);
  for (size_t i = 1; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
    CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
    CHECK(curve.points[i].threshold <= curve.points[i - 1].threshold);
  }
  CHECK(area >= 0.0);
  CHECK(area <= 1.0);
}

TEST_CASE("mean auroc skips single-class masks") {
  MeanAurocAccumulator acc;
  // Perfectly ranked image: auroc 1.
  acc.update(HeatMap::from_data(1, 2, {0.9f, 0.1f}), Mask::from_data(1, 2, {1, 0}));
  // All-tied image: auroc 0.5.
  acc.update(HeatMap(1, 4, 0.3f), Mask::from_data(1, 4, {1, 0, 1, 0}));
  // Single-class mask: skipped.
  acc.update(HeatMap(1, 3, 0.8f), Mask(1, 3, 0));
  CHECK(acc.evaluated() == 2);
  CHECK(acc.skipped() == 1);
  CHECK(acc.compute() == doctest::Approx(0.75).epsilon(kTol));

  MeanAurocAccumulator empty;
  CHECK_RAISES(ErrorCode::AllSkipped, empty.compute());
  empty.update(HeatMap(2, 2, 0.5f), Mask(2, 2, 1));
  CHECK(empty.skipped() == 1);
  CHECK_RAISES(ErrorCode::AllSkipped, empty.compute());
}

TEST_CASE("registry lists the fifteen metrics in order") {
  const std::vector<std::string> want = {
      "f1", "iou", "mcc", "precision", "tpr", "fpr", "auroc", "mauroc", "roc",
      "f1_weighted_v1", "f1_weighted_v2", "iou_weighted_v1", "iou_weighted_v2",
      "mcc_weighted_v1", "mcc_weighted_v2"};
  CHECK(registered_metrics() == want);

  const MetricCollection two = load_metrics({"auroc", "f1"});
  CHECK(two.names() == std::vector<std::string>{"auroc", "f1"});
  const MetricCollection three =
      load_metrics({"f1_weighted_v1", "iou_weighted_v1", "mcc_weighted_v1"});
  CHECK(three.size() == 3);
  auto evaluators = three.instantiate();
  REQUIRE(evaluators.size() == 3);
  CHECK(evaluators[0]->name() == "f1_weighted_v1");

  CHECK_RAISES(ErrorCode::UnknownMetric, load_metrics({"f1", "nope"}));
}

TEST_CASE("plain metrics threshold at one half and pool integer counts") {
  auto evaluators = load_metrics({"f1"}).instantiate();
  Metric& f1 = *evaluators[0];
  CHECK(f1.input() == MetricInput::Either);
  f1.update_detection(0.7, 1);
  f1.update_detection(0.4, 1);
  f1.update_detection(0.6, 0);
  f1.update_detection(0.2, 0);
  // Thresholded predictions 1,0,1,0 -> tp=1 fn=1 fp=1 tn=1.
  REQUIRE(f1.compute().has_value());
  CHECK(*f1.compute() == doctest::Approx(0.5).epsilon(kTol));

  auto loc = load_metrics({"iou"}).instantiate();
  loc[0]->update_localization(HeatMap::from_data(1, 4, {0.9f, 0.5f, 0.49f, 0.1f}),
                              Mask::from_data(1, 4, {1, 1, 1, 0}));
  // Thresholded 1,1,0,0 -> tp=2 fn=1 fp=0.
  CHECK(*loc[0]->compute() == doctest::Approx(2.0 / 3.0).epsilon(kTol));
}

TEST_CASE("pooled auroc metric matches pair counting on quantized scores") {
  auto evaluators = load_metrics({"auroc"}).instantiate();
  Metric& m = *evaluators[0];
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> level(0, 65535);
  std::uniform_int_distribution<int> bit(0, 1);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int img = 0; img < 3; ++img) {
    HeatMap h(5, 7);
    Mask mask(5, 7);
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 7; ++c) {
        h.at(r, c) = float(level(rng)) / 65535.0f;
        mask.at(r, c) = uint8_t(bit(rng));
        scores.push_back(h.at(r, c));
        labels.push_back(mask.at(r, c));
      }
    }
    m.update_localization(h, mask);
  }
  REQUIRE(m.compute().has_value());
  CHECK(close(*m.compute(), pair_count_auroc(scores, labels), 1e-9));
}

TEST_CASE("curve valued and inapplicable metrics report null") {
  auto evaluators = load_metrics({"roc", "mauroc", "f1_weighted_v1"}).instantiate();
  Metric& roc = *evaluators[0];
  roc.update_localization(HeatMap::from_data(1, 2, {0.9f, 0.1f}),
                          Mask::from_data(1, 2, {1, 0}));
  CHECK(!roc.compute().has_value());

  Metric& mauroc = *evaluators[1];
  CHECK(mauroc.input() == MetricInput::Localization);
  mauroc.update_localization(HeatMap(2, 2, 0.4f), Mask(2, 2, 1));
  CHECK(mauroc.skipped() == 1);
  CHECK(!mauroc.compute().has_value());  // every image skipped

  CHECK(evaluators[2]->input() == MetricInput::Localization);
}

TEST_CASE("threshold heatmap uses a closed lower bound") {
  const Mask m = threshold_heatmap(HeatMap::from_data(1, 3, {0.49f, 0.5f, 0.51f}));
  CHECK(m.at(0, 0) == 0);
  CHECK(m.at(0, 1) == 1);
  CHECK(m.at(0, 2) == 1);
}

}  // TEST_SUITE

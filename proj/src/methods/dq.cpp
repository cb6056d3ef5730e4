#include <array>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "forgescope/postprocessing/postprocessing.hpp"
#include "src/methods/internal.hpp"

namespace forgescope::methods::internal {

namespace {

// Natural-order positions of the first 10 zig-zag AC frequencies.
constexpr int kFreqPos[10] = {1, 8, 16, 9, 2, 3, 10, 17, 24, 32};
constexpr int kMaxAbs = 64;     // histogram support |v| <= 64
constexpr int kMaxPeriod = 32;  // candidate periods 2..32

/// Double-quantization heatmap from raw luma DCT coefficients. Recompressing
/// a JPEG leaves comb-shaped histograms at frequencies where the first
/// quantization step exceeds the second; blocks whose coefficients sit off
/// the comb lack that history (pasted content), so higher = more suspicious.
class DqMethod : public Method {
public:
  explicit DqMethod(double min_contrast) : min_contrast_(min_contrast) {
    pipeline_.inputs = {DataMap::kDctCoefficients, DataMap::kImageSize};
    pipeline_.outputs_keys = pipeline_.inputs;
  }

  const std::string& name() const override {
    static const std::string n = "dq";
    return n;
  }

  std::vector<OutputType> output_types() const override { return {OutputType::Heatmap}; }

  const preprocessing::PipelineSpec& pipeline() const override { return pipeline_; }

  MethodOutput benchmark(const DataMap& d) const override;

private:
  double min_contrast_;
  preprocessing::PipelineSpec pipeline_;
};

/// Best periodic-template contrast over the histogram of one frequency.
/// Peaks are the multiples of the period among bins 1 <= |v| <= 64.
struct PeriodFit {
  int period = 0;
  double contrast = 0.0;
};

PeriodFit fit_period(const std::array<long, 2 * kMaxAbs + 1>& hist) {
  PeriodFit best;
  for (int p = 2; p <= kMaxPeriod; ++p) {
    double peak_sum = 0.0, off_sum = 0.0;
    long peak_n = 0, off_n = 0;
    for (int v = -kMaxAbs; v <= kMaxAbs; ++v) {
      if (v == 0) continue;
      if (std::abs(v) % p == 0) {
        peak_sum += double(hist[v + kMaxAbs]);
        ++peak_n;
      } else {
        off_sum += double(hist[v + kMaxAbs]);
        ++off_n;
      }
    }
    const double mp = peak_n > 0 ? peak_sum / double(peak_n) : 0.0;
    const double mo = off_n > 0 ? off_sum / double(off_n) : 0.0;
    const double contrast = (mp - mo) / (mp + mo + 1e-9);
    if (contrast > best.contrast) {
      best.period = p;
      best.contrast = contrast;
    }
  }
  return best;
}

/// Probability that a coefficient was quantized once only: distance to the
/// nearest comb peak, normalized to [0,1]. Zeros carry no information; both
/// histories produce them in bulk.
double posterior_single(int v, int period) {
  if (v == 0) return 0.5;
  const int m = std::abs(v) % period;
  const int dist = std::min(m, period - m);
  return 2.0 * double(dist) / double(period);
}

MethodOutput DqMethod::benchmark(const DataMap& d) const {
  const auto& dct = d.get_as<DctCoefficients>(DataMap::kDctCoefficients);
  const auto& size = d.get_as<ImageSize>(DataMap::kImageSize);
  if (dct.components.empty())
    raise(ErrorCode::MissingKey, "dct_coefficients has no components");
  const JpegComponent& luma = dct.luma();
  const int by_n = luma.blocks_y(), bx_n = luma.blocks_x();
  if (by_n <= 0 || bx_n <= 0)
    raise(ErrorCode::MissingKey, "dct_coefficients has an empty luma grid");

  // Pass 1: per-frequency histograms over all blocks, then period fits.
  std::array<PeriodFit, 10> fits;
  for (int f = 0; f < 10; ++f) {
    const int u = kFreqPos[f] / 8, v = kFreqPos[f] % 8;
    std::array<long, 2 * kMaxAbs + 1> hist{};
    for (int by = 0; by < by_n; ++by) {
      for (int bx = 0; bx < bx_n; ++bx) {
        const int c = luma.coeffs.at(8 * by + u, 8 * bx + v);
        if (c >= -kMaxAbs && c <= kMaxAbs) ++hist[c + kMaxAbs];
      }
    }
    fits[f] = fit_period(hist);
  }

  // Pass 2: block map = mean posterior over the informative frequencies.
  Plane<float> block_map(by_n, bx_n, 0.5f);
  int informative = 0;
  for (const auto& fit : fits)
    if (fit.contrast > min_contrast_) ++informative;
  if (informative > 0) {
    for (int by = 0; by < by_n; ++by) {
      for (int bx = 0; bx < bx_n; ++bx) {
        double sum = 0.0;
        for (int f = 0; f < 10; ++f) {
          if (fits[f].contrast <= min_contrast_) continue;
          const int u = kFreqPos[f] / 8, v = kFreqPos[f] % 8;
          sum += posterior_single(luma.coeffs.at(8 * by + u, 8 * bx + v), fits[f].period);
        }
        block_map.at(by, bx) = float(sum / double(informative));
      }
    }
  }

  MethodOutput out;
  out.heatmap = postprocessing::upscale_nearest(
      postprocessing::zero_one_rescale(block_map), size.height, size.width);
  return out;
}

}  // namespace

std::pair<MethodPtr, preprocessing::PipelineSpec> make_dq(const nlohmann::json& config) {
  ConfigReader reader(config);
  const double min_contrast = reader.number("min_contrast", 0.3, 0.0, 1.0);
  reader.finish();
  auto method = std::make_shared<DqMethod>(min_contrast);
  return {method, method->pipeline()};
}

}  // namespace forgescope::methods::internal

#include <algorithm>
#include <cmath>
#include <vector>

#include "forgescope/methods/nfa.hpp"
#include "forgescope/postprocessing/postprocessing.hpp"
#include "src/methods/internal.hpp"

namespace forgescope::methods::internal {

namespace {

// 3x3 Laplacian scaled by its l2 norm; on iid noise the residual keeps the
// noise std while cancelling smooth content.
constexpr double kLaplacianNorm = 4.47213595499957939;  // sqrt(20)

/// Noise-level anomaly detector. Splicing pipelines routinely smooth or
/// re-encode the pasted region, leaving it with less sensor noise than the
/// host image. Blocks whose robust noise std falls well under the median of
/// equally bright blocks are suspicious; connected runs of them are kept when
/// a binomial tail bound on the run length rules out chance.
class NoiseBlocksMethod : public Method {
public:
  NoiseBlocksMethod(long block_size, double median_ratio, long intensity_bins,
                    double nfa_epsilon)
      : block_(block_size), ratio_(median_ratio), bins_(intensity_bins),
        log10_epsilon_(std::log10(nfa_epsilon)) {
    pipeline_.transforms = {{preprocessing::TransformKind::RgbToGray, {}, {}}};
    pipeline_.inputs = {DataMap::kImage};
    pipeline_.outputs_keys = pipeline_.inputs;
  }

  const std::string& name() const override {
    static const std::string n = "noise_blocks";
    return n;
  }

  std::vector<OutputType> output_types() const override {
    return {OutputType::Mask, OutputType::Detection};
  }

  const preprocessing::PipelineSpec& pipeline() const override { return pipeline_; }

  MethodOutput benchmark(const DataMap& d) const override;

private:
  long block_;
  double ratio_;
  long bins_;
  double log10_epsilon_;
  preprocessing::PipelineSpec pipeline_;
};

float median_of(std::vector<float>& v) {
  if (v.empty()) return 0.0f;
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const float hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const float lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5f * (lo + hi);
}

MethodOutput NoiseBlocksMethod::benchmark(const DataMap& d) const {
  const Plane<float> gray = to_gray_plane(d);
  const int rows = gray.rows(), cols = gray.cols();
  const int b = int(block_);
  if (rows < 2 * b || cols < 2 * b)
    raise(ErrorCode::ImageTooSmall, "noise_blocks needs at least a 2x2 block grid");

  // Laplacian residual, defined on interior pixels only.
  Plane<float> residual(rows, cols, 0.0f);
  for (int r = 1; r < rows - 1; ++r) {
    for (int c = 1; c < cols - 1; ++c) {
      const double lap = double(gray.at(r - 1, c)) + double(gray.at(r + 1, c)) +
                         double(gray.at(r, c - 1)) + double(gray.at(r, c + 1)) -
                         4.0 * double(gray.at(r, c));
      residual.at(r, c) = float(lap / kLaplacianNorm);
    }
  }

  // Robust std and mean intensity per full block.
  const int by_n = rows / b, bx_n = cols / b;
  Plane<float> block_std(by_n, bx_n, 0.0f);
  Plane<int16_t> block_bin(by_n, bx_n, 0);
  std::vector<float> absr;
  for (int by = 0; by < by_n; ++by) {
    for (int bx = 0; bx < bx_n; ++bx) {
      absr.clear();
      double mean = 0.0;
      for (int r = by * b; r < (by + 1) * b; ++r) {
        for (int c = bx * b; c < (bx + 1) * b; ++c) {
          mean += double(gray.at(r, c));
          if (r >= 1 && r < rows - 1 && c >= 1 && c < cols - 1)
            absr.push_back(std::abs(residual.at(r, c)));
        }
      }
      mean /= double(b) * double(b);
      block_std.at(by, bx) = 1.4826f * median_of(absr) / 0.6745f;
      const long bin = std::min(bins_ - 1, long(mean * double(bins_) / 256.0));
      block_bin.at(by, bx) = int16_t(std::max(0L, bin));
    }
  }

  // Global noise model: median std per intensity bin.
  std::vector<std::vector<float>> per_bin(static_cast<size_t>(bins_));
  for (int by = 0; by < by_n; ++by)
    for (int bx = 0; bx < bx_n; ++bx)
      per_bin[size_t(block_bin.at(by, bx))].push_back(block_std.at(by, bx));
  std::vector<float> bin_median(size_t(bins_), 0.0f);
  for (size_t i = 0; i < per_bin.size(); ++i) bin_median[i] = median_of(per_bin[i]);

  Plane<uint8_t> anomalous(by_n, bx_n, 0);
  for (int by = 0; by < by_n; ++by)
    for (int bx = 0; bx < bx_n; ++bx)
      anomalous.at(by, bx) =
          block_std.at(by, bx) < ratio_ * bin_median[size_t(block_bin.at(by, bx))] ? 1 : 0;

  // Validate anomalous runs: under the null a block sits below the scaled
  // median with probability at most one half, so a region of n blocks has
  // NFA <= N_regions * 2^-n.
  const Components comps = label_components(anomalous);
  Plane<uint8_t> block_mask(by_n, bx_n, 0);
  bool any = false;
  if (comps.count > 0) {
    std::vector<long> region_n(comps.count, 0);
    for (int by = 0; by < by_n; ++by)
      for (int bx = 0; bx < bx_n; ++bx)
        if (comps.labels.at(by, bx) >= 0) ++region_n[comps.labels.at(by, bx)];
    for (int id = 0; id < comps.count; ++id) {
      const double log10_nfa = std::log10(double(comps.count)) +
                               log10_binomial_tail(region_n[id], region_n[id], 0.5);
      if (log10_nfa >= log10_epsilon_) continue;
      any = true;
      for (int by = 0; by < by_n; ++by)
        for (int bx = 0; bx < bx_n; ++bx)
          if (comps.labels.at(by, bx) == id) block_mask.at(by, bx) = 1;
    }
  }

  MethodOutput out;
  out.mask = postprocessing::upscale_mask(block_mask, rows, cols);
  out.detection = any ? 1.0 : 0.0;
  out.extras["block_std"] = std::move(block_std);
  return out;
}

}  // namespace

std::pair<MethodPtr, preprocessing::PipelineSpec> make_noise_blocks(const nlohmann::json& config) {
  ConfigReader reader(config);
  const long block_size = reader.integer("block_size", 16, 8, 1024);
  const double median_ratio = reader.number("median_ratio", 0.5, 0.0, 1.0, true);
  const long intensity_bins = reader.integer("intensity_bins", 8, 1, 64);
  const double nfa_epsilon = reader.number("nfa_epsilon", 1.0, 0.0, 1e12, true);
  reader.finish();
  auto method = std::make_shared<NoiseBlocksMethod>(block_size, median_ratio,
                                                    intensity_bins, nfa_epsilon);
  return {method, method->pipeline()};
}

}  // namespace forgescope::methods::internal

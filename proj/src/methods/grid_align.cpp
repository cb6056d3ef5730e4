#include <array>
#include <cmath>
#include <vector>

#include "forgescope/methods/nfa.hpp"
#include "src/methods/internal.hpp"

namespace forgescope::methods::internal {

namespace {

constexpr int kNone = 64;     // vote label: no origin reaches min_zeros
constexpr int kAbstain = -1;  // tie between origins, or ineligible pixel

/// 0.5*alpha(u)*cos((2m+1)u*pi/16), the orthonormal 8-point DCT-II basis.
const std::array<std::array<double, 8>, 8>& dct_basis() {
  static const auto basis = [] {
    std::array<std::array<double, 8>, 8> b{};
    for (int u = 0; u < 8; ++u) {
      const double alpha = u == 0 ? 1.0 / std::sqrt(2.0) : 1.0;
      for (int m = 0; m < 8; ++m)
        b[u][m] = 0.5 * alpha * std::cos((2 * m + 1) * u * M_PI / 16.0);
    }
    return b;
  }();
  return basis;
}

/// JPEG-grid detector. Every JPEG block quantizes most AC coefficients to
/// zero, so the DCT taken on the compression grid shows far more near-zero
/// coefficients than on any shifted grid. Each pixel votes for the best of
/// the 64 candidate origins (ties abstain, weak evidence votes "no grid");
/// connected regions disagreeing with the dominant vote are kept only if a
/// binomial tail bound on their agreement count rules out chance.
class GridAlignMethod : public Method {
public:
  GridAlignMethod(double zero_threshold, long min_zeros, double nfa_epsilon)
      : zero_threshold_(zero_threshold), min_zeros_(min_zeros),
        log10_epsilon_(std::log10(nfa_epsilon)) {
    pipeline_.transforms = {{preprocessing::TransformKind::RgbToGray, {}, {}}};
    pipeline_.inputs = {DataMap::kImage, DataMap::kImageSize};
    pipeline_.outputs_keys = pipeline_.inputs;
  }

  const std::string& name() const override {
    static const std::string n = "grid_align";
    return n;
  }

  std::vector<OutputType> output_types() const override {
    return {OutputType::Mask, OutputType::Detection};
  }

  const preprocessing::PipelineSpec& pipeline() const override { return pipeline_; }

  MethodOutput benchmark(const DataMap& d) const override;

private:
  double zero_threshold_;
  long min_zeros_;
  double log10_epsilon_;
  preprocessing::PipelineSpec pipeline_;
};

/// Number of AC coefficients below the threshold in one 8x8 block.
int zero_count(const Plane<float>& gray, int r0, int c0, double threshold) {
  const auto& basis = dct_basis();
  double tmp[8][8];
  for (int u = 0; u < 8; ++u) {
    for (int n = 0; n < 8; ++n) {
      double s = 0.0;
      for (int m = 0; m < 8; ++m) s += basis[u][m] * double(gray.at(r0 + m, c0 + n));
      tmp[u][n] = s;
    }
  }
  int count = 0;
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      if (u == 0 && v == 0) continue;
      double s = 0.0;
      for (int n = 0; n < 8; ++n) s += basis[v][n] * tmp[u][n];
      if (std::abs(s) < threshold) ++count;
    }
  }
  return count;
}

MethodOutput GridAlignMethod::benchmark(const DataMap& d) const {
  const Plane<float> gray = to_gray_plane(d);
  const int rows = gray.rows(), cols = gray.cols();
  if (rows < 24 || cols < 24)
    raise(ErrorCode::ImageTooSmall, "grid_align needs at least 24x24 pixels");

  // Zero counts for every full block of every origin's tiling.
  std::array<std::vector<uint8_t>, 64> counts;
  std::array<int, 64> grid_cols{};
  for (int orr = 0; orr < 8; ++orr) {
    for (int oc = 0; oc < 8; ++oc) {
      const int o = orr * 8 + oc;
      const int by_n = (rows - orr) / 8, bx_n = (cols - oc) / 8;
      grid_cols[o] = bx_n;
      counts[o].resize(size_t(by_n) * bx_n);
      for (int by = 0; by < by_n; ++by)
        for (int bx = 0; bx < bx_n; ++bx)
          counts[o][size_t(by) * bx_n + bx] =
              uint8_t(zero_count(gray, orr + 8 * by, oc + 8 * bx, zero_threshold_));
    }
  }

  // Vote map over the pixels covered by all 64 tilings.
  Plane<int16_t> votes(rows, cols, kAbstain);
  std::array<long, 65> tally{};
  for (int r = 7; r <= rows - 8; ++r) {
    for (int c = 7; c <= cols - 8; ++c) {
      int best = -1, best_o = 0, ties = 0;
      for (int o = 0; o < 64; ++o) {
        const int by = (r - o / 8) >> 3, bx = (c - o % 8) >> 3;
        const int v = counts[o][size_t(by) * grid_cols[o] + bx];
        if (v > best) {
          best = v;
          best_o = o;
          ties = 1;
        } else if (v == best) {
          ++ties;
        }
      }
      if (ties > 1) continue;
      const int label = best >= min_zeros_ ? best_o : kNone;
      votes.at(r, c) = int16_t(label);
      ++tally[label];
    }
  }

  MethodOutput out;
  out.mask = Mask(rows, cols, 0);
  out.detection = 0.0;
  Plane<float> vote_plane(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) vote_plane.at(r, c) = float(votes.at(r, c));
  out.extras["votes"] = std::move(vote_plane);

  long total_votes = 0;
  int modal = 0;
  for (int l = 0; l <= kNone; ++l) {
    total_votes += tally[l];
    if (tally[l] > tally[modal]) modal = l;
  }
  if (total_votes == 0) return out;  // no grid evidence anywhere

  Plane<uint8_t> field(rows, cols, 0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      field.at(r, c) = votes.at(r, c) != kAbstain && votes.at(r, c) != modal ? 1 : 0;
  const Components comps = label_components(field);
  if (comps.count == 0) return out;

  // Per region: size n and the plurality vote count k. Votes are shared by up
  // to 64 pixels of one block, so the binomial bound runs on block units.
  std::vector<long> region_n(comps.count, 0);
  std::vector<std::array<long, 65>> region_tally(comps.count);
  for (auto& t : region_tally) t.fill(0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int id = comps.labels.at(r, c);
      if (id < 0) continue;
      ++region_n[id];
      ++region_tally[id][votes.at(r, c)];
    }
  }
  std::vector<uint8_t> validated(comps.count, 0);
  bool any = false;
  for (int id = 0; id < comps.count; ++id) {
    long k = 0;
    for (long t : region_tally[id]) k = std::max(k, t);
    const long n_units = (region_n[id] + 63) / 64;
    const long k_units = std::min((k + 63) / 64, n_units);
    const double log10_nfa = std::log10(64.0) + std::log10(double(comps.count)) +
                             log10_binomial_tail(n_units, k_units, 1.0 / 64.0);
    if (log10_nfa < log10_epsilon_) {
      validated[id] = 1;
      any = true;
    }
  }
  if (any) {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (comps.labels.at(r, c) >= 0 && validated[comps.labels.at(r, c)])
          out.mask->at(r, c) = 1;
    out.detection = 1.0;
  }
  return out;
}

}  // namespace

std::pair<MethodPtr, preprocessing::PipelineSpec> make_grid_align(const nlohmann::json& config) {
  ConfigReader reader(config);
  const double zero_threshold = reader.number("zero_threshold", 0.5, 0.0, 1e6, true);
  const long min_zeros = reader.integer("min_zeros", 16, 1, 63);
  const double nfa_epsilon = reader.number("nfa_epsilon", 1.0, 0.0, 1e12, true);
  reader.finish();
  auto method = std::make_shared<GridAlignMethod>(zero_threshold, min_zeros, nfa_epsilon);
  return {method, method->pipeline()};
}

}  // namespace forgescope::methods::internal

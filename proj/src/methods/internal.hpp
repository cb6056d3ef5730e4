#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "forgescope/core/data_map.hpp"
#include "forgescope/core/error.hpp"
#include "forgescope/methods/method.hpp"

#include <json.hpp>

namespace forgescope::methods::internal {

std::pair<MethodPtr, preprocessing::PipelineSpec> make_dq(const nlohmann::json& config);
std::pair<MethodPtr, preprocessing::PipelineSpec> make_grid_align(const nlohmann::json& config);
std::pair<MethodPtr, preprocessing::PipelineSpec> make_noise_blocks(const nlohmann::json& config);

/// Typed, range-checked access to a method's JSON config. Every method accepts
/// "seed" (determinism knob; the built-ins are already deterministic). Call
/// finish() last so leftover unknown keys are rejected.
class ConfigReader {
public:
  explicit ConfigReader(const nlohmann::json& config) : config_(config) {
    if (!config_.is_null() && !config_.is_object())
      raise(ErrorCode::InvalidConfig, "method config must be a JSON object");
    known_.insert("seed");
    if (has("seed")) {
      const auto& s = config_.at("seed");
      if (!s.is_number_integer() || s.get<long long>() < 0)
        raise(ErrorCode::InvalidConfig, "seed must be a non-negative integer");
    }
  }

  double number(const std::string& key, double fallback, double lo, double hi,
                bool exclusive_lo = false) {
    known_.insert(key);
    if (!has(key)) return fallback;
    const auto& v = config_.at(key);
    if (!v.is_number()) raise(ErrorCode::InvalidConfig, key + " must be a number");
    const double x = v.get<double>();
    const bool ok = exclusive_lo ? (x > lo && x <= hi) : (x >= lo && x <= hi);
    if (!ok) raise(ErrorCode::InvalidConfig, key + " out of range: " + std::to_string(x));
    return x;
  }

  long integer(const std::string& key, long fallback, long lo, long hi) {
    known_.insert(key);
    if (!has(key)) return fallback;
    const auto& v = config_.at(key);
    if (!v.is_number_integer()) raise(ErrorCode::InvalidConfig, key + " must be an integer");
    const long x = v.get<long>();
    if (x < lo || x > hi)
      raise(ErrorCode::InvalidConfig, key + " out of range: " + std::to_string(x));
    return x;
  }

  void finish() const {
    if (!config_.is_object()) return;
    for (const auto& [key, value] : config_.items()) {
      (void)value;
      if (known_.count(key) == 0)
        raise(ErrorCode::InvalidConfig, "unknown parameter '" + key + "'");
    }
  }

private:
  bool has(const std::string& key) const {
    return config_.is_object() && config_.contains(key);
  }

  const nlohmann::json& config_;
  std::set<std::string> known_;
};

/// Fetches "image" and reduces it to one float plane (BT.601 for 3 channels,
/// pass-through for 1). Pixel scale is whatever the caller loaded, 0..255 for
/// unnormalized images.
Plane<float> to_gray_plane(const DataMap& d);

struct Components {
  Plane<int32_t> labels;  // -1 where field == 0, else component id
  int count = 0;
};

/// 4-connected components of the nonzero pixels of `field`.
Components label_components(const Plane<uint8_t>& field);

}  // namespace forgescope::methods::internal

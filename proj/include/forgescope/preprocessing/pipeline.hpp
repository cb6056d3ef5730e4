#pragma once

#include <string>
#include <vector>

#include "forgescope/core/data_map.hpp"

#include <json.hpp>

namespace forgescope::preprocessing {

enum class TransformKind {
  ZeroOneRange,  // [0,255] -> [0,1] by /255, result is a float image
  Normalize,     // (x - mean) / std per channel
  RgbToGray,     // BT.601 weights; grayscale input passes through
  GrayToRgb,     // replicate the single channel 3x
  RoundToUint,   // round half away from zero, clamp to [0,255]
  GetImageSize,  // adds image_size = (H,W)
};

struct TransformSpec {
  TransformKind kind = TransformKind::ZeroOneRange;
  std::vector<double> mean;  // Normalize only; size 1 broadcasts
  std::vector<double> std;

  bool operator==(const TransformSpec&) const = default;
};

struct PipelineSpec {
  std::vector<TransformSpec> transforms;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs_keys;

  bool operator==(const PipelineSpec&) const = default;
};

/// Single transform application; the input map is not modified.
DataMap apply_transform(const TransformSpec& t, const DataMap& d);

/// Validates that every declared input key is present (MissingInputKey),
/// applies the transforms in order, then filters the result down to exactly
/// outputs_keys (MissingOutputKey if one was never produced).
DataMap run_pipeline(const PipelineSpec& p, const DataMap& d);

const char* transform_kind_name(TransformKind kind);
TransformKind transform_kind_from_name(const std::string& name);

void to_json(nlohmann::json& j, const TransformSpec& t);
void from_json(const nlohmann::json& j, TransformSpec& t);
void to_json(nlohmann::json& j, const PipelineSpec& p);
void from_json(const nlohmann::json& j, PipelineSpec& p);

}  // namespace forgescope::preprocessing

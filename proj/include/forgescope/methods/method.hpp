#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "forgescope/core/data_map.hpp"
#include "forgescope/preprocessing/pipeline.hpp"

#include <json.hpp>

namespace forgescope::methods {

enum class OutputType { Heatmap, Mask, Detection };

const char* output_type_name(OutputType type);

struct MethodOutput {
  std::optional<HeatMap> heatmap;    // in [0,1]
  std::optional<Mask> mask;          // binary
  std::optional<double> detection;   // in [0,1]
  // Method-specific diagnostics (vote maps, block statistics), saved only
  // when the benchmark asks for extra outputs.
  std::map<std::string, Plane<float>> extras;
};

/// A detector. Immutable after construction; benchmark() is the single entry
/// point the runner calls and is safe to use concurrently on distinct maps.
class Method {
public:
  virtual ~Method() = default;
  virtual const std::string& name() const = 0;
  virtual std::vector<OutputType> output_types() const = 0;
  virtual const preprocessing::PipelineSpec& pipeline() const = 0;
  virtual MethodOutput benchmark(const DataMap& d) const = 0;
  /// Alias of benchmark for interactive use.
  MethodOutput predict(const DataMap& d) const { return benchmark(d); }
};

using MethodPtr = std::shared_ptr<const Method>;

/// Factory over the registry {dq, grid_align, noise_blocks}. The returned
/// pipeline declares the method's required input keys.
/// UnknownMethod; InvalidConfig (unknown key or out-of-range value).
std::pair<MethodPtr, preprocessing::PipelineSpec> load_method(
    const std::string& name, const nlohmann::json& config = nlohmann::json::object());

/// Same from a JSON config file {"name": ..., "config": {...}}.
std::pair<MethodPtr, preprocessing::PipelineSpec> load_method_from_file(
    const std::filesystem::path& config_path);

const std::vector<std::string>& registered_methods();

}  // namespace forgescope::methods

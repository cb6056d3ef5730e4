#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "forgescope/datasets/datasets.hpp"
#include "forgescope/methods/method.hpp"
#include "forgescope/metrics/metrics.hpp"

namespace forgescope::benchmark {

struct BenchmarkConfig {
  bool save_method_outputs = true;
  bool save_extra_outputs = false;
  bool save_metrics = true;
  std::filesystem::path output_folder = "output";
  bool use_existing_output = false;
  int verbose = 1;  // 0 silent, 1 run summary, 2 per image (all on stderr)
  std::string device_hint = "cpu";  // accepted, unused by the built-ins
};

/// Writes <folder>/<image_name>.phz holding the output's heatmap/mask arrays
/// and detection score. Atomic (temp file + rename). Returns the path.
std::filesystem::path save_output(const std::filesystem::path& folder,
                                  const std::string& image_name,
                                  const methods::MethodOutput& output);

/// Writes <folder>/<image_name>_extra.phz with the diagnostic arrays.
std::filesystem::path save_extras(const std::filesystem::path& folder,
                                  const std::string& image_name,
                                  const std::map<std::string, Plane<float>>& extras);

/// Bit-exact restore of save_output (extras live in their own file and are
/// not read back). FileNotFound / CorruptOutput.
methods::MethodOutput load_output(const std::filesystem::path& path);

/// {output_folder}/{method}/{dataset}/metrics/{timestamp}_{dataset_mode}/
/// {output_type}_report.json
std::filesystem::path report_path(const std::filesystem::path& output_folder,
                                  const std::string& method, const std::string& dataset,
                                  const std::string& timestamp,
                                  const std::string& dataset_mode,
                                  const std::string& output_type);

/// Current UTC time as YYYYMMDDTHHMMSS (path component only; report content
/// never carries it).
std::string utc_timestamp();

/// Evaluates the method over the dataset one image at a time and writes one
/// report per output type the method emits. Outputs are cached under
/// outputs/ as .phz and reused when use_existing_output is set, so an
/// interrupted run resumes where it stopped. Per-image failures are counted
/// and skipped; only config and path problems abort the run. Returns the
/// report paths (empty when save_metrics is off).
std::vector<std::filesystem::path> run(const methods::Method& method,
                                       const datasets::Dataset& dataset,
                                       const std::vector<std::string>& metric_names,
                                       const BenchmarkConfig& config);

}  // namespace forgescope::benchmark

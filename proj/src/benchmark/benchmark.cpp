#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "forgescope/benchmark/benchmark.hpp"
#include "forgescope/core/error.hpp"

namespace forgescope::benchmark {

namespace fs = std::filesystem;

namespace {

/// Everything fallible about one image, produced inside the per-image catch:
/// validated inputs for the metric updates, which then cannot fail.
struct Evaluated {
  std::optional<HeatMap> heatmap;        // heatmap output
  std::optional<HeatMap> mask_as_float;  // mask output, lifted to 0/1 floats
  std::optional<double> detection;
  Mask ground_truth;
  int label = 0;
};

void check_heatmap(const HeatMap& h, const Mask& gt, const char* what) {
  if (!h.same_shape(gt))
    raise(ErrorCode::ShapeMismatch, std::string(what) + " size differs from ground truth");
  for (float v : h.raw())
    if (!(v >= 0.0f && v <= 1.0f))
      raise(ErrorCode::CorruptOutput, std::string(what) + " value outside [0,1]");
}

Evaluated evaluate_one(const methods::Method& method, const datasets::Dataset& dataset,
                       size_t index, const fs::path& outputs_dir,
                       const BenchmarkConfig& config, bool& used_cache) {
  const std::string& name = dataset.item_name(index);
  const fs::path cache = outputs_dir / (name + ".phz");

  datasets::DatasetItem item = dataset.get_item(index);
  methods::MethodOutput output;
  used_cache = config.use_existing_output && fs::exists(cache);
  if (used_cache) {
    output = load_output(cache);
  } else {
    output = method.benchmark(item.data);
    if (config.save_method_outputs) save_output(outputs_dir, name, output);
    if (config.save_extra_outputs && !output.extras.empty())
      save_extras(outputs_dir, name, output.extras);
  }

  Evaluated ev;
  ev.ground_truth = std::move(item.mask);
  ev.label = item.forged ? 1 : 0;
  for (methods::OutputType t : method.output_types()) {
    switch (t) {
      case methods::OutputType::Heatmap: {
        if (!output.heatmap)
          raise(ErrorCode::CorruptOutput, name + ": declared heatmap is missing");
        check_heatmap(*output.heatmap, ev.ground_truth, "heatmap");
        ev.heatmap = std::move(*output.heatmap);
        break;
      }
      case methods::OutputType::Mask: {
        if (!output.mask)
          raise(ErrorCode::CorruptOutput, name + ": declared mask is missing");
        const Mask& m = *output.mask;
        if (!m.same_shape(ev.ground_truth))
          raise(ErrorCode::ShapeMismatch, "mask size differs from ground truth");
        HeatMap lifted(m.rows(), m.cols());
        for (size_t i = 0; i < m.size(); ++i) {
          if (m.raw()[i] > 1)
            raise(ErrorCode::CorruptOutput, name + ": mask value outside {0,1}");
          lifted.raw()[i] = float(m.raw()[i]);
        }
        ev.mask_as_float = std::move(lifted);
        break;
      }
      case methods::OutputType::Detection: {
        if (!output.detection)
          raise(ErrorCode::CorruptOutput, name + ": declared detection is missing");
        if (!(*output.detection >= 0.0 && *output.detection <= 1.0))
          raise(ErrorCode::CorruptOutput, name + ": detection outside [0,1]");
        ev.detection = *output.detection;
        break;
      }
    }
  }
  return ev;
}

}  // namespace

std::filesystem::path report_path(const std::filesystem::path& output_folder,
                                  const std::string& method, const std::string& dataset,
                                  const std::string& timestamp,
                                  const std::string& dataset_mode,
                                  const std::string& output_type) {
  return output_folder / method / dataset / "metrics" / (timestamp + "_" + dataset_mode) /
         (output_type + "_report.json");
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%S", &tm);
  return buf;
}

std::vector<std::filesystem::path> run(const methods::Method& method,
                                       const datasets::Dataset& dataset,
                                       const std::vector<std::string>& metric_names,
                                       const BenchmarkConfig& config) {
  const metrics::MetricCollection collection = metrics::load_metrics(metric_names);
  const std::vector<methods::OutputType> types = method.output_types();
  std::vector<std::vector<std::unique_ptr<metrics::Metric>>> instances;
  instances.reserve(types.size());
  for (size_t t = 0; t < types.size(); ++t) instances.push_back(collection.instantiate());

  const fs::path method_dir =
      config.output_folder / method.name() / dataset.descriptor().name;
  const fs::path outputs_dir = method_dir / "outputs";
  std::error_code ec;
  fs::create_directories(outputs_dir, ec);
  if (ec)
    raise(ErrorCode::IoError, "cannot create " + outputs_dir.string() + ": " + ec.message());

  if (config.verbose >= 1)
    std::cerr << "benchmarking " << method.name() << " on " << dataset.descriptor().name
              << " (" << dataset.size() << " images)\n";

  long evaluated = 0, skipped = 0;
  std::map<std::string, long> skip_reasons;
  for (size_t i = 0; i < dataset.size(); ++i) {
    Evaluated ev;
    bool used_cache = false;
    try {
      ev = evaluate_one(method, dataset, i, outputs_dir, config, used_cache);
    } catch (const Error& e) {
      ++skipped;
      ++skip_reasons[error_code_name(e.code())];
      if (config.verbose >= 2)
        std::cerr << "[" << i + 1 << "/" << dataset.size() << "] " << dataset.item_name(i)
                  << ": skipped (" << error_code_name(e.code()) << ")\n";
      continue;
    }
    ++evaluated;
    for (size_t t = 0; t < types.size(); ++t) {
      const HeatMap* localization = types[t] == methods::OutputType::Heatmap
                                        ? &*ev.heatmap
                                        : types[t] == methods::OutputType::Mask
                                              ? &*ev.mask_as_float
                                              : nullptr;
      for (auto& metric : instances[t]) {
        if (localization != nullptr) {
          if (metric->input() != metrics::MetricInput::Detection)
            metric->update_localization(*localization, ev.ground_truth);
        } else {
          if (metric->input() != metrics::MetricInput::Localization)
            metric->update_detection(*ev.detection, ev.label);
        }
      }
    }
    if (config.verbose >= 2)
      std::cerr << "[" << i + 1 << "/" << dataset.size() << "] " << dataset.item_name(i)
                << (used_cache ? ": cached\n" : ": ok\n");
  }

  if (config.verbose >= 1)
    std::cerr << "evaluated " << evaluated << ", skipped " << skipped << "\n";

  std::vector<fs::path> paths;
  if (!config.save_metrics) return paths;

  const std::string timestamp = utc_timestamp();
  const std::string mode = dataset.tampered_only() ? "tampered_only" : "full";
  for (size_t t = 0; t < types.size(); ++t) {
    nlohmann::json j;
    j["method"] = method.name();
    j["dataset"] = dataset.descriptor().name;
    j["dataset_mode"] = mode;
    j["output_type"] = methods::output_type_name(types[t]);
    nlohmann::json m = nlohmann::json::object();
    std::map<std::string, long> reasons = skip_reasons;
    for (auto& metric : instances[t]) {
      const std::optional<double> value = metric->compute();
      if (value)
        m[metric->name()] = *value;
      else
        m[metric->name()] = nullptr;
      if (metric->skipped() > 0)
        reasons[metric->name() + "_single_class_mask"] += metric->skipped();
    }
    j["metrics"] = std::move(m);
    j["images_evaluated"] = evaluated;
    j["images_skipped"] = skipped;
    j["skip_reasons"] = reasons;

    const fs::path path = report_path(config.output_folder, method.name(),
                                      dataset.descriptor().name, timestamp, mode,
                                      methods::output_type_name(types[t]));
    fs::create_directories(path.parent_path(), ec);
    if (ec)
      raise(ErrorCode::IoError,
            "cannot create " + path.parent_path().string() + ": " + ec.message());
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) raise(ErrorCode::IoError, "cannot write " + tmp.string());
      out << j.dump(2) << "\n";
      if (!out) raise(ErrorCode::IoError, "short write to " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec)
      raise(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
    if (config.verbose >= 1) std::cerr << "report: " << path.string() << "\n";
    paths.push_back(path);
  }
  return paths;
}

}  // namespace forgescope::benchmark

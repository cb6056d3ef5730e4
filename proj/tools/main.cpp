#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forgescope/benchmark/benchmark.hpp"
#include "forgescope/core/error.hpp"
#include "forgescope/datasets/datasets.hpp"
#include "forgescope/image_io/image_io.hpp"
#include "forgescope/methods/method.hpp"
#include "forgescope/metrics/metrics.hpp"
#include "forgescope/preprocessing/pipeline.hpp"

#include "colormap.hpp"

namespace fs = std::filesystem;
using namespace forgescope;

namespace {

// Usage-level mistakes (bad names, bad config) exit 2; everything else that
// throws is a processing failure and exits 1.
int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownMethod:
    case ErrorCode::UnknownMetric:
    case ErrorCode::InvalidConfig:
      return 2;
    default:
      return 1;
  }
}

Image replicate_rgb(const Image& img) {
  if (img.channels() == 3) return img;
  Image out(3, img.height(), img.width());
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) out.at(c, y, x) = img.at(0, y, x);
  return out;
}

uint8_t heat_index(float v) {
  const long i = std::lround(double(v) * 255.0);
  return uint8_t(std::clamp(i, 0L, 255L));
}

Image heat_to_rgb(const HeatMap& h) {
  Image out(3, h.rows(), h.cols());
  for (int y = 0; y < h.rows(); ++y) {
    for (int x = 0; x < h.cols(); ++x) {
      const uint8_t* rgb = cli::kHeatColormap[heat_index(h.at(y, x))];
      for (int c = 0; c < 3; ++c) out.at(c, y, x) = rgb[c];
    }
  }
  return out;
}

Image heat_to_gray(const HeatMap& h) {
  Image out(1, h.rows(), h.cols());
  for (int y = 0; y < h.rows(); ++y)
    for (int x = 0; x < h.cols(); ++x) out.at(0, y, x) = heat_index(h.at(y, x));
  return out;
}

Image mask_to_gray(const Mask& m) {
  Image out(1, m.rows(), m.cols());
  for (int y = 0; y < m.rows(); ++y)
    for (int x = 0; x < m.cols(); ++x) out.at(0, y, x) = m.at(y, x) ? 255 : 0;
  return out;
}

Image blend_overlay(const Image& base_rgb, const Image& heat_rgb) {
  Image out(3, base_rgb.height(), base_rgb.width());
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < out.height(); ++y)
      for (int x = 0; x < out.width(); ++x)
        out.at(c, y, x) =
            uint8_t(std::lround(0.5 * base_rgb.at(c, y, x) + 0.5 * heat_rgb.at(c, y, x)));
  return out;
}

Image concat_horizontal(const std::vector<Image>& parts) {
  int width = 0;
  for (const auto& p : parts) width += p.width();
  Image out(3, parts.front().height(), width);
  int x0 = 0;
  for (const auto& p : parts) {
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < p.height(); ++y)
        for (int x = 0; x < p.width(); ++x) out.at(c, y, x0 + x) = p.at(c, y, x);
    x0 += p.width();
  }
  return out;
}

/// Assembles the DataMap a method's pipeline declares from one image file.
DataMap data_map_for(const preprocessing::PipelineSpec& pipeline, const fs::path& path) {
  DataMap d;
  bool want_dct = false, want_q = false;
  for (const std::string& key : pipeline.inputs) {
    if (key == DataMap::kImage) d.set(key, image_io::read_image(path));
    else if (key == DataMap::kImageSize) d.set(key, image_io::probe_image_size(path));
    else if (key == DataMap::kDctCoefficients) want_dct = true;
    else if (key == DataMap::kQTables) want_q = true;
  }
  if (want_dct || want_q) {
    auto [dct, qtables] = image_io::read_jpeg_data(path);
    if (want_dct) d.set(DataMap::kDctCoefficients, std::move(dct));
    if (want_q) d.set(DataMap::kQTables, std::move(qtables));
  }
  return d;
}

std::string format_number(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

int run_cmd(const std::string& method_name, const std::string& image_path,
            const std::string& output_folder, bool overlay, bool show_plot,
            const std::string& device) {
  if (device != "cpu")
    std::cerr << "warning: --device is ignored; built-in methods run on the cpu\n";
  auto [method, pipeline] = methods::load_method(method_name);
  const DataMap d = preprocessing::run_pipeline(pipeline, data_map_for(pipeline, image_path));
  const methods::MethodOutput out = method->predict(d);

  if (out.detection) std::cout << "detection: " << format_number(*out.detection) << "\n";

  if (output_folder.empty()) return 0;
  const fs::path dir = fs::path(output_folder) / fs::path(image_path).stem();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) raise(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  if (out.heatmap) {
    image_io::write_png(dir / "heatmap.png", heat_to_gray(*out.heatmap));
    std::cout << "heatmap: " << (dir / "heatmap.png").string() << "\n";
  }
  if (out.mask) {
    image_io::write_png(dir / "mask.png", mask_to_gray(*out.mask));
    std::cout << "mask: " << (dir / "mask.png").string() << "\n";
  }
  if (overlay || show_plot) {
    const Image base = replicate_rgb(image_io::read_image(image_path));
    HeatMap heat;
    if (out.heatmap) {
      heat = *out.heatmap;
    } else if (out.mask) {
      heat = HeatMap(out.mask->rows(), out.mask->cols());
      for (int y = 0; y < heat.rows(); ++y)
        for (int x = 0; x < heat.cols(); ++x) heat.at(y, x) = float(out.mask->at(y, x));
    } else {
      raise(ErrorCode::MissingKey, method_name + " produced nothing to render");
    }
    const Image heat_rgb = heat_to_rgb(heat);
    if (overlay) {
      image_io::write_png(dir / "overlay.png", blend_overlay(base, heat_rgb));
      std::cout << "overlay: " << (dir / "overlay.png").string() << "\n";
    }
    if (show_plot) {
      std::vector<Image> parts{base};
      if (out.heatmap) parts.push_back(heat_rgb);
      if (out.mask) parts.push_back(replicate_rgb(mask_to_gray(*out.mask)));
      image_io::write_png(dir / "panel.png", concat_horizontal(parts));
      std::cout << "panel: " << (dir / "panel.png").string() << "\n";
    }
  }
  return 0;
}

int benchmark_cmd(const std::string& method_name, const std::string& dataset_name,
                  const std::string& dataset_path, const std::string& metrics_csv,
                  bool tampered_only, const std::string& output_folder,
                  bool use_existing) {
  auto [method, pipeline] = methods::load_method(method_name);
  const datasets::DatasetDescriptor desc =
      datasets::dataset_descriptor(dataset_name, dataset_path);

  std::vector<std::string> metric_names;
  if (metrics_csv.empty()) {
    metric_names = metrics::registered_metrics();
  } else {
    std::stringstream ss(metrics_csv);
    std::string part;
    while (std::getline(ss, part, ',')) metric_names.push_back(part);
  }
  metrics::load_metrics(metric_names);  // fail fast on a bad name

  const datasets::Dataset dataset =
      datasets::load_dataset(desc, pipeline, tampered_only, {DataMap::kImage});
  if (dataset.empty()) {
    std::cerr << "no images\n";
    return 1;
  }

  benchmark::BenchmarkConfig config;
  config.output_folder = output_folder;
  config.use_existing_output = use_existing;
  const auto paths = benchmark::run(*method, dataset, metric_names, config);
  for (const auto& p : paths) std::cout << "report: " << p.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"classical image-forgery detection toolbox"};
  app.require_subcommand(1);

  std::string method_name, image_path, output_folder, device = "cpu";
  bool overlay = false, show_plot = false;
  CLI::App* run = app.add_subcommand("run", "run a method on one image");
  run->add_option("method", method_name, "registered method name")->required();
  run->add_option("image_path", image_path, "path to the image to run the method on")
      ->required();
  run->add_option("--output-folder", output_folder,
                  "where to write heatmap/mask PNGs (omit to skip saving)");
  run->add_flag("--overlay", overlay, "also write the heatmap blended onto the image");
  run->add_flag("--show-plot,!--no-show-plot", show_plot,
                "write a side-by-side panel PNG (headless stand-in for a plot window)");
  run->add_option("--device", device, "accepted for compatibility; ignored");

  std::string bm_method, bm_dataset, bm_path, bm_metrics, bm_output = "output";
  bool bm_tampered_only = false, bm_use_existing = false;
  CLI::App* bench = app.add_subcommand("benchmark", "evaluate a method over a dataset");
  bench->add_option("method", bm_method, "registered method name")->required();
  bench->add_option("dataset", bm_dataset, "registered dataset name")->required();
  bench->add_option("dataset_path", bm_path, "dataset root directory")->required();
  bench->add_option("--metrics", bm_metrics,
                    "comma-separated metric names (default: all registered)");
  bench->add_flag("--tampered-only", bm_tampered_only, "drop pristine images");
  bench->add_option("--output-folder", bm_output, "benchmark output root");
  bench->add_flag("--use-existing-output", bm_use_existing,
                  "reuse cached method outputs (resume an interrupted run)");

  CLI::App* dl = app.add_subcommand("download_weights", "neural weight management");
  CLI::App* ad = app.add_subcommand("adapt_weights", "neural weight management");
  dl->allow_extras();
  ad->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(run))
      return run_cmd(method_name, image_path, output_folder, overlay, show_plot, device);
    if (app.got_subcommand(bench))
      return benchmark_cmd(bm_method, bm_dataset, bm_path, bm_metrics, bm_tampered_only,
                           bm_output, bm_use_existing);
    std::cerr << "not supported in this build\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#include "forgescope/methods/method.hpp"

#include <fstream>
#include <sstream>

#include "forgescope/core/error.hpp"
#include "src/methods/internal.hpp"

namespace forgescope::methods {

namespace {

using Factory =
    std::pair<MethodPtr, preprocessing::PipelineSpec> (*)(const nlohmann::json&);

struct RegistryEntry {
  const char* name;
  Factory make;
};

const RegistryEntry kRegistry[] = {
    {"dq", internal::make_dq},
    {"grid_align", internal::make_grid_align},
    {"noise_blocks", internal::make_noise_blocks},
};

}  // namespace

const char* output_type_name(OutputType type) {
  switch (type) {
    case OutputType::Heatmap: return "heatmap";
    case OutputType::Mask: return "mask";
    case OutputType::Detection: return "detection";
  }
  return "?";
}

std::pair<MethodPtr, preprocessing::PipelineSpec> load_method(
    const std::string& name, const nlohmann::json& config) {
  for (const auto& entry : kRegistry) {
    if (name == entry.name) return entry.make(config);
  }
  std::ostringstream msg;
  msg << "unknown method '" << name << "'; registered:";
  for (const auto& entry : kRegistry) msg << " " << entry.name;
  raise(ErrorCode::UnknownMethod, msg.str());
}

std::pair<MethodPtr, preprocessing::PipelineSpec> load_method_from_file(
    const std::filesystem::path& config_path) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) raise(ErrorCode::FileNotFound, "cannot open " + config_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::InvalidConfig, std::string("bad method config file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("name") || !j.at("name").is_string())
    raise(ErrorCode::InvalidConfig, "method config file needs a \"name\" string");
  nlohmann::json config = nlohmann::json::object();
  if (j.contains("config")) config = j.at("config");
  return load_method(j.at("name").get<std::string>(), config);
}

const std::vector<std::string>& registered_methods() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : kRegistry) out.emplace_back(entry.name);
    return out;
  }();
  return names;
}

namespace internal {

Plane<float> to_gray_plane(const DataMap& d) {
  const DataValue& v = d.get(DataMap::kImage);
  int ch = 0, rows = 0, cols = 0;
  auto sample = [&](int c, int r, int col) -> float {
    if (const Image* u = std::get_if<Image>(&v)) return float(u->at(c, r, col));
    return std::get<ImageF>(v).at(c, r, col);
  };
  if (const Image* u = std::get_if<Image>(&v)) {
    ch = u->channels();
    rows = u->height();
    cols = u->width();
  } else if (const ImageF* f = std::get_if<ImageF>(&v)) {
    ch = f->channels();
    rows = f->height();
    cols = f->width();
  } else {
    raise(ErrorCode::MissingKey, "entry 'image' has unexpected type");
  }
  if (ch != 1 && ch != 3)
    raise(ErrorCode::WrongChannelCount, "expected 1 or 3 channels, got " + std::to_string(ch));
  Plane<float> gray(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      gray.at(r, c) = ch == 1 ? sample(0, r, c)
                              : 0.299f * sample(0, r, c) + 0.587f * sample(1, r, c) +
                                    0.114f * sample(2, r, c);
    }
  }
  return gray;
}

Components label_components(const Plane<uint8_t>& field) {
  const int rows = field.rows(), cols = field.cols();
  Components out;
  out.labels = Plane<int32_t>(rows, cols, -1);
  std::vector<int> stack;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (field.at(r, c) == 0 || out.labels.at(r, c) >= 0) continue;
      const int id = out.count++;
      stack.push_back(r * cols + c);
      out.labels.at(r, c) = id;
      while (!stack.empty()) {
        const int pos = stack.back();
        stack.pop_back();
        const int pr = pos / cols, pc = pos % cols;
        const int nr[4] = {pr - 1, pr + 1, pr, pr};
        const int nc[4] = {pc, pc, pc - 1, pc + 1};
        for (int k = 0; k < 4; ++k) {
          if (nr[k] < 0 || nr[k] >= rows || nc[k] < 0 || nc[k] >= cols) continue;
          if (field.at(nr[k], nc[k]) == 0 || out.labels.at(nr[k], nc[k]) >= 0) continue;
          out.labels.at(nr[k], nc[k]) = id;
          stack.push_back(nr[k] * cols + nc[k]);
        }
      }
    }
  }
  return out;
}

}  // namespace internal

}  // namespace forgescope::methods

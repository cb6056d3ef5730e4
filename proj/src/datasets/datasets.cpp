#include "forgescope/datasets/datasets.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>

#include "forgescope/core/error.hpp"
#include "forgescope/image_io/image_io.hpp"

namespace forgescope::datasets {

namespace fs = std::filesystem;

bool glob_match(const std::string& pattern, const std::string& path) {
  std::string re;
  re.reserve(pattern.size() * 2);
  for (size_t i = 0; i < pattern.size(); ++i) {
    const char c = pattern[i];
    if (c == '*') {
      if (i + 1 < pattern.size() && pattern[i + 1] == '*') {
        re += ".*";
        ++i;
      } else {
        re += "[^/]*";
      }
    } else if (c == '?') {
      re += "[^/]";
    } else if (std::string("\\^$.|+(){}[]").find(c) != std::string::npos) {
      re += '\\';
      re += c;
    } else {
      re += c;
    }
  }
  return std::regex_match(path, std::regex(re));
}

namespace {

std::string stem_of(const std::string& rel) {
  const size_t slash = rel.find_last_of('/');
  const std::string base = slash == std::string::npos ? rel : rel.substr(slash + 1);
  const size_t dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

std::string item_name_of(const std::string& rel) {
  const size_t dot = rel.find_last_of('.');
  const size_t slash = rel.find_last_of('/');
  std::string name = (dot != std::string::npos && (slash == std::string::npos || dot > slash))
                         ? rel.substr(0, dot)
                         : rel;
  std::string out;
  for (char c : name) {
    if (c == '/') out += "__";
    else out += c;
  }
  return out;
}

std::string mask_stem_for(const LayoutAdapter& layout, const std::string& image_stem) {
  std::string s = image_stem;
  const std::string& strip = layout.mask_stem_strip;
  if (!strip.empty() && s.size() >= strip.size() &&
      s.compare(s.size() - strip.size(), strip.size(), strip) == 0)
    s.erase(s.size() - strip.size());
  return s + layout.mask_stem_add;
}

constexpr const char* kValidLoadKeys[] = {"image", "dct_coefficients", "qtables"};

bool is_load_key(const std::string& k) {
  for (const char* v : kValidLoadKeys)
    if (k == v) return true;
  return false;
}

}  // namespace

Mask binarize_mask(const Image& raw, MaskRule rule) {
  Mask out(raw.height(), raw.width());
  const int ch = raw.channels();
  for (int y = 0; y < raw.height(); ++y) {
    for (int x = 0; x < raw.width(); ++x) {
      uint8_t v = 0;
      switch (rule) {
        case MaskRule::Nonzero: {
          for (int c = 0; c < ch && !v; ++c)
            if (raw.at(c, y, x) != 0) v = 1;
          break;
        }
        case MaskRule::Default:
        case MaskRule::Inverted: {
          double luma = raw.at(0, y, x);
          if (ch == 3)
            luma = 0.299 * raw.at(0, y, x) + 0.587 * raw.at(1, y, x) +
                   0.114 * raw.at(2, y, x);
          const bool bright = luma > 127.0;
          v = (rule == MaskRule::Default) == bright ? 1 : 0;
          break;
        }
      }
      out.at(y, x) = v;
    }
  }
  return out;
}

Dataset load_dataset(const DatasetDescriptor& descriptor,
                     const std::optional<preprocessing::PipelineSpec>& pipeline,
                     bool tampered_only, const std::vector<std::string>& load) {
  std::error_code ec;
  if (!fs::is_directory(descriptor.root, ec) || ec)
    raise(ErrorCode::RootNotFound, "'" + descriptor.root.string() + "'");

  Dataset ds;
  ds.desc_ = descriptor;
  ds.pipeline_ = pipeline;

  // The pipeline's declared inputs override the load list; image_size is
  // probed from headers rather than loaded.
  std::vector<std::string> keys;
  if (pipeline) {
    for (const auto& k : pipeline->inputs)
      if (is_load_key(k) || k == DataMap::kImageSize) keys.push_back(k);
      else raise(ErrorCode::InvalidConfig, "pipeline input '" + k + "' is not loadable");
  } else {
    for (const auto& k : load)
      if (is_load_key(k)) keys.push_back(k);
      else raise(ErrorCode::InvalidConfig, "'" + k + "' is not a load key");
  }
  if (keys.empty()) raise(ErrorCode::InvalidConfig, "no load keys requested");
  ds.load_keys_ = keys;

  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(descriptor.root)) {
    if (!e.is_regular_file()) continue;
    files.push_back(e.path().lexically_relative(descriptor.root).generic_string());
  }
  std::sort(files.begin(), files.end());

  const LayoutAdapter& lay = descriptor.layout;
  std::vector<std::string> forged, pristine;
  std::map<std::string, std::string> masks_by_stem;
  for (const auto& rel : files) {
    if (glob_match(lay.forged_glob, rel)) {
      forged.push_back(rel);
    } else if (!lay.pristine_glob.empty() && glob_match(lay.pristine_glob, rel)) {
      pristine.push_back(rel);
    }
    if (!lay.mask_glob.empty() && glob_match(lay.mask_glob, rel)) {
      const std::string stem = stem_of(rel);
      auto [it, inserted] = masks_by_stem.emplace(stem, rel);
      if (!inserted)
        raise(ErrorCode::LayoutMismatch,
              "ambiguous mask stem '" + stem + "' (" + it->second + " vs " + rel + ")");
    }
  }

  if (forged.empty())
    raise(ErrorCode::LayoutMismatch,
          "no images match '" + lay.forged_glob + "' under '" +
              descriptor.root.string() + "'");

  if (descriptor.counts) {
    if (int(forged.size()) != descriptor.counts->forged ||
        int(pristine.size()) != descriptor.counts->pristine)
      raise(ErrorCode::CountMismatch,
            descriptor.name + ": expected " + std::to_string(descriptor.counts->forged) +
                " forged + " + std::to_string(descriptor.counts->pristine) +
                " pristine, found " + std::to_string(forged.size()) + " + " +
                std::to_string(pristine.size()));
  }

  for (const auto& rel : forged) {
    Dataset::Entry e;
    e.image_rel = rel;
    e.forged = true;
    e.name = item_name_of(rel);
    if (!lay.mask_glob.empty()) {
      const std::string want = mask_stem_for(lay, stem_of(rel));
      auto it = masks_by_stem.find(want);
      if (it == masks_by_stem.end())
        raise(ErrorCode::LayoutMismatch, "no mask with stem '" + want + "' for " + rel);
      e.mask_rel = it->second;
    }
    ds.entries_.push_back(std::move(e));
  }
  if (!tampered_only) {
    for (const auto& rel : pristine) {
      Dataset::Entry e;
      e.image_rel = rel;
      e.forged = false;
      e.name = item_name_of(rel);
      ds.entries_.push_back(std::move(e));
    }
  }
  std::sort(ds.entries_.begin(), ds.entries_.end(),
            [](const Dataset::Entry& a, const Dataset::Entry& b) {
              return a.image_rel < b.image_rel;
            });
  ds.tampered_only_ = tampered_only;
  return ds;
}

const std::string& Dataset::item_name(size_t index) const {
  if (index >= entries_.size())
    raise(ErrorCode::IndexOutOfRange, std::to_string(index) + " of " +
                                          std::to_string(entries_.size()));
  return entries_[index].name;
}

bool Dataset::item_forged(size_t index) const {
  if (index >= entries_.size())
    raise(ErrorCode::IndexOutOfRange, std::to_string(index) + " of " +
                                          std::to_string(entries_.size()));
  return entries_[index].forged;
}

DatasetItem Dataset::get_item(size_t index) const {
  if (index >= entries_.size())
    raise(ErrorCode::IndexOutOfRange, std::to_string(index) + " of " +
                                          std::to_string(entries_.size()));
  const Entry& entry = entries_[index];
  const fs::path image_path = desc_.root / entry.image_rel;

  const bool want_image =
      std::count(load_keys_.begin(), load_keys_.end(), DataMap::kImage) > 0;
  const bool want_dct =
      std::count(load_keys_.begin(), load_keys_.end(), DataMap::kDctCoefficients) > 0;
  const bool want_qt =
      std::count(load_keys_.begin(), load_keys_.end(), DataMap::kQTables) > 0;
  const bool want_size =
      std::count(load_keys_.begin(), load_keys_.end(), DataMap::kImageSize) > 0;

  DataMap data;
  ImageSize size{};
  if (want_image) {
    Image im = image_io::read_image(image_path);
    size = {im.height(), im.width()};
    data.set(DataMap::kImage, std::move(im));
  } else {
    size = image_io::probe_image_size(image_path);
  }
  if (want_dct || want_qt) {
    if (image_io::detect_format(image_path) != image_io::ImageFormat::Jpeg)
      raise(ErrorCode::DctRequestedForNonJpeg, entry.image_rel);
    auto [dct, qt] = image_io::read_jpeg_data(image_path);
    if (want_dct) data.set(DataMap::kDctCoefficients, std::move(dct));
    if (want_qt) data.set(DataMap::kQTables, std::move(qt));
  }
  if (want_size) data.set(DataMap::kImageSize, size);

  DatasetItem item;
  item.name = entry.name;
  item.forged = entry.forged;
  if (entry.forged && !entry.mask_rel.empty()) {
    const Image raw = image_io::read_image(desc_.root / entry.mask_rel);
    if (raw.height() != size.height || raw.width() != size.width)
      raise(ErrorCode::ShapeMismatch,
            "mask " + entry.mask_rel + " is " + std::to_string(raw.height()) + "x" +
                std::to_string(raw.width()) + ", image is " +
                std::to_string(size.height) + "x" + std::to_string(size.width));
    item.mask = binarize_mask(raw, desc_.mask_rule);
  } else {
    item.mask = Mask(size.height, size.width);
  }

  item.data = pipeline_ ? preprocessing::run_pipeline(*pipeline_, data) : std::move(data);
  return item;
}

const char* mask_rule_name(MaskRule rule) {
  switch (rule) {
    case MaskRule::Default: return "default";
    case MaskRule::Inverted: return "inverted";
    case MaskRule::Nonzero: return "nonzero";
  }
  return "unknown";
}

MaskRule mask_rule_from_name(const std::string& name) {
  for (MaskRule r : {MaskRule::Default, MaskRule::Inverted, MaskRule::Nonzero})
    if (name == mask_rule_name(r)) return r;
  raise(ErrorCode::InvalidConfig, "unknown mask rule '" + name + "'");
}

namespace {

struct BuiltinDataset {
  const char* name;
  LayoutAdapter layout;
  std::optional<DatasetCounts> counts;
  MaskRule rule;
};

// Layouts mirror the published releases; CountMismatch surfaces drift when
// a real download is organized differently.
const std::vector<BuiltinDataset>& builtin_datasets() {
  static const std::vector<BuiltinDataset> table = {
      {"columbia",
       {"4cam_splc/*.tif", "4cam_splc/edgemask/*.jpg", "4cam_auth/*.tif", "", "_edgemask"},
       DatasetCounts{180, 183},
       MaskRule::Default},
      {"casia1_sp",
       {"Sp/*.jpg", "gt/Sp/*.png", "Au/*.jpg", "", "_gt"},
       std::nullopt,
       MaskRule::Default},
      {"casia1_cm",
       {"Cm/*.jpg", "gt/Cm/*.png", "Au/*.jpg", "", "_gt"},
       std::nullopt,
       MaskRule::Default},
      {"coverage",
       {"image/*t.tif", "mask/*forged.tif", "image/*.tif", "t", "forged"},
       DatasetCounts{100, 100},
       MaskRule::Default},
      {"dso1",
       {"DSO-1/splicing-*.png", "DSO-1-Fake-Images-Masks/splicing-*.png",
        "DSO-1/normal-*.png", "", ""},
       DatasetCounts{100, 100},
       MaskRule::Inverted},
      {"korus",
       {"tampered-realistic/*.TIF", "ground-truth/*.PNG", "pristine/*.TIF", "", ""},
       DatasetCounts{220, 220},
       MaskRule::Nonzero},
      {"autosplice",
       {"forged/*.jpg", "masks/*.png", "authentic/*.jpg", "", "_mask"},
       DatasetCounts{3621, 2273},
       MaskRule::Default},
      {"trace",
       {"images/**", "masks/**", "", "", ""},
       DatasetCounts{24000, 0},
       MaskRule::Default},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& registered_datasets() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& d : builtin_datasets()) v.emplace_back(d.name);
    return v;
  }();
  return names;
}

DatasetDescriptor dataset_descriptor(const std::string& name,
                                     const std::filesystem::path& root) {
  for (const auto& d : builtin_datasets()) {
    if (name == d.name) {
      DatasetDescriptor desc;
      desc.name = name;
      desc.root = root;
      desc.layout = d.layout;
      desc.counts = d.counts;
      desc.mask_rule = d.rule;
      return desc;
    }
  }
  raise(ErrorCode::InvalidConfig, "unknown dataset '" + name + "'");
}

DatasetDescriptor descriptor_from_json(const nlohmann::json& j,
                                       const std::filesystem::path& root) {
  DatasetDescriptor desc;
  desc.name = j.at("name").get<std::string>();
  desc.root = root;
  const auto& l = j.at("layout");
  desc.layout.forged_glob = l.at("forged_glob").get<std::string>();
  desc.layout.mask_glob = l.value("mask_glob", std::string());
  desc.layout.pristine_glob = l.value("pristine_glob", std::string());
  desc.layout.mask_stem_strip = l.value("mask_stem_strip", std::string());
  desc.layout.mask_stem_add = l.value("mask_stem_add", std::string());
  if (j.contains("counts")) {
    const auto& c = j.at("counts");
    desc.counts = DatasetCounts{c.at(0).get<int>(), c.at(1).get<int>()};
  }
  desc.mask_rule = mask_rule_from_name(j.value("mask_rule", std::string("default")));
  return desc;
}

DatasetDescriptor descriptor_from_file(const std::filesystem::path& config_path,
                                       const std::filesystem::path& root) {
  std::ifstream in(config_path);
  if (!in) raise(ErrorCode::FileNotFound, "'" + config_path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::InvalidConfig, "bad dataset config: " + std::string(e.what()));
  }
  try {
    return descriptor_from_json(j, root);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::InvalidConfig, "bad dataset config: " + std::string(e.what()));
  }
}

}  // namespace forgescope::datasets

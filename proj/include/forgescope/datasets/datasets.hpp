#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "forgescope/core/data_map.hpp"
#include "forgescope/preprocessing/pipeline.hpp"

#include <json.hpp>

namespace forgescope::datasets {

/// How a raw mask file becomes a binary mask.
enum class MaskRule {
  Default,   // luma > 127
  Inverted,  // white marks the pristine region
  Nonzero,   // any nonzero channel (multi-level masks)
};

/// Declarative dataset layout: glob patterns over the root plus the stem
/// rewrite that pairs a forged image with its mask file
/// (mask_stem = image_stem - strip_suffix + add_suffix).
/// Pristine matches exclude files already matched as forged.
struct LayoutAdapter {
  std::string forged_glob;
  std::string mask_glob;
  std::string pristine_glob;  // empty: dataset has no pristine images
  std::string mask_stem_strip;
  std::string mask_stem_add;

  bool operator==(const LayoutAdapter&) const = default;
};

struct DatasetCounts {
  int forged = 0;
  int pristine = 0;

  bool operator==(const DatasetCounts&) const = default;
};

struct DatasetDescriptor {
  std::string name;
  std::filesystem::path root;
  LayoutAdapter layout;
  std::optional<DatasetCounts> counts;  // enforced exactly when present
  MaskRule mask_rule = MaskRule::Default;
};

struct DatasetItem {
  DataMap data;
  Mask mask;  // all zeros for pristine images
  std::string name;
  bool forged = false;
};

/// Immutable, index-addressable view over one dataset on disk.
class Dataset {
public:
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Decodes and assembles one item. IndexOutOfRange; image_io errors
  /// propagate; DctRequestedForNonJpeg when coefficient keys were requested
  /// for a non-JPEG file.
  DatasetItem get_item(size_t index) const;

  const DatasetDescriptor& descriptor() const { return desc_; }
  const std::vector<std::string>& load_keys() const { return load_keys_; }
  /// True when the forged-only filter was applied at load time.
  bool tampered_only() const { return tampered_only_; }
  /// Item name at an index without decoding anything.
  const std::string& item_name(size_t index) const;
  bool item_forged(size_t index) const;

private:
  friend Dataset load_dataset(const DatasetDescriptor&,
                              const std::optional<preprocessing::PipelineSpec>&,
                              bool, const std::vector<std::string>&);

  struct Entry {
    std::string image_rel;
    std::string mask_rel;  // empty for pristine
    std::string name;
    bool forged = false;
  };

  DatasetDescriptor desc_;
  std::optional<preprocessing::PipelineSpec> pipeline_;
  std::vector<std::string> load_keys_;
  std::vector<Entry> entries_;
  bool tampered_only_ = false;
};

/// Enumerates the layout under descriptor.root in lexicographic relative-path
/// order. A pipeline's declared inputs override the load list ("image_size"
/// as an input is served from the file header without a pixel decode).
/// RootNotFound / LayoutMismatch / CountMismatch.
Dataset load_dataset(const DatasetDescriptor& descriptor,
                     const std::optional<preprocessing::PipelineSpec>& pipeline,
                     bool tampered_only, const std::vector<std::string>& load);

/// Threshold/invert/nonzero reduction of a decoded mask file.
Mask binarize_mask(const Image& raw, MaskRule rule);

/// Built-in adapters: columbia, casia1_sp, casia1_cm, coverage, dso1, korus,
/// autosplice, trace. InvalidConfig for unknown names.
const std::vector<std::string>& registered_datasets();
DatasetDescriptor dataset_descriptor(const std::string& name,
                                     const std::filesystem::path& root);

/// Adapter from a JSON config carrying name/layout/counts/mask_rule.
DatasetDescriptor descriptor_from_json(const nlohmann::json& j,
                                       const std::filesystem::path& root);
DatasetDescriptor descriptor_from_file(const std::filesystem::path& config_path,
                                       const std::filesystem::path& root);

const char* mask_rule_name(MaskRule rule);
MaskRule mask_rule_from_name(const std::string& name);

/// Glob over '/'-separated relative paths: '*' and '?' stay inside one
/// segment, '**' crosses segments.
bool glob_match(const std::string& pattern, const std::string& path);

}  // namespace forgescope::datasets

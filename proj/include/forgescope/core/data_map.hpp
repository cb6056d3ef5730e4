#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "forgescope/core/error.hpp"
#include "forgescope/core/jpeg_data.hpp"
#include "forgescope/core/plane.hpp"

namespace forgescope {

struct ImageSize {
  int height = 0;
  int width = 0;

  bool operator==(const ImageSize&) const = default;
};

using DataValue = std::variant<Image, ImageF, DctCoefficients, QTables, ImageSize>;

/// Keyed collection of named arrays for one image. Reserved keys carry fixed
/// types; transforms and methods communicate exclusively through this map.
class DataMap {
public:
  static constexpr const char* kImage = "image";
  static constexpr const char* kDctCoefficients = "dct_coefficients";
  static constexpr const char* kQTables = "qtables";
  static constexpr const char* kImageSize = "image_size";

  bool contains(const std::string& key) const { return entries_.count(key) > 0; }
  size_t size() const { return entries_.size(); }

  void set(const std::string& key, DataValue value) { entries_[key] = std::move(value); }

  const DataValue& get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) raise(ErrorCode::MissingKey, "no entry '" + key + "'");
    return it->second;
  }

  template <typename T>
  const T& get_as(const std::string& key) const {
    const DataValue& v = get(key);
    const T* p = std::get_if<T>(&v);
    if (p == nullptr) raise(ErrorCode::MissingKey, "entry '" + key + "' has unexpected type");
    return *p;
  }

  void erase(const std::string& key) { entries_.erase(key); }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [k, v] : entries_) out.push_back(k);
    return out;
  }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

private:
  std::map<std::string, DataValue> entries_;
};

}  // namespace forgescope

#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "forgescope/core/error.hpp"

namespace forgescope {

/// Dense 2-D array, row-major.
template <typename T>
class Plane {
public:
  Plane() = default;
  Plane(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) raise(ErrorCode::ShapeMismatch, "negative plane dims");
  }

  static Plane from_data(int rows, int cols, std::vector<T> data) {
    if (data.size() != static_cast<size_t>(rows) * cols)
      raise(ErrorCode::ShapeMismatch, "plane data length does not match dims");
    Plane p;
    p.rows_ = rows;
    p.cols_ = cols;
    p.data_ = std::move(data);
    return p;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  const T& at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& raw() { return data_; }
  const std::vector<T>& raw() const { return data_; }

  template <typename U>
  bool same_shape(const Plane<U>& other) const {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  bool operator==(const Plane& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using HeatMap = Plane<float>;
using Mask = Plane<uint8_t>;

/// Pixel container, channel-major (channels x height x width).
/// Channel count is 1 (grayscale) or 3 (RGB).
template <typename T>
class BasicImage {
public:
  BasicImage() = default;
  BasicImage(int channels, int height, int width, T fill = T{})
      : channels_(channels), height_(height), width_(width),
        data_(static_cast<size_t>(channels) * height * width, fill) {}

  static BasicImage from_data(int channels, int height, int width, std::vector<T> data) {
    if (data.size() != static_cast<size_t>(channels) * height * width)
      raise(ErrorCode::ShapeMismatch, "image data length does not match dims");
    BasicImage im;
    im.channels_ = channels;
    im.height_ = height;
    im.width_ = width;
    im.data_ = std::move(data);
    return im;
  }

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int c, int y, int x) {
    return data_[(static_cast<size_t>(c) * height_ + y) * width_ + x];
  }
  const T& at(int c, int y, int x) const {
    return data_[(static_cast<size_t>(c) * height_ + y) * width_ + x];
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& raw() { return data_; }
  const std::vector<T>& raw() const { return data_; }

  /// View of one channel as a Plane copy.
  Plane<T> channel(int c) const {
    Plane<T> p(height_, width_);
    const T* src = data_.data() + static_cast<size_t>(c) * height_ * width_;
    std::copy(src, src + static_cast<size_t>(height_) * width_, p.data());
    return p;
  }

  bool operator==(const BasicImage& other) const {
    return channels_ == other.channels_ && height_ == other.height_ &&
           width_ == other.width_ && data_ == other.data_;
  }

private:
  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

using Image = BasicImage<uint8_t>;
using ImageF = BasicImage<float>;

}  // namespace forgescope

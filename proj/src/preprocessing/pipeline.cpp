#include "forgescope/preprocessing/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace forgescope::preprocessing {

namespace {

constexpr double kGrayR = 0.299, kGrayG = 0.587, kGrayB = 0.114;

uint8_t round_clamp_u8(double v) {
  const double r = v >= 0.0 ? std::floor(v + 0.5) : std::ceil(v - 0.5);
  return uint8_t(std::clamp(r, 0.0, 255.0));
}

// Pixel transforms accept either dtype under the "image" key.
bool image_is_float(const DataMap& d) {
  return std::holds_alternative<ImageF>(d.get(DataMap::kImage));
}

ImageF as_float(const DataMap& d) {
  if (image_is_float(d)) return d.get_as<ImageF>(DataMap::kImage);
  const Image& im = d.get_as<Image>(DataMap::kImage);
  ImageF out(im.channels(), im.height(), im.width());
  for (size_t i = 0; i < im.size(); ++i) out.data()[i] = float(im.data()[i]);
  return out;
}

void apply_zero_one_range(DataMap& d) {
  ImageF im = as_float(d);
  for (size_t i = 0; i < im.size(); ++i) im.data()[i] /= 255.0f;
  d.set(DataMap::kImage, std::move(im));
}

void apply_normalize(const TransformSpec& t, DataMap& d) {
  ImageF im = as_float(d);
  const int ch = im.channels();
  auto pick = [ch](const std::vector<double>& v, int c) -> double {
    if (v.size() == 1) return v[0];
    if (int(v.size()) != ch)
      raise(ErrorCode::WrongChannelCount, "normalize parameter count does not match channels");
    return v[c];
  };
  if (t.mean.empty() || t.std.empty())
    raise(ErrorCode::WrongChannelCount, "normalize requires mean and std");
  for (double s : t.std)
    if (s == 0.0) raise(ErrorCode::ZeroStd, "normalize std must be nonzero");
  for (int c = 0; c < ch; ++c) {
    const double mean = pick(t.mean, c), std_ = pick(t.std, c);
    for (int y = 0; y < im.height(); ++y)
      for (int x = 0; x < im.width(); ++x)
        im.at(c, y, x) = float((im.at(c, y, x) - mean) / std_);
  }
  d.set(DataMap::kImage, std::move(im));
}

template <typename T>
BasicImage<T> gray_of(const BasicImage<T>& im) {
  BasicImage<T> out(1, im.height(), im.width());
  for (int y = 0; y < im.height(); ++y)
    for (int x = 0; x < im.width(); ++x) {
      const double g =
          kGrayR * im.at(0, y, x) + kGrayG * im.at(1, y, x) + kGrayB * im.at(2, y, x);
      if constexpr (std::is_same_v<T, uint8_t>)
        out.at(0, y, x) = round_clamp_u8(g);
      else
        out.at(0, y, x) = float(g);
    }
  return out;
}

void apply_rgb_to_gray(DataMap& d) {
  const DataValue& v = d.get(DataMap::kImage);
  const int ch = std::holds_alternative<ImageF>(v) ? std::get<ImageF>(v).channels()
                                                   : std::get<Image>(v).channels();
  if (ch == 1) return;  // grayscale datasets pass through
  if (ch != 3)
    raise(ErrorCode::WrongChannelCount,
          "rgb_to_gray expects 3 channels, got " + std::to_string(ch));
  if (std::holds_alternative<ImageF>(v))
    d.set(DataMap::kImage, gray_of(std::get<ImageF>(v)));
  else
    d.set(DataMap::kImage, gray_of(std::get<Image>(v)));
}

template <typename T>
BasicImage<T> replicate3(const BasicImage<T>& im) {
  BasicImage<T> out(3, im.height(), im.width());
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < im.height(); ++y)
      for (int x = 0; x < im.width(); ++x) out.at(c, y, x) = im.at(0, y, x);
  return out;
}

void apply_gray_to_rgb(DataMap& d) {
  const DataValue& v = d.get(DataMap::kImage);
  const int ch = std::holds_alternative<ImageF>(v) ? std::get<ImageF>(v).channels()
                                                   : std::get<Image>(v).channels();
  if (ch != 1)
    raise(ErrorCode::WrongChannelCount,
          "gray_to_rgb expects 1 channel, got " + std::to_string(ch));
  if (std::holds_alternative<ImageF>(v))
    d.set(DataMap::kImage, replicate3(std::get<ImageF>(v)));
  else
    d.set(DataMap::kImage, replicate3(std::get<Image>(v)));
}

void apply_round_to_uint(DataMap& d) {
  const DataValue& v = d.get(DataMap::kImage);
  if (std::holds_alternative<Image>(v)) return;  // already integer
  const ImageF& im = std::get<ImageF>(v);
  Image out(im.channels(), im.height(), im.width());
  for (size_t i = 0; i < im.size(); ++i) out.data()[i] = round_clamp_u8(im.data()[i]);
  d.set(DataMap::kImage, std::move(out));
}

void apply_get_image_size(DataMap& d) {
  const DataValue& v = d.get(DataMap::kImage);
  ImageSize size;
  if (std::holds_alternative<ImageF>(v)) {
    const ImageF& im = std::get<ImageF>(v);
    size = {im.height(), im.width()};
  } else {
    const Image& im = std::get<Image>(v);
    size = {im.height(), im.width()};
  }
  d.set(DataMap::kImageSize, size);
}

}  // namespace

DataMap apply_transform(const TransformSpec& t, const DataMap& d) {
  DataMap out = d;
  if (!out.contains(DataMap::kImage))
    raise(ErrorCode::MissingKey, "transform needs 'image'");
  switch (t.kind) {
    case TransformKind::ZeroOneRange: apply_zero_one_range(out); break;
    case TransformKind::Normalize: apply_normalize(t, out); break;
    case TransformKind::RgbToGray: apply_rgb_to_gray(out); break;
    case TransformKind::GrayToRgb: apply_gray_to_rgb(out); break;
    case TransformKind::RoundToUint: apply_round_to_uint(out); break;
    case TransformKind::GetImageSize: apply_get_image_size(out); break;
  }
  return out;
}

DataMap run_pipeline(const PipelineSpec& p, const DataMap& d) {
  for (const auto& key : p.inputs)
    if (!d.contains(key)) raise(ErrorCode::MissingInputKey, "input key '" + key + "'");
  DataMap current = d;
  for (const auto& t : p.transforms) current = apply_transform(t, current);
  DataMap out;
  for (const auto& key : p.outputs_keys) {
    if (!current.contains(key))
      raise(ErrorCode::MissingOutputKey, "output key '" + key + "' was never produced");
    out.set(key, current.get(key));
  }
  return out;
}

const char* transform_kind_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::ZeroOneRange: return "zero_one_range";
    case TransformKind::Normalize: return "normalize";
    case TransformKind::RgbToGray: return "rgb_to_gray";
    case TransformKind::GrayToRgb: return "gray_to_rgb";
    case TransformKind::RoundToUint: return "round_to_uint";
    case TransformKind::GetImageSize: return "get_image_size";
  }
  return "unknown";
}

TransformKind transform_kind_from_name(const std::string& name) {
  for (TransformKind k : {TransformKind::ZeroOneRange, TransformKind::Normalize,
                          TransformKind::RgbToGray, TransformKind::GrayToRgb,
                          TransformKind::RoundToUint, TransformKind::GetImageSize})
    if (name == transform_kind_name(k)) return k;
  raise(ErrorCode::InvalidConfig, "unknown transform '" + name + "'");
}

void to_json(nlohmann::json& j, const TransformSpec& t) {
  j = nlohmann::json{{"kind", transform_kind_name(t.kind)}};
  if (t.kind == TransformKind::Normalize) {
    j["mean"] = t.mean;
    j["std"] = t.std;
  }
}

void from_json(const nlohmann::json& j, TransformSpec& t) {
  t = TransformSpec{};
  t.kind = transform_kind_from_name(j.at("kind").get<std::string>());
  if (t.kind == TransformKind::Normalize) {
    t.mean = j.at("mean").get<std::vector<double>>();
    t.std = j.at("std").get<std::vector<double>>();
  }
}

void to_json(nlohmann::json& j, const PipelineSpec& p) {
  j = nlohmann::json{{"transforms", p.transforms},
                     {"inputs", p.inputs},
                     {"outputs_keys", p.outputs_keys}};
}

void from_json(const nlohmann::json& j, PipelineSpec& p) {
  p = PipelineSpec{};
  p.transforms = j.at("transforms").get<std::vector<TransformSpec>>();
  p.inputs = j.at("inputs").get<std::vector<std::string>>();
  p.outputs_keys = j.at("outputs_keys").get<std::vector<std::string>>();
  if (p.inputs.empty() || p.outputs_keys.empty())
    raise(ErrorCode::InvalidConfig, "pipeline inputs and outputs_keys must be non-empty");
}

}  // namespace forgescope::preprocessing

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace road {

/// H x W x C grid of doubles in row-major (h, w, c) order.
struct ImageTensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  double& at(int h, int w, int c) { return data[(static_cast<std::size_t>(h) * width + w) * channels + c]; }
  double at(int h, int w, int c) const { return data[(static_cast<std::size_t>(h) * width + w) * channels + c]; }
  int num_pixels() const { return height * width; }
  std::size_t size() const { return data.size(); }

  /// (min, max) over all values.
  std::pair<double, double> value_range() const;
};

/// Per-pixel importance scores.
struct SaliencyMap {
  int height = 0;
  int width = 0;
  std::vector<double> scores;
};

struct Dataset {
  std::vector<ImageTensor> images;
  std::vector<int> labels;
  int num_classes = 0;
  std::vector<double> per_channel_mean;

  void recompute_mean();
};

struct EvaluationCurve {
  std::string name;
  std::vector<double> eta;
  std::vector<double> acc_mean;
  std::vector<double> acc_stderr;
};

using Tensor = std::variant<ImageTensor, SaliencyMap>;

/// Reads an NPY v1.0 file; 2-D arrays load as SaliencyMap, 3-D as ImageTensor.
Tensor read_tensor(const std::filesystem::path& path);

void write_tensor(const ImageTensor& t, const std::filesystem::path& path);
void write_tensor(const SaliencyMap& s, const std::filesystem::path& path);

void write_curve_csv(const std::vector<EvaluationCurve>& curves,
                     const std::filesystem::path& path);
std::vector<EvaluationCurve> read_curve_csv(const std::filesystem::path& path);

/// Directory layout: images.npy (N x H x W x C), labels.npy (N),
/// optional saliency_<method>.npy (N x H x W).
Dataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

/// Stacked saliency file (N x H x W) or a single 2-D map.
std::vector<SaliencyMap> read_saliency_stack(const std::filesystem::path& path);
void write_saliency_stack(const std::vector<SaliencyMap>& maps,
                          const std::filesystem::path& path);

namespace npy {

/// Raw NPY payload: shape plus values widened to double.
struct Array {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  bool integer_dtype = false;
};

Array read(const std::filesystem::path& path);
void write_f8(const std::filesystem::path& path, const std::vector<std::size_t>& shape,
              const std::vector<double>& data);
void write_i8(const std::filesystem::path& path, const std::vector<std::size_t>& shape,
              const std::vector<std::int64_t>& data);

}  // namespace npy

}  // namespace road

#pragma once

#include <cstdint>
#include <vector>

#include "road/tensor_io.hpp"

namespace road {

enum class RemovalOrder { MoRF, LeRF };
enum class Part { Low, High };

/// Indicator of the top-k pixels of a removal ordering.
struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> bits;  // 1 on the top-k pixels
  int k = 0;

  int num_pixels() const { return height * width; }
};

/// Values extracted from one side of a mask, ascending pixel order.
struct FeatureVector {
  std::vector<double> values;       // |source_indices| * channels entries
  std::vector<int> source_indices;  // strictly ascending flat pixel indices
};

/// Pixels of a partially known image; `unknown` lists the pixels an
/// imputation operator still has to fill.
struct ScatterResult {
  ImageTensor image;
  std::vector<int> unknown;
};

/// Stable descending sort by score, ties broken by ascending flat index.
std::vector<int> rank_pixels(const SaliencyMap& s);

BinaryMask topk_mask(const std::vector<int>& perm, int height, int width, int k);

FeatureVector select(const BinaryMask& m, const ImageTensor& x, Part part);

ScatterResult scatter(const BinaryMask& m, const FeatureVector& v, int channels,
                      Part part);

/// Per-channel saliency collapses to per-pixel by summing channels.
SaliencyMap collapse_channels(const ImageTensor& t);

/// k = round(eta * H * W).
int k_from_fraction(double eta, int height, int width);

/// Flat indices of the pixels an evaluation at this mask removes:
/// MoRF removes the top-k (bit 1), LeRF removes the complement.
std::vector<int> removed_pixels(const BinaryMask& m, RemovalOrder order);

}  // namespace road

#include "road/masking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "road/errors.hpp"

namespace road {

std::vector<int> rank_pixels(const SaliencyMap& s) {
  for (double v : s.scores)
    if (std::isnan(v)) throw InvalidSaliency("NaN saliency score");
  std::vector<int> perm(s.scores.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    return s.scores[a] > s.scores[b];
  });
  return perm;
}

BinaryMask topk_mask(const std::vector<int>& perm, int height, int width, int k) {
  int d = height * width;
  if (k < 0 || k > d) throw InvalidK("k out of range: " + std::to_string(k));
  BinaryMask m{height, width, std::vector<std::uint8_t>(d, 0), k};
  for (int i = 0; i < k; ++i) m.bits[perm[i]] = 1;
  return m;
}

FeatureVector select(const BinaryMask& m, const ImageTensor& x, Part part) {
  if (m.height != x.height || m.width != x.width)
    throw ShapeMismatch("mask/image shape mismatch");
  std::uint8_t want = part == Part::High ? 1 : 0;
  FeatureVector v;
  for (int p = 0; p < m.num_pixels(); ++p) {
    if (m.bits[p] != want) continue;
    v.source_indices.push_back(p);
    for (int c = 0; c < x.channels; ++c)
      v.values.push_back(x.data[static_cast<std::size_t>(p) * x.channels + c]);
  }
  return v;
}

ScatterResult scatter(const BinaryMask& m, const FeatureVector& v, int channels,
                      Part part) {
  std::uint8_t want = part == Part::High ? 1 : 0;
  int expected = 0;
  for (auto b : m.bits) expected += (b == want);
  if (static_cast<int>(v.source_indices.size()) != expected ||
      v.values.size() != v.source_indices.size() * static_cast<std::size_t>(channels))
    throw LengthMismatch("feature vector length inconsistent with mask");

  ScatterResult r;
  r.image = ImageTensor{m.height, m.width, channels,
                        std::vector<double>(static_cast<std::size_t>(m.num_pixels()) * channels, 0.0)};
  for (std::size_t i = 0; i < v.source_indices.size(); ++i) {
    int p = v.source_indices[i];
    for (int c = 0; c < channels; ++c)
      r.image.data[static_cast<std::size_t>(p) * channels + c] =
          v.values[i * static_cast<std::size_t>(channels) + c];
  }
  for (int p = 0; p < m.num_pixels(); ++p)
    if (m.bits[p] != want) r.unknown.push_back(p);
  return r;
}

SaliencyMap collapse_channels(const ImageTensor& t) {
  SaliencyMap s{t.height, t.width, std::vector<double>(static_cast<std::size_t>(t.num_pixels()), 0.0)};
  for (int p = 0; p < t.num_pixels(); ++p)
    for (int c = 0; c < t.channels; ++c)
      s.scores[p] += t.data[static_cast<std::size_t>(p) * t.channels + c];
  return s;
}

int k_from_fraction(double eta, int height, int width) {
  return static_cast<int>(std::lround(eta * height * width));
}

std::vector<int> removed_pixels(const BinaryMask& m, RemovalOrder order) {
  std::uint8_t removed_bit = order == RemovalOrder::MoRF ? 1 : 0;
  std::vector<int> out;
  for (int p = 0; p < m.num_pixels(); ++p)
    if (m.bits[p] == removed_bit) out.push_back(p);
  return out;
}

}  // namespace road

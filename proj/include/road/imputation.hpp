#pragma once

#include <cstdint>
#include <span>
#include <tuple>
#include <unordered_map>
#include <variant>
#include <vector>

#include "road/masking.hpp"
#include "road/rng.hpp"
#include "road/tensor_io.hpp"

namespace road {

struct FixedStrategy {
  /// Per-channel fill value; empty means "dataset per-channel mean",
  /// resolved by the caller.
  std::vector<double> value;
};

enum class NoiseScaleMode { RangeFraction, Sigma };

struct NoisyLinearStrategy {
  NoiseScaleMode noise_scale_mode = NoiseScaleMode::RangeFraction;
  double noise_scale = 0.01;  // fraction of image range, or sigma directly
  double solver_tol = 1e-8;
  int solver_max_iters = 0;  // 0 -> 10 * n_unknowns
};

struct ImputationConfig {
  std::variant<FixedStrategy, NoisyLinearStrategy> strategy;
  std::uint64_t rng_seed = 0;
};

/// Symmetric sparse system over the unknown pixels of one channel.
/// Neighbor weights: 1/6 direct, 1/12 diagonal (8-neighborhood).
struct SparseSystem {
  int n_unknowns = 0;
  std::vector<std::tuple<int, int, double>> entries;  // (row, col, coefficient)
  std::vector<double> rhs;
  std::unordered_map<int, int> unknown_index_map;  // pixel -> row
};

/// Sets the pixels removed under `part` to `value`; everything else untouched.
ImageTensor impute_fixed(const ImageTensor& x, const BinaryMask& m, Part part,
                         std::span<const double> value);

SparseSystem assemble_system(const ImageTensor& x, const std::vector<int>& unknown,
                             int channel);

/// Jacobi-preconditioned conjugate gradient.
std::vector<double> solve_system(const SparseSystem& s, double tol, int max_iters);

/// Solves the neighbor-weighted system per channel and adds Gaussian noise to
/// the imputed pixels only. `fallback_mean` (per channel) fills unknown
/// components with no known neighbor; pass the dataset per-channel mean.
ImageTensor impute_noisy_linear(const ImageTensor& x, const BinaryMask& m, Part part,
                                const NoisyLinearStrategy& cfg, Rng& rng,
                                std::span<const double> fallback_mean);

/// Mask recovery for fixed-value imputation: bit 1 where all channels equal
/// the fill value exactly.
BinaryMask probe_fixed_inverse(const ImageTensor& x_imp,
                               std::span<const double> fill_value);

}  // namespace road

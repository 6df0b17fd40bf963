#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "road/infotheory.hpp"
#include "road/masking.hpp"
#include "road/tensor_io.hpp"

namespace road {

/// Two-class Gaussian-process image world: shared squared-exponential
/// covariance, sinusoidal class means.
struct GPDatasetConfig {
  int height = 28;
  int width = 28;
  double kernel_width_fraction = 0.2;  // lengthscale as a fraction of width
  int n_samples = 2000;
  std::pair<double, double> class_priors{0.5, 0.5};
  // small enough that accuracy curves do not saturate across the removal grid
  double mean_amplitude = 0.15;
  double mean_frequency = 2.5;
  std::uint64_t seed = 0;

  void validate() const;  // throws InvalidConfig
};

enum class OrderingKind { True, Worst, Rand, Semi, Gauss };

/// Sigma_pq = exp(-||pos_p - pos_q||^2 / (2 l^2)), l = fraction * width,
/// positions in pixel units; 1e-6 jitter on the diagonal.
Eigen::MatrixXd build_covariance(const GPDatasetConfig& cfg);

/// mu_c(i,j) = A sin(2 pi f i/H + phi_c) sin(2 pi f j/W), phi_0 = 0,
/// phi_1 = pi/2, flattened row-major.
std::pair<std::vector<double>, std::vector<double>> class_means(const GPDatasetConfig& cfg);

/// Draws labels from the priors and images as mu_label + L z with L the
/// Cholesky factor of the covariance. Deterministic per cfg.seed.
Dataset sample_dataset(const GPDatasetConfig& cfg);

/// Handcrafted fixed importance scores: True = |mu1 - mu0|, Worst = its
/// negation, Rand = seeded uniform noise, Gauss = centered isotropic bump
/// (sigma = width/4), Semi = True on the left half / scaled Rand on the right.
SaliencyMap handcrafted_ordering(OrderingKind kind, const GPDatasetConfig& cfg,
                                 std::uint64_t seed);

/// bias_ratio of the ordering's top-k mask against the model covariance, one
/// value per k.
std::vector<double> analytic_bias(const GaussianModel& g, const SaliencyMap& ordering,
                                  const std::vector<int>& k_grid, Part side);

const char* ordering_name(OrderingKind kind);
OrderingKind ordering_from_name(const std::string& name);  // InvalidConfig on unknown

}  // namespace road

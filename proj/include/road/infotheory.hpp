#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "road/masking.hpp"

namespace road {

/// Exact joint distribution over a few named discrete axes, stored as a flat
/// row-major probability table.
struct DiscreteJoint {
  std::vector<std::string> axis_names;
  std::vector<int> cardinalities;
  std::vector<double> probs;  // row-major, last axis fastest

  int num_axes() const { return static_cast<int>(cardinalities.size()); }
  std::size_t table_size() const;
  void validate() const;  // throws InvalidConfig on bad shape or mass
};

struct LeakageDecomposition {
  double outcome = 0.0;    // I(Xp;C)
  double feature = 0.0;    // I(C;Xp|M)
  double mask = 0.0;       // I(C;M)
  double mitigator = 0.0;  // I(C;M|Xp)
};

struct GaussianModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double jitter = 0.0;  // 0 -> 1e-9 * trace/n
};

/// Shannon entropy (bits) of the marginal over `axes`. 0*log(0) := 0.
double entropy(const DiscreteJoint& j, const std::vector<int>& axes);

/// H(target | given) = H(target, given) - H(given), in bits.
double conditional_entropy(const DiscreteJoint& j, const std::vector<int>& target_axes,
                           const std::vector<int>& given_axes);

double mutual_information(const DiscreteJoint& j, const std::vector<int>& axes_a,
                          const std::vector<int>& axes_b);

/// Conditional mutual information I(a;b|g), in bits.
double conditional_mutual_information(const DiscreteJoint& j,
                                      const std::vector<int>& axes_a,
                                      const std::vector<int>& axes_b,
                                      const std::vector<int>& given_axes);

/// Decomposes I(Xp;C) = I(C;Xp|M) + I(C;M) - I(C;M|Xp) on a joint whose axes
/// are (C, Xp, M) in that order.
LeakageDecomposition leakage_decomposition(const DiscreteJoint& j);

double binary_entropy(double p);

/// Inverse of H2 on [0.5, 1], by bisection to 1e-12.
double inv_binary_entropy(double h);

/// Bounds on Bayes accuracy for binary equal-prior C with I = I(X;C) bits:
/// (I+1)/2 <= acc <= H2^-1(1-I).
std::pair<double, double> accuracy_bounds(double mi_bits);

/// Accuracy of the maximum-posterior rule on a (C, X) joint.
double bayes_accuracy(const DiscreteJoint& j);

/// Differential entropy (nats) of the marginal over `subset` indices.
double gaussian_entropy(const GaussianModel& g, const std::vector<int>& subset);

/// Differential entropy (nats) of target given `given`, via the Schur
/// complement of the covariance.
double gaussian_conditional_entropy(const GaussianModel& g,
                                    const std::vector<int>& target,
                                    const std::vector<int>& given);

struct BiasRatio {
  double value = 1.0;          // in [0, 1]
  bool clamped = false;        // raw ratio fell outside [0, 1]
  bool negative_entropy = false;  // a differential entropy was negative
};

/// Share of variance in the `side` partition that survives conditioning on
/// the complement: the per-dimension entropy-power ratio
/// exp((logdet Sigma_cond - logdet Sigma_marg) / n). Equals 1 for independent
/// pixels and approaches 0 under perfect redundancy. A plain quotient of
/// differential entropies is not scale-invariant and goes negative for small
/// variances, so the entropy-power form is used; `negative_entropy` reports
/// when the raw entropies were negative.
BiasRatio bias_ratio(const GaussianModel& g, const BinaryMask& mask, Part side);

class Rng;

/// Uniform-random normalized joint over the given cardinalities.
DiscreteJoint random_joint(const std::vector<int>& cardinalities,
                           const std::vector<std::string>& axis_names, Rng& rng);

/// Random (C, X) joint with binary C and exactly equal class priors.
DiscreteJoint random_equal_prior_joint(int x_cardinality, Rng& rng);

}  // namespace road

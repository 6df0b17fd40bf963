#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "road/masking.hpp"
#include "road/tensor_io.hpp"

namespace road {

struct TrainConfig {
  double learning_rate = 0.1;  // decayed as lr / (1 + t/100)
  double l2 = 1e-4;
  int epochs = 500;
  std::uint64_t seed = 0;
};

struct LogisticModel {
  Eigen::MatrixXd weights;  // (d+1) x c, last row is the bias
  int num_classes = 0;
  TrainConfig train_config;
  std::vector<double> loss_history;  // regularized loss per epoch

  /// Class scores, one row per sample.
  Eigen::MatrixXd logits(const Eigen::MatrixXd& X) const;
  /// Argmax prediction, ties to the lowest class index.
  std::vector<int> predict(const Eigen::MatrixXd& X) const;
};

/// L2-regularized multinomial logistic regression by full-batch gradient
/// descent. Deterministic given cfg.seed.
LogisticModel train_logistic(const Eigen::MatrixXd& X, const std::vector<int>& y,
                             const TrainConfig& cfg);

double eval_accuracy(const LogisticModel& model, const Eigen::MatrixXd& X,
                     const std::vector<int>& y);

/// Held-out accuracy of a logistic model trained on the flattened {0,1} mask
/// bits alone — the empirical surrogate for the class information carried by
/// mask shapes. Split is deterministic by index (first `train_fraction`).
double mask_only_accuracy(const std::vector<BinaryMask>& masks,
                          const std::vector<int>& labels, double train_fraction,
                          const TrainConfig& cfg);

/// Held-out per-pixel misclassification rate of a patch-logistic model that
/// predicts whether each pixel was imputed. Patches are (2r+1)^2 x C with
/// clamped borders; the split is by image index.
double imputation_predictor_missrate(
    const std::vector<std::pair<ImageTensor, BinaryMask>>& pairs, int patch_radius,
    double train_fraction, const TrainConfig& cfg);

void save_model(const LogisticModel& model, const std::string& weights_path,
                const std::string& config_path);
LogisticModel load_model(const std::string& weights_path, const std::string& config_path);

}  // namespace road

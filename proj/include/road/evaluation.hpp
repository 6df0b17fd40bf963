#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "road/classifiers.hpp"
#include "road/imputation.hpp"
#include "road/masking.hpp"
#include "road/tensor_io.hpp"

namespace road {

/// One evaluation strategy: removal order x retrain policy x imputation.
/// The eta grid is the fraction of pixels removed under MoRF and the fraction
/// of pixels KEPT under LeRF (both reuse the same top-k machinery).
struct StrategyConfig {
  std::string name;
  RemovalOrder order = RemovalOrder::MoRF;
  bool retrain = true;
  ImputationConfig imputation;
  std::vector<double> eta_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 0.9};
  int n_models = 15;
  TrainConfig train;
  double train_fraction = 2.0 / 3.0;  // deterministic split by index

  void validate() const;  // throws InvalidConfig
};

struct BiasIndicatorSeries {
  std::vector<double> eta;
  std::vector<double> gamma;
};

struct DebiasedCurve {
  EvaluationCurve curve;
  std::vector<bool> clamped;  // per eta: raw value fell outside [0,1]
};

struct RankMatrix {
  std::vector<std::string> methods;   // sorted by name
  std::vector<double> eta;
  std::vector<std::vector<double>> ranks;  // [eta][method], 1 = best, ties averaged
};

struct BenchmarkRow {
  int grid_size = 0;
  double fraction = 0.0;
  double median_seconds = 0.0;
};

/// Saliency per image; a single entry is shared across the whole dataset.
using SaliencySource = std::vector<SaliencyMap>;

/// Accuracy-vs-eta curve for one strategy. Retrain trains cfg.n_models
/// classifiers on the imputed train split per eta; no-retrain evaluates the
/// eta=0 baseline model on imputed test data.
EvaluationCurve run_curve(const Dataset& ds, const SaliencySource& saliency,
                          const StrategyConfig& cfg);

/// Acc'(eta) = baseline - (baseline - acc(eta)) / gamma(eta), clamped to [0,1].
DebiasedCurve debias_curve(const EvaluationCurve& curve, double baseline_acc,
                           const BiasIndicatorSeries& gammas, RemovalOrder order);

/// Bias indicator from the empirical pixel covariance with shrinkage
/// (Sigma + 1e-3 tr/d I): per eta, the bias ratio of the removed partition
/// given the kept one, with a small-sample correction, clamped to [1e-3, 1].
/// eta = 0 is defined as gamma = 1.
BiasIndicatorSeries estimate_gamma(const Dataset& ds, const SaliencySource& saliency,
                                   const StrategyConfig& cfg);

/// Per-eta average ranks over methods; lower accuracy ranks better under MoRF,
/// higher under LeRF.
RankMatrix strategy_ranking(const std::map<std::string, EvaluationCurve>& curves,
                            RemovalOrder order);

/// Spearman rank correlation with average tied ranks.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Trapezoidal area under the accuracy-vs-eta curve.
double auc(const EvaluationCurve& curve);

/// Median wall time of noisy-linear imputation per (grid size, removal
/// fraction), over `repetitions` runs.
std::vector<BenchmarkRow> runtime_benchmark(const NoisyLinearStrategy& cfg,
                                            const std::vector<int>& grid_sizes,
                                            const std::vector<double>& fractions,
                                            int repetitions = 5,
                                            std::uint64_t seed = 0);

/// Average tied ranks (1-based) of `values`; ascending = true means the
/// smallest value gets rank 1.
std::vector<double> average_ranks(const std::vector<double>& values, bool ascending);

/// Number of training rows in the deterministic by-index split.
std::size_t split_point(std::size_t n, double train_fraction);

}  // namespace road

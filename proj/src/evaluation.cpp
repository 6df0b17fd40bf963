#include "road/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "road/errors.hpp"
#include "road/infotheory.hpp"
#include "road/rng.hpp"

namespace road {

namespace {

/// Removed pixels become the imputation's unknown set: MoRF keeps the low
/// (bit-0) side of the top-k mask, LeRF keeps the high side.
Part kept_part(RemovalOrder order) {
  return order == RemovalOrder::MoRF ? Part::Low : Part::High;
}

Eigen::MatrixXd flatten(const std::vector<ImageTensor>& images, std::size_t begin,
                        std::size_t end) {
  const std::size_t d = images.empty() ? 0 : images[0].size();
  Eigen::MatrixXd X(end - begin, d);
  for (std::size_t i = begin; i < end; ++i) {
    if (images[i].size() != d) throw ShapeMismatch("inconsistent image shapes");
    for (std::size_t p = 0; p < d; ++p) X(i - begin, p) = images[i].data[p];
  }
  return X;
}

ImageTensor impute_one(const ImageTensor& img, const BinaryMask& mask, Part part,
                       const ImputationConfig& cfg, const Dataset& ds,
                       std::uint64_t stream_index) {
  if (const auto* fixed = std::get_if<FixedStrategy>(&cfg.strategy)) {
    const std::vector<double>& v = fixed->value.empty() ? ds.per_channel_mean : fixed->value;
    return impute_fixed(img, mask, part, v);
  }
  const auto& lin = std::get<NoisyLinearStrategy>(cfg.strategy);
  Rng rng = Rng::derive(cfg.rng_seed, "impute", stream_index);
  return impute_noisy_linear(img, mask, part, lin, rng, ds.per_channel_mean);
}

const SaliencyMap& map_for(const SaliencySource& saliency, std::size_t image_index) {
  return saliency.size() == 1 ? saliency[0] : saliency[image_index];
}

}  // namespace

std::size_t split_point(std::size_t n, double train_fraction) {
  auto n_train = static_cast<std::size_t>(train_fraction * n);
  if (n_train < 1 || n_train >= n) throw InvalidConfig("split leaves an empty side");
  return n_train;
}

void StrategyConfig::validate() const {
  if (eta_grid.empty()) throw InvalidConfig("empty eta grid");
  for (std::size_t i = 0; i < eta_grid.size(); ++i) {
    if (eta_grid[i] < 0.0 || eta_grid[i] > 1.0)
      throw InvalidConfig("eta outside [0,1]");
    if (i > 0 && eta_grid[i] <= eta_grid[i - 1])
      throw InvalidConfig("eta grid must be strictly increasing");
  }
  if (n_models < 1) throw InvalidConfig("n_models must be positive");
  if (train_fraction <= 0.0 || train_fraction >= 1.0)
    throw InvalidConfig("train fraction must lie in (0,1)");
}

EvaluationCurve run_curve(const Dataset& ds, const SaliencySource& saliency,
                          const StrategyConfig& cfg) {
  cfg.validate();
  const std::size_t n = ds.images.size();
  if (n == 0) throw InvalidConfig("empty dataset");
  if (saliency.size() != 1 && saliency.size() != n)
    throw LengthMismatch("saliency source must be shared or per-image");
  const int H = ds.images[0].height, W = ds.images[0].width;
  const std::size_t n_train = split_point(n, cfg.train_fraction);
  const Part part = kept_part(cfg.order);

  // ranking permutations are mask-independent; compute once per distinct map
  std::vector<std::vector<int>> perms;
  perms.reserve(saliency.size());
  for (const auto& s : saliency) {
    if (s.height != H || s.width != W) throw ShapeMismatch("saliency/image shape mismatch");
    perms.push_back(rank_pixels(s));
  }

  std::vector<int> y_train(ds.labels.begin(), ds.labels.begin() + n_train);
  std::vector<int> y_test(ds.labels.begin() + n_train, ds.labels.end());

  LogisticModel baseline;
  if (!cfg.retrain) {
    TrainConfig tc = cfg.train;
    tc.seed = Rng::hash_purpose(cfg.train.seed, "baseline");
    baseline = train_logistic(flatten(ds.images, 0, n_train), y_train, tc);
  }

  EvaluationCurve curve;
  curve.name = cfg.name;
  for (std::size_t e = 0; e < cfg.eta_grid.size(); ++e) {
    const double eta = cfg.eta_grid[e];
    const int k = k_from_fraction(eta, H, W);

    auto imputed = [&](std::size_t i) {
      BinaryMask mask = topk_mask(perms[saliency.size() == 1 ? 0 : i], H, W, k);
      return impute_one(ds.images[i], mask, part, cfg.imputation, ds,
                        e * n + i);
    };

    std::vector<ImageTensor> test_images;
    test_images.reserve(n - n_train);
    for (std::size_t i = n_train; i < n; ++i) test_images.push_back(imputed(i));
    Eigen::MatrixXd X_test = flatten(test_images, 0, test_images.size());

    double mean = 0.0, stderr_ = 0.0;
    if (cfg.retrain) {
      std::vector<ImageTensor> train_images;
      train_images.reserve(n_train);
      for (std::size_t i = 0; i < n_train; ++i) train_images.push_back(imputed(i));
      Eigen::MatrixXd X_train = flatten(train_images, 0, train_images.size());

      std::vector<double> accs(cfg.n_models);
      for (int m = 0; m < cfg.n_models; ++m) {
        TrainConfig tc = cfg.train;
        tc.seed = Rng::hash_purpose(cfg.train.seed, "model", m);
        LogisticModel model = train_logistic(X_train, y_train, tc);
        accs[m] = eval_accuracy(model, X_test, y_test);
      }
      mean = std::accumulate(accs.begin(), accs.end(), 0.0) / cfg.n_models;
      if (cfg.n_models > 1) {
        double ss = 0.0;
        for (double a : accs) ss += (a - mean) * (a - mean);
        stderr_ = std::sqrt(ss / (cfg.n_models - 1)) / std::sqrt(double(cfg.n_models));
      }
    } else {
      mean = eval_accuracy(baseline, X_test, y_test);
    }
    curve.eta.push_back(eta);
    curve.acc_mean.push_back(mean);
    curve.acc_stderr.push_back(stderr_);
  }
  return curve;
}

DebiasedCurve debias_curve(const EvaluationCurve& curve, double baseline_acc,
                           const BiasIndicatorSeries& gammas,
                           [[maybe_unused]] RemovalOrder order) {
  if (curve.eta != gammas.eta) throw GridMismatch("curve/gamma eta grids differ");
  if (baseline_acc < 0.0 || baseline_acc > 1.0)
    throw InvalidConfig("baseline accuracy outside [0,1]");
  DebiasedCurve out;
  out.curve.name = curve.name + "_debiased";
  out.curve.eta = curve.eta;
  for (std::size_t i = 0; i < curve.eta.size(); ++i) {
    double g = gammas.gamma[i];
    if (g <= 0.0) throw InvalidGamma("gamma must be positive");
    double raw = baseline_acc - (baseline_acc - curve.acc_mean[i]) / g;
    double clamped = std::clamp(raw, 0.0, 1.0);
    out.curve.acc_mean.push_back(clamped);
    out.curve.acc_stderr.push_back(curve.acc_stderr[i] / g);
    out.clamped.push_back(clamped != raw);
  }
  return out;
}

BiasIndicatorSeries estimate_gamma(const Dataset& ds, const SaliencySource& saliency,
                                   const StrategyConfig& cfg) {
  cfg.validate();
  const std::size_t n = ds.images.size();
  if (n == 0) throw InvalidConfig("empty dataset");
  const int H = ds.images[0].height, W = ds.images[0].width, C = ds.images[0].channels;
  const int d = H * W;
  if (static_cast<int>(n) < 2 * d)
    throw SingularCovariance("need at least 2*d samples for covariance estimation");

  // per-pixel values (channel means), centered
  Eigen::MatrixXd X(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (int p = 0; p < d; ++p) {
      double acc = 0.0;
      for (int c = 0; c < C; ++c)
        acc += ds.images[i].data[static_cast<std::size_t>(p) * C + c];
      X(i, p) = acc / C;
    }
  }
  Eigen::RowVectorXd mu = X.colwise().mean();
  X.rowwise() -= mu;
  Eigen::MatrixXd cov = (X.transpose() * X) / static_cast<double>(n);
  cov.diagonal().array() += 1e-3 * cov.trace() / d;

  GaussianModel g;
  g.mean = Eigen::VectorXd::Zero(d);
  g.cov = std::move(cov);

  const SaliencyMap& s = map_for(saliency, 0);
  std::vector<int> perm = rank_pixels(s);
  const Part side = kept_part(cfg.order);

  BiasIndicatorSeries out;
  for (double eta : cfg.eta_grid) {
    int k = k_from_fraction(eta, H, W);
    double gamma = 1.0;
    if (k > 0 && k < d) {
      BinaryMask mask = topk_mask(perm, H, W, k);
      double raw = bias_ratio(g, mask, side).value;
      // empirical residual variances shrink by about (n - n_cond)/n when
      // conditioning on n_cond variables; undo that before clamping
      int n_cond = side == Part::Low ? k : d - k;
      double correction =
          static_cast<double>(n) / std::max<double>(1.0, double(n) - n_cond);
      gamma = std::clamp(raw * correction, 1e-3, 1.0);
    } else if (k == d) {
      gamma = 1e-3;  // nothing kept; degenerate partition
    }
    out.eta.push_back(eta);
    out.gamma.push_back(gamma);
  }
  return out;
}

std::vector<double> average_ranks(const std::vector<double>& values, bool ascending) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return ascending ? values[a] < values[b] : values[a] > values[b];
  });
  std::vector<double> ranks(values.size(), 0.0);
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    double avg = 0.5 * (i + j) + 1.0;  // 1-based average of tied positions
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

RankMatrix strategy_ranking(const std::map<std::string, EvaluationCurve>& curves,
                            RemovalOrder order) {
  if (curves.size() < 2) throw InvalidConfig("ranking needs at least two methods");
  RankMatrix out;
  const EvaluationCurve* first = nullptr;
  for (const auto& [name, curve] : curves) {
    if (!first)
      first = &curve;
    else if (curve.eta != first->eta)
      throw GridMismatch("curves share no common eta grid");
    out.methods.push_back(name);
  }
  out.eta = first->eta;
  const bool ascending = order == RemovalOrder::MoRF;  // lower accuracy is better
  for (std::size_t e = 0; e < out.eta.size(); ++e) {
    std::vector<double> accs;
    for (const auto& [name, curve] : curves) accs.push_back(curve.acc_mean[e]);
    out.ranks.push_back(average_ranks(accs, ascending));
  }
  return out;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw LengthMismatch("spearman needs two equal-length vectors of size >= 2");
  std::vector<double> ra = average_ranks(a, true);
  std::vector<double> rb = average_ranks(b, true);
  double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / ra.size();
  double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / rb.size();
  double num = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0)
    throw UndefinedCorrelation("constant vector has no rank correlation");
  return num / std::sqrt(va * vb);
}

double auc(const EvaluationCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.eta.size(); ++i)
    area += 0.5 * (curve.acc_mean[i] + curve.acc_mean[i - 1]) *
            (curve.eta[i] - curve.eta[i - 1]);
  return area;
}

std::vector<BenchmarkRow> runtime_benchmark(const NoisyLinearStrategy& cfg,
                                            const std::vector<int>& grid_sizes,
                                            const std::vector<double>& fractions,
                                            int repetitions, std::uint64_t seed) {
  std::vector<BenchmarkRow> rows;
  for (int size : grid_sizes) {
    const int d = size * size;
    Rng rng = Rng::derive(seed, "bench-image", static_cast<std::uint64_t>(size));
    ImageTensor img{size, size, 1, std::vector<double>(d)};
    for (double& v : img.data) v = rng.uniform();
    SaliencyMap s{size, size, std::vector<double>(d)};
    for (double& v : s.scores) v = rng.uniform();
    std::vector<int> perm = rank_pixels(s);

    for (double f : fractions) {
      int k = static_cast<int>(std::lround(f * d));
      BinaryMask mask = topk_mask(perm, size, size, k);
      std::vector<double> fallback{0.5};
      std::vector<double> times;
      for (int r = 0; r < repetitions; ++r) {
        Rng noise = Rng::derive(seed, "bench-noise", static_cast<std::uint64_t>(r));
        auto t0 = std::chrono::steady_clock::now();
        impute_noisy_linear(img, mask, Part::Low, cfg, noise, fallback);
        auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
      }
      std::sort(times.begin(), times.end());
      rows.push_back({size, f, times[times.size() / 2]});
    }
  }
  return rows;
}

}  // namespace road

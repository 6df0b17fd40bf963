#include "road/toyworld.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "road/errors.hpp"
#include "road/rng.hpp"

namespace road {

void GPDatasetConfig::validate() const {
  if (height <= 0 || width <= 0) throw InvalidConfig("non-positive image size");
  if (kernel_width_fraction <= 0.0 || kernel_width_fraction >= 1.0)
    throw InvalidConfig("kernel width fraction must lie in (0,1)");
  if (n_samples <= 0) throw InvalidConfig("n_samples must be positive");
  if (std::abs(class_priors.first + class_priors.second - 1.0) > 1e-12 ||
      class_priors.first < 0.0 || class_priors.second < 0.0)
    throw InvalidConfig("class priors must be nonnegative and sum to 1");
}

Eigen::MatrixXd build_covariance(const GPDatasetConfig& cfg) {
  cfg.validate();
  const int d = cfg.height * cfg.width;
  const double ell = cfg.kernel_width_fraction * cfg.width;
  const double inv_2l2 = 1.0 / (2.0 * ell * ell);
  Eigen::MatrixXd cov(d, d);
  for (int p = 0; p < d; ++p) {
    int pi = p / cfg.width, pj = p % cfg.width;
    for (int q = 0; q <= p; ++q) {
      int qi = q / cfg.width, qj = q % cfg.width;
      double d2 = double(pi - qi) * (pi - qi) + double(pj - qj) * (pj - qj);
      cov(p, q) = cov(q, p) = std::exp(-d2 * inv_2l2);
    }
  }
  cov.diagonal().array() += 1e-6;
  return cov;
}

std::pair<std::vector<double>, std::vector<double>> class_means(const GPDatasetConfig& cfg) {
  cfg.validate();
  const double two_pi_f = 2.0 * std::numbers::pi * cfg.mean_frequency;
  const double phase1 = std::numbers::pi / 2.0;
  std::vector<double> mu0, mu1;
  mu0.reserve(static_cast<std::size_t>(cfg.height) * cfg.width);
  mu1.reserve(mu0.capacity());
  for (int i = 0; i < cfg.height; ++i) {
    for (int j = 0; j < cfg.width; ++j) {
      double col = std::sin(two_pi_f * j / cfg.width);
      mu0.push_back(cfg.mean_amplitude * std::sin(two_pi_f * i / cfg.height) * col);
      mu1.push_back(cfg.mean_amplitude * std::sin(two_pi_f * i / cfg.height + phase1) * col);
    }
  }
  return {std::move(mu0), std::move(mu1)};
}

Dataset sample_dataset(const GPDatasetConfig& cfg) {
  cfg.validate();
  const int d = cfg.height * cfg.width;
  Eigen::MatrixXd cov = build_covariance(cfg);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw SingularCovariance("toy covariance is not positive definite");
  Eigen::MatrixXd L = llt.matrixL();
  auto [mu0, mu1] = class_means(cfg);

  Dataset ds;
  ds.num_classes = 2;
  ds.images.reserve(cfg.n_samples);
  ds.labels.reserve(cfg.n_samples);
  Eigen::VectorXd z(d);
  for (int s = 0; s < cfg.n_samples; ++s) {
    Rng draw = Rng::derive(cfg.seed, "toy-draw", static_cast<std::uint64_t>(s));
    int label = draw.uniform() < cfg.class_priors.first ? 0 : 1;
    for (int p = 0; p < d; ++p) z(p) = draw.normal();
    Eigen::VectorXd x = L * z;
    const std::vector<double>& mu = label == 0 ? mu0 : mu1;
    ImageTensor img{cfg.height, cfg.width, 1, std::vector<double>(d)};
    for (int p = 0; p < d; ++p) img.data[p] = mu[p] + x(p);
    ds.images.push_back(std::move(img));
    ds.labels.push_back(label);
  }
  ds.recompute_mean();
  return ds;
}

SaliencyMap handcrafted_ordering(OrderingKind kind, const GPDatasetConfig& cfg,
                                 std::uint64_t seed) {
  cfg.validate();
  const int d = cfg.height * cfg.width;
  SaliencyMap s{cfg.height, cfg.width, std::vector<double>(d, 0.0)};
  auto [mu0, mu1] = class_means(cfg);

  switch (kind) {
    case OrderingKind::True:
      for (int p = 0; p < d; ++p) s.scores[p] = std::abs(mu1[p] - mu0[p]);
      break;
    case OrderingKind::Worst:
      for (int p = 0; p < d; ++p) s.scores[p] = -std::abs(mu1[p] - mu0[p]);
      break;
    case OrderingKind::Rand: {
      Rng rng = Rng::derive(seed, "ordering-rand");
      for (int p = 0; p < d; ++p) s.scores[p] = rng.uniform();
      break;
    }
    case OrderingKind::Gauss: {
      const double sigma = cfg.width / 4.0;
      const double inv_2s2 = 1.0 / (2.0 * sigma * sigma);
      for (int p = 0; p < d; ++p) {
        double di = p / cfg.width - cfg.height / 2.0;
        double dj = p % cfg.width - cfg.width / 2.0;
        s.scores[p] = std::exp(-(di * di + dj * dj) * inv_2s2);
      }
      break;
    }
    case OrderingKind::Semi: {
      double peak = 0.0;
      for (int p = 0; p < d; ++p) peak = std::max(peak, std::abs(mu1[p] - mu0[p]));
      Rng rng = Rng::derive(seed, "ordering-semi");
      for (int p = 0; p < d; ++p) {
        if (p % cfg.width < cfg.width / 2)
          s.scores[p] = std::abs(mu1[p] - mu0[p]);
        else
          s.scores[p] = peak * rng.uniform();
      }
      break;
    }
  }
  return s;
}

std::vector<double> analytic_bias(const GaussianModel& g, const SaliencyMap& ordering,
                                  const std::vector<int>& k_grid, Part side) {
  std::vector<int> perm = rank_pixels(ordering);
  std::vector<double> out;
  out.reserve(k_grid.size());
  for (int k : k_grid) {
    BinaryMask m = topk_mask(perm, ordering.height, ordering.width, k);
    out.push_back(bias_ratio(g, m, side).value);
  }
  return out;
}

const char* ordering_name(OrderingKind kind) {
  switch (kind) {
    case OrderingKind::True: return "true";
    case OrderingKind::Worst: return "worst";
    case OrderingKind::Rand: return "rand";
    case OrderingKind::Semi: return "semi";
    case OrderingKind::Gauss: return "gauss";
  }
  return "?";
}

OrderingKind ordering_from_name(const std::string& name) {
  if (name == "true") return OrderingKind::True;
  if (name == "worst") return OrderingKind::Worst;
  if (name == "rand") return OrderingKind::Rand;
  if (name == "semi") return OrderingKind::Semi;
  if (name == "gauss") return OrderingKind::Gauss;
  throw InvalidConfig("unknown ordering: " + name);
}

}  // namespace road

#include "road/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "road/errors.hpp"
#include "road/rng.hpp"

namespace road {

namespace {

/// Row-wise softmax with max subtraction.
Eigen::MatrixXd softmax(Eigen::MatrixXd logits) {
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    double m = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - m).exp();
    logits.row(i) /= logits.row(i).sum();
  }
  return logits;
}

int argmax_lowest(const Eigen::RowVectorXd& row) {
  int best = 0;
  for (int c = 1; c < row.size(); ++c)
    if (row(c) > row(best)) best = c;
  return best;
}

}  // namespace

Eigen::MatrixXd LogisticModel::logits(const Eigen::MatrixXd& X) const {
  if (X.cols() + 1 != weights.rows())
    throw ShapeMismatch("feature dimension does not match model");
  return (X * weights.topRows(weights.rows() - 1)).rowwise() +
         weights.bottomRows(1).row(0);
}

std::vector<int> LogisticModel::predict(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd z = logits(X);
  std::vector<int> out(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) out[i] = argmax_lowest(z.row(i));
  return out;
}

LogisticModel train_logistic(const Eigen::MatrixXd& X, const std::vector<int>& y,
                             const TrainConfig& cfg) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (n == 0 || static_cast<std::size_t>(n) != y.size())
    throw ShapeMismatch("feature/label count mismatch");
  int c = 0;
  for (int label : y) {
    if (label < 0) throw InvalidConfig("negative class label");
    c = std::max(c, label + 1);
  }
  c = std::max(c, 2);

  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, c);
  for (Eigen::Index i = 0; i < n; ++i) Y(i, y[i]) = 1.0;

  LogisticModel model;
  model.num_classes = c;
  model.train_config = cfg;
  model.weights.resize(d + 1, c);
  Rng rng = Rng::derive(cfg.seed, "logistic-init");
  for (Eigen::Index i = 0; i < d + 1; ++i)
    for (int k = 0; k < c; ++k) model.weights(i, k) = 0.01 * rng.normal();

  model.loss_history.reserve(cfg.epochs);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int t = 0; t < cfg.epochs; ++t) {
    Eigen::MatrixXd P = softmax(model.logits(X));

    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) loss -= std::log(std::max(P(i, y[i]), 1e-300));
    loss *= inv_n;
    loss += 0.5 * cfg.l2 * model.weights.topRows(d).squaredNorm();
    if (!std::isfinite(loss)) throw TrainingDiverged("non-finite training loss");
    model.loss_history.push_back(loss);

    Eigen::MatrixXd diff = (P - Y) * inv_n;
    Eigen::MatrixXd grad(d + 1, c);
    grad.topRows(d) = X.transpose() * diff + cfg.l2 * model.weights.topRows(d);
    grad.bottomRows(1) = diff.colwise().sum();
    double lr = cfg.learning_rate / (1.0 + t / 100.0);
    model.weights -= lr * grad;
  }
  return model;
}

double eval_accuracy(const LogisticModel& model, const Eigen::MatrixXd& X,
                     const std::vector<int>& y) {
  if (static_cast<std::size_t>(X.rows()) != y.size())
    throw ShapeMismatch("feature/label count mismatch");
  std::vector<int> pred = model.predict(X);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hits += (pred[i] == y[i]);
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

double mask_only_accuracy(const std::vector<BinaryMask>& masks,
                          const std::vector<int>& labels, double train_fraction,
                          const TrainConfig& cfg) {
  if (masks.empty() || masks.size() != labels.size())
    throw ShapeMismatch("mask/label count mismatch");
  const int d = masks[0].num_pixels();
  Eigen::MatrixXd X(masks.size(), d);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (masks[i].num_pixels() != d) throw ShapeMismatch("inconsistent mask shapes");
    for (int p = 0; p < d; ++p) X(i, p) = masks[i].bits[p];
  }
  auto n_train = static_cast<Eigen::Index>(train_fraction * masks.size());
  if (n_train < 1 || n_train >= static_cast<Eigen::Index>(masks.size()))
    throw InvalidConfig("train fraction leaves an empty split");
  std::vector<int> y_train(labels.begin(), labels.begin() + n_train);
  std::vector<int> y_test(labels.begin() + n_train, labels.end());
  LogisticModel model = train_logistic(X.topRows(n_train), y_train, cfg);
  return eval_accuracy(model, X.bottomRows(X.rows() - n_train), y_test);
}

double imputation_predictor_missrate(
    const std::vector<std::pair<ImageTensor, BinaryMask>>& pairs, int patch_radius,
    double train_fraction, const TrainConfig& cfg) {
  if (pairs.empty()) throw InvalidConfig("no imputed images supplied");
  const ImageTensor& first = pairs[0].first;
  const int H = first.height, W = first.width, C = first.channels;
  const int side = 2 * patch_radius + 1;
  const int d = side * side * C;

  auto n_train_imgs = static_cast<std::size_t>(train_fraction * pairs.size());
  if (n_train_imgs < 1 || n_train_imgs >= pairs.size())
    throw InvalidConfig("train fraction leaves an empty split");

  auto fill_rows = [&](std::size_t begin, std::size_t end, Eigen::MatrixXd& X,
                       std::vector<int>& y) {
    Eigen::Index row = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto& [img, mask] = pairs[i];
      if (img.height != H || img.width != W || img.channels != C)
        throw ShapeMismatch("inconsistent image shapes");
      for (int h = 0; h < H; ++h) {
        for (int w = 0; w < W; ++w) {
          int col = 0;
          for (int dh = -patch_radius; dh <= patch_radius; ++dh) {
            for (int dw = -patch_radius; dw <= patch_radius; ++dw) {
              int a = std::clamp(h + dh, 0, H - 1);
              int b = std::clamp(w + dw, 0, W - 1);
              for (int c = 0; c < C; ++c) X(row, col++) = img.at(a, b, c);
            }
          }
          y.push_back(mask.bits[h * W + w]);
          ++row;
        }
      }
    }
  };

  const Eigen::Index per_img = static_cast<Eigen::Index>(H) * W;
  Eigen::MatrixXd X_train(per_img * n_train_imgs, d);
  Eigen::MatrixXd X_test(per_img * (pairs.size() - n_train_imgs), d);
  std::vector<int> y_train, y_test;
  fill_rows(0, n_train_imgs, X_train, y_train);
  fill_rows(n_train_imgs, pairs.size(), X_test, y_test);

  LogisticModel model = train_logistic(X_train, y_train, cfg);
  return 1.0 - eval_accuracy(model, X_test, y_test);
}

void save_model(const LogisticModel& model, const std::string& weights_path,
                const std::string& config_path) {
  std::vector<double> flat(model.weights.size());
  for (Eigen::Index i = 0; i < model.weights.rows(); ++i)
    for (Eigen::Index k = 0; k < model.weights.cols(); ++k)
      flat[static_cast<std::size_t>(i) * model.weights.cols() + k] = model.weights(i, k);
  npy::write_f8(weights_path,
                {static_cast<std::size_t>(model.weights.rows()),
                 static_cast<std::size_t>(model.weights.cols())},
                flat);

  nlohmann::json j{{"num_classes", model.num_classes},
                   {"learning_rate", model.train_config.learning_rate},
                   {"l2", model.train_config.l2},
                   {"epochs", model.train_config.epochs},
                   {"seed", model.train_config.seed}};
  std::ofstream out(config_path);
  if (!out) throw IoError("cannot write " + config_path);
  out << j.dump(2) << "\n";
}

LogisticModel load_model(const std::string& weights_path, const std::string& config_path) {
  npy::Array arr = npy::read(weights_path);
  if (arr.shape.size() != 2) throw FormatError("model weights must be 2-D");

  std::ifstream in(config_path);
  if (!in) throw IoError("cannot read " + config_path);
  nlohmann::json j = nlohmann::json::parse(in);

  LogisticModel model;
  model.num_classes = j.at("num_classes").get<int>();
  model.train_config.learning_rate = j.at("learning_rate").get<double>();
  model.train_config.l2 = j.at("l2").get<double>();
  model.train_config.epochs = j.at("epochs").get<int>();
  model.train_config.seed = j.at("seed").get<std::uint64_t>();
  model.weights.resize(arr.shape[0], arr.shape[1]);
  for (std::size_t i = 0; i < arr.shape[0]; ++i)
    for (std::size_t k = 0; k < arr.shape[1]; ++k)
      model.weights(i, k) = arr.data[i * arr.shape[1] + k];
  if (model.weights.cols() != model.num_classes)
    throw FormatError("weight shape disagrees with saved num_classes");
  return model;
}

}  // namespace road

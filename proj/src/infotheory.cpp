#include "road/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>

#include "road/errors.hpp"
#include "road/rng.hpp"

namespace road {

namespace {

constexpr double kLn2PiE = 2.8378770664093453;  // ln(2*pi*e)

double xlogx(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

void check_axes(const DiscreteJoint& j, const std::vector<int>& axes) {
  if (axes.empty()) throw InvalidAxes("empty axis set");
  for (int a : axes)
    if (a < 0 || a >= j.num_axes()) throw InvalidAxes("axis index out of range");
}

void check_disjoint(const std::vector<int>& a, const std::vector<int>& b) {
  for (int x : a)
    if (std::find(b.begin(), b.end(), x) != b.end())
      throw InvalidAxes("axis sets overlap");
}

std::vector<int> joined(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

/// Marginal probability table over `axes` (in the given order).
std::vector<double> marginal(const DiscreteJoint& j, const std::vector<int>& axes) {
  std::size_t out_size = 1;
  for (int a : axes) out_size *= static_cast<std::size_t>(j.cardinalities[a]);
  std::vector<double> out(out_size, 0.0);

  int n = j.num_axes();
  std::vector<int> idx(n, 0);
  for (std::size_t cell = 0; cell < j.probs.size(); ++cell) {
    std::size_t o = 0;
    for (int a : axes) o = o * j.cardinalities[a] + idx[a];
    out[o] += j.probs[cell];
    for (int a = n - 1; a >= 0; --a) {
      if (++idx[a] < j.cardinalities[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

double resolved_jitter(const GaussianModel& g) {
  if (g.jitter > 0.0) return g.jitter;
  int n = static_cast<int>(g.cov.rows());
  return n > 0 ? 1e-9 * g.cov.trace() / n : 0.0;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const std::vector<int>& rows,
                          const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < cols.size(); ++k) out(i, k) = m(rows[i], cols[k]);
  return out;
}

double logdet_llt(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw SingularCovariance("covariance block is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

/// log-determinants of the marginal block over `target` and of its Schur
/// complement given `given` (jitter already applied to the diagonal).
std::pair<double, double> block_logdets(const Eigen::MatrixXd& cov,
                                        const std::vector<int>& target,
                                        const std::vector<int>& given) {
  Eigen::MatrixXd tt = submatrix(cov, target, target);
  double logdet_marg = logdet_llt(tt);
  if (given.empty()) return {logdet_marg, logdet_marg};
  Eigen::MatrixXd gg = submatrix(cov, given, given);
  Eigen::MatrixXd gt = submatrix(cov, given, target);
  Eigen::LLT<Eigen::MatrixXd> llt(gg);
  if (llt.info() != Eigen::Success)
    throw SingularCovariance("conditioning block is not positive definite");
  Eigen::MatrixXd schur = tt - gt.transpose() * llt.solve(gt);
  // symmetrize against round-off before factorizing
  schur = 0.5 * (schur + schur.transpose());
  return {logdet_marg, logdet_llt(schur)};
}

}  // namespace

std::size_t DiscreteJoint::table_size() const {
  std::size_t n = 1;
  for (int c : cardinalities) n *= static_cast<std::size_t>(c);
  return n;
}

void DiscreteJoint::validate() const {
  if (cardinalities.empty() || probs.size() != table_size())
    throw InvalidConfig("probability table size does not match cardinalities");
  double mass = 0.0;
  for (double p : probs) {
    if (p < 0.0 || !std::isfinite(p)) throw InvalidConfig("negative or non-finite probability");
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-9) throw InvalidConfig("probabilities do not sum to 1");
}

double entropy(const DiscreteJoint& j, const std::vector<int>& axes) {
  check_axes(j, axes);
  std::vector<double> p = marginal(j, axes);
  double h = 0.0;
  for (double v : p) h -= xlogx(v);
  return h;
}

double conditional_entropy(const DiscreteJoint& j, const std::vector<int>& target_axes,
                           const std::vector<int>& given_axes) {
  check_axes(j, target_axes);
  check_axes(j, given_axes);
  check_disjoint(target_axes, given_axes);
  return entropy(j, joined(target_axes, given_axes)) - entropy(j, given_axes);
}

double mutual_information(const DiscreteJoint& j, const std::vector<int>& axes_a,
                          const std::vector<int>& axes_b) {
  return entropy(j, axes_a) - conditional_entropy(j, axes_a, axes_b);
}

double conditional_mutual_information(const DiscreteJoint& j,
                                      const std::vector<int>& axes_a,
                                      const std::vector<int>& axes_b,
                                      const std::vector<int>& given_axes) {
  check_axes(j, axes_a);
  check_axes(j, axes_b);
  check_axes(j, given_axes);
  check_disjoint(axes_a, axes_b);
  check_disjoint(axes_a, given_axes);
  check_disjoint(axes_b, given_axes);
  // I(a;b|g) = H(a,g) + H(b,g) - H(g) - H(a,b,g)
  return entropy(j, joined(axes_a, given_axes)) + entropy(j, joined(axes_b, given_axes)) -
         entropy(j, given_axes) - entropy(j, joined(joined(axes_a, axes_b), given_axes));
}

LeakageDecomposition leakage_decomposition(const DiscreteJoint& j) {
  if (j.num_axes() != 3) throw InvalidAxes("leakage decomposition needs axes (C, Xp, M)");
  const std::vector<int> C{0}, Xp{1}, M{2};
  LeakageDecomposition d;
  d.outcome = mutual_information(j, Xp, C);
  d.feature = conditional_mutual_information(j, C, Xp, M);
  d.mask = mutual_information(j, C, M);
  d.mitigator = conditional_mutual_information(j, C, M, Xp);
  return d;
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw DomainError("binary entropy argument outside [0,1]");
  return -xlogx(p) - xlogx(1.0 - p);
}

double inv_binary_entropy(double h) {
  if (h < 0.0 || h > 1.0) throw DomainError("entropy value outside [0,1]");
  // H2 is strictly decreasing on [0.5, 1]
  double lo = 0.5, hi = 1.0;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) > h)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> accuracy_bounds(double mi_bits) {
  if (mi_bits < -1e-12 || mi_bits > 1.0 + 1e-12)
    throw DomainError("mutual information outside [0,1] bits");
  double i = std::clamp(mi_bits, 0.0, 1.0);
  return {(i + 1.0) / 2.0, inv_binary_entropy(1.0 - i)};
}

double bayes_accuracy(const DiscreteJoint& j) {
  if (j.num_axes() != 2) throw InvalidAxes("bayes accuracy needs axes (C, X)");
  int nc = j.cardinalities[0];
  int nx = j.cardinalities[1];
  double acc = 0.0;
  for (int x = 0; x < nx; ++x) {
    double best = 0.0;
    for (int c = 0; c < nc; ++c)
      best = std::max(best, j.probs[static_cast<std::size_t>(c) * nx + x]);
    acc += best;
  }
  return acc;
}

double gaussian_entropy(const GaussianModel& g, const std::vector<int>& subset) {
  if (subset.empty()) throw EmptyPartition("entropy of an empty variable set");
  Eigen::MatrixXd cov = g.cov;
  cov.diagonal().array() += resolved_jitter(g);
  double logdet = logdet_llt(submatrix(cov, subset, subset));
  return 0.5 * (subset.size() * kLn2PiE + logdet);
}

double gaussian_conditional_entropy(const GaussianModel& g,
                                    const std::vector<int>& target,
                                    const std::vector<int>& given) {
  if (target.empty()) throw EmptyPartition("entropy of an empty variable set");
  Eigen::MatrixXd cov = g.cov;
  cov.diagonal().array() += resolved_jitter(g);
  auto [marg, cond] = block_logdets(cov, target, given);
  (void)marg;
  return 0.5 * (target.size() * kLn2PiE + cond);
}

BiasRatio bias_ratio(const GaussianModel& g, const BinaryMask& mask, Part side) {
  std::uint8_t want = side == Part::High ? 1 : 0;
  std::vector<int> part, rest;
  for (int p = 0; p < mask.num_pixels(); ++p)
    (mask.bits[p] == want ? part : rest).push_back(p);
  if (part.empty() || rest.empty())
    throw EmptyPartition("bias ratio needs both mask partitions non-empty");

  Eigen::MatrixXd cov = g.cov;
  cov.diagonal().array() += resolved_jitter(g);
  auto [logdet_marg, logdet_cond] = block_logdets(cov, part, rest);

  double n = static_cast<double>(part.size());
  BiasRatio r;
  r.negative_entropy = 0.5 * (n * kLn2PiE + logdet_marg) < 0.0 ||
                       0.5 * (n * kLn2PiE + logdet_cond) < 0.0;
  double raw = std::exp((logdet_cond - logdet_marg) / n);
  r.value = std::clamp(raw, 0.0, 1.0);
  r.clamped = raw != r.value;
  return r;
}

DiscreteJoint random_joint(const std::vector<int>& cardinalities,
                           const std::vector<std::string>& axis_names, Rng& rng) {
  DiscreteJoint j;
  j.axis_names = axis_names;
  j.cardinalities = cardinalities;
  j.probs.resize(j.table_size());
  double mass = 0.0;
  for (double& p : j.probs) {
    p = rng.uniform() + 1e-12;
    mass += p;
  }
  for (double& p : j.probs) p /= mass;
  return j;
}

DiscreteJoint random_equal_prior_joint(int x_cardinality, Rng& rng) {
  DiscreteJoint j;
  j.axis_names = {"C", "X"};
  j.cardinalities = {2, x_cardinality};
  j.probs.resize(j.table_size());
  for (int c = 0; c < 2; ++c) {
    double mass = 0.0;
    for (int x = 0; x < x_cardinality; ++x) {
      double p = rng.uniform() + 1e-12;
      j.probs[static_cast<std::size_t>(c) * x_cardinality + x] = p;
      mass += p;
    }
    for (int x = 0; x < x_cardinality; ++x)
      j.probs[static_cast<std::size_t>(c) * x_cardinality + x] *= 0.5 / mass;
  }
  return j;
}

}  // namespace road

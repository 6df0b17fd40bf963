#include <doctest.h>

#include <cmath>

#include "road/errors.hpp"
#include "road/infotheory.hpp"
#include "road/rng.hpp"

using namespace road;

namespace {

DiscreteJoint binary_pair(double p00, double p01, double p10, double p11) {
  return {{"C", "X"}, {2, 2}, {p00, p01, p10, p11}};
}

}  // namespace

TEST_CASE("entropy basics") {
  DiscreteJoint j{{"X"}, {2}, {0.5, 0.5}};
  CHECK(entropy(j, {0}) == doctest::Approx(1.0).epsilon(1e-12));
  DiscreteJoint point{{"X"}, {3}, {0.0, 1.0, 0.0}};
  CHECK(entropy(point, {0}) == doctest::Approx(0.0));
  DiscreteJoint skew{{"X"}, {2}, {0.25, 0.75}};
  CHECK(entropy(skew, {0}) == doctest::Approx(0.811278).epsilon(1e-6));
  CHECK_THROWS_AS(entropy(j, {}), InvalidAxes);
  CHECK_THROWS_AS(entropy(j, {5}), InvalidAxes);
}

TEST_CASE("conditional entropy matches the per-outcome average") {
  Rng rng(1);
  DiscreteJoint j = random_joint({3, 3, 2}, {"A", "B", "C"}, rng);
  double lib = conditional_entropy(j, {0}, {1, 2});
  // brute force: sum_g p(g) H(A | B=b, C=c)
  double brute = 0.0;
  for (int b = 0; b < 3; ++b) {
    for (int c = 0; c < 2; ++c) {
      double pg = 0.0;
      for (int a = 0; a < 3; ++a) pg += j.probs[(a * 3 + b) * 2 + c];
      if (pg <= 0.0) continue;
      double h = 0.0;
      for (int a = 0; a < 3; ++a) {
        double p = j.probs[(a * 3 + b) * 2 + c] / pg;
        if (p > 0.0) h -= p * std::log2(p);
      }
      brute += pg * h;
    }
  }
  CHECK(lib == doctest::Approx(brute).epsilon(1e-12));
  CHECK_THROWS_AS(conditional_entropy(j, {0}, {0, 1}), InvalidAxes);
}

TEST_CASE("mutual information identities") {
  DiscreteJoint indep = binary_pair(0.25, 0.25, 0.25, 0.25);
  CHECK(mutual_information(indep, {0}, {1}) == doctest::Approx(0.0).epsilon(1e-12));
  DiscreteJoint same = binary_pair(0.5, 0.0, 0.0, 0.5);
  CHECK(mutual_information(same, {0}, {1}) == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    DiscreteJoint j = random_joint({3, 4}, {"A", "B"}, rng);
    double mi = mutual_information(j, {0}, {1});
    double alt = entropy(j, {0}) + entropy(j, {1}) - entropy(j, {0, 1});
    CHECK(mi == doctest::Approx(alt).epsilon(1e-12));
    CHECK(mi == doctest::Approx(mutual_information(j, {1}, {0})).epsilon(1e-10));
    CHECK(mi >= -1e-12);
    CHECK(mi <= std::min(entropy(j, {0}), entropy(j, {1})) + 1e-12);
  }
}

TEST_CASE("leakage decomposition on constructed joints") {
  // M = C, Xp constant: outcome 0, feature 0, mask 1, mitigator 1
  DiscreteJoint mask_reveals{{"C", "Xp", "M"}, {2, 1, 2}, {0.5, 0.0, 0.0, 0.5}};
  LeakageDecomposition d = leakage_decomposition(mask_reveals);
  CHECK(d.outcome == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.feature == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.mask == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.mitigator == doctest::Approx(1.0).epsilon(1e-12));

  // Xp = M = C: invertible infilling that leaks the class
  DiscreteJoint all_equal{{"C", "Xp", "M"}, {2, 2, 2},
                          {0.5, 0, 0, 0, 0, 0, 0, 0.5}};
  d = leakage_decomposition(all_equal);
  CHECK(d.outcome == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.feature == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.mask == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.mitigator == doctest::Approx(0.0).epsilon(1e-12));

  // fully independent axes
  DiscreteJoint ind{{"C", "Xp", "M"}, {2, 2, 2}, {}};
  double pc[2] = {0.3, 0.7}, px[2] = {0.6, 0.4}, pm[2] = {0.2, 0.8};
  for (int c = 0; c < 2; ++c)
    for (int x = 0; x < 2; ++x)
      for (int m = 0; m < 2; ++m) ind.probs.push_back(pc[c] * px[x] * pm[m]);
  d = leakage_decomposition(ind);
  CHECK(d.outcome == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.feature == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.mask == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.mitigator == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("leakage identity holds on random joints") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    int ca = 2 + static_cast<int>(rng.uniform() * 3);
    int cb = 2 + static_cast<int>(rng.uniform() * 3);
    int cc = 2 + static_cast<int>(rng.uniform() * 3);
    DiscreteJoint j = random_joint({ca, cb, cc}, {"C", "Xp", "M"}, rng);
    LeakageDecomposition d = leakage_decomposition(j);
    CHECK(std::abs(d.outcome - (d.feature + d.mask - d.mitigator)) < 1e-9);
    CHECK(d.outcome >= -1e-12);
    CHECK(d.feature >= -1e-12);
    CHECK(d.mask >= -1e-12);
    CHECK(d.mitigator >= -1e-12);
  }
}

TEST_CASE("binary entropy and its inverse") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.0) == doctest::Approx(0.0));
  CHECK(inv_binary_entropy(1.0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(inv_binary_entropy(0.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(inv_binary_entropy(0.811278) == doctest::Approx(0.75).epsilon(1e-5));
  for (double p : {0.5, 0.6, 0.75, 0.9, 0.99})
    CHECK(inv_binary_entropy(binary_entropy(p)) == doctest::Approx(p).epsilon(1e-9));
  CHECK_THROWS_AS(binary_entropy(1.5), DomainError);
  CHECK_THROWS_AS(inv_binary_entropy(-0.1), DomainError);
}

TEST_CASE("accuracy bounds") {
  auto [l0, u0] = accuracy_bounds(0.0);
  CHECK(l0 == doctest::Approx(0.5));
  CHECK(u0 == doctest::Approx(0.5).epsilon(1e-9));
  auto [l1, u1] = accuracy_bounds(1.0);
  CHECK(l1 == doctest::Approx(1.0));
  CHECK(u1 == doctest::Approx(1.0).epsilon(1e-9));
  auto [lh, uh] = accuracy_bounds(0.5);
  CHECK(lh == doctest::Approx(0.75));
  CHECK(uh == doctest::Approx(0.889972).epsilon(1e-4));
  CHECK(lh <= uh);
  CHECK_THROWS_AS(accuracy_bounds(1.5), DomainError);
}

TEST_CASE("bayes accuracy") {
  DiscreteJoint indep = binary_pair(0.25, 0.25, 0.25, 0.25);
  CHECK(bayes_accuracy(indep) == doctest::Approx(0.5));
  DiscreteJoint det = binary_pair(0.5, 0.0, 0.0, 0.5);
  CHECK(bayes_accuracy(det) == doctest::Approx(1.0));
  DiscreteJoint table = binary_pair(0.4, 0.1, 0.1, 0.4);
  CHECK(bayes_accuracy(table) == doctest::Approx(0.8));
}

TEST_CASE("bounds and accuracy lemma on random equal-prior joints") {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    int nx = 2 + static_cast<int>(rng.uniform() * 6);
    DiscreteJoint j = random_equal_prior_joint(nx, rng);
    double mi = mutual_information(j, {0}, {1});
    double acc = bayes_accuracy(j);
    auto [lo, hi] = accuracy_bounds(mi);
    CHECK(lo - 1e-9 <= acc);
    CHECK(acc <= hi + 1e-9);
    double lemma = 0.0;
    for (int x = 0; x < nx; ++x) {
      double p0 = j.probs[x], p1 = j.probs[nx + x];
      double p = p0 + p1;
      if (p > 0.0) lemma += p * (1.0 - binary_entropy(std::max(p0, p1) / p));
    }
    CHECK(mi == doctest::Approx(lemma).epsilon(1e-9));
  }
}

TEST_CASE("mitigator vanishes when the mask is a function of the output") {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    int nc = 2 + static_cast<int>(rng.uniform() * 2);
    int nx = 2 + static_cast<int>(rng.uniform() * 3);
    int nm = 2 + static_cast<int>(rng.uniform() * 2);
    std::vector<int> f(nx);
    for (int& v : f) v = static_cast<int>(rng.uniform() * nm);
    DiscreteJoint cx = random_joint({nc, nx}, {"C", "Xp"}, rng);
    DiscreteJoint j{{"C", "Xp", "M"}, {nc, nx, nm},
                    std::vector<double>(static_cast<std::size_t>(nc) * nx * nm, 0.0)};
    for (int c = 0; c < nc; ++c)
      for (int x = 0; x < nx; ++x)
        j.probs[(static_cast<std::size_t>(c) * nx + x) * nm + f[x]] =
            cx.probs[static_cast<std::size_t>(c) * nx + x];
    LeakageDecomposition d = leakage_decomposition(j);
    CHECK(d.mitigator < 1e-9);
  }
}

TEST_CASE("gaussian entropies") {
  GaussianModel g;
  g.mean = Eigen::VectorXd::Zero(1);
  g.cov = Eigen::MatrixXd::Identity(1, 1);
  CHECK(gaussian_entropy(g, {0}) == doctest::Approx(1.4189385).epsilon(1e-6));

  GaussianModel g2;
  g2.mean = Eigen::VectorXd::Zero(2);
  g2.cov.resize(2, 2);
  g2.cov << 1.0, 0.9, 0.9, 1.0;
  double expected = 0.5 * (std::log(2 * M_PI * std::exp(1.0)) + std::log(1 - 0.81));
  CHECK(gaussian_conditional_entropy(g2, {0}, {1}) ==
        doctest::Approx(expected).epsilon(1e-6));

  // independent blocks: conditioning changes nothing
  GaussianModel g3;
  g3.mean = Eigen::VectorXd::Zero(2);
  g3.cov = Eigen::MatrixXd::Identity(2, 2);
  CHECK(gaussian_conditional_entropy(g3, {0}, {1}) ==
        doctest::Approx(gaussian_entropy(g3, {0})).epsilon(1e-9));
}

TEST_CASE("bias ratio is 1 for independent pixels and near 0 for redundancy") {
  GaussianModel eye;
  eye.mean = Eigen::VectorXd::Zero(9);
  eye.cov = Eigen::MatrixXd::Identity(9, 9);
  BinaryMask m{3, 3, {1, 1, 1, 1, 0, 0, 0, 0, 0}, 4};
  BiasRatio r = bias_ratio(eye, m, Part::Low);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));

  GaussianModel redundant;
  redundant.mean = Eigen::VectorXd::Zero(9);
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(9, 1.0, 2.0);
  redundant.cov = v * v.transpose();
  redundant.jitter = 1e-10;
  BiasRatio r2 = bias_ratio(redundant, m, Part::Low);
  // rank-1 structure: conditioning removes nearly all variance, so the
  // per-dimension entropy-power ratio collapses towards the jitter floor
  CHECK(r2.value < 1e-2);

  BinaryMask empty{3, 3, std::vector<std::uint8_t>(9, 0), 0};
  CHECK_THROWS_AS(bias_ratio(eye, empty, Part::High), EmptyPartition);
}

TEST_CASE("singular covariance blocks are reported") {
  GaussianModel g;
  g.mean = Eigen::VectorXd::Zero(2);
  g.cov.resize(2, 2);
  g.cov << 1.0, 2.0, 2.0, 1.0;  // indefinite: eigenvalues 3 and -1
  g.jitter = 1e-300;            // effectively disabled
  CHECK_THROWS_AS(gaussian_entropy(g, {0, 1}), SingularCovariance);
}

TEST_CASE("joint validation") {
  DiscreteJoint bad{{"X"}, {2}, {0.6, 0.6}};
  CHECK_THROWS_AS(bad.validate(), InvalidConfig);
  DiscreteJoint neg{{"X"}, {2}, {-0.1, 1.1}};
  CHECK_THROWS_AS(neg.validate(), InvalidConfig);
  Rng rng(6);
  DiscreteJoint ok = random_joint({3, 3}, {"A", "B"}, rng);
  CHECK_NOTHROW(ok.validate());
}

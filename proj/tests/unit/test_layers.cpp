#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pdfevent/layers.hpp"

using namespace pdfevent::nn;

namespace {

Matrix random_matrix(oracle::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 2.0 * rng.uniform() - 1.0;
  return m;
}

std::vector<double> random_vector(oracle::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = 2.0 * rng.uniform() - 1.0;
  return v;
}

std::vector<double> flatten(const Matrix& m) { return {m.data(), m.data() + m.size()}; }

Matrix unflatten(const std::vector<double>& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

double relative_error(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

void expect_close(const std::vector<double>& analytic, const std::vector<double>& numeric, double tol = 1e-6) {
  ASSERT_EQ(analytic.size(), numeric.size());
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    EXPECT_LE(relative_error(analytic[i], numeric[i]), tol) << i << ": " << analytic[i] << " vs " << numeric[i];
  }
}

}  // namespace

TEST(Conv1d, MatchesDirectSum) {
  oracle::Rng rng(20);
  const ConvShape shape{3, 4, 5};
  const Matrix x = random_matrix(rng, 3, 11);
  const auto w = random_vector(rng, shape.weight_count());
  const auto b = random_vector(rng, 4);
  const Matrix y = conv1d_forward(x, w, b, shape);
  for (int o = 0; o < 4; ++o) {
    for (int t = 0; t < 11; ++t) {
      double acc = b[o];
      for (int k = 0; k < 5; ++k) {
        const int s = t + k - 2;
        if (s < 0 || s >= 11) continue;
        for (int i = 0; i < 3; ++i) acc += w[(k * 4 + o) * 3 + i] * x(i, s);
      }
      EXPECT_NEAR(y(o, t), acc, 1e-12);
    }
  }
}

TEST(Conv1d, GradientCheck) {
  oracle::Rng rng(21);
  const ConvShape shape{2, 3, 3};
  const Matrix x = random_matrix(rng, 2, 9);
  const auto w = random_vector(rng, shape.weight_count());
  const auto b = random_vector(rng, 3);
  const Matrix r = random_matrix(rng, 3, 9);
  auto loss = [&](const Matrix& xx, const std::vector<double>& ww, const std::vector<double>& bb) {
    return (conv1d_forward(xx, ww, bb, shape).array() * r.array()).sum();
  };
  std::vector<double> dw(w.size(), 0.0);
  std::vector<double> db(b.size(), 0.0);
  const Matrix dx = conv1d_backward(x, w, r, shape, dw, db);
  expect_close(flatten(dx), oracle::finite_difference([&](const auto& v) { return loss(unflatten(v, 2, 9), w, b); },
                                                      flatten(x)));
  expect_close(dw, oracle::finite_difference([&](const auto& v) { return loss(x, v, b); }, w));
  expect_close(db, oracle::finite_difference([&](const auto& v) { return loss(x, w, v); }, b));
}

TEST(Relu, GradientCheck) {
  oracle::Rng rng(22);
  const Matrix x = random_matrix(rng, 3, 8);
  const Matrix r = random_matrix(rng, 3, 8);
  const Matrix dx = relu_backward(x, r);
  expect_close(flatten(dx), oracle::finite_difference(
                                [&](const auto& v) { return (relu_forward(unflatten(v, 3, 8)).array() * r.array()).sum(); },
                                flatten(x)));
}

TEST(MaxPool, ForwardAndGradient) {
  oracle::Rng rng(23);
  const Matrix x = random_matrix(rng, 2, 10);
  const auto pooled = maxpool2_forward(x);
  ASSERT_EQ(pooled.y.cols(), 5);
  for (int c = 0; c < 2; ++c) {
    for (int t = 0; t < 5; ++t) EXPECT_EQ(pooled.y(c, t), std::max(x(c, 2 * t), x(c, 2 * t + 1)));
  }
  const Matrix r = random_matrix(rng, 2, 5);
  const Matrix dx = maxpool2_backward(pooled, r);
  expect_close(flatten(dx), oracle::finite_difference(
                                [&](const auto& v) {
                                  return (maxpool2_forward(unflatten(v, 2, 10)).y.array() * r.array()).sum();
                                },
                                flatten(x)));
}

TEST(Upsample, ForwardAndGradient) {
  oracle::Rng rng(24);
  const Matrix x = random_matrix(rng, 2, 4);
  const Matrix y = upsample2_forward(x);
  ASSERT_EQ(y.cols(), 8);
  for (int t = 0; t < 8; ++t) EXPECT_EQ(y(1, t), x(1, t / 2));
  const Matrix r = random_matrix(rng, 2, 8);
  expect_close(flatten(upsample2_backward(r)),
               oracle::finite_difference(
                   [&](const auto& v) { return (upsample2_forward(unflatten(v, 2, 4)).array() * r.array()).sum(); },
                   flatten(x)));
}

TEST(Concat, SplitIsAdjoint) {
  oracle::Rng rng(25);
  const Matrix a = random_matrix(rng, 2, 6);
  const Matrix b = random_matrix(rng, 3, 6);
  const Matrix c = concat_channels(a, b);
  EXPECT_EQ(c.topRows(2), a);
  EXPECT_EQ(c.bottomRows(3), b);
  const Matrix r = random_matrix(rng, 5, 6);
  Matrix da;
  Matrix db;
  split_channels(r, 2, da, db);
  expect_close(flatten(da), oracle::finite_difference(
                                [&](const auto& v) { return (concat_channels(unflatten(v, 2, 6), b).array() * r.array()).sum(); },
                                flatten(a)));
  expect_close(flatten(db), oracle::finite_difference(
                                [&](const auto& v) { return (concat_channels(a, unflatten(v, 3, 6)).array() * r.array()).sum(); },
                                flatten(b)));
}

TEST(SoftmaxCrossEntropy, GradientAndNormalization) {
  oracle::Rng rng(26);
  const Matrix logits = 3.0 * random_matrix(rng, 2, 7);
  std::vector<double> labels(7);
  for (auto& l : labels) l = static_cast<double>(rng.below(2));
  const Matrix p = softmax_columns(logits);
  for (int t = 0; t < 7; ++t) EXPECT_NEAR(p.col(t).sum(), 1.0, 1e-12);
  Matrix d;
  softmax_cross_entropy_sum(logits, labels, &d, 0.3);
  expect_close(flatten(d), oracle::finite_difference(
                               [&](const auto& v) {
                                 return softmax_cross_entropy_sum(unflatten(v, 2, 7), labels, nullptr, 1.0) * 0.3;
                               },
                               flatten(logits)));
}

TEST(SquaredError, Gradient) {
  oracle::Rng rng(27);
  const Matrix pred = random_matrix(rng, 2, 5);
  const Matrix target = random_matrix(rng, 2, 5);
  Matrix d;
  const double value = squared_error_sum(pred, target, &d, 0.5);
  EXPECT_NEAR(value, (pred - target).squaredNorm(), 1e-12);
  expect_close(flatten(d), oracle::finite_difference(
                               [&](const auto& v) { return 0.5 * squared_error_sum(unflatten(v, 2, 5), target, nullptr, 1.0); },
                               flatten(pred)));
}

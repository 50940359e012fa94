// Copyright 2026 The delhate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "delhate/layers.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "delhate/errors.h"
#include "delhate/graph.h"
#include "delhate/rng.h"

namespace delhate {
namespace {

constexpr double kTol = 1e-12;

void ExpectValues(const Tensor& t, const std::vector<double>& expected,
                  double tol = kTol) {
  ASSERT_EQ(t.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(t[i], expected[i], tol) << "index " << i;
  }
}

Tensor Filled(std::vector<std::size_t> shape, double v) {
  Tensor t(std::move(shape));
  t.Fill(v);
  return t;
}

TEST(Conv1dTest, SingleChannelOracle) {
  Graph g;
  const Var x = g.Constant(Tensor({1, 5}, {1, 2, -1, 0.5, 3}));
  const Var w = g.Constant(Tensor({1, 1, 3}, {0.5, -1, 2}));
  const Var b = g.Constant(Tensor::Vector({0.1}));
  const Var y = Conv1d(g, x, w, b, 0);
  EXPECT_EQ(g.value(y).shape(), (std::vector<std::size_t>{1, 3}));
  ExpectValues(g.value(y), {-3.4, 3.1, 5.1});
}

TEST(Conv1dTest, SamePaddingKeepsLength) {
  Graph g;
  const Var x = g.Constant(Tensor({1, 5}, {1, 2, -1, 0.5, 3}));
  const Var w = g.Constant(Tensor({1, 1, 3}, {0.5, -1, 2}));
  const Var b = g.Constant(Tensor::Vector({0.0}));
  const Var y = Conv1d(g, x, w, b, 1);
  // Zero padding at both ends: window centred on each input position.
  ExpectValues(g.value(y), {3.0, -3.5, 3.0, 5.0, -2.75});
}

TEST(Conv1dTest, WideFilterWithPadEight) {
  Graph g;
  const std::size_t t_len = 20;
  Tensor input({2, t_len});
  for (std::size_t i = 0; i < input.size(); ++i) input[i] = 0.01 * double(i);
  const Var y = Conv1d(g, g.Constant(input), g.Constant(Filled({4, 2, 17}, 1.0)),
                       g.Constant(Filled({4}, 0.0)), 8);
  EXPECT_EQ(g.value(y).shape(), (std::vector<std::size_t>{4, t_len}));
}

TEST(Conv1dTest, ShapeMismatchThrows) {
  Graph g;
  const Var x = g.Constant(Tensor({2, 5}));
  const Var w = g.Constant(Tensor({1, 3, 3}));
  const Var b = g.Constant(Tensor({1}));
  EXPECT_THROW(Conv1d(g, x, w, b, 0), ShapeMismatch);
}

TEST(PoolTest, MaxPoolBruteForce) {
  Rng rng(5);
  Tensor x({3, 11});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.Normal();
  Graph g;
  const Var y = MaxPool1d(g, g.Constant(x), 4);
  const Tensor& out = g.value(y);
  ASSERT_EQ(out.shape(), (std::vector<std::size_t>{3, 2}));
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t j = 0; j < 2; ++j) {
      double best = -INFINITY;
      for (std::size_t k = 0; k < 4; ++k) best = std::max(best, x.at(c, 4 * j + k));
      EXPECT_EQ(out.at(c, j), best);
    }
  }
}

TEST(PoolTest, GlobalMaxPoolBruteForceAndGradient) {
  Tensor x({3, 2}, {1, -5, 4, 2, 0, 7});
  Tensor grad({3, 2});
  Graph g;
  const Var y = GlobalMaxPool(g, g.Leaf(&x, &grad));
  ExpectValues(g.value(y), {4, 7});
  g.Backward(WeightedSum(g, y, Tensor::Vector({1.0, 2.0})));
  ExpectValues(grad, {0, 0, 1, 0, 0, 2});
}

TEST(ActivationTest, SoftmaxStableAndNormalized) {
  Graph g;
  const Var y = Softmax(g, g.Constant(Tensor::Vector({1000.0, 1001.0, 1002.0})));
  const Tensor& p = g.value(y);
  const double z = 1 + std::exp(1.0) + std::exp(2.0);
  ExpectValues(p, {1 / z, std::exp(1.0) / z, std::exp(2.0) / z}, 1e-12);
}

TEST(ActivationTest, FullyConnectedReluOracle) {
  Graph g;
  const Var x = g.Constant(Tensor::Vector({-1, 2}));
  const Var w = g.Constant(Tensor::Matrix(2, 2, {1, -2, 0.5, 1}));
  const Var b = g.Constant(Tensor::Vector({0.5, -1}));
  ExpectValues(g.value(FullyConnected(g, x, w, b, Activation::kRelu)), {0, 0.5});
  ExpectValues(g.value(FullyConnected(g, x, w, b, Activation::kNone)),
               {-4.5, 0.5});
}

TEST(LossTest, CrossEntropyOracle) {
  Graph g;
  const Var p = g.Constant(Tensor::Vector({0.2, 0.5, 0.3}));
  EXPECT_NEAR(g.value(CrossEntropy(g, p, 0))[0], 1.6094379124341003, 1e-12);
  const Var zero = g.Constant(Tensor::Vector({0.0, 1.0, 0.0}));
  EXPECT_NEAR(g.value(CrossEntropy(g, zero, 0))[0], -std::log(kLogEpsilon),
              1e-9);
}

Var Scalar(Graph& g, double v) { return g.Constant(Tensor::Vector({v})); }
Var Square(Graph& g, double v) { return g.Constant(Tensor::Matrix(1, 1, {v})); }

TEST(RecurrentTest, GruScalarStepOracle) {
  Graph g;
  GruWeights w{Square(g, 0.5),  Square(g, -0.3), Scalar(g, 0.1),
               Square(g, -0.4), Square(g, 0.2),  Scalar(g, 0.05),
               Square(g, 0.8),  Square(g, 0.6),  Scalar(g, -0.1)};
  const Var h = Gru(g, g.Constant(Tensor::Matrix(1, 1, {1.5})), w, Scalar(g, 0.2));
  EXPECT_NEAR(g.value(h)[0], 0.623771958597172, 1e-12);
}

double Sig(double x) { return 1 / (1 + std::exp(-x)); }

TEST(RecurrentTest, GruThreeStepsMatchesHandRecurrence) {
  const double wz = 0.5, uz = -0.3, bz = 0.1, wr = -0.4, ur = 0.2, br = 0.05,
               wh = 0.8, uh = 0.6, bh = -0.1;
  const std::vector<double> xs = {1.5, -0.7, 0.3};
  std::vector<double> expected;
  double h = 0.2;
  for (double x : xs) {
    const double z = Sig(wz * x + uz * h + bz);
    const double r = Sig(wr * x + ur * h + br);
    const double c = std::tanh(wh * x + uh * (r * h) + bh);
    h = (1 - z) * h + z * c;
    expected.push_back(h);
  }
  Graph g;
  GruWeights w{Square(g, wz), Square(g, uz), Scalar(g, bz),
               Square(g, wr), Square(g, ur), Scalar(g, br),
               Square(g, wh), Square(g, uh), Scalar(g, bh)};
  const Var out = Gru(g, g.Constant(Tensor({3, 1}, xs)), w, Scalar(g, 0.2));
  ExpectValues(g.value(out), expected);
}

TEST(RecurrentTest, LstmScalarStepOracle) {
  Graph g;
  LstmWeights w{Square(g, 0.3),  Square(g, -0.2), Scalar(g, 0.1),
                Square(g, -0.5), Square(g, 0.4),  Scalar(g, 0.2),
                Square(g, 0.7),  Square(g, 0.1),  Scalar(g, -0.3),
                Square(g, 0.2),  Square(g, 0.6),  Scalar(g, 0.0)};
  const Var h = Lstm(g, g.Constant(Tensor::Matrix(1, 1, {0.8})), w,
                     Scalar(g, 0.1), Scalar(g, -0.4));
  EXPECT_NEAR(g.value(h)[0], -0.017364345128319, 1e-12);
}

TEST(RecurrentTest, LstmTwoStepsMatchesHandRecurrence) {
  const std::vector<double> xs = {0.8, -1.2};
  double h = 0.1, c = -0.4;
  std::vector<double> expected;
  for (double x : xs) {
    const double i = Sig(0.3 * x - 0.2 * h + 0.1);
    const double f = Sig(-0.5 * x + 0.4 * h + 0.2);
    const double gg = std::tanh(0.7 * x + 0.1 * h - 0.3);
    const double o = Sig(0.2 * x + 0.6 * h);
    c = f * c + i * gg;
    h = o * std::tanh(c);
    expected.push_back(h);
  }
  Graph g;
  LstmWeights w{Square(g, 0.3),  Square(g, -0.2), Scalar(g, 0.1),
                Square(g, -0.5), Square(g, 0.4),  Scalar(g, 0.2),
                Square(g, 0.7),  Square(g, 0.1),  Scalar(g, -0.3),
                Square(g, 0.2),  Square(g, 0.6),  Scalar(g, 0.0)};
  const Var out = Lstm(g, g.Constant(Tensor({2, 1}, xs)), w, Scalar(g, 0.1),
                       Scalar(g, -0.4));
  ExpectValues(g.value(out), expected);
}

TEST(DropoutTest, EvalIsIdentity) {
  Graph g;
  const Tensor x = Tensor::Vector({1, 2, 3, 4});
  EXPECT_EQ(g.value(Dropout(g, g.Constant(x), 0.2, false, nullptr)), x);
  Rng rng(1);
  EXPECT_EQ(g.value(Dropout(g, g.Constant(x), 0.0, true, &rng)), x);
}

TEST(DropoutTest, TrainScalesKeptUnits) {
  Tensor x({1000});
  x.Fill(1.0);
  Rng rng(42);
  Graph g;
  const Tensor& y = g.value(Dropout(g, g.Constant(x), 0.2, true, &rng));
  std::size_t kept = 0;
  for (double v : y.values()) {
    if (v != 0.0) {
      EXPECT_NEAR(v, 1.25, 1e-15);
      ++kept;
    }
  }
  EXPECT_GT(kept, 740u);
  EXPECT_LT(kept, 860u);
}

TEST(DropoutTest, FrozenMaskForSeed) {
  Tensor x({10});
  x.Fill(1.0);
  Rng rng(7);
  Graph g;
  const Tensor& y = g.value(Dropout(g, g.Constant(x), 0.5, true, &rng));
  std::string mask;
  for (double v : y.values()) mask += v == 0.0 ? '0' : '1';
  EXPECT_EQ(mask, "1101001101");
}

TEST(BackwardTest, SquaredErrorThroughAffine) {
  // loss = (w.x + b - t)^2 with w = [2, -1], x = [3, 4], b = 0.5, t = 1:
  // residual 1.5, loss 2.25, dloss/dw = 2 * 1.5 * x, dloss/db = 3.
  Tensor w = Tensor::Matrix(1, 2, {2, -1});
  Tensor b = Tensor::Vector({0.5});
  Tensor gw({1, 2}), gb({1});
  Graph g;
  const Var y = Affine(g, g.Leaf(&w, &gw), g.Constant(Tensor::Vector({3, 4})),
                       g.Leaf(&b, &gb));
  const Var d = Sub(g, y, g.Constant(Tensor::Vector({1})));
  const Var loss = Mul(g, d, d);
  EXPECT_DOUBLE_EQ(g.value(loss)[0], 2.25);
  g.Backward(loss);
  ExpectValues(gw, {9, 12});
  ExpectValues(gb, {3});
  g.Backward(loss);  // sinks accumulate
  ExpectValues(gb, {6});
}

TEST(BackwardTest, ReluRecordsKinkMargin) {
  Graph g;
  Relu(g, g.Constant(Tensor::Vector({-0.3, 2.0, 0.05})));
  EXPECT_NEAR(g.kink_margin(), 0.05, 1e-15);
}

}  // namespace
}  // namespace delhate

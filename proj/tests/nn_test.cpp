#include <cmath>

#include <gtest/gtest.h>

#include "botgnn/nn/adam.hpp"
#include "botgnn/nn/gradcheck.hpp"
#include "botgnn/nn/loss.hpp"
#include "botgnn/nn/tape.hpp"
#include "test_graphs.hpp"

namespace botgnn::nn {
namespace {

Tensor2 random_tensor(std::size_t r, std::size_t c, std::uint64_t seed, double lo = -1,
                      double hi = 1) {
  Rng rng(seed);
  Tensor2 t(r, c);
  for (double& v : t.values()) v = uniform_real(rng, lo, hi);
  return t;
}

Tensor2 identity(std::size_t n) {
  Tensor2 t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

// Exposes a parameter as a tape input: I * P == P exactly.
Var as_input(Tape& tape, ParamTensor& p) {
  return linear(tape, tape.constant(identity(p.rows())), p);
}

// sum(coeffs .* out); seeds backward with coeffs when requested.
double weighted_sum(Tape& tape, Var out, const Tensor2& coeffs, bool backward) {
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    s += coeffs.values()[i] * tape.value(out).values()[i];
  }
  if (backward) tape.backward(out, coeffs);
  return s;
}

TEST(Affine, IdentityWeights) {
  Tape tape;
  ParamTensor w(identity(2)), b(Tensor2(1, 2));
  Var y = affine(tape, tape.constant(Tensor2{{1, 2}}), w, b);
  EXPECT_EQ(tape.value(y), (Tensor2{{1, 2}}));
}

TEST(Affine, ScalarArithmetic) {
  Tape tape;
  ParamTensor w(Tensor2{{3}}), b(Tensor2{{1}});
  Var y = affine(tape, tape.constant(Tensor2{{1}, {2}}), w, b);
  EXPECT_EQ(tape.value(y), (Tensor2{{4}, {7}}));
}

TEST(Affine, GradOfSumIsColumnSumsOfX) {
  const Tensor2 x = random_tensor(5, 3, 1);
  ParamTensor w(random_tensor(3, 2, 2)), b(random_tensor(1, 2, 3));
  const Tensor2 ones(5, 2, 1.0);
  auto objective = [&](bool backward) {
    Tape tape;
    return weighted_sum(tape, affine(tape, tape.constant(x), w, b), ones, backward);
  };
  std::vector<ParamTensor*> params{&w, &b};
  w.zero_grad();
  objective(true);
  for (std::size_t i = 0; i < 3; ++i) {
    double col = 0.0;
    for (std::size_t r = 0; r < 5; ++r) col += x(r, i);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(w.grad(i, j), col, 1e-12);
  }
  // Finite-difference oracle, eps = 1e-6.
  EXPECT_LT(gradcheck(objective, params).max_rel_error, 1e-9);
}

TEST(Affine, ShapeMismatch) {
  Tape tape;
  ParamTensor w(Tensor2(3, 2)), b(Tensor2(1, 2));
  EXPECT_THROW(affine(tape, tape.constant(Tensor2(4, 2)), w, b), InputError);
  ParamTensor bad_b(Tensor2(1, 3));
  EXPECT_THROW(affine(tape, tape.constant(Tensor2(4, 3)), w, bad_b), InputError);
}

TEST(Aggregate, SelfLoopOnlyIsIdentity) {
  const Graph g = add_self_loops(Graph::from_edges(EdgeList{}, 3));
  const auto adj = normalize(g, Normalization::kSourceDegree);
  Tape tape;
  const Tensor2 x = random_tensor(3, 2, 5);
  EXPECT_EQ(tape.value(aggregate(tape, adj, tape.constant(x))), x);
}

TEST(Aggregate, SymmetricBackwardUsesSameMatrix) {
  const Graph g = add_self_loops(testing_graphs::random_graph(8, 0.4, 2));
  const auto adj = normalize(g, Normalization::kSymmetric);
  const Tensor2 up = random_tensor(8, 2, 9);
  EXPECT_EQ(spmm_transposed(adj, up), spmm(adj, up));
}

TEST(Aggregate, Gradcheck) {
  for (auto mode : {Normalization::kSourceDegree, Normalization::kSymmetric,
                    Normalization::kRowStochastic}) {
    const Graph g = add_self_loops(testing_graphs::random_graph(6, 0.4, 12));
    const auto adj = normalize(g, mode);
    ParamTensor x(random_tensor(6, 3, 7));
    const Tensor2 coeffs = random_tensor(6, 3, 8);
    auto objective = [&](bool backward) {
      Tape tape;
      return weighted_sum(tape, aggregate(tape, adj, as_input(tape, x)), coeffs, backward);
    };
    std::vector<ParamTensor*> params{&x};
    EXPECT_LT(gradcheck(objective, params).max_rel_error, 1e-6) << to_string(mode);
  }
}

TEST(Aggregate, ShapeMismatch) {
  const auto adj = normalize(testing_graphs::cycle(4), Normalization::kSymmetric);
  Tape tape;
  EXPECT_THROW(aggregate(tape, adj, tape.constant(Tensor2(5, 1))), InputError);
}

TEST(Relu, Elementwise) {
  Tape tape;
  EXPECT_EQ(tape.value(relu(tape, tape.constant(Tensor2{{-1, 2}}))), (Tensor2{{0, 2}}));
}

TEST(Relu, AllNegativeGivesZeroGrad) {
  ParamTensor x(Tensor2{{-1, -2}, {-0.5, -3}});
  Tape tape;
  Var y = relu(tape, as_input(tape, x));
  EXPECT_EQ(tape.value(y), Tensor2(2, 2));
  tape.backward(y, Tensor2(2, 2, 1.0));
  EXPECT_EQ(x.grad, Tensor2(2, 2));
}

TEST(Relu, SubgradientAtZeroIsZero) {
  ParamTensor x(Tensor2{{0.0}});
  Tape tape;
  Var y = relu(tape, as_input(tape, x));
  tape.backward(y, Tensor2{{1.0}});
  EXPECT_EQ(x.grad(0, 0), 0.0);
}

TEST(Relu, GradcheckAwayFromKinks) {
  Tensor2 init = random_tensor(4, 5, 3);
  for (double& v : init.values()) {
    if (std::abs(v) < 1e-3) v = 0.5;
  }
  ParamTensor x(init);
  const Tensor2 coeffs = random_tensor(4, 5, 4);
  auto objective = [&](bool backward) {
    Tape tape;
    return weighted_sum(tape, relu(tape, as_input(tape, x)), coeffs, backward);
  };
  std::vector<ParamTensor*> params{&x};
  EXPECT_LT(gradcheck(objective, params).max_rel_error, 1e-6);
}

TEST(Add, GradientFlowsToBoth) {
  ParamTensor a(random_tensor(3, 2, 1)), b(random_tensor(3, 2, 2));
  const Tensor2 coeffs = random_tensor(3, 2, 3);
  auto objective = [&](bool backward) {
    Tape tape;
    Var s = add(tape, as_input(tape, a), as_input(tape, b));
    return weighted_sum(tape, s, coeffs, backward);
  };
  std::vector<ParamTensor*> params{&a, &b};
  EXPECT_LT(gradcheck(objective, params).max_rel_error, 1e-9);
}

TEST(SoftmaxCrossEntropy, UniformLogits) {
  const auto r = softmax_cross_entropy(Tensor2{{0, 0}}, std::vector<std::uint8_t>{0});
  EXPECT_NEAR(r.loss, std::log(2.0), 1e-15);
}

TEST(SoftmaxCrossEntropy, LargeLogitsStable) {
  const auto r = softmax_cross_entropy(Tensor2{{1000, 0}}, std::vector<std::uint8_t>{0});
  EXPECT_NEAR(r.loss, 0.0, 1e-12);
  EXPECT_TRUE(r.grad.all_finite());
  const auto wrong = softmax_cross_entropy(Tensor2{{1000, 0}}, std::vector<std::uint8_t>{1});
  EXPECT_NEAR(wrong.loss, 1000.0, 1e-9);
}

TEST(SoftmaxCrossEntropy, GradMatchesFiniteDifferences) {
  const std::vector<std::uint8_t> labels{0, 1, 1, 0, 1};
  for (ClassWeights w : {ClassWeights{}, ClassWeights{0.3, 2.5}}) {
    ParamTensor logits(random_tensor(5, 2, 21, -3, 3));
    auto objective = [&](bool backward) {
      Tape tape;
      Var z = as_input(tape, logits);
      auto r = softmax_cross_entropy(tape.value(z), labels, w);
      if (backward) tape.backward(z, r.grad);
      return r.loss;
    };
    std::vector<ParamTensor*> params{&logits};
    EXPECT_LT(gradcheck(objective, params).max_rel_error, 1e-6);
  }
}

TEST(SoftmaxCrossEntropy, LabelCountMismatch) {
  EXPECT_THROW(softmax_cross_entropy(Tensor2(3, 2), std::vector<std::uint8_t>{0, 1}), InputError);
}

TEST(SoftmaxProperty, RowsArePositiveAndSumToOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Tensor2 p = softmax(random_tensor(10, 2, seed, -1e6, 1e6));
    ASSERT_TRUE(p.all_finite());
    for (std::size_t i = 0; i < p.rows(); ++i) {
      EXPECT_GE(p(i, 0), 0.0);
      EXPECT_NEAR(p(i, 0) + p(i, 1), 1.0, 1e-12);
    }
    const Tensor2 q = softmax(random_tensor(10, 2, seed, -5, 5));
    for (std::size_t i = 0; i < q.rows(); ++i) EXPECT_GT(q(i, 0), 0.0);
  }
}

TEST(NoNonFinite, OpsOnLargeInputs) {
  const Graph g = add_self_loops(testing_graphs::random_graph(10, 0.3, 1));
  const auto adj = normalize(g, Normalization::kSourceDegree);
  ParamTensor w(random_tensor(3, 3, 1)), b(random_tensor(1, 3, 2));
  Tape tape;
  Var x = tape.constant(random_tensor(10, 3, 3, -1e6, 1e6));
  Var y = relu(tape, add(tape, affine(tape, x, w, b), aggregate(tape, adj, x)));
  EXPECT_TRUE(tape.value(y).all_finite());
  std::vector<std::uint8_t> labels(10, 1);
  Var logits = linear(tape, y, w);
  ParamTensor w2(random_tensor(3, 2, 4));
  Var l2 = linear(tape, y, w2);
  auto r = softmax_cross_entropy(tape.value(l2), labels);
  EXPECT_TRUE(std::isfinite(r.loss));
  tape.backward(l2, r.grad);
  EXPECT_TRUE(w.grad.all_finite());
  EXPECT_TRUE(w2.grad.all_finite());
  (void)logits;
}

TEST(Adam, ZeroGradientNoDecayIsNoop) {
  ParamTensor p(random_tensor(3, 3, 1));
  const Tensor2 before = p.value;
  std::vector<ParamTensor*> ps{&p};
  for (int i = 0; i < 5; ++i) adam_step(ps, {0.1, 0.0});
  EXPECT_EQ(p.value, before);
}

TEST(Adam, FirstStepHandComputed) {
  // m_hat = g, v_hat = g^2 on the first step, so the step is lr*g/(|g|+eps).
  ParamTensor p(Tensor2{{1.0}});
  p.grad(0, 0) = 1.0;
  std::vector<ParamTensor*> ps{&p};
  adam_step(ps, {0.1, 0.0});
  EXPECT_NEAR(p.value(0, 0), 1.0 - 0.1 * 1.0 / (1.0 + 1e-8), 1e-15);
  EXPECT_NEAR(p.value(0, 0), 0.9, 1e-8);
  EXPECT_EQ(p.grad(0, 0), 0.0);
  EXPECT_EQ(p.step, 1u);
}

TEST(Adam, CoupledWeightDecay) {
  // Zero loss gradient: the decay term alone drives the update.
  ParamTensor p(Tensor2{{2.0}});
  std::vector<ParamTensor*> ps{&p};
  adam_step(ps, {0.1, 0.5});
  EXPECT_NEAR(p.value(0, 0), 2.0 - 0.1, 1e-8);
}

TEST(Adam, ZeroLearningRateIsIdentity) {
  ParamTensor p(random_tensor(4, 2, 3));
  const Tensor2 before = p.value;
  std::vector<ParamTensor*> ps{&p};
  for (int i = 0; i < 3; ++i) {
    p.grad = random_tensor(4, 2, 10 + i);
    adam_step(ps, {0.0, 5e-4});
  }
  EXPECT_EQ(p.value, before);
}

TEST(Adam, Deterministic) {
  auto run = [] {
    ParamTensor p(random_tensor(3, 2, 8));
    std::vector<ParamTensor*> ps{&p};
    for (int i = 0; i < 10; ++i) {
      p.grad = random_tensor(3, 2, 100 + i);
      adam_step(ps, {0.01, 5e-4});
    }
    return p.value;
  };
  EXPECT_EQ(run(), run());
}

TEST(Gradcheck, LinearModelIsExactToRoundoff) {
  // Positive inputs and coefficients keep every gradient away from zero, so
  // the ratio measures roundoff rather than dividing by it.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Tensor2 x = random_tensor(8, 4, seed, 0.5, 1.0);
    ParamTensor w(random_tensor(4, 2, seed + 1000)), b(random_tensor(1, 2, seed + 2000));
    const Tensor2 coeffs = random_tensor(8, 2, seed + 3000, 0.5, 1.0);
    auto objective = [&](bool backward) {
      Tape tape;
      return weighted_sum(tape, affine(tape, tape.constant(x), w, b), coeffs, backward);
    };
    std::vector<ParamTensor*> params{&w, &b};
    const auto result = gradcheck(objective, params);
    EXPECT_EQ(result.coords_checked, 10u);
    EXPECT_LT(result.max_rel_error, 1e-9) << "seed " << seed;
  }
}

TEST(Gradcheck, DetectsCorruptedGradient) {
  ParamTensor w(random_tensor(3, 2, 2)), b(random_tensor(1, 2, 3));
  const Tensor2 x = random_tensor(4, 3, 1);
  const Tensor2 coeffs = random_tensor(4, 2, 5);
  auto objective = [&](bool backward) {
    Tape tape;
    double s = weighted_sum(tape, affine(tape, tape.constant(x), w, b), coeffs, backward);
    if (backward) w.grad(1, 1) += 0.5;  // corrupt one coordinate
    return s;
  };
  std::vector<ParamTensor*> params{&w, &b};
  EXPECT_GT(gradcheck(objective, params).max_rel_error, 1e-2);
}

TEST(Gradcheck, RestoresParameters) {
  ParamTensor w(random_tensor(3, 2, 2));
  const Tensor2 before = w.value;
  const Tensor2 x = random_tensor(4, 3, 1);
  auto objective = [&](bool backward) {
    Tape tape;
    return weighted_sum(tape, linear(tape, tape.constant(x), w), Tensor2(4, 2, 1.0), backward);
  };
  std::vector<ParamTensor*> params{&w};
  gradcheck(objective, params);
  EXPECT_EQ(w.value, before);
}

}  // namespace
}  // namespace botgnn::nn

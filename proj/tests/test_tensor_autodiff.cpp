#include <doctest.h>

#include <cmath>

#include "deid/autodiff.hpp"
#include "deid/gradcheck.hpp"
#include "helpers.hpp"

using namespace deid;
namespace agns = deid::ag;

TEST_CASE("tensor shape bookkeeping") {
  Tensor t = Tensor::zeros({2, 3});
  CHECK(t.rows() == 2);
  CHECK(t.cols() == 3);
  CHECK(t.size() == 6);
  t.at(1, 2) = 5.0;
  CHECK(t.at(1, 2) == 5.0);
  CHECK_THROWS_AS(check_same_shape(t, Tensor::zeros({3, 2}), "test"),
                  std::invalid_argument);
}

TEST_CASE("matmul against identity and a hand example") {
  agns::Tape tape;
  Tensor a = Tensor::zeros({2, 2});
  a.at(0, 0) = 1;
  a.at(0, 1) = 2;
  a.at(1, 0) = 3;
  a.at(1, 1) = 4;
  Tensor eye = Tensor::zeros({2, 2});
  eye.at(0, 0) = eye.at(1, 1) = 1.0;
  const auto prod = agns::matmul(tape.constant(a), tape.constant(eye));
  CHECK(prod.value().at(0, 1) == 2.0);
  CHECK(prod.value().at(1, 0) == 3.0);

  Tensor b = Tensor::zeros({2, 1});
  b.at(0, 0) = 1;
  b.at(1, 0) = 1;
  const auto rowsum = agns::matmul(tape.constant(a), tape.constant(b));
  CHECK(rowsum.value().at(0, 0) == 3.0);
  CHECK(rowsum.value().at(1, 0) == 7.0);
}

TEST_CASE("softmax rows are normalized and shift invariant") {
  agns::Tape tape;
  Tensor x = Tensor::zeros({1, 3});
  x.at(0, 0) = 1.0;
  x.at(0, 1) = 2.0;
  x.at(0, 2) = 3.0;
  const auto p = agns::softmax_rows(tape.constant(x));
  double sum = 0;
  for (std::size_t j = 0; j < 3; ++j) sum += p.value().at(0, j);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  Tensor shifted = x;
  for (std::size_t j = 0; j < 3; ++j) shifted.at(0, j) += 1000.0;
  const auto q = agns::softmax_rows(tape.constant(shifted));
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(q.value().at(0, j) == doctest::Approx(p.value().at(0, j)));
}

TEST_CASE("logsumexp is stable for large magnitudes") {
  agns::Tape tape;
  Tensor x = Tensor::zeros({1, 2});
  x.at(0, 0) = 1000.0;
  x.at(0, 1) = 1000.0;
  const auto l = agns::logsumexp(tape.constant(x), 1);
  CHECK(l.value().at(0, 0) ==
        doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-12));
  const auto c = agns::logsumexp(tape.constant(x), 0);
  CHECK(c.value().cols() == 2);
  CHECK(c.value().at(0, 0) == doctest::Approx(1000.0));
}

TEST_CASE("tanh gradient is 1 at zero") {
  Parameter x("x", Tensor::zeros({1, 1}));
  agns::Tape tape;
  const auto loss = agns::reduce_sum(agns::tanh_(tape.leaf(x)));
  tape.backward(loss);
  CHECK(x.grad.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gather_rows accumulates duplicate rows in the gradient") {
  Parameter table("t", Tensor::zeros({3, 2}));
  agns::Tape tape;
  const auto g = agns::gather_rows(tape.leaf(table), {1, 1, 2});
  tape.backward(agns::reduce_sum(g));
  CHECK(table.grad.at(1, 0) == 2.0);
  CHECK(table.grad.at(2, 0) == 1.0);
  CHECK(table.grad.at(0, 0) == 0.0);
}

TEST_CASE("gradients accumulate across backward calls until zeroed") {
  Parameter x("x", Tensor::scalar(2.0));
  for (int i = 0; i < 2; ++i) {
    agns::Tape tape;
    tape.backward(agns::reduce_sum(agns::scale(tape.leaf(x), 3.0)));
  }
  CHECK(x.grad.at(0, 0) == 6.0);
  x.zero_grad();
  CHECK(x.grad.at(0, 0) == 0.0);
}

TEST_CASE("masked_fill blocks gradient flow at masked entries") {
  SeededRng rng(4);
  Parameter x("x", testutil::random_tensor(1, 4, rng));
  agns::Tape tape;
  const std::vector<char> keep = {1, 0, 1, 0};
  const auto y = agns::masked_fill(tape.leaf(x), keep, -7.0);
  CHECK(y.value().at(0, 1) == -7.0);
  CHECK(y.value().at(0, 3) == -7.0);
  tape.backward(agns::reduce_sum(y));
  CHECK(x.grad.at(0, 0) == 1.0);
  CHECK(x.grad.at(0, 1) == 0.0);
}

TEST_CASE("layer_norm_rows normalizes each row") {
  SeededRng rng(5);
  Parameter gain("g", Tensor::zeros({1, 6}));
  Parameter bias("b", Tensor::zeros({1, 6}));
  gain.value.fill(1.0);
  agns::Tape tape;
  const auto x = tape.constant(testutil::random_tensor(2, 6, rng));
  const auto y = agns::layer_norm_rows(x, tape.leaf(gain), tape.leaf(bias));
  for (std::size_t i = 0; i < 2; ++i) {
    double mean = 0, var = 0;
    for (std::size_t j = 0; j < 6; ++j) mean += y.value().at(i, j);
    mean /= 6;
    for (std::size_t j = 0; j < 6; ++j) {
      const double d = y.value().at(i, j) - mean;
      var += d * d;
    }
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(var / 6 == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("backward rejects non-scalar and non-finite losses") {
  agns::Tape tape;
  const auto v = tape.constant(Tensor::zeros({2, 2}));
  CHECK_THROWS(tape.backward(v));
  agns::Tape tape2;
  const auto bad =
      agns::log_(tape2.constant(Tensor::zeros({1, 1})));  // log 0 = -inf
  CHECK_THROWS(tape2.backward(bad));
}

TEST_CASE("parameter leaves are cached within a tape") {
  Parameter x("x", Tensor::scalar(1.0));
  agns::Tape tape;
  const auto a = tape.leaf(x);
  const auto b = tape.leaf(x);
  CHECK(a.node == b.node);
}

TEST_CASE("finite_difference_check flags a corrupted backward rule") {
  Parameter x("x", Tensor::scalar(0.7));
  const double err = finite_difference_check(
      [&](agns::Tape& tape) {
        auto leaf = tape.leaf(x);
        // Forward computes x^2 but the recorded rule claims d/dx = 3x.
        Tensor v = Tensor::scalar(leaf.value().at(0, 0) * leaf.value().at(0, 0));
        auto bad = tape.make(v, nullptr);
        bad.node->back = [leaf, node = bad.node]() {
          leaf.grad().at(0, 0) += 3.0 * leaf.value().at(0, 0) *
                                  node->grad.at(0, 0);
        };
        return bad;
      },
      {&x});
  CHECK(err > 1e-3);
}

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "deid/tensor.hpp"

namespace deid {

// A trainable tensor. Gradients accumulate across Tape::backward calls until
// the caller zeroes them. A frozen parameter still participates in forward
// passes and receives gradients, but the optimizer skips it.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool frozen = false;

  Parameter() = default;
  Parameter(std::string name_, Tensor value_)
      : name(std::move(name_)),
        value(std::move(value_)),
        grad(Tensor::zeros(value.shape())) {}

  void zero_grad() { grad.fill(0.0); }
};

namespace ag {

class Tape;

struct Node {
  Tensor value;
  Tensor grad;
  std::function<void()> back;  // empty for leaves/constants
};

// Handle into a Tape; cheap to copy, valid for the tape's lifetime.
struct Var {
  Node* node = nullptr;
  Tape* tape = nullptr;

  const Tensor& value() const { return node->value; }
  Tensor& grad() const { return node->grad; }
  std::size_t rows() const { return node->value.rows(); }
  std::size_t cols() const { return node->value.cols(); }
};

// Records operations in execution order; backward() replays the recorded
// rules in exact reverse order and then flushes leaf gradients into their
// Parameters. One tape is one single-threaded computation context.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor t);
  // Leaf for a parameter; cached, so repeated calls within one tape share a
  // node (and the parameter's value is copied only once).
  Var leaf(Parameter& p);

  Var make(Tensor value, std::function<void()> back);

  // loss must be a 1x1 tensor with a finite value.
  void backward(Var loss);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  std::vector<std::unique_ptr<Node>> nodes_;
  std::unordered_map<Parameter*, Node*> leaves_;
  std::vector<std::pair<Parameter*, Node*>> bound_;
};

// --- differentiable primitives -------------------------------------------
// All operate on rank-2 tensors; shape preconditions throw
// std::invalid_argument naming the offending shapes.

Var add(Var a, Var b);                 // elementwise, same shape
Var sub(Var a, Var b);
Var mul(Var a, Var b);                 // elementwise (Hadamard)
Var scale(Var a, double c);
Var matmul(Var a, Var b);              // (r x k) * (k x c)
Var transpose(Var a);
Var concat(Var a, Var b, int axis);    // 0 = stack rows, 1 = side by side
Var tanh_(Var a);
Var sigmoid(Var a);
Var exp_(Var a);
Var log_(Var a);
Var softmax_rows(Var a);
// log(sum(exp)) along an axis: axis=1 reduces each row -> (r x 1),
// axis=0 reduces each column -> (1 x c). Stable under large scores.
Var logsumexp(Var a, int axis);
Var reduce_sum(Var a);                 // -> 1x1
Var reduce_mean(Var a);                // -> 1x1
// out[i] = a[index[i]]; gradient scatters back (duplicates accumulate).
Var gather_rows(Var a, std::vector<std::size_t> index);
Var slice_rows(Var a, std::size_t start, std::size_t len);
// Sum of selected entries -> 1x1. Duplicated entries count multiply.
Var sum_entries(Var a, std::vector<std::pair<std::size_t, std::size_t>> idx);
// Broadcast adds: v is 1 x cols(a) (rowvec) or 1 x rows(a) (colvec).
Var add_rowvec(Var a, Var v);
Var add_colvec(Var a, Var v);
// Entries where keep[flat_index] is false are replaced by `value` and block
// gradient flow. keep.size() == a.size().
Var masked_fill(Var a, const std::vector<char>& keep, double value);
// Per-row layer normalization with learned gain/bias (1 x cols), eps 1e-5.
Var layer_norm_rows(Var a, Var gain, Var bias);
Var stack_rows(const std::vector<Var>& rows);  // each 1 x c -> n x c

}  // namespace ag

}  // namespace deid

#include "deid/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace deid::ag {

Var Tape::constant(Tensor t) {
  auto node = std::make_unique<Node>();
  node->value = std::move(t);
  node->grad = Tensor::zeros(node->value.shape());
  Node* raw = node.get();
  nodes_.push_back(std::move(node));
  return Var{raw, this};
}

Var Tape::leaf(Parameter& p) {
  auto it = leaves_.find(&p);
  if (it != leaves_.end()) return Var{it->second, this};
  Var v = constant(p.value);
  leaves_.emplace(&p, v.node);
  bound_.emplace_back(&p, v.node);
  return v;
}

Var Tape::make(Tensor value, std::function<void()> back) {
  auto node = std::make_unique<Node>();
  node->value = std::move(value);
  node->grad = Tensor::zeros(node->value.shape());
  node->back = std::move(back);
  Node* raw = node.get();
  nodes_.push_back(std::move(node));
  return Var{raw, this};
}

void Tape::backward(Var loss) {
  if (loss.node == nullptr || loss.tape != this)
    throw std::invalid_argument("Tape::backward: loss not from this tape");
  if (loss.value().size() != 1)
    throw std::invalid_argument("Tape::backward: loss is not scalar, shape " +
                                loss.value().shape_str());
  if (!std::isfinite(loss.value().scalar_value()))
    throw std::runtime_error("Tape::backward: loss is not finite");
  loss.node->grad[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it)
    if ((*it)->back) (*it)->back();
  for (auto& [param, node] : bound_) {
    for (std::size_t i = 0; i < node->grad.size(); ++i)
      param->grad[i] += node->grad[i];
  }
}

namespace {

void require_same_tape(Var a, Var b, const char* op) {
  if (a.tape != b.tape)
    throw std::invalid_argument(std::string(op) +
                                ": operands from different tapes");
}

// Creates the output node, then installs a backward rule that can see it.
template <typename Back>
Var record(Tape* tape, Tensor value, Back&& rule) {
  Var out = tape->make(std::move(value), nullptr);
  Node* on = out.node;
  out.node->back = [on, rule = std::forward<Back>(rule)]() { rule(on); };
  return out;
}

}  // namespace

Var add(Var a, Var b) {
  require_same_tape(a, b, "add");
  check_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  Node* an = a.node;
  Node* bn = b.node;
  return record(a.tape, std::move(out), [an, bn](Node* on) {
    for (std::size_t i = 0; i < on->grad.size(); ++i) {
      an->grad[i] += on->grad[i];
      bn->grad[i] += on->grad[i];
    }
  });
}

Var sub(Var a, Var b) {
  require_same_tape(a, b, "sub");
  check_same_shape(a.value(), b.value(), "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  Node* an = a.node;
  Node* bn = b.node;
  return record(a.tape, std::move(out), [an, bn](Node* on) {
    for (std::size_t i = 0; i < on->grad.size(); ++i) {
      an->grad[i] += on->grad[i];
      bn->grad[i] -= on->grad[i];
    }
  });
}

Var mul(Var a, Var b) {
  require_same_tape(a, b, "mul");
  check_same_shape(a.value(), b.value(), "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  Node* an = a.node;
  Node* bn = b.node;
  return record(a.tape, std::move(out), [an, bn](Node* on) {
    for (std::size_t i = 0; i < on->grad.size(); ++i) {
      an->grad[i] += on->grad[i] * bn->value[i];
      bn->grad[i] += on->grad[i] * an->value[i];
    }
  });
}

Var scale(Var a, double c) {
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
  Node* an = a.node;
  return record(a.tape, std::move(out), [an, c](Node* on) {
    for (std::size_t i = 0; i < on->grad.size(); ++i)
      an->grad[i] += c * on->grad[i];
  });
}

Var matmul(Var a, Var b) {
  require_same_tape(a, b, "matmul");
  const std::size_t r = a.rows(), k = a.cols(), c = b.cols();
  if (b.rows() != k)
    throw std::invalid_argument("matmul: shape mismatch " +
                                a.value().shape_str() + " vs " +
                                b.value().shape_str());
  Tensor out({r, c});
  const double* A = a.value().data();
  const double* B = b.value().data();
  double* C = out.data();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = B + p * c;
      double* crow = C + i * c;
      for (std::size_t j = 0; j < c; ++j) crow[j] += aip * brow[j];
    }
  Node* an = a.node;
  Node* bn = b.node;
  return record(a.tape, std::move(out), [an, bn, r, k, c](Node* on) {
    const double* G = on->grad.data();
    const double* A = an->value.data();
    const double* B = bn->value.data();
    double* dA = an->grad.data();
    double* dB = bn->grad.data();
    // dA = G * B^T
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        const double g = G[i * c + j];
        if (g == 0.0) continue;
        for (std::size_t p = 0; p < k; ++p) dA[i * k + p] += g * B[p * c + j];
      }
    // dB = A^T * G
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t p = 0; p < k; ++p) {
        const double aip = A[i * k + p];
        if (aip == 0.0) continue;
        const double* grow = G + i * c;
        double* brow = dB + p * c;
        for (std::size_t j = 0; j < c; ++j) brow[j] += aip * grow[j];
      }
  });
}

Var transpose(Var a) {
  const std::size_t r = a.rows(), c = a.cols();
  Tensor out({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.at(j, i) = a.value().at(i, j);
  Node* an = a.node;
  return record(a.tape, std::move(out), [an, r, c](Node* on) {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        an->grad[i * c + j] += on->grad[j * r + i];
  });
}

Var concat(Var a, Var b, int axis) {
  require_same_tape(a, b, "concat");
  const std::size_t ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  if (axis == 1) {
    if (ar != br)
      throw std::invalid_argument("concat axis=1: row mismatch " +
                                  a.value().shape_str() + " vs " +
                                  b.value().shape_str());
    Tensor out({ar, ac + bc});
    for (std::size_t i = 0; i < ar; ++i) {
      for (std::size_t j = 0; j < ac; ++j) out.at(i, j) = a.value().at(i, j);
      for (std::size_t j = 0; j < bc; ++j)
        out.at(i, ac + j) = b.value().at(i, j);
    }
    Node* an = a.node;
    Node* bn = b.node;
    return record(a.tape, std::move(out), [an, bn, ar, ac, bc](Node* on) {
      for (std::size_t i = 0; i < ar; ++i) {
        for (std::size_t j = 0; j < ac; ++j)
          an->grad[i * ac + j] += on->grad[i * (ac + bc) + j];
        for (std::size_t j = 0; j < bc; ++j)
          bn->grad[i * bc + j] += on->grad[i * (ac + bc) + ac + j];
      }
    });
  }
  if (axis == 0) {
    if (ac != bc)
      throw std::invalid_argument("concat axis=0: column mismatch " +
                                  a.value().shape_str() + " vs " +
                                  b.value().shape_str());
    Tensor out({ar + br, ac});
    std::copy(a.value().data(), a.value().data() + ar * ac, out.data());
    std::copy(b.value().data(), b.value().data() + br * bc,
              out.data() + ar * ac);
    Node* an = a.node;
    Node* bn = b.node;
    return record(a.tape, std::move(out), [an, bn, ar, ac, br, bc](Node* on) {
      for (std::size_t i = 0; i < ar * ac; ++i) an->grad[i] += on->grad[i];
      for (std::size_t i = 0; i < br * bc; ++i)
        bn->grad[i] += on->grad[ar * ac + i];
    });
  }
  throw std::invalid_argument("concat: axis must be 0 or 1");
}

Var tanh_(Var a) {
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  Node* an = a.node;
  return record(a.tape, std::move(out), [an](Node* on) {
    for (std::size_t i = 0; i < on->grad.size(); ++i) {
      const double y = on->value[i];
      an->grad[i] += on->grad[i] * (1.0 - y * y);
    }
  });
}

Var sigmoid(Var a) {
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = 1.0 / (1.0 + std::exp(-out[i]));
  Node* an = a.node;
  return record(a.tape, std::move(out), [an](Node* on) {
    for (std::size_t i = 0; i < on->grad.size(); ++i) {
      const double y = on->value[i];
      an->grad[i] += on->grad[i] * y * (1.0 - y);
    }
  });
}

Var exp_(Var a) {
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(out[i]);
  Node* an = a.node;
  return record(a.tape, std::move(out), [an](Node* on) {
    for (std::size_t i = 0; i < on->grad.size(); ++i)
      an->grad[i] += on->grad[i] * on->value[i];
  });
}

Var log_(Var a) {
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(out[i]);
  Node* an = a.node;
  return record(a.tape, std::move(out), [an](Node* on) {
    for (std::size_t i = 0; i < on->grad.size(); ++i)
      an->grad[i] += on->grad[i] / an->value[i];
  });
}

Var softmax_rows(Var a) {
  const std::size_t r = a.rows(), c = a.cols();
  Tensor out = a.value();
  for (std::size_t i = 0; i < r; ++i) {
    double mx = out[i * c];
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, out[i * c + j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      out[i * c + j] = std::exp(out[i * c + j] - mx);
      sum += out[i * c + j];
    }
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] /= sum;
  }
  Node* an = a.node;
  return record(a.tape, std::move(out), [an, r, c](Node* on) {
    for (std::size_t i = 0; i < r; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j)
        dot += on->grad[i * c + j] * on->value[i * c + j];
      for (std::size_t j = 0; j < c; ++j)
        an->grad[i * c + j] +=
            on->value[i * c + j] * (on->grad[i * c + j] - dot);
    }
  });
}

Var logsumexp(Var a, int axis) {
  const std::size_t r = a.rows(), c = a.cols();
  if (axis == 1) {
    Tensor out({r, 1});
    for (std::size_t i = 0; i < r; ++i) {
      double mx = a.value().at(i, 0);
      for (std::size_t j = 1; j < c; ++j)
        mx = std::max(mx, a.value().at(i, j));
      double sum = 0.0;
      for (std::size_t j = 0; j < c; ++j)
        sum += std::exp(a.value().at(i, j) - mx);
      out[i] = mx + std::log(sum);
    }
    Node* an = a.node;
    return record(a.tape, std::move(out), [an, r, c](Node* on) {
      for (std::size_t i = 0; i < r; ++i) {
        const double g = on->grad[i];
        if (g == 0.0) continue;
        const double lse = on->value[i];
        for (std::size_t j = 0; j < c; ++j)
          an->grad[i * c + j] += g * std::exp(an->value[i * c + j] - lse);
      }
    });
  }
  if (axis == 0) {
    Tensor out({1, c});
    for (std::size_t j = 0; j < c; ++j) {
      double mx = a.value().at(0, j);
      for (std::size_t i = 1; i < r; ++i)
        mx = std::max(mx, a.value().at(i, j));
      double sum = 0.0;
      for (std::size_t i = 0; i < r; ++i)
        sum += std::exp(a.value().at(i, j) - mx);
      out[j] = mx + std::log(sum);
    }
    Node* an = a.node;
    return record(a.tape, std::move(out), [an, r, c](Node* on) {
      for (std::size_t j = 0; j < c; ++j) {
        const double g = on->grad[j];
        if (g == 0.0) continue;
        const double lse = on->value[j];
        for (std::size_t i = 0; i < r; ++i)
          an->grad[i * c + j] += g * std::exp(an->value[i * c + j] - lse);
      }
    });
  }
  throw std::invalid_argument("logsumexp: axis must be 0 or 1");
}

Var reduce_sum(Var a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.value().size(); ++i) s += a.value()[i];
  Node* an = a.node;
  return record(a.tape, Tensor::scalar(s), [an](Node* on) {
    const double g = on->grad[0];
    for (std::size_t i = 0; i < an->grad.size(); ++i) an->grad[i] += g;
  });
}

Var reduce_mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.value().size(); ++i) s += a.value()[i];
  Node* an = a.node;
  return record(a.tape, Tensor::scalar(s / n), [an, n](Node* on) {
    const double g = on->grad[0] / n;
    for (std::size_t i = 0; i < an->grad.size(); ++i) an->grad[i] += g;
  });
}

Var gather_rows(Var a, std::vector<std::size_t> index) {
  const std::size_t r = a.rows(), c = a.cols();
  Tensor out({index.size(), c});
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= r)
      throw std::out_of_range("gather_rows: index " +
                              std::to_string(index[i]) + " >= rows " +
                              std::to_string(r));
    for (std::size_t j = 0; j < c; ++j)
      out.at(i, j) = a.value().at(index[i], j);
  }
  Node* an = a.node;
  return record(a.tape, std::move(out),
                [an, c, index = std::move(index)](Node* on) {
                  for (std::size_t i = 0; i < index.size(); ++i)
                    for (std::size_t j = 0; j < c; ++j)
                      an->grad[index[i] * c + j] += on->grad[i * c + j];
                });
}

Var slice_rows(Var a, std::size_t start, std::size_t len) {
  const std::size_t r = a.rows(), c = a.cols();
  if (start + len > r)
    throw std::out_of_range("slice_rows: [" + std::to_string(start) + "," +
                            std::to_string(start + len) + ") exceeds rows " +
                            std::to_string(r));
  Tensor out({len, c});
  std::copy(a.value().data() + start * c, a.value().data() + (start + len) * c,
            out.data());
  Node* an = a.node;
  return record(a.tape, std::move(out), [an, start, len, c](Node* on) {
    for (std::size_t i = 0; i < len * c; ++i)
      an->grad[start * c + i] += on->grad[i];
  });
}

Var sum_entries(Var a, std::vector<std::pair<std::size_t, std::size_t>> idx) {
  const std::size_t r = a.rows(), c = a.cols();
  double s = 0.0;
  for (auto& [i, j] : idx) {
    if (i >= r || j >= c)
      throw std::out_of_range("sum_entries: (" + std::to_string(i) + "," +
                              std::to_string(j) + ") outside " +
                              a.value().shape_str());
    s += a.value().at(i, j);
  }
  Node* an = a.node;
  return record(a.tape, Tensor::scalar(s),
                [an, c, idx = std::move(idx)](Node* on) {
                  const double g = on->grad[0];
                  for (auto& [i, j] : idx) an->grad[i * c + j] += g;
                });
}

Var add_rowvec(Var a, Var v) {
  require_same_tape(a, v, "add_rowvec");
  const std::size_t r = a.rows(), c = a.cols();
  if (v.rows() != 1 || v.cols() != c)
    throw std::invalid_argument("add_rowvec: vector shape " +
                                v.value().shape_str() + " for matrix " +
                                a.value().shape_str());
  Tensor out = a.value();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.at(i, j) += v.value()[j];
  Node* an = a.node;
  Node* vn = v.node;
  return record(a.tape, std::move(out), [an, vn, r, c](Node* on) {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        an->grad[i * c + j] += on->grad[i * c + j];
        vn->grad[j] += on->grad[i * c + j];
      }
  });
}

Var add_colvec(Var a, Var v) {
  require_same_tape(a, v, "add_colvec");
  const std::size_t r = a.rows(), c = a.cols();
  if (v.rows() != 1 || v.cols() != r)
    throw std::invalid_argument("add_colvec: vector shape " +
                                v.value().shape_str() + " for matrix " +
                                a.value().shape_str());
  Tensor out = a.value();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.at(i, j) += v.value()[i];
  Node* an = a.node;
  Node* vn = v.node;
  return record(a.tape, std::move(out), [an, vn, r, c](Node* on) {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        an->grad[i * c + j] += on->grad[i * c + j];
        vn->grad[i] += on->grad[i * c + j];
      }
  });
}

Var masked_fill(Var a, const std::vector<char>& keep, double value) {
  if (keep.size() != a.value().size())
    throw std::invalid_argument("masked_fill: mask length " +
                                std::to_string(keep.size()) +
                                " for tensor " + a.value().shape_str());
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!keep[i]) out[i] = value;
  Node* an = a.node;
  return record(a.tape, std::move(out), [an, keep](Node* on) {
    for (std::size_t i = 0; i < on->grad.size(); ++i)
      if (keep[i]) an->grad[i] += on->grad[i];
  });
}

Var layer_norm_rows(Var a, Var gain, Var bias) {
  require_same_tape(a, gain, "layer_norm_rows");
  require_same_tape(a, bias, "layer_norm_rows");
  const std::size_t r = a.rows(), c = a.cols();
  if (gain.rows() != 1 || gain.cols() != c || bias.rows() != 1 ||
      bias.cols() != c)
    throw std::invalid_argument("layer_norm_rows: gain/bias shape mismatch");
  constexpr double kEps = 1e-5;
  Tensor out({r, c});
  std::vector<double> inv_sigma(r), xhat(r * c);
  for (std::size_t i = 0; i < r; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < c; ++j) mean += a.value().at(i, j);
    mean /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      const double d = a.value().at(i, j) - mean;
      var += d * d;
    }
    var /= static_cast<double>(c);
    inv_sigma[i] = 1.0 / std::sqrt(var + kEps);
    for (std::size_t j = 0; j < c; ++j) {
      xhat[i * c + j] = (a.value().at(i, j) - mean) * inv_sigma[i];
      out.at(i, j) = gain.value()[j] * xhat[i * c + j] + bias.value()[j];
    }
  }
  Node* an = a.node;
  Node* gn = gain.node;
  Node* bn = bias.node;
  return record(a.tape, std::move(out),
                [an, gn, bn, r, c, inv_sigma = std::move(inv_sigma),
                 xhat = std::move(xhat)](Node* on) {
                  for (std::size_t i = 0; i < r; ++i) {
                    double sum_gdy = 0.0, sum_gdy_xhat = 0.0;
                    for (std::size_t j = 0; j < c; ++j) {
                      const double gdy = gn->value[j] * on->grad[i * c + j];
                      sum_gdy += gdy;
                      sum_gdy_xhat += gdy * xhat[i * c + j];
                    }
                    const double n = static_cast<double>(c);
                    for (std::size_t j = 0; j < c; ++j) {
                      const double gdy = gn->value[j] * on->grad[i * c + j];
                      an->grad[i * c + j] +=
                          inv_sigma[i] * (gdy - sum_gdy / n -
                                          xhat[i * c + j] * sum_gdy_xhat / n);
                      gn->grad[j] += on->grad[i * c + j] * xhat[i * c + j];
                      bn->grad[j] += on->grad[i * c + j];
                    }
                  }
                });
}

Var stack_rows(const std::vector<Var>& rows) {
  if (rows.empty()) throw std::invalid_argument("stack_rows: empty input");
  const std::size_t c = rows[0].cols();
  for (const Var& v : rows) {
    require_same_tape(rows[0], v, "stack_rows");
    if (v.rows() != 1 || v.cols() != c)
      throw std::invalid_argument("stack_rows: row shape " +
                                  v.value().shape_str());
  }
  Tensor out({rows.size(), c});
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].value().data(), rows[i].value().data() + c,
              out.data() + i * c);
  std::vector<Node*> nodes;
  nodes.reserve(rows.size());
  for (const Var& v : rows) nodes.push_back(v.node);
  return record(rows[0].tape, std::move(out),
                [nodes = std::move(nodes), c](Node* on) {
                  for (std::size_t i = 0; i < nodes.size(); ++i)
                    for (std::size_t j = 0; j < c; ++j)
                      nodes[i]->grad[j] += on->grad[i * c + j];
                });
}

}  // namespace deid::ag

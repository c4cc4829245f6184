// Finite-difference verification of every differentiable building block.
// Inputs are tiny (at most 4 tokens) so central differences stay well
// conditioned; the tolerance matches the library contract of 1e-6.

#include <doctest.h>

#include "deid/decoders.hpp"
#include "deid/encoders.hpp"
#include "deid/gradcheck.hpp"
#include "deid/model.hpp"
#include "deid/representation.hpp"
#include "helpers.hpp"

using namespace deid;
using testutil::random_tensor;

namespace {
constexpr double kTol = 1e-6;
}

TEST_CASE("lstm step") {
  SeededRng rng(101);
  LstmCellParams cell("cell", 3, 4, rng);
  Parameter x("x", random_tensor(1, 3, rng));
  Parameter h0("h0", random_tensor(1, 4, rng));
  Parameter c0("c0", random_tensor(1, 4, rng));
  auto params = cell.parameters();
  params.insert(params.end(), {&x, &h0, &c0});
  const double err = finite_difference_check(
      [&](ag::Tape& t) {
        auto [h, c] = lstm_step(t, t.leaf(x), t.leaf(h0), t.leaf(c0), cell);
        return ag::add(ag::reduce_sum(h), ag::reduce_sum(c));
      },
      params);
  CHECK(err < kTol);
}

TEST_CASE("bilstm encoder") {
  SeededRng rng(102);
  BiLstmEncoder enc("enc", 3, 2, rng);
  Parameter x("x", random_tensor(4, 3, rng));
  auto params = enc.parameters();
  params.push_back(&x);
  const double err = finite_difference_check(
      [&](ag::Tape& t) { return ag::reduce_sum(enc.encode(t, t.leaf(x))); },
      params);
  CHECK(err < kTol);
}

TEST_CASE("scaled dot-product attention, with and without key mask") {
  SeededRng rng(103);
  Parameter q("q", random_tensor(4, 3, rng));
  Parameter k("k", random_tensor(4, 3, rng));
  Parameter v("v", random_tensor(4, 3, rng));
  const double err = finite_difference_check(
      [&](ag::Tape& t) {
        return ag::reduce_sum(attention(t, t.leaf(q), t.leaf(k), t.leaf(v)));
      },
      {&q, &k, &v});
  CHECK(err < kTol);

  const std::vector<char> mask = {1, 1, 0, 0};
  const double masked_err = finite_difference_check(
      [&](ag::Tape& t) {
        return ag::reduce_sum(
            attention(t, t.leaf(q), t.leaf(k), t.leaf(v), &mask));
      },
      {&q, &k, &v});
  CHECK(masked_err < kTol);
}

TEST_CASE("masked keys get exactly zero attention weight") {
  SeededRng rng(104);
  Parameter q("q", random_tensor(2, 3, rng));
  Parameter k("k", random_tensor(3, 3, rng));
  Parameter v("v", Tensor::zeros({3, 1}));
  // Only the masked key's value row is nonzero; if any weight leaked
  // through, the output would be nonzero.
  v.value.at(2, 0) = 100.0;
  const std::vector<char> mask = {1, 1, 0};
  ag::Tape t;
  const auto out =
      attention(t, t.leaf(q), t.leaf(k), t.leaf(v), &mask);
  CHECK(out.value().at(0, 0) == 0.0);
  CHECK(out.value().at(1, 0) == 0.0);
}

TEST_CASE("multi-head attention block") {
  SeededRng rng(105);
  TransformerLayer layer("tl", 4, 2, rng);
  Parameter x("x", random_tensor(3, 4, rng));
  auto params = layer.parameters();
  params.push_back(&x);
  const double err = finite_difference_check(
      [&](ag::Tape& t) {
        return ag::reduce_sum(layer.multi_head_attention(t, t.leaf(x)));
      },
      params);
  CHECK(err < kTol);
}

TEST_CASE("full transformer layer with residuals and layer norm") {
  SeededRng rng(106);
  TransformerLayer layer("tl", 4, 2, rng);
  Parameter x("x", random_tensor(3, 4, rng));
  auto params = layer.parameters();
  params.push_back(&x);
  const double err = finite_difference_check(
      [&](ag::Tape& t) {
        return ag::reduce_sum(layer.apply(t, t.leaf(x)));
      },
      params);
  CHECK(err < kTol);
}

TEST_CASE("softmax decoder sequence loss") {
  SeededRng rng(107);
  SoftmaxDecoder dec(5, 4, rng);
  Parameter h("h", random_tensor(3, 5, rng));
  const std::vector<int> labels = {2, 0, 3};
  auto params = dec.parameters();
  params.push_back(&h);
  const double err = finite_difference_check(
      [&](ag::Tape& t) { return dec.sequence_nll(t, t.leaf(h), labels); },
      params);
  CHECK(err < kTol);
}

TEST_CASE("crf negative log likelihood") {
  SeededRng rng(108);
  CrfParams crf(5, 3, rng);
  Parameter h("h", random_tensor(4, 5, rng));
  const std::vector<int> labels = {1, 0, 2, 2};
  auto params = crf.parameters();
  params.push_back(&h);
  const double err = finite_difference_check(
      [&](ag::Tape& t) {
        return crf_nll(t, crf.scores(t, t.leaf(h)), labels, crf);
      },
      params);
  CHECK(err < kTol);
}

TEST_CASE("char encoder") {
  SeededRng rng(109);
  CharEncoder enc(6, 3, 4, rng);
  const std::vector<std::vector<int>> char_ids = {
      {2, 3, 0, 0}, {4, 5, 3, 2}, {0, 0, 0, 0}};
  const double err = finite_difference_check(
      [&](ag::Tape& t) {
        return ag::reduce_sum(enc.encode(t, char_ids, 3));
      },
      enc.parameters());
  CHECK(err < kTol);
}

TEST_CASE("end-to-end sentence loss for every model family") {
  for (const std::string& name : standard_model_names()) {
    CAPTURE(name);
    SeededRng rng(110);
    ModelConfig cfg = standard_config(name);
    cfg.d = 6;
    cfg.h = 4;
    cfg.d_char = 3;
    cfg.char_hidden = 3;
    cfg.heads = 2;
    cfg.layers = 1;
    cfg.m = 4;
    cfg.c_max = 4;
    Vocabulary vocab;
    vocab.tokens = {"<PAD>", "<UNK>", "mr", "sam", "lee"};
    vocab.token_to_id = {{"mr", 2}, {"sam", 3}, {"lee", 4}};
    vocab.chars = {0, 0xFFFF, U'm', U'r', U's', U'a', U'l', U'e'};
    vocab.char_to_id = {{U'm', 2}, {U'r', 3}, {U's', 4},
                        {U'a', 5}, {U'l', 6}, {U'e', 7}};
    Model model(cfg, vocab, LabelSet::from_phi_types({"PATIENT"}), 77);

    const auto toks = testutil::make_tokens({"mr", "sam", "lee"});
    const EncodedSentence sent = encode_sentence(
        toks, {"O", "B-PATIENT", "I-PATIENT"}, vocab,
        model.label_set(), cfg.m, cfg.c_max);

    const double err = finite_difference_check(
        [&](ag::Tape& t) { return model.sentence_loss(t, sent); },
        model.parameters());
    CHECK(err < kTol);
  }
}

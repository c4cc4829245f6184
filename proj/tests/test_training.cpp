#include <doctest.h>

#include <cmath>

#include "deid/bio.hpp"
#include "deid/generator.hpp"
#include "deid/pipeline.hpp"
#include "deid/training.hpp"
#include "helpers.hpp"

using namespace deid;

TEST_CASE("adam first step matches the closed form") {
  // With fresh moments, m_hat = g and v_hat = g^2, so the first update is
  // lr * g / (|g| + eps) regardless of the gradient's magnitude.
  Parameter p("p", Tensor::scalar(1.0));
  p.grad.at(0, 0) = 0.37;
  AdamState state;
  TrainConfig tc;
  adam_step({&p}, state, tc);
  const double expected =
      1.0 - tc.learning_rate * 0.37 / (std::sqrt(0.37 * 0.37) + tc.epsilon);
  CHECK(p.value.at(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("adam step magnitude never exceeds the learning rate by much") {
  SeededRng rng(401);
  Parameter p("p", testutil::random_tensor(4, 4, rng));
  AdamState state;
  TrainConfig tc;
  for (int step = 0; step < 5; ++step) {
    const Tensor before = p.value;
    p.grad = testutil::random_tensor(4, 4, rng, -10.0, 10.0);
    adam_step({&p}, state, tc);
    for (std::size_t i = 0; i < p.value.size(); ++i)
      CHECK(std::abs(p.value[i] - before[i]) <= tc.learning_rate * 1.2);
  }
}

TEST_CASE("frozen parameters are left untouched") {
  Parameter p("p", Tensor::scalar(2.0));
  p.frozen = true;
  p.grad.at(0, 0) = 1.0;
  AdamState state;
  adam_step({&p}, state, TrainConfig{});
  CHECK(p.value.at(0, 0) == 2.0);
}

TEST_CASE("non-finite gradients raise, naming the parameter") {
  Parameter p("embed.table", Tensor::scalar(0.0));
  p.grad.at(0, 0) = std::numeric_limits<double>::quiet_NaN();
  AdamState state;
  try {
    adam_step({&p}, state, TrainConfig{});
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("embed.table") != std::string::npos);
  }
}

TEST_CASE("train config validation") {
  TrainConfig tc;
  tc.learning_rate = 0.0;
  CHECK_THROWS(tc.validate());
  tc = TrainConfig{};
  tc.epochs = 0;
  CHECK_THROWS(tc.validate());
}

namespace {

struct SmallRun {
  Vocabulary vocab;
  LabelSet labels;
  std::vector<EncodedSentence> sentences;
};

SmallRun small_corpus() {
  const auto docs = generate_corpus(55, 12);
  const Tokenizer tok;
  SmallRun r;
  r.vocab = vocabulary_from_corpus(docs, tok);
  r.labels = LabelSet::from_phi_types(collect_phi_types(docs));
  r.sentences = encode_corpus(docs, r.vocab, r.labels, 32, 12, tok).sentences;
  return r;
}

ModelConfig small_config(const std::string& name) {
  ModelConfig cfg = standard_config(name);
  cfg.d = 8;
  cfg.h = 8;
  cfg.m = 32;
  cfg.c_max = 12;
  return cfg;
}

}  // namespace

TEST_CASE("identical seeds reproduce training exactly") {
  const SmallRun r = small_corpus();
  TrainConfig tc;
  tc.epochs = 2;
  tc.seed = 9;

  std::vector<double> losses[2];
  Tensor finals[2];
  for (int run = 0; run < 2; ++run) {
    Model model(small_config("bilstm-crf"), r.vocab, r.labels, 9);
    for (const auto& rec : fit(model, r.sentences, tc))
      losses[run].push_back(rec.loss);
    finals[run] = model.parameters().front()->value;
  }
  CHECK(losses[0] == losses[1]);
  for (std::size_t i = 0; i < finals[0].size(); ++i)
    CHECK(finals[0][i] == finals[1][i]);
}

TEST_CASE("different seeds diverge") {
  const SmallRun r = small_corpus();
  TrainConfig tc;
  tc.epochs = 1;
  double l[2];
  for (int run = 0; run < 2; ++run) {
    tc.seed = run;
    Model model(small_config("bilstm"), r.vocab, r.labels, tc.seed);
    l[run] = fit(model, r.sentences, tc).front().loss;
  }
  CHECK(l[0] != l[1]);
}

TEST_CASE("loss decreases over a short training run") {
  const SmallRun r = small_corpus();
  TrainConfig tc;
  tc.epochs = 3;
  Model model(small_config("bilstm-crf"), r.vocab, r.labels, 1);
  const auto trace = fit(model, r.sentences, tc);
  REQUIRE(trace.size() == 3);
  CHECK(trace.back().loss < trace.front().loss);
}

TEST_CASE("pad embedding rows stay zero through training") {
  const SmallRun r = small_corpus();
  TrainConfig tc;
  tc.epochs = 1;
  Model model(small_config("c2v-bilstm-crf"), r.vocab, r.labels, 2);
  fit(model, r.sentences, tc);
  for (Parameter* p : model.parameters())
    if (p->name == "embed.table" || p->name == "char.table")
      for (std::size_t j = 0; j < p->value.cols(); ++j)
        CHECK(p->value.at(0, j) == 0.0);
}

TEST_CASE("freezing the char encoder holds its parameters fixed") {
  const SmallRun r = small_corpus();
  ModelConfig cfg = small_config("c2v-bilstm-crf");
  cfg.freeze_char = true;
  Model model(cfg, r.vocab, r.labels, 3);

  std::vector<std::pair<std::string, Tensor>> before;
  Tensor embed_before;
  for (Parameter* p : model.parameters()) {
    if (p->frozen) before.emplace_back(p->name, p->value);
    if (p->name == "embed.table") embed_before = p->value;
  }
  REQUIRE(!before.empty());

  TrainConfig tc;
  tc.epochs = 1;
  fit(model, r.sentences, tc);

  std::size_t checked = 0;
  bool token_moved = false;
  for (Parameter* p : model.parameters()) {
    if (p->frozen) {
      const Tensor& old = before[checked++].second;
      for (std::size_t i = 0; i < p->value.size(); ++i)
        CHECK(p->value[i] == old[i]);
    } else if (p->name == "embed.table") {
      for (std::size_t i = 0; i < p->value.size(); ++i)
        token_moved = token_moved || p->value[i] != embed_before[i];
    }
  }
  CHECK(checked == before.size());
  CHECK(token_moved);
}

TEST_CASE("a single sentence can be memorized") {
  const auto docs = generate_corpus(60, 1);
  const Tokenizer tok;
  const Vocabulary vocab = vocabulary_from_corpus(docs, tok);
  const LabelSet labels = LabelSet::from_phi_types(collect_phi_types(docs));
  const auto sentences =
      encode_corpus(docs, vocab, labels, 32, 12, tok).sentences;

  ModelConfig cfg = small_config("bilstm-crf");
  Model model(cfg, vocab, labels, 4);
  TrainConfig tc;
  tc.epochs = 40;
  tc.learning_rate = 0.01;
  fit(model, sentences, tc);

  for (const auto& s : sentences) {
    const auto pred = model.predict_labels(s);
    for (std::size_t i = 0; i < s.true_length(); ++i)
      CHECK(pred[i] == s.label_ids[i]);
  }
}

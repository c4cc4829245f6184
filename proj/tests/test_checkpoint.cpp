#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "deid/checkpoint.hpp"
#include "deid/generator.hpp"
#include "deid/pipeline.hpp"
#include "deid/sha256.hpp"

using namespace deid;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

Model make_model(const std::string& name, std::uint64_t seed) {
  const auto docs = generate_corpus(80, 6);
  const Tokenizer tok;
  ModelConfig cfg = standard_config(name);
  cfg.d = 8;
  cfg.h = 6;
  cfg.d_char = 4;
  cfg.char_hidden = 4;
  cfg.m = 32;
  cfg.c_max = 12;
  return Model(cfg, vocabulary_from_corpus(docs, tok),
               LabelSet::from_phi_types(collect_phi_types(docs)), seed);
}

}  // namespace

TEST_CASE("checkpoints round trip parameters, vocab and config") {
  for (const std::string& name : {"c2v-bilstm-crf", "transformer"}) {
    Model model = make_model(name, 31);
    const std::string path = temp_path("deid_ckpt_rt.bin");
    save_checkpoint(model, path);
    Model back = load_checkpoint(path);
    std::remove(path.c_str());

    CHECK(back.config().name == model.config().name);
    CHECK(back.config().m == model.config().m);
    CHECK(back.vocabulary().tokens == model.vocabulary().tokens);
    CHECK(back.label_set().labels() == model.label_set().labels());

    const auto pa = model.parameters();
    const auto pb = back.parameters();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
      CHECK(pa[i]->name == pb[i]->name);
      REQUIRE(pa[i]->value.shape() == pb[i]->value.shape());
      for (std::size_t j = 0; j < pa[i]->value.size(); ++j)
        CHECK(pa[i]->value[j] == pb[i]->value[j]);
    }
  }
}

TEST_CASE("a reloaded model predicts identically") {
  Model model = make_model("bilstm-crf", 32);
  const std::string path = temp_path("deid_ckpt_pred.bin");
  save_checkpoint(model, path);
  Model back = load_checkpoint(path);
  std::remove(path.c_str());

  const auto docs = generate_corpus(81, 3);
  const Tokenizer tok;
  const auto a = predict_corpus(model, docs, tok);
  const auto b = predict_corpus(back, docs, tok);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i].annotations == b[i].annotations);
}

TEST_CASE("saving twice produces identical bytes") {
  Model model = make_model("bilstm", 33);
  const std::string p1 = temp_path("deid_ckpt_a.bin");
  const std::string p2 = temp_path("deid_ckpt_b.bin");
  save_checkpoint(model, p1);
  save_checkpoint(model, p2);
  CHECK(sha256_file_hex(p1) == sha256_file_hex(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("non-checkpoint files are rejected") {
  const std::string path = temp_path("deid_not_ckpt.bin");
  {
    std::ofstream out(path, std::ios::binary);
    out << "definitely not a checkpoint";
  }
  CHECK_THROWS(load_checkpoint(path));
  std::remove(path.c_str());
  CHECK_THROWS(load_checkpoint(temp_path("deid_missing_ckpt.bin")));
}

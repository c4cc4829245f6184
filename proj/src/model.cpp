#include "deid/model.hpp"

#include <stdexcept>

namespace deid {

const std::vector<std::string>& standard_model_names() {
  static const std::vector<std::string> names = {
      "bilstm",      "bilstm-crf",      "c2v-bilstm-crf",
      "transformer", "transformer-crf", "transformer-bilstm"};
  return names;
}

ModelConfig standard_config(const std::string& name) {
  ModelConfig cfg;
  cfg.name = name;
  if (name == "bilstm") {
    cfg.encoder = EncoderKind::BiLstm;
    cfg.decoder = DecoderKind::Softmax;
  } else if (name == "bilstm-crf") {
    cfg.encoder = EncoderKind::BiLstm;
    cfg.decoder = DecoderKind::Crf;
  } else if (name == "c2v-bilstm-crf") {
    cfg.use_char = true;
    cfg.encoder = EncoderKind::BiLstm;
    cfg.decoder = DecoderKind::Crf;
  } else if (name == "transformer") {
    cfg.encoder = EncoderKind::Transformer;
    cfg.decoder = DecoderKind::Softmax;
  } else if (name == "transformer-crf") {
    cfg.encoder = EncoderKind::Transformer;
    cfg.decoder = DecoderKind::Crf;
  } else if (name == "transformer-bilstm") {
    cfg.encoder = EncoderKind::TransformerBiLstm;
    cfg.decoder = DecoderKind::Softmax;
  } else {
    std::string valid;
    for (const auto& n : standard_model_names()) valid += " " + n;
    throw std::invalid_argument("unknown model name \"" + name +
                                "\"; valid names:" + valid);
  }
  return cfg;
}

Model::Model(ModelConfig cfg, Vocabulary vocab, LabelSet labels,
             std::uint64_t seed)
    : cfg_(std::move(cfg)), vocab_(std::move(vocab)), labels_(std::move(labels)) {
  if (labels_.size() == 0)
    throw std::invalid_argument("Model: empty label set");
  SeededRng rng(seed);
  embeddings_ = TokenEmbeddingTable(vocab_.size(), cfg_.d, rng);
  if (cfg_.use_char) {
    char_encoder_ = std::make_unique<CharEncoder>(
        vocab_.char_size(), cfg_.d_char, cfg_.char_hidden, rng);
    char_encoder_->set_frozen(cfg_.freeze_char);
  }
  const std::size_t rep = cfg_.representation_dim();
  switch (cfg_.encoder) {
    case EncoderKind::BiLstm:
      bilstm_ = std::make_unique<BiLstmEncoder>("enc.bilstm", rep, cfg_.h, rng);
      break;
    case EncoderKind::Transformer:
      transformer_ = std::make_unique<TransformerEncoder>(
          "enc.transformer", rep, cfg_.heads, cfg_.layers, cfg_.m, rng);
      break;
    case EncoderKind::TransformerBiLstm:
      transformer_ = std::make_unique<TransformerEncoder>(
          "enc.transformer", rep, cfg_.heads, cfg_.layers, cfg_.m, rng);
      bilstm_ = std::make_unique<BiLstmEncoder>("enc.bilstm", rep, cfg_.h, rng);
      break;
  }
  const std::size_t h_out = cfg_.encoder_output_dim();
  if (cfg_.decoder == DecoderKind::Softmax)
    softmax_ = std::make_unique<SoftmaxDecoder>(h_out, labels_.size(), rng);
  else
    crf_ = std::make_unique<CrfParams>(h_out, labels_.size(), rng);
}

ag::Var Model::encode(ag::Tape& tape, const EncodedSentence& sentence) {
  ag::Var x = represent(tape, embeddings_, char_encoder_.get(), sentence);
  if (transformer_) x = transformer_->encode(tape, x);
  if (bilstm_) x = bilstm_->encode(tape, x);
  return x;
}

ag::Var Model::sentence_loss(ag::Tape& tape, const EncodedSentence& sentence) {
  const std::size_t len = sentence.true_length();
  if (len == 0) return tape.constant(Tensor::scalar(0.0));
  std::vector<int> gold(sentence.label_ids.begin(),
                        sentence.label_ids.begin() + len);
  ag::Var h = encode(tape, sentence);
  if (softmax_) return softmax_->sequence_nll(tape, h, gold);
  return crf_nll(tape, crf_->scores(tape, h), gold, *crf_);
}

std::vector<int> Model::predict_labels(const EncodedSentence& sentence) {
  const std::size_t len = sentence.true_length();
  if (len == 0) return {};
  ag::Tape tape;
  ag::Var h = encode(tape, sentence);
  if (softmax_) {
    const Tensor z = softmax_->logits(tape, h).value();
    std::vector<int> out(len, 0);
    for (std::size_t t = 0; t < len; ++t) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < z.cols(); ++j)
        if (z.at(t, j) > z.at(t, best)) best = j;  // ties keep lowest id
      out[t] = static_cast<int>(best);
    }
    return out;
  }
  const Tensor scores = crf_->scores(tape, h).value();
  return viterbi_decode(scores, crf_->trans.value, crf_->begin.value,
                        crf_->end.value)
      .first;
}

std::vector<Parameter*> Model::parameters() {
  std::vector<Parameter*> out = {&embeddings_.table};
  auto extend = [&out](std::vector<Parameter*> ps) {
    out.insert(out.end(), ps.begin(), ps.end());
  };
  if (char_encoder_) extend(char_encoder_->parameters());
  if (transformer_) extend(transformer_->parameters());
  if (bilstm_) extend(bilstm_->parameters());
  if (softmax_) extend(softmax_->parameters());
  if (crf_) extend(crf_->parameters());
  return out;
}

void Model::constrain_gradients() {
  // PAD rows stay structurally zero.
  for (std::size_t j = 0; j < cfg_.d; ++j) embeddings_.table.grad[j] = 0.0;
  if (char_encoder_)
    for (std::size_t j = 0; j < cfg_.d_char; ++j)
      char_encoder_->char_table.grad[j] = 0.0;
}

}  // namespace deid

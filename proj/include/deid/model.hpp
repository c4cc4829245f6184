#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "deid/decoders.hpp"
#include "deid/encoders.hpp"
#include "deid/representation.hpp"

namespace deid {

enum class EncoderKind { BiLstm, Transformer, TransformerBiLstm };
enum class DecoderKind { Softmax, Crf };

// One row of the model zoo: which representation channels, encoder stack and
// tag decoder to assemble, plus the dimensional hyperparameters.
struct ModelConfig {
  std::string name;
  bool use_char = false;
  EncoderKind encoder = EncoderKind::BiLstm;
  DecoderKind decoder = DecoderKind::Softmax;
  bool freeze_char = false;

  std::size_t d = 64;        // token embedding dim
  std::size_t d_char = 16;   // char embedding dim
  std::size_t char_hidden = 25;  // char LSTM hidden per direction
  std::size_t h = 64;        // LSTM hidden per direction
  std::size_t heads = 4;     // transformer heads
  std::size_t layers = 2;    // transformer layers
  std::size_t m = 64;        // padded sentence window
  std::size_t c_max = 24;    // chars per token

  // Width of the per-token representation fed to the context encoder.
  std::size_t representation_dim() const {
    return d + (use_char ? CharEncoder::kOutputDim : 0);
  }
  std::size_t encoder_output_dim() const {
    return encoder == EncoderKind::Transformer ? representation_dim() : 2 * h;
  }
};

// The six standard configurations, by lowercase hyphenated name:
// bilstm, bilstm-crf, c2v-bilstm-crf, transformer, transformer-crf,
// transformer-bilstm. Throws listing the valid names on anything else.
ModelConfig standard_config(const std::string& name);
const std::vector<std::string>& standard_model_names();

// A fully wired network. Construction is deterministic given
// (config, vocabulary, labels, seed).
class Model {
 public:
  Model(ModelConfig cfg, Vocabulary vocab, LabelSet labels,
        std::uint64_t seed);

  // Summed negative log-probability of the gold tags over real (unmasked)
  // positions; fully masked sentences contribute exactly zero.
  ag::Var sentence_loss(ag::Tape& tape, const EncodedSentence& sentence);

  // Decoded label ids for the unmasked positions (argmax for softmax,
  // Viterbi for CRF).
  std::vector<int> predict_labels(const EncodedSentence& sentence);

  // Encoder output for the unmasked prefix: len x encoder_output_dim.
  ag::Var encode(ag::Tape& tape, const EncodedSentence& sentence);

  std::vector<Parameter*> parameters();
  // Re-pins structural zeros (the PAD embedding rows) after backward.
  void constrain_gradients();

  const ModelConfig& config() const { return cfg_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const LabelSet& label_set() const { return labels_; }

 private:
  ModelConfig cfg_;
  Vocabulary vocab_;
  LabelSet labels_;

  TokenEmbeddingTable embeddings_;
  std::unique_ptr<CharEncoder> char_encoder_;
  std::unique_ptr<TransformerEncoder> transformer_;
  std::unique_ptr<BiLstmEncoder> bilstm_;
  std::unique_ptr<SoftmaxDecoder> softmax_;
  std::unique_ptr<CrfParams> crf_;
};

}  // namespace deid

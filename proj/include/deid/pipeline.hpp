#pragma once

#include <string>
#include <vector>

#include "deid/corpus_io.hpp"
#include "deid/evaluation.hpp"
#include "deid/model.hpp"

namespace deid {

// Fine-grained phi types present in a corpus, sorted and unique.
std::vector<std::string> collect_phi_types(
    const std::vector<AnnotatedDocument>& docs);

Vocabulary vocabulary_from_corpus(const std::vector<AnnotatedDocument>& docs,
                                  const Tokenizer& tokenizer,
                                  int min_count = 1);

struct EncodedCorpus {
  std::vector<EncodedSentence> sentences;
  std::size_t misaligned = 0;  // annotations dropped for misalignment
};

// Tokenize and window-encode a corpus. With strict=true a misaligned gold
// annotation is a hard error; otherwise it is dropped and counted, which is
// the ingestion mode for third-party data.
EncodedCorpus encode_corpus(const std::vector<AnnotatedDocument>& docs,
                            const Vocabulary& vocab, const LabelSet& labels,
                            std::size_t m, std::size_t c_max,
                            const Tokenizer& tokenizer, bool strict = true);

// Run the model over each document: tokenize, encode with the model's
// vocabulary, decode tags, and assemble character-span annotations.
std::vector<AnnotatedDocument> predict_corpus(
    Model& model, const std::vector<AnnotatedDocument>& input,
    const Tokenizer& tokenizer);

// Replace every annotated span by its bracketed category placeholder, e.g.
// a PATIENT span becomes the literal token [NAME].
std::string redact_text(const std::string& text,
                        const std::vector<EntityAnnotation>& annotations,
                        const CategoryMap& cmap);

}  // namespace deid

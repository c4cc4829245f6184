#include "deid/pipeline.hpp"

#include <algorithm>

#include "deid/bio.hpp"
#include "deid/utf8.hpp"

namespace deid {

std::vector<std::string> collect_phi_types(
    const std::vector<AnnotatedDocument>& docs) {
  std::vector<std::string> types;
  for (const auto& d : docs)
    for (const auto& a : d.annotations) types.push_back(a.phi_type);
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  return types;
}

Vocabulary vocabulary_from_corpus(const std::vector<AnnotatedDocument>& docs,
                                  const Tokenizer& tokenizer, int min_count) {
  std::vector<TokenizedDocument> tokenized;
  tokenized.reserve(docs.size());
  for (const auto& d : docs) tokenized.push_back(tokenizer.tokenize(d.doc));
  return build_vocabulary(tokenized, min_count);
}

namespace {

// Annotations clipped to one sentence's token range.
std::vector<EntityAnnotation> sentence_annotations(
    const std::vector<Token>& tokens,
    const std::vector<EntityAnnotation>& anns) {
  std::vector<EntityAnnotation> out;
  if (tokens.empty()) return out;
  const std::size_t lo = tokens.front().start_char;
  const std::size_t hi = tokens.back().end_char;
  for (const auto& a : anns)
    if (a.start_char < hi && a.end_char > lo) out.push_back(a);
  return out;
}

}  // namespace

EncodedCorpus encode_corpus(const std::vector<AnnotatedDocument>& docs,
                            const Vocabulary& vocab, const LabelSet& labels,
                            std::size_t m, std::size_t c_max,
                            const Tokenizer& tokenizer, bool strict) {
  EncodedCorpus out;
  for (const auto& d : docs) {
    validate_document(d);
    const TokenizedDocument toks = tokenizer.tokenize(d.doc);
    for (const auto& sent : toks.sentences) {
      std::vector<EntityAnnotation> anns =
          sentence_annotations(sent, d.annotations);
      std::vector<std::string> bio;
      try {
        bio = bio_encode(sent, anns);
      } catch (const MisalignedAnnotation& e) {
        if (strict)
          throw std::runtime_error("document " + d.doc.doc_id + ": " +
                                   e.what());
        // Drop the offending annotation and retry until clean.
        ++out.misaligned;
        std::vector<EntityAnnotation> kept;
        for (const auto& a : anns)
          if (!(a == e.annotation)) kept.push_back(a);
        anns = std::move(kept);
        while (true) {
          try {
            bio = bio_encode(sent, anns);
            break;
          } catch (const MisalignedAnnotation& e2) {
            ++out.misaligned;
            std::vector<EntityAnnotation> kept2;
            for (const auto& a : anns)
              if (!(a == e2.annotation)) kept2.push_back(a);
            anns = std::move(kept2);
          }
        }
      }
      auto windows = encode_windows(sent, bio, vocab, labels, m, c_max);
      out.sentences.insert(out.sentences.end(), windows.begin(),
                           windows.end());
    }
  }
  return out;
}

std::vector<AnnotatedDocument> predict_corpus(
    Model& model, const std::vector<AnnotatedDocument>& input,
    const Tokenizer& tokenizer) {
  const ModelConfig& cfg = model.config();
  const LabelSet& labels = model.label_set();
  std::vector<AnnotatedDocument> out;
  out.reserve(input.size());
  for (const auto& d : input) {
    AnnotatedDocument pred;
    pred.doc = d.doc;
    const TokenizedDocument toks = tokenizer.tokenize(d.doc);
    for (const auto& sent : toks.sentences) {
      std::vector<std::string> bio;
      const std::vector<std::string> all_o(sent.size(), "O");
      for (const auto& window :
           encode_windows(sent, all_o, model.vocabulary(), labels, cfg.m,
                          cfg.c_max)) {
        for (int id : model.predict_labels(window))
          bio.push_back(labels.label(id));
      }
      for (auto& a : bio_decode(bio, sent))
        pred.annotations.push_back(std::move(a));
    }
    std::sort(pred.annotations.begin(), pred.annotations.end());
    out.push_back(std::move(pred));
  }
  return out;
}

std::string redact_text(const std::string& text,
                        const std::vector<EntityAnnotation>& annotations,
                        const CategoryMap& cmap) {
  std::u32string scalars = utf8_decode(text);
  std::vector<EntityAnnotation> sorted = annotations;
  std::sort(sorted.begin(), sorted.end());
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
    const std::u32string placeholder =
        utf8_decode("[" + cmap.category(it->phi_type) + "]");
    scalars.replace(it->start_char, it->end_char - it->start_char,
                    placeholder);
  }
  return utf8_encode(scalars);
}

}  // namespace deid

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "deid/annotation.hpp"

namespace deid {

struct CorpusParseError : std::runtime_error {
  std::size_t line;
  CorpusParseError(std::size_t line_, const std::string& what_);
};

// Interchange format: newline-delimited JSON, one document per line:
//   {"doc_id": "...", "text": "...",
//    "annotations": [{"start": 0, "end": 4, "type": "PATIENT"}, ...]}
// Offsets are 0-based, end-exclusive, in Unicode scalar values.
std::vector<AnnotatedDocument> read_corpus(const std::string& path);
void write_corpus(const std::vector<AnnotatedDocument>& docs,
                  const std::string& path);

}  // namespace deid

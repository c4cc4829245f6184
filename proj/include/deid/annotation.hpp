#pragma once

#include <string>
#include <vector>

#include "deid/tokenizer.hpp"

namespace deid {

// A PHI span: character offsets (Unicode scalar values, end-exclusive) plus a
// fine-grained type such as PATIENT, DOCTOR, HOSPITAL, DATE, PHONE, ...
struct EntityAnnotation {
  std::size_t start_char = 0;
  std::size_t end_char = 0;
  std::string phi_type;

  bool operator==(const EntityAnnotation&) const = default;
  bool operator<(const EntityAnnotation& o) const {
    if (start_char != o.start_char) return start_char < o.start_char;
    if (end_char != o.end_char) return end_char < o.end_char;
    return phi_type < o.phi_type;
  }
};

struct AnnotatedDocument {
  RawDocument doc;
  std::vector<EntityAnnotation> annotations;
};

// Checks span bounds, start < end, and non-overlap; throws
// std::invalid_argument naming the document on violation.
void validate_document(const AnnotatedDocument& d);

}  // namespace deid

#pragma once

#include <cstdint>
#include <vector>

#include "deid/annotation.hpp"

namespace deid {

struct GeneratorConfig {
  std::size_t min_body_sentences = 2;
  std::size_t max_body_sentences = 4;
};

// Seeded synthetic PHI corpus: clinical-note templates with sampled PHI
// slots. Annotations are exact by construction and every slot value starts
// and ends on a token boundary of the shipped tokenizer. Deterministic given
// (seed, n_docs, config).
//
// Fine-grained types emitted: PATIENT, DOCTOR, HOSPITAL, CITY, STATE,
// STREET, ZIP, PHONE, EMAIL, MEDICALRECORD, IDNUM, AGE, DATE, PROFESSION —
// covering the seven HIPAA categories NAME, PROFESSION, LOCATION, AGE, DATE,
// CONTACT, ID.
std::vector<AnnotatedDocument> generate_corpus(
    std::uint64_t seed, std::size_t n_docs, const GeneratorConfig& cfg = {});

}  // namespace deid

#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "deid/annotation.hpp"

namespace deid {

// Ordered BIO tag inventory: O (id 0) plus B-X / I-X for every phi type.
class LabelSet {
 public:
  LabelSet() = default;
  static LabelSet from_phi_types(std::vector<std::string> types);

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  int id(const std::string& label) const;  // throws on unknown label
  const std::string& label(int id) const;
  int o_id() const { return 0; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> ids_;
};

// Raised when an annotation boundary falls strictly inside a token.
struct MisalignedAnnotation : std::runtime_error {
  EntityAnnotation annotation;
  explicit MisalignedAnnotation(const EntityAnnotation& a);
};

// Tokens fully inside an annotation get B-/I- of its type, everything else O.
std::vector<std::string> bio_encode(
    const std::vector<Token>& tokens,
    const std::vector<EntityAnnotation>& annotations);

// Inverse of bio_encode, total over arbitrary label sequences: a stray I-X
// with no live run of the same type is promoted to B-X.
std::vector<EntityAnnotation> bio_decode(const std::vector<std::string>& labels,
                                         const std::vector<Token>& tokens);

}  // namespace deid

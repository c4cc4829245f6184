#include "deid/bio.hpp"

#include <algorithm>

#include "deid/utf8.hpp"

namespace deid {

void validate_document(const AnnotatedDocument& d) {
  const std::size_t n = utf8_decode(d.doc.text).size();
  std::vector<EntityAnnotation> sorted = d.annotations;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& a = sorted[i];
    if (a.start_char >= a.end_char)
      throw std::invalid_argument(
          "document " + d.doc.doc_id + ": annotation [" +
          std::to_string(a.start_char) + "," + std::to_string(a.end_char) +
          ") has end <= start");
    if (a.end_char > n)
      throw std::invalid_argument("document " + d.doc.doc_id +
                                  ": annotation end " +
                                  std::to_string(a.end_char) +
                                  " exceeds text length " + std::to_string(n));
    if (i > 0 && sorted[i - 1].end_char > a.start_char)
      throw std::invalid_argument("document " + d.doc.doc_id +
                                  ": overlapping annotations at " +
                                  std::to_string(a.start_char));
  }
}

LabelSet LabelSet::from_phi_types(std::vector<std::string> types) {
  std::sort(types.begin(), types.end());
  types.erase(std::unique(types.begin(), types.end()), types.end());
  LabelSet ls;
  ls.labels_.push_back("O");
  for (const auto& t : types) {
    ls.labels_.push_back("B-" + t);
    ls.labels_.push_back("I-" + t);
  }
  for (std::size_t i = 0; i < ls.labels_.size(); ++i)
    ls.ids_[ls.labels_[i]] = static_cast<int>(i);
  return ls;
}

int LabelSet::id(const std::string& label) const {
  auto it = ids_.find(label);
  if (it == ids_.end())
    throw std::invalid_argument("LabelSet: unknown label " + label);
  return it->second;
}

const std::string& LabelSet::label(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= labels_.size())
    throw std::out_of_range("LabelSet: id " + std::to_string(id));
  return labels_[static_cast<std::size_t>(id)];
}

MisalignedAnnotation::MisalignedAnnotation(const EntityAnnotation& a)
    : std::runtime_error("annotation [" + std::to_string(a.start_char) + "," +
                         std::to_string(a.end_char) + ") of type " +
                         a.phi_type + " does not align with token boundaries"),
      annotation(a) {}

std::vector<std::string> bio_encode(
    const std::vector<Token>& tokens,
    const std::vector<EntityAnnotation>& annotations) {
  std::vector<std::string> labels(tokens.size(), "O");
  for (const auto& a : annotations) {
    bool first = true;
    bool any = false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const Token& t = tokens[i];
      const bool overlaps = t.start_char < a.end_char && t.end_char > a.start_char;
      if (!overlaps) continue;
      const bool contained = t.start_char >= a.start_char && t.end_char <= a.end_char;
      if (!contained) throw MisalignedAnnotation(a);
      labels[i] = (first ? "B-" : "I-") + a.phi_type;
      first = false;
      any = true;
    }
    if (!any && a.start_char < a.end_char) {
      // The span overlaps no token at all only if it covers nothing but
      // whitespace, which no tokenized text produces for real PHI.
      bool in_range = false;
      for (const Token& t : tokens)
        if (t.start_char < a.end_char && t.end_char > a.start_char)
          in_range = true;
      if (!in_range && !tokens.empty() &&
          a.start_char >= tokens.front().start_char &&
          a.end_char <= tokens.back().end_char)
        throw MisalignedAnnotation(a);
    }
  }
  return labels;
}

std::vector<EntityAnnotation> bio_decode(const std::vector<std::string>& labels,
                                         const std::vector<Token>& tokens) {
  if (labels.size() != tokens.size())
    throw std::invalid_argument("bio_decode: " + std::to_string(labels.size()) +
                                " labels for " + std::to_string(tokens.size()) +
                                " tokens");
  std::vector<EntityAnnotation> out;
  std::string open_type;
  std::size_t open_start = 0, open_end = 0;
  auto flush = [&]() {
    if (!open_type.empty()) {
      out.push_back(EntityAnnotation{open_start, open_end, open_type});
      open_type.clear();
    }
  };
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string& l = labels[i];
    if (l == "O" || l.size() < 3 || (l[0] != 'B' && l[0] != 'I') ||
        l[1] != '-') {
      flush();
      continue;
    }
    const std::string type = l.substr(2);
    if (l[0] == 'B' || type != open_type) {
      flush();
      open_type = type;
      open_start = tokens[i].start_char;
    }
    open_end = tokens[i].end_char;
  }
  flush();
  return out;
}

}  // namespace deid

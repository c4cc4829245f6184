#include "deid/corpus_io.hpp"

#include <fstream>

#include <json.hpp>

namespace deid {

using nlohmann::json;

CorpusParseError::CorpusParseError(std::size_t line_, const std::string& what_)
    : std::runtime_error("corpus line " + std::to_string(line_) + ": " + what_),
      line(line_) {}

std::vector<AnnotatedDocument> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_corpus: cannot open " + path);
  std::vector<AnnotatedDocument> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw CorpusParseError(lineno, e.what());
    }
    AnnotatedDocument d;
    if (!j.contains("doc_id") || !j["doc_id"].is_string())
      throw CorpusParseError(lineno, "missing or non-string field \"doc_id\"");
    if (!j.contains("text") || !j["text"].is_string())
      throw CorpusParseError(lineno, "missing or non-string field \"text\"");
    d.doc.doc_id = j["doc_id"].get<std::string>();
    d.doc.text = j["text"].get<std::string>();
    for (const auto& a : j.value("annotations", json::array())) {
      if (!a.contains("start") || !a.contains("end") || !a.contains("type"))
        throw CorpusParseError(lineno,
                               "annotation missing start/end/type field");
      EntityAnnotation ann;
      ann.start_char = a["start"].get<std::size_t>();
      ann.end_char = a["end"].get<std::size_t>();
      ann.phi_type = a["type"].get<std::string>();
      d.annotations.push_back(ann);
    }
    try {
      validate_document(d);
    } catch (const std::invalid_argument& e) {
      throw CorpusParseError(lineno, e.what());
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

void write_corpus(const std::vector<AnnotatedDocument>& docs,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_corpus: cannot open " + path);
  for (const auto& d : docs) {
    json j;
    j["doc_id"] = d.doc.doc_id;
    j["text"] = d.doc.text;
    json anns = json::array();
    for (const auto& a : d.annotations)
      anns.push_back({{"start", a.start_char},
                      {"end", a.end_char},
                      {"type", a.phi_type}});
    j["annotations"] = anns;
    out << j.dump() << "\n";
  }
  if (!out) throw std::runtime_error("write_corpus: write failed for " + path);
}

}  // namespace deid

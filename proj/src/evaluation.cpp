#include "deid/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace deid {

using nlohmann::json;

Prf prf(const ConfusionCounts& c) {
  Prf out;
  if (c.tp + c.fp > 0)
    out.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0)
    out.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (out.precision + out.recall > 0.0)
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

UnmappedPhiType::UnmappedPhiType(const std::string& t)
    : std::runtime_error("no HIPAA category mapped for phi type " + t),
      phi_type(t) {}

CategoryMap CategoryMap::defaults() {
  CategoryMap m;
  for (const char* t : {"PATIENT", "DOCTOR"}) m.set(t, "NAME");
  for (const char* t : {"HOSPITAL", "CITY", "STATE", "STREET", "ZIP",
                        "COUNTRY", "ORGANIZATION"})
    m.set(t, "LOCATION");
  for (const char* t : {"PHONE", "FAX", "EMAIL"}) m.set(t, "CONTACT");
  for (const char* t : {"MEDICALRECORD", "IDNUM", "DEVICE", "ACCOUNT"})
    m.set(t, "ID");
  m.set("AGE", "AGE");
  m.set("DATE", "DATE");
  m.set("PROFESSION", "PROFESSION");
  return m;
}

CategoryMap CategoryMap::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("CategoryMap: cannot open " + path);
  json j = json::parse(in);
  CategoryMap m;
  for (auto& [k, v] : j.items()) m.set(k, v.get<std::string>());
  return m;
}

const std::string& CategoryMap::category(const std::string& phi_type) const {
  auto it = map_.find(phi_type);
  if (it == map_.end()) throw UnmappedPhiType(phi_type);
  return it->second;
}

void CategoryMap::set(const std::string& phi_type,
                      const std::string& category) {
  map_[phi_type] = category;
}

ConfusionCounts strict_match(const std::vector<EntityAnnotation>& gold,
                             const std::vector<EntityAnnotation>& pred) {
  std::multiset<EntityAnnotation> gold_set(gold.begin(), gold.end());
  ConfusionCounts c;
  for (const auto& p : pred) {
    auto it = gold_set.find(p);
    if (it != gold_set.end()) {
      ++c.tp;
      gold_set.erase(it);
    } else {
      ++c.fp;
    }
  }
  c.fn = static_cast<long>(gold.size()) - c.tp;
  return c;
}

std::pair<Prf, Prf> micro_macro(const std::vector<ConfusionCounts>& per_doc) {
  if (per_doc.empty())
    throw std::invalid_argument("micro_macro: no documents");
  ConfusionCounts total;
  Prf macro;
  for (const auto& c : per_doc) {
    total += c;
    const Prf p = prf(c);
    macro.precision += p.precision;
    macro.recall += p.recall;
    macro.f1 += p.f1;
  }
  const double n = static_cast<double>(per_doc.size());
  macro.precision /= n;
  macro.recall /= n;
  macro.f1 /= n;
  return {prf(total), macro};
}

namespace {

std::vector<EntityAnnotation> map_types(
    const std::vector<EntityAnnotation>& anns, const CategoryMap& cmap) {
  std::vector<EntityAnnotation> out;
  out.reserve(anns.size());
  for (const auto& a : anns)
    out.push_back(EntityAnnotation{a.start_char, a.end_char,
                                   cmap.category(a.phi_type)});
  return out;
}

// Category of the annotation overlapping the token, or "" for none.
std::string token_category(const Token& t,
                           const std::vector<EntityAnnotation>& anns,
                           const CategoryMap& cmap) {
  for (const auto& a : anns)
    if (t.start_char < a.end_char && t.end_char > a.start_char)
      return cmap.category(a.phi_type);
  return "";
}

}  // namespace

std::map<std::string, ConfusionCounts> per_category_token_counts(
    const std::vector<AnnotatedDocument>& gold,
    const std::vector<AnnotatedDocument>& pred, const CategoryMap& cmap,
    const Tokenizer& tokenizer) {
  if (gold.size() != pred.size())
    throw std::invalid_argument("per_category_token_counts: corpus sizes differ");
  std::map<std::string, ConfusionCounts> out;
  for (std::size_t d = 0; d < gold.size(); ++d) {
    const TokenizedDocument toks = tokenizer.tokenize(gold[d].doc);
    for (const auto& sent : toks.sentences)
      for (const Token& t : sent) {
        const std::string g = token_category(t, gold[d].annotations, cmap);
        const std::string p = token_category(t, pred[d].annotations, cmap);
        if (!g.empty() && g == p)
          ++out[g].tp;
        else {
          if (!p.empty()) ++out[p].fp;
          if (!g.empty()) ++out[g].fn;
        }
      }
  }
  return out;
}

MetricsReport evaluate(const std::vector<AnnotatedDocument>& gold,
                       const std::vector<AnnotatedDocument>& pred,
                       const CategoryMap& cmap, bool fine_grained,
                       const Tokenizer& tokenizer) {
  std::map<std::string, const AnnotatedDocument*> pred_by_id;
  for (const auto& d : pred) pred_by_id[d.doc.doc_id] = &d;
  std::set<std::string> gold_ids;
  for (const auto& d : gold) gold_ids.insert(d.doc.doc_id);
  std::string missing, extra;
  for (const auto& d : gold)
    if (!pred_by_id.count(d.doc.doc_id)) missing += " " + d.doc.doc_id;
  for (const auto& d : pred)
    if (!gold_ids.count(d.doc.doc_id)) extra += " " + d.doc.doc_id;
  if (!missing.empty() || !extra.empty())
    throw std::invalid_argument(
        "evaluate: doc_id mismatch;" +
        (missing.empty() ? "" : " missing from predictions:" + missing) +
        (extra.empty() ? "" : " absent from gold:" + extra));

  MetricsReport r;
  std::vector<ConfusionCounts> per_doc;
  std::vector<AnnotatedDocument> aligned_pred;
  for (const auto& g : gold) {
    const AnnotatedDocument& p = *pred_by_id.at(g.doc.doc_id);
    aligned_pred.push_back(p);
    const ConfusionCounts c =
        fine_grained
            ? strict_match(g.annotations, p.annotations)
            : strict_match(map_types(g.annotations, cmap),
                           map_types(p.annotations, cmap));
    per_doc.push_back(c);
    r.per_document.emplace_back(g.doc.doc_id, c);
    r.micro_counts += c;
  }
  auto [micro, macro] = micro_macro(per_doc);
  r.micro = micro;
  r.macro = macro;
  r.per_category_counts =
      per_category_token_counts(gold, aligned_pred, cmap, tokenizer);
  for (const auto& [cat, counts] : r.per_category_counts)
    r.per_category[cat] = prf(counts);
  return r;
}

std::string report_to_json(const MetricsReport& r) {
  json j;
  auto prf_json = [](const Prf& p) {
    return json{{"precision", p.precision},
                {"recall", p.recall},
                {"f1", p.f1}};
  };
  j["micro"] = prf_json(r.micro);
  j["macro"] = prf_json(r.macro);
  j["micro_counts"] = {{"tp", r.micro_counts.tp},
                       {"fp", r.micro_counts.fp},
                       {"fn", r.micro_counts.fn}};
  json cats = json::object();
  for (const auto& [cat, p] : r.per_category) {
    const ConfusionCounts& c = r.per_category_counts.at(cat);
    cats[cat] = prf_json(p);
    cats[cat]["tp"] = c.tp;
    cats[cat]["fp"] = c.fp;
    cats[cat]["fn"] = c.fn;
  }
  j["per_category"] = cats;
  json docs = json::array();
  for (const auto& [id, c] : r.per_document)
    docs.push_back({{"doc_id", id}, {"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}});
  j["documents"] = docs;
  return j.dump(2);
}

std::string report_to_table(const MetricsReport& r) {
  std::ostringstream out;
  char buf[128];
  out << "strict entity metrics (all PHI)\n";
  out << "  level   precision  recall     f1\n";
  std::snprintf(buf, sizeof(buf), "  micro   %.4f     %.4f     %.4f\n",
                r.micro.precision, r.micro.recall, r.micro.f1);
  out << buf;
  std::snprintf(buf, sizeof(buf), "  macro   %.4f     %.4f     %.4f\n",
                r.macro.precision, r.macro.recall, r.macro.f1);
  out << buf;
  out << "\nper-category token metrics\n";
  out << "  category     precision  recall     f1\n";
  for (const auto& [cat, p] : r.per_category) {
    std::snprintf(buf, sizeof(buf), "  %-12s %.4f     %.4f     %.4f\n",
                  cat.c_str(), p.precision, p.recall, p.f1);
    out << buf;
  }
  return out.str();
}

}  // namespace deid

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "deid/annotation.hpp"
#include "deid/tokenizer.hpp"

namespace deid {

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Degenerate denominators yield 0, never NaN (including F1 when P+R = 0).
Prf prf(const ConfusionCounts& c);

struct UnmappedPhiType : std::runtime_error {
  std::string phi_type;
  explicit UnmappedPhiType(const std::string& t);
};

// Fine-grained phi type -> HIPAA category (NAME, PROFESSION, LOCATION, AGE,
// DATE, CONTACT, ID). Total over the generator's type inventory by default.
class CategoryMap {
 public:
  static CategoryMap defaults();
  // JSON object file: {"PATIENT": "NAME", ...}
  static CategoryMap from_file(const std::string& path);

  const std::string& category(const std::string& phi_type) const;  // throws
  void set(const std::string& phi_type, const std::string& category);

 private:
  std::map<std::string, std::string> map_;
};

// Exact-span, exact-type matching; no partial credit. Types are compared as
// given (map them to categories first for category-level scoring).
ConfusionCounts strict_match(const std::vector<EntityAnnotation>& gold,
                             const std::vector<EntityAnnotation>& pred);

// micro = prf over summed counts; macro = unweighted mean of per-document
// prf (documents with no entities on either side contribute zeros).
std::pair<Prf, Prf> micro_macro(const std::vector<ConfusionCounts>& per_doc);

struct MetricsReport {
  Prf micro;
  Prf macro;
  ConfusionCounts micro_counts;
  std::vector<std::pair<std::string, ConfusionCounts>> per_document;
  // Token-level metrics per HIPAA category, micro-aggregated corpus-wide.
  std::map<std::string, Prf> per_category;
  std::map<std::string, ConfusionCounts> per_category_counts;
};

// Token-level per-category counts: each token carries the category of the
// annotation overlapping it (or none); counted corpus-wide.
std::map<std::string, ConfusionCounts> per_category_token_counts(
    const std::vector<AnnotatedDocument>& gold,
    const std::vector<AnnotatedDocument>& pred, const CategoryMap& cmap,
    const Tokenizer& tokenizer);

// Full evaluation: strict entity micro/macro (types compared at category
// level unless fine_grained) plus per-category token metrics. Gold and
// prediction corpora must cover identical doc_id sets.
MetricsReport evaluate(const std::vector<AnnotatedDocument>& gold,
                       const std::vector<AnnotatedDocument>& pred,
                       const CategoryMap& cmap, bool fine_grained = false,
                       const Tokenizer& tokenizer = Tokenizer());

// Machine-readable (JSON) and human-readable table renderings.
std::string report_to_json(const MetricsReport& r);
std::string report_to_table(const MetricsReport& r);

}  // namespace deid

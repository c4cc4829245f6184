#include <doctest.h>

#include "deid/evaluation.hpp"

using namespace deid;

TEST_CASE("prf handles degenerate counts without NaN") {
  CHECK(prf({0, 0, 0}).precision == 0.0);
  CHECK(prf({0, 0, 0}).recall == 0.0);
  CHECK(prf({0, 0, 0}).f1 == 0.0);
  CHECK(prf({0, 3, 0}).precision == 0.0);
  CHECK(prf({2, 0, 2}).precision == 1.0);
  CHECK(prf({2, 0, 2}).recall == 0.5);
}

TEST_CASE("strict matching needs exact span and exact type") {
  const std::vector<EntityAnnotation> gold = {{0, 4, "NAME"},
                                              {10, 14, "DATE"}};
  SUBCASE("exact matches") {
    CHECK(strict_match(gold, gold) == ConfusionCounts{2, 0, 0});
  }
  SUBCASE("off-by-one span is both fp and fn") {
    CHECK(strict_match(gold, {{0, 5, "NAME"}, {10, 14, "DATE"}}) ==
          ConfusionCounts{1, 1, 1});
  }
  SUBCASE("wrong type is both fp and fn") {
    CHECK(strict_match(gold, {{0, 4, "DATE"}, {10, 14, "DATE"}}) ==
          ConfusionCounts{1, 1, 1});
  }
  SUBCASE("duplicate predictions match a gold entity only once") {
    CHECK(strict_match(gold, {{0, 4, "NAME"}, {0, 4, "NAME"}}) ==
          ConfusionCounts{1, 1, 1});
  }
}

TEST_CASE("micro and macro disagree on skewed documents") {
  // Document 1: one perfect entity. Document 2: one hit, three false alarms.
  const std::vector<ConfusionCounts> per_doc = {{1, 0, 0}, {1, 3, 0}};
  const auto [micro, macro] = micro_macro(per_doc);
  CHECK(micro.precision == doctest::Approx(2.0 / 5.0));
  CHECK(macro.precision == doctest::Approx(5.0 / 8.0));
}

TEST_CASE("category map defaults cover the generator's type inventory") {
  const CategoryMap m = CategoryMap::defaults();
  CHECK(m.category("PATIENT") == "NAME");
  CHECK(m.category("DOCTOR") == "NAME");
  CHECK(m.category("HOSPITAL") == "LOCATION");
  CHECK(m.category("ZIP") == "LOCATION");
  CHECK(m.category("PHONE") == "CONTACT");
  CHECK(m.category("EMAIL") == "CONTACT");
  CHECK(m.category("MEDICALRECORD") == "ID");
  CHECK(m.category("AGE") == "AGE");
  CHECK(m.category("DATE") == "DATE");
  CHECK(m.category("PROFESSION") == "PROFESSION");
  try {
    m.category("STARSIGN");
    FAIL("expected UnmappedPhiType");
  } catch (const UnmappedPhiType& e) {
    CHECK(e.phi_type == "STARSIGN");
  }
}

namespace {

// Three documents with every count worked out by hand below.
std::pair<std::vector<AnnotatedDocument>, std::vector<AnnotatedDocument>>
golden_fixture() {
  std::vector<AnnotatedDocument> gold(3), pred(3);
  gold[0].doc = {"a", "Ann Lee saw Dr. Bob on 2020-01-02 ."};
  gold[0].annotations = {
      {0, 7, "PATIENT"}, {16, 19, "DOCTOR"}, {23, 33, "DATE"}};
  pred[0].doc = gold[0].doc;
  // Bob found but typed PATIENT (same NAME category), the date missed, and
  // a spurious AGE over "on".
  pred[0].annotations = {
      {0, 7, "PATIENT"}, {16, 19, "PATIENT"}, {20, 22, "AGE"}};

  gold[1].doc = {"b", "MRN 1234567 at Mercy Hospital ."};
  gold[1].annotations = {{4, 11, "MEDICALRECORD"}, {15, 29, "HOSPITAL"}};
  pred[1].doc = gold[1].doc;
  pred[1].annotations = {{4, 11, "MEDICALRECORD"}};

  gold[2].doc = {"c", "no phi here"};
  pred[2].doc = gold[2].doc;
  return {gold, pred};
}

}  // namespace

TEST_CASE("hand-counted golden fixture") {
  const auto [gold, pred] = golden_fixture();
  const MetricsReport r = evaluate(gold, pred, CategoryMap::defaults());

  // Category-level strict counts: doc a (2,1,1), doc b (1,0,1), doc c (0,0,0).
  CHECK(r.micro_counts == ConfusionCounts{3, 1, 2});
  CHECK(r.micro.precision == doctest::Approx(3.0 / 4.0));
  CHECK(r.micro.recall == doctest::Approx(3.0 / 5.0));
  CHECK(r.micro.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(r.macro.precision == doctest::Approx(5.0 / 9.0));
  CHECK(r.macro.recall == doctest::Approx(7.0 / 18.0));
  CHECK(r.macro.f1 == doctest::Approx(4.0 / 9.0));

  REQUIRE(r.per_document.size() == 3);
  CHECK(r.per_document[0].second == ConfusionCounts{2, 1, 1});
  CHECK(r.per_document[1].second == ConfusionCounts{1, 0, 1});
  CHECK(r.per_document[2].second == ConfusionCounts{0, 0, 0});

  // Token-level per category: NAME 3 hits; DATE misses its 5 tokens; the
  // stray AGE prediction is 1 fp; ID hits its single token; LOCATION misses
  // both of Mercy Hospital's tokens.
  CHECK(r.per_category_counts.at("NAME") == ConfusionCounts{3, 0, 0});
  CHECK(r.per_category_counts.at("DATE") == ConfusionCounts{0, 0, 5});
  CHECK(r.per_category_counts.at("AGE") == ConfusionCounts{0, 1, 0});
  CHECK(r.per_category_counts.at("ID") == ConfusionCounts{1, 0, 0});
  CHECK(r.per_category_counts.at("LOCATION") == ConfusionCounts{0, 0, 2});
  CHECK(r.per_category.at("NAME").f1 == doctest::Approx(1.0));
  CHECK(r.per_category.at("DATE").f1 == 0.0);
}

TEST_CASE("fine-grained matching distinguishes PATIENT from DOCTOR") {
  const auto [gold, pred] = golden_fixture();
  const MetricsReport r =
      evaluate(gold, pred, CategoryMap::defaults(), true);
  CHECK(r.micro_counts == ConfusionCounts{2, 2, 3});
}

TEST_CASE("gold against itself scores perfectly") {
  const auto [gold, pred] = golden_fixture();
  const MetricsReport r = evaluate(gold, gold, CategoryMap::defaults());
  CHECK(r.micro.f1 == doctest::Approx(1.0));
  CHECK(r.macro.precision == doctest::Approx(2.0 / 3.0));  // doc c has none
  for (const auto& [cat, p] : r.per_category)
    CHECK(p.f1 == doctest::Approx(1.0));
}

TEST_CASE("doc_id mismatches are an error that names the ids") {
  auto [gold, pred] = golden_fixture();
  pred[2].doc.doc_id = "zzz";
  try {
    evaluate(gold, pred, CategoryMap::defaults());
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("c") != std::string::npos);
    CHECK(msg.find("zzz") != std::string::npos);
  }
}

TEST_CASE("reports serialize to json with the same numbers") {
  const auto [gold, pred] = golden_fixture();
  const MetricsReport r = evaluate(gold, pred, CategoryMap::defaults());
  const std::string j = report_to_json(r);
  CHECK(j.find("\"micro\"") != std::string::npos);
  CHECK(j.find("0.75") != std::string::npos);
  const std::string table = report_to_table(r);
  CHECK(table.find("0.7500") != std::string::npos);
  CHECK(table.find("NAME") != std::string::npos);
}

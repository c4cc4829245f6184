#include <doctest.h>

#include <algorithm>

#include "deid/bio.hpp"
#include "deid/rng.hpp"
#include "helpers.hpp"

using namespace deid;
using testutil::make_tokens;

TEST_CASE("label inventory is O plus B/I per type, O first") {
  const LabelSet ls = LabelSet::from_phi_types({"DATE", "PATIENT", "DATE"});
  CHECK(ls.labels() == std::vector<std::string>{"O", "B-DATE", "I-DATE",
                                                "B-PATIENT", "I-PATIENT"});
  CHECK(ls.o_id() == 0);
  CHECK(ls.id("I-PATIENT") == 4);
  CHECK_THROWS(ls.id("B-UNKNOWN"));
}

TEST_CASE("encode marks covered tokens B then I") {
  const auto toks = make_tokens({"Mr", ".", "Sam", "Lee", "is", "here"});
  // "Sam Lee" occupies scalars [7, 14).
  const std::vector<EntityAnnotation> anns = {{7, 14, "PATIENT"}};
  CHECK(bio_encode(toks, anns) ==
        std::vector<std::string>{"O", "O", "B-PATIENT", "I-PATIENT", "O",
                                 "O"});
}

TEST_CASE("annotation boundary inside a token raises with the span") {
  const auto toks = make_tokens({"SamLee"});
  const std::vector<EntityAnnotation> anns = {{0, 3, "PATIENT"}};
  try {
    bio_encode(toks, anns);
    FAIL("expected MisalignedAnnotation");
  } catch (const MisalignedAnnotation& e) {
    CHECK(e.annotation.start_char == 0);
    CHECK(e.annotation.end_char == 3);
    CHECK(e.annotation.phi_type == "PATIENT");
  }
}

TEST_CASE("decode inverts encode") {
  const auto toks = make_tokens({"a", "b", "c", "d"});
  const std::vector<EntityAnnotation> anns = {{0, 3, "DATE"}, {6, 7, "AGE"}};
  const auto decoded = bio_decode(bio_encode(toks, anns), toks);
  CHECK(decoded == anns);
}

TEST_CASE("adjacent same-type entities stay distinct via B tags") {
  const auto toks = make_tokens({"a", "b"});
  const std::vector<EntityAnnotation> anns = {{0, 1, "NAME"}, {2, 3, "NAME"}};
  const auto labels = bio_encode(toks, anns);
  CHECK(labels == std::vector<std::string>{"B-NAME", "B-NAME"});
  CHECK(bio_decode(labels, toks) == anns);
}

TEST_CASE("stray I tags are repaired to B") {
  const auto toks = make_tokens({"x", "y", "z"});
  const auto decoded = bio_decode({"I-DATE", "I-DATE", "O"}, toks);
  REQUIRE(decoded.size() == 1);
  CHECK(decoded[0] == EntityAnnotation{0, 3, "DATE"});
  // A type change mid-run also starts a fresh entity.
  const auto mixed = bio_decode({"B-DATE", "I-AGE", "O"}, toks);
  REQUIRE(mixed.size() == 2);
  CHECK(mixed[0] == EntityAnnotation{0, 1, "DATE"});
  CHECK(mixed[1] == EntityAnnotation{2, 3, "AGE"});
}

TEST_CASE("round trip holds on 1000 random aligned annotation sets") {
  SeededRng rng(17);
  const std::vector<std::string> types = {"PATIENT", "DATE", "AGE", "ZIP"};
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.index(12);
    std::vector<std::string> words(n, "w");
    const auto toks = make_tokens(words);
    // Walk left to right, opening an annotation over 1..3 tokens sometimes.
    std::vector<EntityAnnotation> anns;
    for (std::size_t i = 0; i < n;) {
      if (rng.uniform() < 0.4) {
        const std::size_t span = std::min(n - i, 1 + rng.index(3));
        anns.push_back({toks[i].start_char, toks[i + span - 1].end_char,
                        types[rng.index(types.size())]});
        i += span;
      } else {
        ++i;
      }
    }
    CHECK(bio_decode(bio_encode(toks, anns), toks) == anns);
  }
}

TEST_CASE("decode is total on 1000 arbitrary label sequences") {
  SeededRng rng(18);
  const std::vector<std::string> inventory = {
      "O", "B-DATE", "I-DATE", "B-NAME", "I-NAME", "I-ZIP"};
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.index(10);
    const auto toks = make_tokens(std::vector<std::string>(n, "w"));
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i)
      labels.push_back(inventory[rng.index(inventory.size())]);
    const auto decoded = bio_decode(labels, toks);  // must not throw
    // Every decoded span is well formed and token aligned.
    for (const auto& a : decoded) {
      CHECK(a.start_char < a.end_char);
      CHECK(a.end_char <= toks.back().end_char);
    }
    // Entities never overlap.
    for (std::size_t i = 1; i < decoded.size(); ++i)
      CHECK(decoded[i - 1].end_char <= decoded[i].start_char);
  }
}

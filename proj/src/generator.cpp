#include "deid/generator.hpp"

#include <stdexcept>
#include <string>

#include "deid/rng.hpp"

namespace deid {

namespace {

const std::vector<std::string> kFirstNames = {
    "John",   "Mary",    "Robert", "Linda",  "James",  "Susan",  "Michael",
    "Karen",  "David",   "Nancy",  "Carlos", "Elena",  "Ahmed",  "Priya",
    "Wei",    "Fatima",  "George", "Helen",  "Thomas", "Ruth",   "Daniel",
    "Alice",  "Samuel",  "Grace",  "Victor", "Diana",  "Oscar",  "Irene",
    "Peter",  "Julia",   "Frank",  "Clara",  "Henry",  "Laura",  "Walter",
    "Monica", "Arthur",  "Sophie", "Leon",   "Teresa"};

const std::vector<std::string> kLastNames = {
    "Smith",    "Johnson", "Williams", "Brown",   "Jones",   "Garcia",
    "Miller",   "Davis",   "Martinez", "Lopez",   "Wilson",  "Anderson",
    "Taylor",   "Thomas",  "Moore",    "Jackson", "Martin",  "Lee",
    "Thompson", "White",   "Harris",   "Clark",   "Lewis",   "Walker",
    "Hall",     "Young",   "King",     "Wright",  "Scott",   "Green",
    "Baker",    "Adams",   "Nelson",   "Carter",  "Mitchell", "Rivera",
    "Campbell", "Roberts", "Gomez",    "Phillips"};

const std::vector<std::string> kHospitals = {
    "Rhode Island Hospital",   "General Medical Center",
    "Saint Vincent Hospital",  "Riverside Clinic",
    "Lakeside Medical Center", "Mercy Hospital",
    "Harbor View Hospital",    "Oak Valley Clinic",
    "Summit Regional Hospital", "Pine Grove Medical Center"};

const std::vector<std::string> kCities = {
    "Providence", "Springfield", "Riverside", "Fairview",  "Georgetown",
    "Clinton",    "Madison",     "Salem",     "Bristol",   "Oxford",
    "Ashland",    "Milton"};

const std::vector<std::string> kStates = {
    "Rhode Island", "Massachusetts", "Connecticut", "Vermont",
    "New Hampshire", "Maine",        "New York",    "Ohio"};

const std::vector<std::string> kStreetNames = {
    "Maple", "Oak",    "Cedar",  "Elm",     "Washington", "Lincoln",
    "Park",  "Sunset", "Hillside", "River", "Church",     "Highland"};

const std::vector<std::string> kProfessions = {
    "teacher",     "carpenter", "nurse",      "accountant", "electrician",
    "farmer",      "librarian", "mechanic",   "pharmacist", "plumber",
    "firefighter", "cashier",   "translator", "architect",  "tailor"};

const std::vector<std::string> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};

const std::vector<std::string> kFillers = {
    "Vitals were stable throughout the visit .",
    "No acute distress was noted on exam .",
    "Labs were within normal limits .",
    "The patient denies fever , chills , or cough .",
    "Plan discussed and questions answered .",
    "Medication list was reviewed and reconciled .",
    "Physical exam was unremarkable today ."};

struct Slot {
  std::string type;   // empty for literal text
  std::string text;
};

class DocBuilder {
 public:
  void literal(const std::string& s) { append(s); }

  void slot(const std::string& type, const std::string& value) {
    const std::size_t start = length_;
    append(value);
    annotations_.push_back(EntityAnnotation{start, length_, type});
  }

  void end_sentence() { append_raw("\n"); }
  void space() { append_raw(" "); }

  AnnotatedDocument finish(std::string doc_id) {
    AnnotatedDocument d;
    d.doc.doc_id = std::move(doc_id);
    d.doc.text = text_;
    d.annotations = std::move(annotations_);
    return d;
  }

 private:
  void append(const std::string& s) { append_raw(s); }
  void append_raw(const std::string& s) {
    text_ += s;
    length_ += s.size();  // generator emits ASCII only, bytes == scalars
  }

  std::string text_;
  std::size_t length_ = 0;
  std::vector<EntityAnnotation> annotations_;
};

std::string digits(SeededRng& rng, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(static_cast<char>('0' + rng.index(10)));
  return out;
}

const std::string& pick(SeededRng& rng, const std::vector<std::string>& pool) {
  return pool[rng.index(pool.size())];
}

std::string make_date(SeededRng& rng) {
  if (rng.index(2) == 0) {
    return std::to_string(1 + rng.index(12)) + "/" +
           std::to_string(1 + rng.index(28)) + "/" +
           std::to_string(10 + rng.index(89));
  }
  return pick(rng, kMonths) + " " + std::to_string(1 + rng.index(28)) + " , " +
         std::to_string(1990 + rng.index(35));
}

std::string make_phone(SeededRng& rng) {
  return digits(rng, 3) + "-" + digits(rng, 3) + "-" + digits(rng, 4);
}

std::string make_email(SeededRng& rng) {
  std::string first = pick(rng, kFirstNames);
  std::string last = pick(rng, kLastNames);
  for (auto& c : first) c = static_cast<char>(std::tolower(c));
  for (auto& c : last) c = static_cast<char>(std::tolower(c));
  return first + "." + last + "@example.org";
}

std::string make_name(SeededRng& rng) {
  return pick(rng, kFirstNames) + " " + pick(rng, kLastNames);
}

void body_sentence(DocBuilder& b, SeededRng& rng) {
  switch (rng.index(12)) {
    case 0:
      b.literal("Mr. ");
      b.slot("PATIENT", pick(rng, kLastNames));
      b.literal(" is a ");
      b.slot("AGE", std::to_string(18 + rng.index(78)));
      b.literal(" yo patient seen on ");
      b.slot("DATE", make_date(rng));
      b.literal(" .");
      break;
    case 1:
      b.literal("Seen by Dr. ");
      b.slot("DOCTOR", make_name(rng));
      b.literal(" at ");
      b.slot("HOSPITAL", pick(rng, kHospitals));
      b.literal(" on ");
      b.slot("DATE", make_date(rng));
      b.literal(" .");
      break;
    case 2:
      b.literal("The patient works as a ");
      b.slot("PROFESSION", pick(rng, kProfessions));
      b.literal(" in ");
      b.slot("CITY", pick(rng, kCities));
      b.literal(" , ");
      b.slot("STATE", pick(rng, kStates));
      b.literal(" .");
      break;
    case 3:
      b.literal("Home address : ");
      b.slot("STREET", std::to_string(1 + rng.index(999)) + " " +
                           pick(rng, kStreetNames) + " Street");
      b.literal(" , ");
      b.slot("CITY", pick(rng, kCities));
      b.literal(" ");
      b.slot("ZIP", digits(rng, 5));
      b.literal(" .");
      break;
    case 4:
      b.literal("Contact number ");
      b.slot("PHONE", make_phone(rng));
      b.literal(" , email ");
      b.slot("EMAIL", make_email(rng));
      b.literal(" .");
      break;
    case 5:
      b.literal("Follow up at ");
      b.slot("HOSPITAL", pick(rng, kHospitals));
      b.literal(" on ");
      b.slot("DATE", make_date(rng));
      b.literal(" .");
      break;
    case 6:
      b.literal("Account ");
      b.slot("IDNUM", digits(rng, 8));
      b.literal(" was billed on ");
      b.slot("DATE", make_date(rng));
      b.literal(" .");
      break;
    case 7:
      b.literal("Referred to Dr. ");
      b.slot("DOCTOR", pick(rng, kLastNames));
      b.literal(" , attending at ");
      b.slot("HOSPITAL", pick(rng, kHospitals));
      b.literal(" .");
      break;
    case 8:
      b.literal("The patient lives in ");
      b.slot("CITY", pick(rng, kCities));
      b.literal(" , ");
      b.slot("STATE", pick(rng, kStates));
      b.literal(" ");
      b.slot("ZIP", digits(rng, 5));
      b.literal(" .");
      break;
    case 9:
      b.literal("Call ");
      b.slot("PHONE", make_phone(rng));
      b.literal(" to confirm the ");
      b.slot("DATE", make_date(rng));
      b.literal(" visit .");
      break;
    case 10:
      b.literal("Worked for years as a ");
      b.slot("PROFESSION", pick(rng, kProfessions));
      b.literal(" before retiring at age ");
      b.slot("AGE", std::to_string(55 + rng.index(30)));
      b.literal(" .");
      break;
    default:
      b.literal(pick(rng, kFillers));
      break;
  }
}

}  // namespace

std::vector<AnnotatedDocument> generate_corpus(std::uint64_t seed,
                                               std::size_t n_docs,
                                               const GeneratorConfig& cfg) {
  if (n_docs < 1)
    throw std::invalid_argument("generate_corpus: n_docs must be >= 1");
  if (cfg.max_body_sentences < cfg.min_body_sentences)
    throw std::invalid_argument("generate_corpus: max < min body sentences");

  std::vector<AnnotatedDocument> docs;
  docs.reserve(n_docs);
  SeededRng rng(seed);
  for (std::size_t i = 0; i < n_docs; ++i) {
    DocBuilder b;
    b.literal("Patient : ");
    b.slot("PATIENT", make_name(rng));
    b.literal(" , MRN ");
    b.slot("MEDICALRECORD", digits(rng, 7));
    b.literal(" .");
    b.end_sentence();
    const std::size_t n_body =
        cfg.min_body_sentences +
        rng.index(cfg.max_body_sentences - cfg.min_body_sentences + 1);
    for (std::size_t s = 0; s < n_body; ++s) {
      body_sentence(b, rng);
      b.end_sentence();
    }
    docs.push_back(b.finish("doc-" + std::to_string(i)));
  }
  return docs;
}

}  // namespace deid

// deid: clinical-text PHI detection pipeline driver.
//
// Subcommands: gen-corpus, train, predict, evaluate, benchmark, gradcheck.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deid/benchmark.hpp"
#include "deid/checkpoint.hpp"
#include "deid/corpus_io.hpp"
#include "deid/decoders.hpp"
#include "deid/encoders.hpp"
#include "deid/evaluation.hpp"
#include "deid/generator.hpp"
#include "deid/gradcheck.hpp"
#include "deid/pipeline.hpp"
#include "deid/sha256.hpp"
#include "deid/training.hpp"

namespace {

using nlohmann::json;
using namespace deid;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The merged effective configuration: defaults, then the config file, then
// command-line flags, in increasing precedence.
struct Settings {
  std::size_t d = 64;
  std::size_t h = 64;
  std::size_t m = 64;
  std::size_t c_max = 24;
  std::size_t d_char = 16;
  std::size_t char_hidden = 25;
  std::size_t heads = 4;
  std::size_t layers = 2;
  TrainConfig train;
  int min_count = 1;
  bool freeze_char = false;
};

struct Overrides {
  std::optional<std::size_t> d, h, m, c_max, d_char, char_hidden, heads,
      layers, batch, epochs, min_count;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
  bool freeze_char = false;
};

void apply_config_file(Settings& s, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("config: " + path + ": " + e.what());
  }
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("d", s.d);
  get("h", s.h);
  get("m", s.m);
  get("c_max", s.c_max);
  get("d_char", s.d_char);
  get("char_hidden", s.char_hidden);
  get("heads", s.heads);
  get("layers", s.layers);
  get("learning_rate", s.train.learning_rate);
  get("batch_size", s.train.batch_size);
  get("epochs", s.train.epochs);
  get("seed", s.train.seed);
  get("min_count", s.min_count);
  get("freeze_char", s.freeze_char);
}

Settings merge_settings(const std::optional<std::string>& config_path,
                        const Overrides& o) {
  Settings s;
  std::string path;
  if (config_path)
    path = *config_path;
  else if (const char* env = std::getenv("DEID_CONFIG"))
    path = env;
  if (!path.empty()) apply_config_file(s, path);

  if (o.d) s.d = *o.d;
  if (o.h) s.h = *o.h;
  if (o.m) s.m = *o.m;
  if (o.c_max) s.c_max = *o.c_max;
  if (o.d_char) s.d_char = *o.d_char;
  if (o.char_hidden) s.char_hidden = *o.char_hidden;
  if (o.heads) s.heads = *o.heads;
  if (o.layers) s.layers = *o.layers;
  if (o.lr) s.train.learning_rate = *o.lr;
  if (o.batch) s.train.batch_size = *o.batch;
  if (o.epochs) s.train.epochs = *o.epochs;
  if (o.seed) s.train.seed = *o.seed;
  if (o.min_count) s.min_count = static_cast<int>(*o.min_count);
  if (o.freeze_char) s.freeze_char = true;
  s.train.validate();
  return s;
}

json settings_to_json(const Settings& s) {
  return json{{"d", s.d},
              {"h", s.h},
              {"m", s.m},
              {"c_max", s.c_max},
              {"d_char", s.d_char},
              {"char_hidden", s.char_hidden},
              {"heads", s.heads},
              {"layers", s.layers},
              {"learning_rate", s.train.learning_rate},
              {"batch_size", s.train.batch_size},
              {"epochs", s.train.epochs},
              {"seed", s.train.seed},
              {"min_count", s.min_count},
              {"freeze_char", s.freeze_char}};
}

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--dim", o.d, "token embedding dim");
  cmd->add_option("--hidden", o.h, "LSTM hidden dim per direction");
  cmd->add_option("--window", o.m, "padded sentence window");
  cmd->add_option("--c-max", o.c_max, "chars per token");
  cmd->add_option("--d-char", o.d_char, "char embedding dim");
  cmd->add_option("--char-hidden", o.char_hidden, "char LSTM hidden dim");
  cmd->add_option("--heads", o.heads, "transformer heads");
  cmd->add_option("--layers", o.layers, "transformer layers");
  cmd->add_option("--lr", o.lr, "learning rate");
  cmd->add_option("--batch", o.batch, "batch size");
  cmd->add_option("--epochs", o.epochs, "training epochs");
  cmd->add_option("--min-count", o.min_count, "vocabulary frequency cutoff");
}

void write_text_file(const std::string& path, const std::string& content) {
  if (const auto dir = std::filesystem::path(path).parent_path();
      !dir.empty())
    std::filesystem::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

json file_digest(const std::string& path) {
  return json{{"path", path}, {"sha256", sha256_file_hex(path)}};
}

ModelConfig configure_model(const std::string& name, const Settings& s) {
  const auto& names = standard_model_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw UsageError("unknown model '" + name + "'; valid models: " + list);
  }
  ModelConfig cfg = standard_config(name);
  cfg.d = s.d;
  cfg.h = s.h;
  cfg.m = s.m;
  cfg.c_max = s.c_max;
  cfg.d_char = s.d_char;
  cfg.char_hidden = s.char_hidden;
  cfg.heads = s.heads;
  cfg.layers = s.layers;
  if (s.freeze_char) cfg.freeze_char = true;
  return cfg;
}

// ---- gen-corpus ----------------------------------------------------------

int cmd_gen_corpus(std::uint64_t seed, std::size_t docs,
                   const std::string& out, const std::string& split) {
  if (docs == 0) throw UsageError("--docs must be positive");
  const std::vector<AnnotatedDocument> corpus = generate_corpus(seed, docs);
  if (split.empty()) {
    write_corpus(corpus, out);
    std::cout << "wrote " << corpus.size() << " documents to " << out << "\n";
    return 0;
  }
  const auto colon = split.find(':');
  std::size_t a = 0, b = 0;
  try {
    if (colon == std::string::npos) throw std::invalid_argument(split);
    a = std::stoul(split.substr(0, colon));
    b = std::stoul(split.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("--split expects TRAIN:TEST, e.g. 80:20");
  }
  if (a == 0 || b == 0) throw UsageError("--split ratio parts must be positive");
  const std::size_t n_train = docs * a / (a + b);
  std::vector<AnnotatedDocument> train(corpus.begin(),
                                       corpus.begin() + n_train);
  std::vector<AnnotatedDocument> test(corpus.begin() + n_train, corpus.end());
  write_corpus(train, out + ".train.jsonl");
  write_corpus(test, out + ".test.jsonl");
  std::cout << "wrote " << train.size() << " train / " << test.size()
            << " test documents to " << out << ".{train,test}.jsonl\n";
  return 0;
}

// ---- train ---------------------------------------------------------------

int cmd_train(const std::string& model_name, const std::string& train_path,
              const std::string& out, const Settings& s,
              const std::optional<std::string>& config_path) {
  const ModelConfig cfg = configure_model(model_name, s);
  const std::vector<AnnotatedDocument> docs = read_corpus(train_path);
  const Tokenizer tokenizer;
  Vocabulary vocab = vocabulary_from_corpus(docs, tokenizer, s.min_count);
  LabelSet labels = LabelSet::from_phi_types(collect_phi_types(docs));
  const EncodedCorpus enc =
      encode_corpus(docs, vocab, labels, cfg.m, cfg.c_max, tokenizer);

  Model model(cfg, std::move(vocab), std::move(labels), s.train.seed);
  std::ostringstream losses;
  const auto trace =
      fit(model, enc.sentences, s.train, out, [&](const EpochRecord& r) {
        json line{{"epoch", r.epoch},
                  {"loss", r.loss},
                  {"wall_time_s", r.wall_time_s}};
        losses << line.dump() << "\n";
        std::cout << "epoch " << r.epoch << "  loss " << r.loss << "\n";
      });
  write_text_file(out + ".losses.jsonl", losses.str());

  json manifest;
  manifest["command"] = "train";
  manifest["model"] = model_name;
  manifest["encoder"] = cfg.encoder == EncoderKind::BiLstm ? "BiLSTM"
                        : cfg.encoder == EncoderKind::Transformer
                            ? "Transformer"
                            : "Transformer+BiLSTM";
  manifest["decoder"] = cfg.decoder == DecoderKind::Crf ? "CRF" : "Softmax";
  manifest["config"] = settings_to_json(s);
  if (config_path) manifest["config_file"] = *config_path;
  manifest["inputs"] = {{"train", file_digest(train_path)}};
  manifest["outputs"] = {{"checkpoint", file_digest(out)},
                         {"losses", out + ".losses.jsonl"}};
  write_text_file(out + ".manifest.json", manifest.dump(2) + "\n");
  std::cout << "checkpoint " << out << " (" << trace.size() << " epochs)\n";
  return 0;
}

// ---- predict -------------------------------------------------------------

int cmd_predict(const std::string& ckpt, const std::string& in_path,
                const std::string& out, bool raw, bool redact,
                const std::optional<std::string>& category_map) {
  Model model = load_checkpoint(ckpt);
  std::vector<AnnotatedDocument> input;
  if (raw) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + in_path);
    std::ostringstream text;
    text << in.rdbuf();
    AnnotatedDocument d;
    d.doc.doc_id = std::filesystem::path(in_path).stem().string();
    d.doc.text = text.str();
    input.push_back(std::move(d));
  } else {
    input = read_corpus(in_path);
  }
  const Tokenizer tokenizer;
  const std::vector<AnnotatedDocument> pred =
      predict_corpus(model, input, tokenizer);
  write_corpus(pred, out);
  if (redact) {
    const CategoryMap cmap = category_map
                                 ? CategoryMap::from_file(*category_map)
                                 : CategoryMap::defaults();
    std::ostringstream lines;
    for (const auto& d : pred) {
      json line{{"doc_id", d.doc.doc_id},
                {"text", redact_text(d.doc.text, d.annotations, cmap)}};
      lines << line.dump() << "\n";
    }
    write_text_file(out + ".redacted.jsonl", lines.str());
  }
  std::cout << "wrote predictions for " << pred.size() << " documents to "
            << out << "\n";
  return 0;
}

// ---- evaluate ------------------------------------------------------------

int cmd_evaluate(const std::optional<std::string>& gold_path,
                 const std::optional<std::string>& pred_path,
                 const std::optional<std::string>& ckpt,
                 const std::optional<std::string>& test_path,
                 const std::optional<std::string>& category_map,
                 const std::optional<std::string>& out, bool fine_grained) {
  const CategoryMap cmap = category_map ? CategoryMap::from_file(*category_map)
                                        : CategoryMap::defaults();
  std::vector<AnnotatedDocument> gold, pred;
  if (gold_path && pred_path) {
    gold = read_corpus(*gold_path);
    pred = read_corpus(*pred_path);
  } else if (ckpt && test_path) {
    gold = read_corpus(*test_path);
    Model model = load_checkpoint(*ckpt);
    pred = predict_corpus(model, gold, Tokenizer());
  } else {
    throw UsageError("evaluate needs either --gold with --pred, "
                     "or --ckpt with --test");
  }
  const MetricsReport report = evaluate(gold, pred, cmap, fine_grained);
  std::cout << report_to_table(report);
  const std::string machine = report_to_json(report) + "\n";
  if (out)
    write_text_file(*out, machine);
  else
    std::cout << machine;
  return 0;
}

// ---- benchmark -----------------------------------------------------------

int cmd_benchmark(const std::string& train_path, const std::string& test_path,
                  const std::string& out_dir, const Settings& s) {
  const std::vector<AnnotatedDocument> train = read_corpus(train_path);
  const std::vector<AnnotatedDocument> test = read_corpus(test_path);
  BenchmarkConfig bc;
  bc.seed = s.train.seed;
  bc.train = s.train;
  bc.min_count = s.min_count;
  bc.d = s.d;
  bc.h = s.h;
  bc.m = s.m;
  bc.c_max = s.c_max;
  const auto entries = run_benchmark(train, test, bc, out_dir);
  std::cout << benchmark_to_tables(entries);

  json manifest;
  manifest["command"] = "benchmark";
  manifest["config"] = settings_to_json(s);
  manifest["inputs"] = {{"train", file_digest(train_path)},
                        {"test", file_digest(test_path)}};
  manifest["outputs"] = {
      {"report", file_digest(out_dir + "/benchmark_report.json")},
      {"tables", file_digest(out_dir + "/benchmark_tables.txt")}};
  write_text_file(out_dir + "/benchmark_manifest.json", manifest.dump(2) + "\n");
  return 0;
}

// ---- gradcheck -----------------------------------------------------------

Tensor random_tensor(std::size_t r, std::size_t c, SeededRng& rng) {
  Tensor t = Tensor::zeros({r, c});
  for (std::size_t i = 0; i < t.size(); ++i)
    t.data()[i] = rng.uniform(-0.5, 0.5);
  return t;
}

std::vector<int> random_labels(std::size_t n, std::size_t k, SeededRng& rng) {
  std::vector<int> out(n);
  for (auto& l : out) l = static_cast<int>(rng.index(k));
  return out;
}

double check_lstm(SeededRng& rng) {
  LstmCellParams cell("lstm", 3, 4, rng);
  Parameter x("x", random_tensor(1, 3, rng));
  Parameter h0("h0", random_tensor(1, 4, rng));
  Parameter c0("c0", random_tensor(1, 4, rng));
  std::vector<Parameter*> params = cell.parameters();
  params.push_back(&x);
  params.push_back(&h0);
  params.push_back(&c0);
  double err = finite_difference_check(
      [&](ag::Tape& t) {
        auto [h, c] =
            lstm_step(t, t.leaf(x), t.leaf(h0), t.leaf(c0), cell);
        return ag::add(ag::reduce_sum(h), ag::reduce_sum(c));
      },
      params);

  BiLstmEncoder enc("bi", 3, 2, rng);
  Parameter seq("seq", random_tensor(3, 3, rng));
  std::vector<Parameter*> params2 = enc.parameters();
  params2.push_back(&seq);
  err = std::max(err, finite_difference_check(
                          [&](ag::Tape& t) {
                            return ag::reduce_sum(enc.encode(t, t.leaf(seq)));
                          },
                          params2));
  return err;
}

double check_attention(SeededRng& rng) {
  Parameter q("q", random_tensor(3, 4, rng));
  Parameter k("k", random_tensor(3, 4, rng));
  Parameter v("v", random_tensor(3, 4, rng));
  double err = finite_difference_check(
      [&](ag::Tape& t) {
        return ag::reduce_sum(
            attention(t, t.leaf(q), t.leaf(k), t.leaf(v)));
      },
      {&q, &k, &v});

  TransformerLayer layer("tl", 4, 2, rng);
  Parameter x("x", random_tensor(3, 4, rng));
  std::vector<Parameter*> params = layer.parameters();
  params.push_back(&x);
  err = std::max(
      err, finite_difference_check(
               [&](ag::Tape& t) {
                 return ag::reduce_sum(
                     layer.multi_head_attention(t, t.leaf(x)));
               },
               params));
  return err;
}

double check_softmax(SeededRng& rng) {
  SoftmaxDecoder dec(5, 4, rng);
  Parameter h("h", random_tensor(3, 5, rng));
  const std::vector<int> labels = random_labels(3, 4, rng);
  std::vector<Parameter*> params = dec.parameters();
  params.push_back(&h);
  return finite_difference_check(
      [&](ag::Tape& t) { return dec.sequence_nll(t, t.leaf(h), labels); },
      params);
}

double check_crf(SeededRng& rng) {
  CrfParams crf(5, 3, rng);
  Parameter h("h", random_tensor(4, 5, rng));
  const std::vector<int> labels = random_labels(4, 3, rng);
  std::vector<Parameter*> params = crf.parameters();
  params.push_back(&h);
  return finite_difference_check(
      [&](ag::Tape& t) {
        return crf_nll(t, crf.scores(t, t.leaf(h)), labels, crf);
      },
      params);
}

int cmd_gradcheck(const std::string& component, std::size_t trials) {
  if (trials == 0) throw UsageError("--trials must be positive");
  struct Suite {
    const char* name;
    double (*run)(SeededRng&);
  };
  const std::vector<Suite> suites = {{"lstm", check_lstm},
                                     {"attention", check_attention},
                                     {"softmax", check_softmax},
                                     {"crf", check_crf}};
  bool known = component == "all";
  for (const auto& s : suites) known = known || component == s.name;
  if (!known)
    throw UsageError("--component must be all, lstm, attention, crf "
                     "or softmax");

  constexpr double kThreshold = 1e-6;
  bool failed = false;
  for (const auto& s : suites) {
    if (component != "all" && component != s.name) continue;
    double worst = 0.0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
      SeededRng rng = SeededRng(2026).fork(trial);
      worst = std::max(worst, s.run(rng));
    }
    const bool ok = worst < kThreshold;
    failed = failed || !ok;
    std::cout << "gradcheck " << s.name << ": max rel err " << worst << " ("
              << trials << " trials) " << (ok ? "OK" : "FAIL") << "\n";
  }
  if (failed)
    throw VerificationError("gradient check exceeded tolerance 1e-6");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clinical text de-identification pipeline"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  app.add_option("--config", config_path,
                 "JSON config file (default: $DEID_CONFIG)");

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus",
                                 "Generate a synthetic annotated corpus");
  std::uint64_t gen_seed = 0;
  std::size_t gen_docs = 0;
  std::string gen_out, gen_split;
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--docs", gen_docs, "number of documents")->required();
  gen->add_option("--out", gen_out, "output path (or prefix with --split)")
      ->required();
  gen->add_option("--split", gen_split, "train:test ratio, e.g. 80:20");

  // train
  auto* train = app.add_subcommand("train", "Train one model");
  std::string train_model, train_in, train_out;
  Overrides train_o;
  train->add_option("--model", train_model, "model name")->required();
  train->add_option("--train", train_in, "training corpus (JSONL)")
      ->required();
  train->add_option("--out", train_out, "checkpoint output path")->required();
  train->add_option("--seed", train_o.seed, "training seed");
  train->add_flag("--freeze-char", train_o.freeze_char,
                  "freeze the character encoder");
  add_override_flags(train, train_o);

  // predict
  auto* predict = app.add_subcommand("predict", "Annotate documents");
  std::string pr_ckpt, pr_in, pr_out;
  bool pr_raw = false, pr_redact = false;
  std::optional<std::string> pr_cmap;
  predict->add_option("--ckpt", pr_ckpt, "model checkpoint")->required();
  predict->add_option("--in", pr_in, "input corpus (JSONL) or raw text file")
      ->required();
  predict->add_option("--out", pr_out, "predicted annotations output")
      ->required();
  predict->add_flag("--raw", pr_raw, "treat --in as raw text");
  predict->add_flag("--redact", pr_redact,
                    "also write text with [CATEGORY] placeholders");
  predict->add_option("--category-map", pr_cmap,
                      "phi type to category JSON map");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score predictions");
  std::optional<std::string> ev_gold, ev_pred, ev_ckpt, ev_test, ev_cmap,
      ev_out;
  bool ev_fine = false;
  eval->add_option("--gold", ev_gold, "gold corpus (JSONL)");
  eval->add_option("--pred", ev_pred, "predicted corpus (JSONL)");
  eval->add_option("--ckpt", ev_ckpt, "checkpoint to predict with");
  eval->add_option("--test", ev_test, "test corpus for --ckpt");
  eval->add_option("--category-map", ev_cmap,
                   "phi type to category JSON map");
  eval->add_option("--out", ev_out, "write the JSON report here");
  eval->add_flag("--fine-grained", ev_fine,
                 "match fine phi types instead of categories");

  // benchmark
  auto* bench = app.add_subcommand(
      "benchmark", "Train and evaluate all six standard models");
  std::string bm_train, bm_test, bm_out;
  Overrides bm_o;
  bench->add_option("--train", bm_train, "training corpus")->required();
  bench->add_option("--test", bm_test, "test corpus")->required();
  bench->add_option("--seed", bm_o.seed, "base seed");
  bench->add_option("--out-dir", bm_out, "output directory")->required();
  add_override_flags(bench, bm_o);

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck",
                                "Finite-difference gradient verification");
  std::string gc_component = "all";
  std::size_t gc_trials = 20;
  gc->add_option("--component", gc_component,
                 "all, lstm, attention, crf or softmax");
  gc->add_option("--trials", gc_trials, "trials per component");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed())
      return cmd_gen_corpus(gen_seed, gen_docs, gen_out, gen_split);
    if (train->parsed())
      return cmd_train(train_model, train_in, train_out,
                       merge_settings(config_path, train_o), config_path);
    if (predict->parsed())
      return cmd_predict(pr_ckpt, pr_in, pr_out, pr_raw, pr_redact, pr_cmap);
    if (eval->parsed())
      return cmd_evaluate(ev_gold, ev_pred, ev_ckpt, ev_test, ev_cmap, ev_out,
                          ev_fine);
    if (bench->parsed())
      return cmd_benchmark(bm_train, bm_test, bm_out,
                           merge_settings(config_path, bm_o));
    if (gc->parsed()) return cmd_gradcheck(gc_component, gc_trials);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const VerificationError& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

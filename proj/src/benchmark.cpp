#include "deid/benchmark.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace deid {

using nlohmann::json;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("benchmark: cannot open " + path);
  out << content;
}

}  // namespace

std::vector<BenchmarkEntry> run_benchmark(
    const std::vector<AnnotatedDocument>& train,
    const std::vector<AnnotatedDocument>& test, const BenchmarkConfig& cfg,
    const std::string& out_dir, const CategoryMap& cmap) {
  cfg.train.validate();
  const Tokenizer tokenizer;
  const Vocabulary vocab =
      vocabulary_from_corpus(train, tokenizer, cfg.min_count);
  const LabelSet labels = LabelSet::from_phi_types(collect_phi_types(train));

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  std::vector<BenchmarkEntry> entries;
  const auto& names = standard_model_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    ModelConfig mc = standard_config(names[i]);
    mc.d = cfg.d;
    mc.h = cfg.h;
    mc.m = cfg.m;
    mc.c_max = cfg.c_max;

    const EncodedCorpus enc = encode_corpus(train, vocab, labels, mc.m,
                                            mc.c_max, tokenizer);

    BenchmarkEntry entry;
    entry.model = names[i];
    entry.seed = cfg.seed + i;

    TrainConfig tc = cfg.train;
    tc.seed = entry.seed;

    Model model(mc, vocab, labels, entry.seed);
    std::string ckpt_path;
    if (!out_dir.empty()) {
      const std::string model_dir = out_dir + "/" + names[i];
      std::filesystem::create_directories(model_dir);
      ckpt_path = model_dir + "/model.ckpt";
    }
    entry.trace = fit(model, enc.sentences, tc, ckpt_path);

    const std::vector<AnnotatedDocument> pred =
        predict_corpus(model, test, tokenizer);
    entry.report = evaluate(test, pred, cmap, false, tokenizer);

    if (!out_dir.empty())
      write_file(out_dir + "/" + names[i] + "/report.json",
                 report_to_json(entry.report));
    entries.push_back(std::move(entry));
  }

  if (!out_dir.empty()) {
    write_file(out_dir + "/benchmark_report.json",
               benchmark_to_json(entries, cfg.seed));
    write_file(out_dir + "/benchmark_tables.txt",
               benchmark_to_tables(entries));
  }
  return entries;
}

std::string benchmark_to_json(const std::vector<BenchmarkEntry>& entries,
                              std::uint64_t base_seed) {
  json j;
  j["seed"] = base_seed;
  json models = json::array();
  for (const auto& e : entries) {
    json m;
    m["name"] = e.model;
    m["seed"] = e.seed;
    m["report"] = json::parse(report_to_json(e.report));
    json epochs = json::array();
    // Wall time is deliberately left out so reruns are byte-identical.
    for (const auto& r : e.trace)
      epochs.push_back({{"epoch", r.epoch}, {"loss", r.loss}});
    m["epochs"] = epochs;
    models.push_back(std::move(m));
  }
  j["models"] = models;
  return j.dump(2);
}

std::string benchmark_to_tables(const std::vector<BenchmarkEntry>& entries) {
  std::ostringstream out;
  char buf[256];
  out << "strict entity metrics by model\n";
  out << "  model                 micro-f1   macro-p    macro-r    macro-f1\n";
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof(buf),
                  "  %-20s  %.4f     %.4f     %.4f     %.4f\n",
                  e.model.c_str(), e.report.micro.f1, e.report.macro.precision,
                  e.report.macro.recall, e.report.macro.f1);
    out << buf;
  }

  std::set<std::string> cats;
  for (const auto& e : entries)
    for (const auto& [cat, p] : e.report.per_category) cats.insert(cat);
  out << "\nper-category token f1 by model\n";
  out << "  model               ";
  for (const auto& c : cats) {
    std::snprintf(buf, sizeof(buf), "  %-10s", c.c_str());
    out << buf;
  }
  out << "\n";
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof(buf), "  %-20s", e.model.c_str());
    out << buf;
    for (const auto& c : cats) {
      auto it = e.report.per_category.find(c);
      std::snprintf(buf, sizeof(buf), "  %-10.4f",
                    it == e.report.per_category.end() ? 0.0 : it->second.f1);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace deid

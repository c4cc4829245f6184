#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deid/evaluation.hpp"
#include "deid/pipeline.hpp"
#include "deid/training.hpp"

namespace deid {

struct BenchmarkConfig {
  std::uint64_t seed = 0;
  TrainConfig train;   // per-model seed is overridden (see below)
  int min_count = 1;
  // Dimensional overrides applied to every standard configuration.
  std::size_t d = 64;
  std::size_t h = 64;
  std::size_t m = 64;
  std::size_t c_max = 24;
};

struct BenchmarkEntry {
  std::string model;
  std::uint64_t seed = 0;
  MetricsReport report;
  std::vector<EpochRecord> trace;
};

// Trains and evaluates all six standard models on a shared train/test split.
// Model i (in standard_model_names() order) runs with seed base_seed + i for
// both initialization and the training shuffle, so each row reproduces
// exactly what a standalone train + evaluate with that seed produces.
//
// When out_dir is non-empty, writes per model <out_dir>/<name>/model.ckpt and
// report.json, plus combined benchmark_report.json and benchmark_tables.txt.
// All emitted files are byte-stable across runs with the same inputs.
std::vector<BenchmarkEntry> run_benchmark(
    const std::vector<AnnotatedDocument>& train,
    const std::vector<AnnotatedDocument>& test, const BenchmarkConfig& cfg,
    const std::string& out_dir = "",
    const CategoryMap& cmap = CategoryMap::defaults());

// Renderings of the combined results (no timestamps, stable ordering).
std::string benchmark_to_json(const std::vector<BenchmarkEntry>& entries,
                              std::uint64_t base_seed);
std::string benchmark_to_tables(const std::vector<BenchmarkEntry>& entries);

}  // namespace deid

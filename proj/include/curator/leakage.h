#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "curator/ngram.h"
#include "curator/tokenizer.h"

namespace curator::leakage {

// Every sample is one question-answer concatenation; the audit compares a
// model's per-token loss on a benchmark's train split, test split, and a
// same-distribution reference set.

struct BenchmarkSplits {
  std::vector<std::string> train_samples;
  std::vector<std::string> test_samples;
  std::vector<std::string> ref_samples;
};

std::vector<std::string> build_samples(const std::vector<std::string>& questions,
                                       const std::vector<std::string>& answers,
                                       const std::string& joiner);

struct Thresholds {
  double t1 = -0.2;  // delta1 at or below this flags test leakage
  double t2 = 0.15;  // delta2 at or above this flags train overfit
};

enum class Flag { kTestLeakSuspect, kTrainOverfitSuspect };
const char* to_string(Flag v);

struct LeakageReport {
  std::string model_id;
  double l_train = 0.0;  // nats per token
  double l_test = 0.0;
  double l_ref = 0.0;
  double delta1 = 0.0;  // l_test - l_ref
  double delta2 = 0.0;  // l_test - l_train
  std::vector<Flag> flags;

  bool has(Flag f) const;
};

// Per-token natural-log probabilities for one sample string.
using SampleScorer = std::function<std::vector<double>(const std::string&)>;

SampleScorer ngram_scorer(const ngram::NGramModel& model,
                          const tokenizer::Vocabulary& vocab);

// Split loss is the token-weighted mean NLL over every sample in the split.
LeakageReport audit(const SampleScorer& scorer, const BenchmarkSplits& splits,
                    const Thresholds& thresholds,
                    const std::string& model_id = "model");

// Same audit on precomputed per-sample log-prob streams (the external
// scores interface); bit-identical to `audit` given identical streams.
LeakageReport audit_from_streams(
    const std::vector<std::vector<double>>& train_streams,
    const std::vector<std::vector<double>>& test_streams,
    const std::vector<std::vector<double>>& ref_streams,
    const Thresholds& thresholds, const std::string& model_id = "model");

// Delta arithmetic and flagging from already-published mean losses.
LeakageReport audit_from_losses(const std::string& model_id, double l_test,
                                double l_train, double l_ref,
                                const Thresholds& thresholds);

// Re-apply a uniform threshold rule to existing reports.
std::vector<LeakageReport> flag_outliers(std::vector<LeakageReport> reports,
                                         const Thresholds& thresholds);

// Splits file: "#train" / "#test" / "#ref" sections, one sample per line,
// newlines and backslashes escaped.
void write_splits(const BenchmarkSplits& splits, const std::string& path);
BenchmarkSplits read_splits(const std::string& path);

// Self-contained contamination experiment: a synthetic arithmetic-word-
// problem benchmark plus byte-level n-gram models trained clean, on the
// train split, and on train+test. Demonstrates both flags firing.
struct DemoReport {
  LeakageReport clean;
  LeakageReport train_contaminated;
  LeakageReport test_contaminated;
};

DemoReport desk_scale_demo(uint64_t corpus_seed);

}  // namespace curator::leakage

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "curator/corpus.h"

namespace curator::quality {

struct LangVerdict {
  corpus::Language language = corpus::Language::kUnknown;
  double confidence = 0.0;
  double zh_char_fraction = 0.0;
  double latin_char_fraction = 0.0;
};

// Letter-class census: fractions are over letter characters only.
// zh wins at >= 0.3 Han letters; en needs >= 0.5 Latin and < 0.05 Han.
LangVerdict detect_language(std::string_view text);

// Hashed character n-gram logistic regression (the Wikipedia-reference
// style binary classifier). Windows wrap around the end of the text so
// term frequencies are invariant under self-concatenation.
struct QualityClassifier {
  uint32_t feature_dim = 0;
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> epoch_losses;  // training metadata, not persisted

  double score(std::string_view text) const;
};

struct ClassifierConfig {
  uint32_t feature_dim = 1u << 18;
  int epochs = 5;
  double lr = 0.5;
  uint64_t seed = 0;
};

QualityClassifier train_quality_classifier(const corpus::CorpusManifest& positives,
                                           const corpus::CorpusManifest& negatives,
                                           const ClassifierConfig& config);

void save_classifier(const QualityClassifier& clf, const std::string& path);
QualityClassifier load_classifier(const std::string& path);

// Sparse feature vector for one text; exposed for tests.
std::vector<std::pair<uint32_t, double>> hashed_ngram_features(
    std::string_view text, uint32_t feature_dim);

// Nearest-rank tertile split of a calibration population. One-third and
// two-thirds boundaries keep the three groups within one of each other.
corpus::PplBucket assign_ppl_bucket(double doc_ppl,
                                    std::vector<double> calibration);

struct CodeFilterPolicy {
  uint64_t max_line_len = 1000;       // Unicode scalars
  double max_mean_line_len = 100.0;
  double min_alnum_fraction = 0.25;
  double markup_keep_fraction = 0.1;  // json/xml/yaml/html sampling rate
};

struct CodeFilterDecision {
  bool keep = true;
  std::vector<corpus::DropReason> reasons;
};

// Deterministic: the markup sampling decision hashes (seed, path_hint).
CodeFilterDecision filter_code_file(std::string_view path_hint,
                                    std::string_view text,
                                    const CodeFilterPolicy& policy,
                                    uint64_t seed);

}  // namespace curator::quality

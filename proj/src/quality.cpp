#include "curator/quality.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "curator/errors.h"
#include "curator/util/binio.h"
#include "curator/util/hash.h"
#include "curator/util/text.h"
#include "curator/util/utf8.h"

namespace curator::quality {

LangVerdict detect_language(std::string_view text) {
  uint64_t letters = 0;
  uint64_t han = 0;
  uint64_t latin = 0;
  for (size_t pos = 0; pos < text.size();) {
    const util::Utf8Step step = util::utf8_next(text, pos);
    pos += static_cast<size_t>(step.len);
    if (!step.valid || !util::is_letter(step.cp)) continue;
    ++letters;
    if (util::is_han(step.cp)) ++han;
    else if (util::is_latin_letter(step.cp)) ++latin;
  }
  LangVerdict v;
  if (letters == 0) return v;  // unknown, confidence 0
  v.zh_char_fraction = static_cast<double>(han) / static_cast<double>(letters);
  v.latin_char_fraction =
      static_cast<double>(latin) / static_cast<double>(letters);
  if (v.zh_char_fraction >= 0.3) {
    v.language = corpus::Language::kZh;
    v.confidence = v.zh_char_fraction;
  } else if (v.latin_char_fraction >= 0.5 && v.zh_char_fraction < 0.05) {
    v.language = corpus::Language::kEn;
    v.confidence = v.latin_char_fraction;
  } else {
    v.language = corpus::Language::kOther;
    // Cannot reach 0: a text fully dominated by one class would have been
    // labeled above.
    v.confidence = 1.0 - std::max(v.zh_char_fraction, v.latin_char_fraction);
  }
  return v;
}

std::vector<std::pair<uint32_t, double>> hashed_ngram_features(
    std::string_view text, uint32_t feature_dim) {
  const std::vector<char32_t> cps = util::utf8_decode(text);
  const size_t len = cps.size();
  std::map<uint32_t, uint64_t> counts;
  uint64_t total = 0;
  char32_t window[3];
  for (size_t n = 1; n <= 3; ++n) {
    if (n > len) break;
    for (size_t i = 0; i < len; ++i) {
      for (size_t k = 0; k < n; ++k) window[k] = cps[(i + k) % len];
      const uint64_t h =
          util::hash64(window, n * sizeof(char32_t), 0x517cc1b727220a95ULL + n);
      counts[static_cast<uint32_t>(h % feature_dim)] += 1;
      ++total;
    }
  }
  std::vector<std::pair<uint32_t, double>> features;
  features.reserve(counts.size());
  for (const auto& [idx, c] : counts)
    features.emplace_back(idx, static_cast<double>(c) /
                                   static_cast<double>(total));
  return features;
}

double QualityClassifier::score(std::string_view text) const {
  const auto features = hashed_ngram_features(text, feature_dim);
  double z = bias;
  for (const auto& [idx, value] : features) z += weights[idx] * value;
  return 1.0 / (1.0 + std::exp(-z));
}

QualityClassifier train_quality_classifier(const corpus::CorpusManifest& positives,
                                           const corpus::CorpusManifest& negatives,
                                           const ClassifierConfig& config) {
  if (positives.empty())
    throw UsageError("classifier training requires at least one positive");
  if (negatives.empty())
    throw UsageError("classifier training requires at least one negative");
  if (config.feature_dim == 0) throw UsageError("feature_dim must be positive");
  if (config.lr <= 0.0) throw UsageError("learning rate must be positive");

  struct Example {
    std::vector<std::pair<uint32_t, double>> features;
    double label;
  };
  std::vector<Example> examples;
  examples.reserve(positives.size() + negatives.size());
  for (const auto& doc : positives.documents)
    examples.push_back({hashed_ngram_features(doc.text, config.feature_dim), 1.0});
  for (const auto& doc : negatives.documents)
    examples.push_back({hashed_ngram_features(doc.text, config.feature_dim), 0.0});

  QualityClassifier clf;
  clf.feature_dim = config.feature_dim;
  clf.weights.assign(config.feature_dim, 0.0);
  clf.bias = 0.0;

  std::vector<size_t> order(examples.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  util::SplitMixRng rng(config.seed ^ 0x9d2c5680cafef00dULL);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    // Seeded Fisher-Yates; std::shuffle is implementation-defined.
    for (size_t i = order.size(); i > 1; --i) {
      const size_t j = rng.next_below(i);
      std::swap(order[i - 1], order[j]);
    }
    double loss = 0.0;
    for (size_t idx : order) {
      const Example& ex = examples[idx];
      double z = clf.bias;
      for (const auto& [f, v] : ex.features) z += clf.weights[f] * v;
      const double p = 1.0 / (1.0 + std::exp(-z));
      const double grad = ex.label - p;
      clf.bias += config.lr * grad;
      for (const auto& [f, v] : ex.features)
        clf.weights[f] += config.lr * grad * v;
      const double eps = 1e-12;
      loss -= ex.label > 0.5 ? std::log(p + eps) : std::log(1.0 - p + eps);
    }
    clf.epoch_losses.push_back(loss / static_cast<double>(examples.size()));
  }
  return clf;
}

namespace {
constexpr char kClassifierMagic[] = "CQCL0001";
}

void save_classifier(const QualityClassifier& clf, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write classifier: " + path);
  out.write(kClassifierMagic, 8);
  util::put_u64(out, clf.feature_dim);
  for (double w : clf.weights) util::put_f64(out, w);
  util::put_f64(out, clf.bias);
  if (!out) throw DataError("write failure: " + path);
}

QualityClassifier load_classifier(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open classifier: " + path);
  util::expect_magic(in, kClassifierMagic, 8);
  QualityClassifier clf;
  const uint64_t dim = util::get_u64(in);
  clf.feature_dim = static_cast<uint32_t>(dim);
  clf.weights.resize(dim);
  for (uint64_t i = 0; i < dim; ++i) clf.weights[i] = util::get_f64(in);
  clf.bias = util::get_f64(in);
  return clf;
}

corpus::PplBucket assign_ppl_bucket(double doc_ppl,
                                    std::vector<double> calibration) {
  if (doc_ppl <= 0.0)
    throw UsageError("perplexity must be positive, got " +
                     std::to_string(doc_ppl));
  if (calibration.empty())
    throw UsageError("empty calibration population");
  for (double v : calibration)
    if (v <= 0.0) throw UsageError("calibration perplexities must be positive");
  std::sort(calibration.begin(), calibration.end());
  const size_t n = calibration.size();
  // Nearest-rank at 1/3 and 2/3 (ceil(n*k/3), 1-based).
  const size_t r1 = (n + 2) / 3;
  const size_t r2 = (2 * n + 2) / 3;
  const double lo = calibration[r1 - 1];
  const double hi = calibration[r2 - 1];
  if (doc_ppl <= lo) return corpus::PplBucket::kHead;
  if (doc_ppl > hi) return corpus::PplBucket::kTail;
  return corpus::PplBucket::kMiddle;
}

namespace {

bool has_markup_extension(std::string_view path_hint) {
  const size_t dot = path_hint.rfind('.');
  if (dot == std::string_view::npos) return false;
  const std::string ext = util::to_lower_ascii(path_hint.substr(dot + 1));
  return ext == "json" || ext == "xml" || ext == "yaml" || ext == "yml" ||
         ext == "html";
}

}  // namespace

CodeFilterDecision filter_code_file(std::string_view path_hint,
                                    std::string_view text,
                                    const CodeFilterPolicy& policy,
                                    uint64_t seed) {
  CodeFilterDecision decision;
  if (text.empty()) {
    decision.keep = false;
    decision.reasons.push_back(corpus::DropReason::kEmpty);
    return decision;
  }

  uint64_t line_chars = 0;
  uint64_t max_line = 0;
  uint64_t total_chars = 0;
  uint64_t alnum_chars = 0;
  uint64_t lines = 1;
  for (size_t pos = 0; pos < text.size();) {
    const util::Utf8Step step = util::utf8_next(text, pos);
    pos += static_cast<size_t>(step.len);
    if (step.cp == '\n') {
      max_line = std::max(max_line, line_chars);
      line_chars = 0;
      if (pos < text.size()) ++lines;
      continue;
    }
    ++line_chars;
    ++total_chars;
    if (step.valid && util::is_alnum(step.cp)) ++alnum_chars;
  }
  max_line = std::max(max_line, line_chars);

  if (max_line > policy.max_line_len)
    decision.reasons.push_back(corpus::DropReason::kLongLine);
  const double mean_line =
      static_cast<double>(total_chars) / static_cast<double>(lines);
  if (mean_line > policy.max_mean_line_len)
    decision.reasons.push_back(corpus::DropReason::kMeanLine);
  const double alnum_fraction =
      total_chars == 0 ? 0.0
                       : static_cast<double>(alnum_chars) /
                             static_cast<double>(total_chars);
  if (alnum_fraction < policy.min_alnum_fraction)
    decision.reasons.push_back(corpus::DropReason::kLowAlnum);

  if (has_markup_extension(path_hint)) {
    const uint64_t h = util::hash64(path_hint, seed ^ 0x6d61726b75700aULL);
    if (util::hash_to_unit(h) >= policy.markup_keep_fraction)
      decision.reasons.push_back(corpus::DropReason::kMarkupSampled);
  }

  decision.keep = decision.reasons.empty();
  return decision;
}

}  // namespace curator::quality

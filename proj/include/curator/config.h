#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curator/dedup.h"
#include "curator/extract.h"
#include "curator/quality.h"

namespace curator::cli {

struct ExtractStage {
  extract::ExtractionPolicy policy;
};

struct QualityStage {
  std::optional<std::string> classifier_path;
  std::optional<std::string> lm_path;
  std::optional<std::string> vocab_path;
  std::optional<std::string> calibration_path;
  bool drop_tail = true;
  std::optional<double> min_classifier_prob;
  quality::CodeFilterPolicy code_policy;
};

struct DedupStage {
  dedup::DedupParams params;
  uint32_t max_occurrences = 5;
};

struct StageConfig {
  std::string name;  // extract | quality | dedup
  ExtractStage extract;
  QualityStage quality;
  DedupStage dedup;
};

struct PipelineConfig {
  uint64_t seed = 0;
  int workers = 1;
  std::string input;
  std::string output_dir;
  std::vector<StageConfig> stages;
};

// Strict parse: unknown keys are errors, defaults are filled in.
PipelineConfig parse_config(const std::string& path);
PipelineConfig parse_config_json(const std::string& text);

// Fully-resolved echo of the config (defaults included) for provenance.
std::string resolved_config_json(const PipelineConfig& config);

}  // namespace curator::cli

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "curator/config.h"
#include "curator/corpus.h"

namespace curator::cli {

struct StageReport {
  std::string name;
  uint64_t input_documents = 0;
  uint64_t kept = 0;
  uint64_t dropped = 0;
  std::map<std::string, uint64_t> drops_by_reason;
  std::string output_manifest;
  std::string drops_manifest;
};

struct RunReport {
  std::vector<StageReport> stages;
  std::string final_manifest;
};

// Executes stages in order, writing per-stage manifests, drop manifests,
// the resolved config, and a run report into output_dir. Two runs with the
// same config and inputs produce byte-identical outputs.
RunReport run_pipeline(const PipelineConfig& config);

std::string run_report_json(const RunReport& report);

// One stage applied in memory; the pipeline and the standalone subcommands
// share these.
struct StageOutcome {
  corpus::CorpusManifest kept;
  std::vector<corpus::Document> dropped;
};

StageOutcome apply_extract_stage(const corpus::CorpusManifest& input,
                                 const ExtractStage& stage, int workers);
StageOutcome apply_quality_stage(const corpus::CorpusManifest& input,
                                 const QualityStage& stage, uint64_t seed,
                                 int workers);
StageOutcome apply_dedup_stage(const corpus::CorpusManifest& input,
                               const DedupStage& stage, uint64_t seed);

}  // namespace curator::cli

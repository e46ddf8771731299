#include "curator/pipeline.h"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "curator/errors.h"
#include "curator/ngram.h"
#include "curator/quality.h"
#include "curator/util/parallel.h"

namespace curator::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

corpus::Document dropped_with(corpus::Document doc,
                              corpus::DropReason reason) {
  if (!doc.annotations) doc.annotations.emplace();
  doc.annotations->drop_reasons.push_back(reason);
  return doc;
}

std::vector<double> read_calibration(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open calibration file: " + path);
  std::vector<double> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0')
      throw ParseError("calibration line " + std::to_string(line_no) +
                       ": not a number");
    out.push_back(v);
  }
  if (out.empty()) throw DataError("calibration file is empty: " + path);
  return out;
}

}  // namespace

StageOutcome apply_extract_stage(const corpus::CorpusManifest& input,
                                 const ExtractStage& stage, int workers) {
  std::vector<std::string> extracted(input.size());
  util::parallel_for(input.size(), workers, [&](size_t i) {
    const auto blocks = extract::segment_page(input.documents[i].text);
    extracted[i] = extract::extract_main_text(blocks, stage.policy);
  });
  StageOutcome outcome;
  for (size_t i = 0; i < input.size(); ++i) {
    corpus::Document doc = input.documents[i];
    doc.text = extracted[i];
    recompute_lengths(doc);
    if (doc.text.empty()) {
      outcome.dropped.push_back(
          dropped_with(std::move(doc), corpus::DropReason::kEmpty));
    } else {
      outcome.kept.documents.push_back(std::move(doc));
    }
  }
  return outcome;
}

StageOutcome apply_quality_stage(const corpus::CorpusManifest& input,
                                 const QualityStage& stage, uint64_t seed,
                                 int workers) {
  std::optional<quality::QualityClassifier> classifier;
  if (stage.classifier_path)
    classifier = quality::load_classifier(*stage.classifier_path);
  std::optional<ngram::NGramModel> lm;
  std::optional<tokenizer::Vocabulary> vocab;
  std::vector<double> calibration;
  if (stage.lm_path && stage.vocab_path && stage.calibration_path) {
    lm = ngram::NGramModel::load(*stage.lm_path);
    vocab = tokenizer::Vocabulary::load(*stage.vocab_path);
    calibration = read_calibration(*stage.calibration_path);
  }

  struct Verdict {
    corpus::Document doc;
    std::vector<corpus::DropReason> reasons;
  };
  std::vector<Verdict> verdicts(input.size());
  util::parallel_for(input.size(), workers, [&](size_t i) {
    Verdict& v = verdicts[i];
    v.doc = input.documents[i];
    corpus::Document& doc = v.doc;
    if (!doc.annotations) doc.annotations.emplace();

    if (doc.source == "github") {
      // Code heuristics instead of the natural-text path.
      const std::string hint = doc.url ? *doc.url : doc.id;
      const auto decision = quality::filter_code_file(
          hint, doc.text, stage.code_policy, seed);
      v.reasons = decision.reasons;
      return;
    }

    const quality::LangVerdict lang = quality::detect_language(doc.text);
    doc.language = lang.language;
    doc.annotations->lang_confidence = lang.confidence;
    if (lang.language != corpus::Language::kEn &&
        lang.language != corpus::Language::kZh) {
      v.reasons.push_back(corpus::DropReason::kLanguage);
      return;
    }
    if (classifier) {
      const double p = classifier->score(doc.text);
      doc.annotations->wiki_ref_prob = p;
      if (stage.min_classifier_prob && p < *stage.min_classifier_prob)
        v.reasons.push_back(corpus::DropReason::kLowQuality);
    }
    if (lm && vocab) {
      const ngram::ScoredText scored = lm->score_text(*vocab, doc.text);
      if (scored.token_count > 0) {
        const double ppl =
            std::exp(scored.nll_total /
                     static_cast<double>(scored.token_count));
        const corpus::PplBucket bucket =
            quality::assign_ppl_bucket(ppl, calibration);
        doc.annotations->ppl_bucket = bucket;
        if (stage.drop_tail && bucket == corpus::PplBucket::kTail)
          v.reasons.push_back(corpus::DropReason::kPplTail);
      }
    }
  });

  StageOutcome outcome;
  for (auto& v : verdicts) {
    if (v.reasons.empty()) {
      outcome.kept.documents.push_back(std::move(v.doc));
    } else {
      for (corpus::DropReason r : v.reasons)
        v.doc.annotations->drop_reasons.push_back(r);
      outcome.dropped.push_back(std::move(v.doc));
    }
  }
  return outcome;
}

StageOutcome apply_dedup_stage(const corpus::CorpusManifest& input,
                               const DedupStage& stage, uint64_t seed) {
  dedup::DedupParams params = stage.params;
  params.seed = seed;
  const auto recurrence =
      dedup::recurrence_filter(input, stage.max_occurrences);
  const auto near = dedup::drop_near_duplicates(recurrence.kept, params);
  StageOutcome outcome;
  outcome.kept = near.kept;
  outcome.dropped = recurrence.dropped;
  outcome.dropped.insert(outcome.dropped.end(), near.dropped.begin(),
                         near.dropped.end());
  return outcome;
}

RunReport run_pipeline(const PipelineConfig& config) {
  if (!fs::exists(config.input))
    throw ConfigError("input manifest does not exist: " + config.input);
  fs::create_directories(config.output_dir);
  {
    std::ofstream resolved(fs::path(config.output_dir) /
                               "resolved_config.json",
                           std::ios::binary | std::ios::trunc);
    resolved << resolved_config_json(config);
  }

  corpus::CorpusManifest current = corpus::read_manifest(config.input);
  RunReport report;
  size_t index = 0;
  for (const auto& stage : config.stages) {
    ++index;
    StageOutcome outcome;
    if (stage.name == "extract") {
      outcome = apply_extract_stage(current, stage.extract, config.workers);
    } else if (stage.name == "quality") {
      outcome =
          apply_quality_stage(current, stage.quality, config.seed,
                              config.workers);
    } else if (stage.name == "dedup") {
      outcome = apply_dedup_stage(current, stage.dedup, config.seed);
    } else {
      throw ConfigError("unknown stage: " + stage.name);
    }

    StageReport sr;
    sr.name = stage.name;
    sr.input_documents = current.size();
    sr.kept = outcome.kept.size();
    sr.dropped = outcome.dropped.size();
    for (const auto& doc : outcome.dropped) {
      const auto& reasons = doc.annotations->drop_reasons;
      if (!reasons.empty())
        sr.drops_by_reason[corpus::to_string(reasons.back())] += 1;
    }
    char prefix[32];
    std::snprintf(prefix, sizeof(prefix), "stage_%02zu_", index);
    const std::string base = std::string(prefix) + stage.name;
    sr.output_manifest =
        (fs::path(config.output_dir) / (base + ".manifest")).string();
    sr.drops_manifest =
        (fs::path(config.output_dir) / (base + ".drops.manifest")).string();
    corpus::write_manifest(outcome.kept, sr.output_manifest);
    corpus::CorpusManifest drops;
    drops.documents = outcome.dropped;
    corpus::write_manifest(drops, sr.drops_manifest);

    report.stages.push_back(sr);
    current = std::move(outcome.kept);
  }
  report.final_manifest = report.stages.back().output_manifest;
  {
    std::ofstream out(fs::path(config.output_dir) / "run_report.json",
                      std::ios::binary | std::ios::trunc);
    out << run_report_json(report);
  }
  return report;
}

std::string run_report_json(const RunReport& report) {
  ordered_json j;
  ordered_json stages = ordered_json::array();
  for (const auto& s : report.stages) {
    ordered_json stage;
    stage["name"] = s.name;
    stage["input_documents"] = s.input_documents;
    stage["kept"] = s.kept;
    stage["dropped"] = s.dropped;
    stage["drops_by_reason"] = s.drops_by_reason;
    stage["output_manifest"] = s.output_manifest;
    stage["drops_manifest"] = s.drops_manifest;
    stages.push_back(stage);
  }
  j["stages"] = stages;
  j["final_manifest"] = report.final_manifest;
  return j.dump(2) + "\n";
}

}  // namespace curator::cli

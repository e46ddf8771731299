#include "curator/config.h"

#include <fstream>
#include <set>

#include <json.hpp>

#include "curator/errors.h"

namespace curator::cli {

using nlohmann::ordered_json;

namespace {

void reject_unknown_keys(const ordered_json& obj,
                         const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!known.contains(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
}

StageConfig parse_stage(const ordered_json& j, size_t index) {
  if (!j.is_object())
    throw ConfigError("stage " + std::to_string(index) +
                      " must be an object");
  const std::string where = "stage " + std::to_string(index);
  if (!j.contains("name"))
    throw ConfigError(where + " is missing 'name'");
  StageConfig stage;
  stage.name = j.at("name").get<std::string>();

  if (stage.name == "extract") {
    reject_unknown_keys(j, {"name", "min_block_chars", "max_link_fraction"},
                        where);
    stage.extract.policy.min_block_chars =
        j.value("min_block_chars", stage.extract.policy.min_block_chars);
    stage.extract.policy.max_link_fraction =
        j.value("max_link_fraction", stage.extract.policy.max_link_fraction);
  } else if (stage.name == "quality") {
    reject_unknown_keys(
        j,
        {"name", "classifier", "lm", "vocab", "calibration", "drop_tail",
         "min_classifier_prob", "max_line_len", "max_mean_line_len",
         "min_alnum_fraction", "markup_keep_fraction"},
        where);
    if (j.contains("classifier"))
      stage.quality.classifier_path = j.at("classifier").get<std::string>();
    if (j.contains("lm")) stage.quality.lm_path = j.at("lm").get<std::string>();
    if (j.contains("vocab"))
      stage.quality.vocab_path = j.at("vocab").get<std::string>();
    if (j.contains("calibration"))
      stage.quality.calibration_path =
          j.at("calibration").get<std::string>();
    stage.quality.drop_tail = j.value("drop_tail", true);
    if (j.contains("min_classifier_prob"))
      stage.quality.min_classifier_prob =
          j.at("min_classifier_prob").get<double>();
    auto& cp = stage.quality.code_policy;
    cp.max_line_len = j.value("max_line_len", cp.max_line_len);
    cp.max_mean_line_len = j.value("max_mean_line_len", cp.max_mean_line_len);
    cp.min_alnum_fraction =
        j.value("min_alnum_fraction", cp.min_alnum_fraction);
    cp.markup_keep_fraction =
        j.value("markup_keep_fraction", cp.markup_keep_fraction);
  } else if (stage.name == "dedup") {
    reject_unknown_keys(j,
                        {"name", "k", "num_hashes", "bands", "threshold",
                         "max_occurrences"},
                        where);
    auto& p = stage.dedup.params;
    p.shingle_k = j.value("k", p.shingle_k);
    p.num_hashes = j.value("num_hashes", p.num_hashes);
    p.lsh.bands = j.value("bands", p.lsh.bands);
    if (p.num_hashes % p.lsh.bands != 0)
      throw ConfigError(where + ": bands must divide num_hashes");
    p.lsh.rows = p.num_hashes / p.lsh.bands;
    p.lsh.threshold = j.value("threshold", p.lsh.threshold);
    stage.dedup.max_occurrences =
        j.value("max_occurrences", stage.dedup.max_occurrences);
  } else {
    throw ConfigError("unknown stage name '" + stage.name + "' in " + where);
  }
  return stage;
}

}  // namespace

PipelineConfig parse_config_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  reject_unknown_keys(
      j, {"seed", "workers", "input", "output_dir", "stages"}, "config");

  PipelineConfig config;
  try {
    config.seed = j.value("seed", uint64_t{0});
    config.workers = j.value("workers", 1);
    if (j.contains("input")) config.input = j.at("input").get<std::string>();
    if (j.contains("output_dir"))
      config.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("stages")) {
      if (!j.at("stages").is_array())
        throw ConfigError("'stages' must be an array");
      size_t index = 0;
      for (const auto& stage : j.at("stages"))
        config.stages.push_back(parse_stage(stage, index++));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (config.workers < 1)
    throw ConfigError("workers must be at least 1");
  if (config.input.empty()) throw ConfigError("config is missing 'input'");
  if (config.output_dir.empty())
    throw ConfigError("config is missing 'output_dir'");
  if (config.stages.empty())
    throw ConfigError("config needs at least one stage");
  return config;
}

PipelineConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config_json(text);
}

std::string resolved_config_json(const PipelineConfig& config) {
  ordered_json j;
  j["seed"] = config.seed;
  j["workers"] = config.workers;
  j["input"] = config.input;
  j["output_dir"] = config.output_dir;
  ordered_json stages = ordered_json::array();
  for (const auto& stage : config.stages) {
    ordered_json s;
    s["name"] = stage.name;
    if (stage.name == "extract") {
      s["min_block_chars"] = stage.extract.policy.min_block_chars;
      s["max_link_fraction"] = stage.extract.policy.max_link_fraction;
    } else if (stage.name == "quality") {
      if (stage.quality.classifier_path)
        s["classifier"] = *stage.quality.classifier_path;
      if (stage.quality.lm_path) s["lm"] = *stage.quality.lm_path;
      if (stage.quality.vocab_path) s["vocab"] = *stage.quality.vocab_path;
      if (stage.quality.calibration_path)
        s["calibration"] = *stage.quality.calibration_path;
      s["drop_tail"] = stage.quality.drop_tail;
      if (stage.quality.min_classifier_prob)
        s["min_classifier_prob"] = *stage.quality.min_classifier_prob;
      s["max_line_len"] = stage.quality.code_policy.max_line_len;
      s["max_mean_line_len"] = stage.quality.code_policy.max_mean_line_len;
      s["min_alnum_fraction"] = stage.quality.code_policy.min_alnum_fraction;
      s["markup_keep_fraction"] =
          stage.quality.code_policy.markup_keep_fraction;
    } else if (stage.name == "dedup") {
      s["k"] = stage.dedup.params.shingle_k;
      s["num_hashes"] = stage.dedup.params.num_hashes;
      s["bands"] = stage.dedup.params.lsh.bands;
      s["threshold"] = stage.dedup.params.lsh.threshold;
      s["max_occurrences"] = stage.dedup.max_occurrences;
    }
    stages.push_back(s);
  }
  j["stages"] = stages;
  return j.dump(2) + "\n";
}

}  // namespace curator::cli

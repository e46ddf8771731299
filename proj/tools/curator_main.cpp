// curator: corpus curation and contamination-audit toolkit.
//
// One binary, subcommands wired straight onto the library modules:
//   extract, quality, dedup, tokenizer, train-lm, score, mixture, monitor,
//   audit-leakage, run, demo-leakage.
// Exit codes: 0 success, 2 config error, 3 data error, 4 service error.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "curator/config.h"
#include "curator/corpus.h"
#include "curator/dedup.h"
#include "curator/errors.h"
#include "curator/extract.h"
#include "curator/kernels.h"
#include "curator/leakage.h"
#include "curator/mixture.h"
#include "curator/monitor.h"
#include "curator/ngram.h"
#include "curator/pipeline.h"
#include "curator/quality.h"
#include "curator/reference_client.h"
#include "curator/tokenizer.h"

namespace {

using namespace curator;
using nlohmann::ordered_json;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write: " + path);
  out << text;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

void print_stage_outcome(const cli::StageOutcome& outcome, size_t input) {
  std::map<std::string, uint64_t> reasons;
  for (const auto& doc : outcome.dropped)
    reasons[corpus::to_string(doc.annotations->drop_reasons.back())] += 1;
  std::printf("input=%zu kept=%zu dropped=%zu\n", input, outcome.kept.size(),
              outcome.dropped.size());
  for (const auto& [reason, count] : reasons)
    std::printf("  %s: %llu\n", reason.c_str(),
                static_cast<unsigned long long>(count));
}

std::string leakage_report_line(const leakage::LeakageReport& r) {
  char buf[256];
  std::string flags;
  for (const auto& f : r.flags) {
    if (!flags.empty()) flags += ",";
    flags += leakage::to_string(f);
  }
  std::snprintf(buf, sizeof(buf),
                "%-20s L_test=%.4f L_train=%.4f L_ref=%.4f d1=%+.4f "
                "d2=%+.4f %s",
                r.model_id.c_str(), r.l_test, r.l_train, r.l_ref, r.delta1,
                r.delta2, flags.empty() ? "-" : flags.c_str());
  return buf;
}

ordered_json leakage_report_json(const leakage::LeakageReport& r) {
  ordered_json j;
  j["model_id"] = r.model_id;
  j["l_test"] = r.l_test;
  j["l_train"] = r.l_train;
  j["l_ref"] = r.l_ref;
  j["delta1"] = r.delta1;
  j["delta2"] = r.delta2;
  ordered_json flags = ordered_json::array();
  for (const auto& f : r.flags) flags.push_back(leakage::to_string(f));
  j["flags"] = flags;
  return j;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"corpus curation and contamination-audit toolkit"};
  app.require_subcommand(1);
  std::string simd = "auto";
  app.add_option("--simd", simd, "kernel backend: auto|scalar|avx2|avx512");

  // ---- extract ----
  auto* cmd_extract = app.add_subcommand("extract", "strip page boilerplate");
  std::string in_path;
  std::string out_path;
  cli::ExtractStage extract_stage;
  cmd_extract->add_option("--in", in_path)->required();
  cmd_extract->add_option("--out", out_path)->required();
  cmd_extract->add_option("--min-block-chars",
                          extract_stage.policy.min_block_chars);
  cmd_extract->add_option("--max-link-fraction",
                          extract_stage.policy.max_link_fraction);

  // ---- quality ----
  auto* cmd_quality = app.add_subcommand("quality", "quality filtering");
  std::string q_in;
  std::string q_out;
  std::string q_drops;
  std::string q_classifier;
  std::string q_lm;
  std::string q_vocab;
  std::string q_calibration;
  uint64_t q_seed = 0;
  bool q_keep_tail = false;
  cmd_quality->add_option("--in", q_in);
  cmd_quality->add_option("--out", q_out);
  cmd_quality->add_option("--drops", q_drops);
  cmd_quality->add_option("--classifier", q_classifier);
  cmd_quality->add_option("--lm", q_lm);
  cmd_quality->add_option("--vocab", q_vocab);
  cmd_quality->add_option("--calibration", q_calibration);
  cmd_quality->add_option("--seed", q_seed);
  cmd_quality->add_flag("--keep-tail", q_keep_tail);
  // classifier training mode
  std::string q_train_pos;
  std::string q_train_neg;
  std::string q_train_out;
  uint32_t q_feature_dim = 1u << 18;
  int q_epochs = 5;
  double q_lr = 0.5;
  cmd_quality->add_option("--train-positives", q_train_pos);
  cmd_quality->add_option("--train-negatives", q_train_neg);
  cmd_quality->add_option("--train-out", q_train_out);
  cmd_quality->add_option("--feature-dim", q_feature_dim);
  cmd_quality->add_option("--epochs", q_epochs);
  cmd_quality->add_option("--lr", q_lr);

  // ---- dedup ----
  auto* cmd_dedup = app.add_subcommand("dedup", "recurrence + near-dup removal");
  std::string d_in;
  std::string d_out;
  std::string d_drops;
  cli::DedupStage dedup_stage;
  uint64_t d_seed = 0;
  uint32_t d_bands = 16;
  cmd_dedup->add_option("--in", d_in)->required();
  cmd_dedup->add_option("--out", d_out)->required();
  cmd_dedup->add_option("--drops", d_drops);
  cmd_dedup->add_option("--k", dedup_stage.params.shingle_k);
  cmd_dedup->add_option("--hashes", dedup_stage.params.num_hashes);
  cmd_dedup->add_option("--bands", d_bands);
  cmd_dedup->add_option("--threshold", dedup_stage.params.lsh.threshold);
  cmd_dedup->add_option("--max-occurrences", dedup_stage.max_occurrences);
  cmd_dedup->add_option("--seed", d_seed);

  // ---- tokenizer ----
  auto* cmd_tok = app.add_subcommand("tokenizer", "BPE vocabulary tooling");
  cmd_tok->require_subcommand(1);
  auto* tok_train = cmd_tok->add_subcommand("train", "learn a base vocabulary");
  std::string t_in;
  std::string t_out;
  uint32_t t_target = 1024;
  tok_train->add_option("--in", t_in)->required();
  tok_train->add_option("--out", t_out)->required();
  tok_train->add_option("--target-size", t_target)->required();
  auto* tok_assemble = cmd_tok->add_subcommand(
      "assemble", "combine base + zh_chars + zh_words + reserved");
  std::string a_base;
  std::string a_zh_chars;
  std::string a_zh_words;
  std::string a_reserved;
  std::string a_out;
  tok_assemble->add_option("--base", a_base)->required();
  tok_assemble->add_option("--zh-chars", a_zh_chars);
  tok_assemble->add_option("--zh-words", a_zh_words);
  tok_assemble->add_option("--reserved", a_reserved);
  tok_assemble->add_option("--out", a_out)->required();
  auto* tok_encode = cmd_tok->add_subcommand("encode", "text -> token ids");
  std::string e_vocab;
  std::string e_in;
  std::string e_out;
  std::string e_text;
  tok_encode->add_option("--vocab", e_vocab)->required();
  tok_encode->add_option("--in", e_in);
  tok_encode->add_option("--out", e_out);
  tok_encode->add_option("--text", e_text);
  auto* tok_decode = cmd_tok->add_subcommand("decode", "token ids -> text");
  std::string dec_vocab;
  std::string dec_ids;
  tok_decode->add_option("--vocab", dec_vocab)->required();
  tok_decode->add_option("--ids", dec_ids)->required();

  // ---- train-lm ----
  auto* cmd_lm = app.add_subcommand("train-lm", "fit the n-gram scorer");
  std::string lm_in;
  std::string lm_vocab;
  std::string lm_out;
  uint32_t lm_order = 5;
  double lm_discount = 0.75;
  cmd_lm->add_option("--in", lm_in)->required();
  cmd_lm->add_option("--vocab", lm_vocab)->required();
  cmd_lm->add_option("--out", lm_out)->required();
  cmd_lm->add_option("--order", lm_order);
  cmd_lm->add_option("--discount", lm_discount);

  // ---- score ----
  auto* cmd_score = app.add_subcommand("score", "perplexity of a manifest");
  std::string s_model;
  std::string s_vocab;
  std::string s_in;
  std::string s_out;
  std::string s_norm = "per_token";
  std::string s_model_id = "model";
  std::string s_domain = "general";
  cmd_score->add_option("--model", s_model)->required();
  cmd_score->add_option("--vocab", s_vocab)->required();
  cmd_score->add_option("--in", s_in)->required();
  cmd_score->add_option("--out", s_out);
  cmd_score->add_option("--normalization", s_norm);
  cmd_score->add_option("--model-id", s_model_id);
  cmd_score->add_option("--domain", s_domain);

  // ---- mixture ----
  auto* cmd_mix = app.add_subcommand("mixture", "data-mixture planning");
  cmd_mix->require_subcommand(1);
  auto* mix_s1 = cmd_mix->add_subcommand("stage1", "weights with repetition cap");
  std::string m1_spec;
  std::string m1_out;
  uint64_t m1_total = 0;
  uint32_t m1_cap = 5;
  mix_s1->add_option("--spec", m1_spec)->required();
  mix_s1->add_option("--out", m1_out)->required();
  mix_s1->add_option("--total-tokens", m1_total)->required();
  mix_s1->add_option("--cap", m1_cap);
  auto* mix_s2 = cmd_mix->add_subcommand("stage2", "linear STEM ramp");
  std::string m2_spec;
  std::string m2_out;
  std::string m2_stem_name = "stem";
  uint64_t m2_stem_available = 0;
  double m2_start = 0.1;
  double m2_end = 0.4;
  uint64_t m2_steps = 1000;
  mix_s2->add_option("--spec", m2_spec)->required();
  mix_s2->add_option("--out", m2_out)->required();
  mix_s2->add_option("--stem-name", m2_stem_name);
  mix_s2->add_option("--stem-available", m2_stem_available);
  mix_s2->add_option("--stem-start", m2_start);
  mix_s2->add_option("--stem-end", m2_end);
  mix_s2->add_option("--steps", m2_steps);
  auto* mix_sample = cmd_mix->add_subcommand("sample", "realize a plan");
  std::string ms_plan;
  uint64_t ms_seed = 0;
  uint64_t ms_n = 1000;
  bool ms_counts = false;
  mix_sample->add_option("--plan", ms_plan)->required();
  mix_sample->add_option("--seed", ms_seed);
  mix_sample->add_option("--n", ms_n);
  mix_sample->add_flag("--counts", ms_counts, "print per-source totals only");

  // ---- monitor ----
  auto* cmd_mon = app.add_subcommand("monitor", "loss tracking and reports");
  cmd_mon->require_subcommand(1);
  auto* mon_eval = cmd_mon->add_subcommand("eval-set", "cut-off-date eval set");
  std::string me_in;
  std::string me_out;
  std::string me_cutoff;
  std::string me_domain;
  mon_eval->add_option("--in", me_in)->required();
  mon_eval->add_option("--out", me_out)->required();
  mon_eval->add_option("--cutoff", me_cutoff)->required();
  mon_eval->add_option("--domain", me_domain)->required();
  auto* mon_table = cmd_mon->add_subcommand("table", "per-domain comparison");
  std::string mt_records;
  std::string mt_out_text;
  std::string mt_out_tsv;
  mon_table->add_option("--records", mt_records)->required();
  mon_table->add_option("--out-text", mt_out_text);
  mon_table->add_option("--out-tsv", mt_out_tsv);
  auto* mon_corr = cmd_mon->add_subcommand("corr", "Pearson correlation");
  std::string mc_series;
  mon_corr->add_option("--series", mc_series, "file with 'x y' per line")
      ->required();
  auto* mon_mfu = cmd_mon->add_subcommand("mfu", "throughput utilization");
  double mfu_peak = 312.0;
  double mfu_achieved = -1.0;
  double mfu_throughput = -1.0;
  monitor::ModelShape shape;
  bool mfu_tied = false;
  mon_mfu->add_option("--peak", mfu_peak)->required();
  mon_mfu->add_option("--achieved-tflops", mfu_achieved);
  mon_mfu->add_option("--throughput", mfu_throughput);
  mon_mfu->add_option("--layers", shape.layers);
  mon_mfu->add_option("--hidden", shape.hidden);
  mon_mfu->add_option("--heads", shape.heads);
  mon_mfu->add_option("--ffn", shape.ffn);
  mon_mfu->add_option("--vocab-size", shape.vocab);
  mon_mfu->add_option("--seq-len", shape.seq_len);
  mon_mfu->add_flag("--tied", mfu_tied);

  // ---- audit-leakage ----
  auto* cmd_audit = app.add_subcommand("audit-leakage",
                                       "train/test/ref loss comparison");
  std::string al_splits;
  std::string al_model;
  std::string al_vocab;
  std::string al_scores;
  std::string al_out;
  std::string al_model_id = "model";
  double al_t1 = -0.2;
  double al_t2 = 0.15;
  std::string al_ref_endpoint;
  std::string al_ref_model;
  std::string al_ref_template;
  std::string al_ref_offline;
  std::string al_ref_out;
  std::string al_ref_log;
  size_t al_ref_n = 0;
  cmd_audit->add_option("--splits", al_splits);
  cmd_audit->add_option("--model", al_model);
  cmd_audit->add_option("--vocab", al_vocab);
  cmd_audit->add_option("--scores", al_scores,
                        "external per-token log-prob file");
  cmd_audit->add_option("--out", al_out);
  cmd_audit->add_option("--model-id", al_model_id);
  cmd_audit->add_option("--t1", al_t1);
  cmd_audit->add_option("--t2", al_t2);
  cmd_audit->add_option("--fetch-ref-endpoint", al_ref_endpoint);
  cmd_audit->add_option("--fetch-ref-model", al_ref_model);
  cmd_audit->add_option("--fetch-ref-template", al_ref_template);
  cmd_audit->add_option("--fetch-ref-offline", al_ref_offline);
  cmd_audit->add_option("--fetch-ref-out", al_ref_out);
  cmd_audit->add_option("--fetch-ref-log", al_ref_log);
  cmd_audit->add_option("--fetch-ref-n", al_ref_n);

  // ---- run ----
  auto* cmd_run = app.add_subcommand("run", "config-driven pipeline");
  std::string run_config;
  cmd_run->add_option("--config", run_config)->required();

  // ---- demo-leakage ----
  auto* cmd_demo = app.add_subcommand("demo-leakage",
                                      "synthetic contamination experiment");
  uint64_t demo_seed = 0;
  std::string demo_out;
  cmd_demo->add_option("--seed", demo_seed);
  cmd_demo->add_option("--out", demo_out);

  CLI11_PARSE(app, argc, argv);

  if (simd != "auto") {
    kernels::Backend backend = kernels::Backend::kScalar;
    if (simd == "scalar") backend = kernels::Backend::kScalar;
    else if (simd == "avx2") backend = kernels::Backend::kAvx2;
    else if (simd == "avx512") backend = kernels::Backend::kAvx512;
    else throw ConfigError("unknown --simd value: " + simd);
    if (!kernels::set_backend(backend))
      throw ConfigError("backend not available on this CPU: " + simd);
  }

  if (cmd_extract->parsed()) {
    const auto input = corpus::read_manifest(in_path);
    const auto outcome = cli::apply_extract_stage(input, extract_stage, 1);
    corpus::write_manifest(outcome.kept, out_path);
    print_stage_outcome(outcome, input.size());
    return 0;
  }

  if (cmd_quality->parsed()) {
    if (!q_train_out.empty()) {
      if (q_train_pos.empty() || q_train_neg.empty())
        throw ConfigError("--train-out needs --train-positives and "
                          "--train-negatives");
      quality::ClassifierConfig cfg;
      cfg.feature_dim = q_feature_dim;
      cfg.epochs = q_epochs;
      cfg.lr = q_lr;
      cfg.seed = q_seed;
      const auto clf = quality::train_quality_classifier(
          corpus::read_manifest(q_train_pos),
          corpus::read_manifest(q_train_neg), cfg);
      quality::save_classifier(clf, q_train_out);
      std::printf("classifier written to %s (final epoch loss %.4f)\n",
                  q_train_out.c_str(), clf.epoch_losses.back());
      return 0;
    }
    if (q_in.empty() || q_out.empty())
      throw ConfigError("quality needs --in and --out (or --train-out)");
    cli::QualityStage stage;
    if (!q_classifier.empty()) stage.classifier_path = q_classifier;
    if (!q_lm.empty()) stage.lm_path = q_lm;
    if (!q_vocab.empty()) stage.vocab_path = q_vocab;
    if (!q_calibration.empty()) stage.calibration_path = q_calibration;
    stage.drop_tail = !q_keep_tail;
    const auto input = corpus::read_manifest(q_in);
    const auto outcome = cli::apply_quality_stage(input, stage, q_seed, 1);
    corpus::write_manifest(outcome.kept, q_out);
    if (!q_drops.empty()) {
      corpus::CorpusManifest drops;
      drops.documents = outcome.dropped;
      corpus::write_manifest(drops, q_drops);
    }
    print_stage_outcome(outcome, input.size());
    return 0;
  }

  if (cmd_dedup->parsed()) {
    if (dedup_stage.params.num_hashes % d_bands != 0)
      throw ConfigError("--bands must divide --hashes");
    dedup_stage.params.lsh.bands = d_bands;
    dedup_stage.params.lsh.rows = dedup_stage.params.num_hashes / d_bands;
    const auto input = corpus::read_manifest(d_in);
    const auto outcome = cli::apply_dedup_stage(input, dedup_stage, d_seed);
    corpus::write_manifest(outcome.kept, d_out);
    if (!d_drops.empty()) {
      corpus::CorpusManifest drops;
      drops.documents = outcome.dropped;
      corpus::write_manifest(drops, d_drops);
    }
    print_stage_outcome(outcome, input.size());
    return 0;
  }

  if (tok_train->parsed()) {
    const auto trained =
        tokenizer::train_bpe(corpus::read_manifest(t_in), t_target);
    const auto vocab = tokenizer::Vocabulary::assemble(
        trained.entries, trained.merges, {}, {}, {});
    vocab.save(t_out);
    std::printf("base vocabulary: %u entries, %zu merges -> %s\n",
                vocab.size(), trained.merges.size(), t_out.c_str());
    return 0;
  }
  if (tok_assemble->parsed()) {
    const auto base = tokenizer::Vocabulary::load(a_base);
    std::vector<std::string> base_pieces;
    for (const auto& e : base.entries()) base_pieces.push_back(e.piece);
    auto maybe_lines = [](const std::string& path) {
      return path.empty() ? std::vector<std::string>{} : read_lines(path);
    };
    const auto vocab = tokenizer::Vocabulary::assemble(
        base_pieces, base.merges(), maybe_lines(a_zh_chars),
        maybe_lines(a_zh_words), maybe_lines(a_reserved));
    vocab.save(a_out);
    std::printf("assembled vocabulary: %u entries -> %s\n", vocab.size(),
                a_out.c_str());
    return 0;
  }
  if (tok_encode->parsed()) {
    const auto vocab = tokenizer::Vocabulary::load(e_vocab);
    if (!e_text.empty()) {
      for (uint32_t id : tokenizer::encode(vocab, e_text))
        std::printf("%u ", id);
      std::printf("\n");
      return 0;
    }
    if (e_in.empty() || e_out.empty())
      throw ConfigError("encode needs --text or --in/--out");
    const auto manifest = corpus::read_manifest(e_in);
    std::ofstream out(e_out, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write: " + e_out);
    for (const auto& doc : manifest.documents) {
      bool first = true;
      for (uint32_t id : tokenizer::encode(vocab, doc.text)) {
        if (!first) out << ' ';
        out << id;
        first = false;
      }
      out << '\n';
    }
    return 0;
  }
  if (tok_decode->parsed()) {
    const auto vocab = tokenizer::Vocabulary::load(dec_vocab);
    tokenizer::TokenSequence ids;
    size_t pos = 0;
    while (pos < dec_ids.size()) {
      while (pos < dec_ids.size() && dec_ids[pos] == ' ') ++pos;
      if (pos >= dec_ids.size()) break;
      ids.push_back(static_cast<uint32_t>(std::stoul(dec_ids.substr(pos))));
      while (pos < dec_ids.size() && dec_ids[pos] != ' ') ++pos;
    }
    const auto result = tokenizer::decode(vocab, ids);
    std::printf("%s\n", result.text.c_str());
    if (result.replaced_invalid_bytes)
      std::fprintf(stderr, "warning: invalid byte runs replaced with U+FFFD\n");
    return 0;
  }

  if (cmd_lm->parsed()) {
    const auto vocab = tokenizer::Vocabulary::load(lm_vocab);
    const auto manifest = corpus::read_manifest(lm_in);
    if (manifest.empty()) throw UsageError("training manifest is empty");
    ngram::NGramModel::Trainer trainer(lm_order, lm_discount, vocab.size());
    for (const auto& doc : manifest.documents)
      trainer.add(tokenizer::encode(vocab, doc.text));
    const auto model = std::move(trainer).build();
    model.save(lm_out);
    std::printf("model (order %u, vocab %u) -> %s\n", model.order(),
                model.vocab_size(), lm_out.c_str());
    return 0;
  }

  if (cmd_score->parsed()) {
    const auto model = ngram::NGramModel::load(s_model);
    const auto vocab = tokenizer::Vocabulary::load(s_vocab);
    const auto manifest = corpus::read_manifest(s_in);
    const auto record = ngram::perplexity(
        model, manifest, vocab, monitor::normalization_from_string(s_norm),
        s_model_id, s_domain);
    std::printf("%s %s loss=%.6f ppl=%.6f (%s)\n", record.model_id.c_str(),
                record.domain.c_str(), record.loss, record.perplexity(),
                monitor::to_string(record.normalization));
    if (!s_out.empty()) monitor::append_loss_record(record, s_out);
    return 0;
  }

  if (mix_s1->parsed()) {
    const auto plan = mixture::build_stage1_plan(
        mixture::read_source_specs(m1_spec), m1_total, m1_cap);
    mixture::write_plan(plan, m1_out);
    std::printf("stage-1 plan -> %s\n", m1_out.c_str());
    return 0;
  }
  if (mix_s2->parsed()) {
    mixture::SourceSpec stem;
    stem.name = m2_stem_name;
    stem.available_tokens = m2_stem_available;
    stem.weight = 0.0;
    const auto plan = mixture::build_stage2_plan(
        mixture::read_source_specs(m2_spec), stem, m2_start, m2_end,
        m2_steps);
    mixture::write_plan(plan, m2_out);
    std::printf("stage-2 plan -> %s\n", m2_out.c_str());
    return 0;
  }
  if (mix_sample->parsed()) {
    const auto plan = mixture::read_plan(ms_plan);
    const auto stream = mixture::sample_stream(plan, ms_seed, ms_n);
    if (ms_counts) {
      std::map<std::string, uint64_t> counts;
      for (const auto& name : stream) counts[name] += 1;
      for (const auto& [name, count] : counts)
        std::printf("%s\t%llu\n", name.c_str(),
                    static_cast<unsigned long long>(count));
    } else {
      for (const auto& name : stream) std::printf("%s\n", name.c_str());
    }
    return 0;
  }

  if (mon_eval->parsed()) {
    const auto out = monitor::build_eval_set(corpus::read_manifest(me_in),
                                             me_cutoff, me_domain);
    corpus::write_manifest(out, me_out);
    std::printf("eval set: %zu documents -> %s\n", out.size(),
                me_out.c_str());
    return 0;
  }
  if (mon_table->parsed()) {
    const auto table =
        monitor::domain_table(monitor::read_loss_records(mt_records));
    const std::string text = monitor::render_domain_table(table);
    std::printf("%s", text.c_str());
    if (!mt_out_text.empty()) write_text(mt_out_text, text);
    if (!mt_out_tsv.empty())
      write_text(mt_out_tsv, monitor::domain_table_tsv(table));
    return 0;
  }
  if (mon_corr->parsed()) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& line : read_lines(mc_series)) {
      double x = 0.0;
      double y = 0.0;
      if (std::sscanf(line.c_str(), "%lf %lf", &x, &y) != 2)
        throw ParseError("series line is not 'x y': " + line);
      xs.push_back(x);
      ys.push_back(y);
    }
    std::printf("pearson_r=%.9f\n", monitor::correlation(xs, ys));
    return 0;
  }
  if (mon_mfu->parsed()) {
    if (mfu_achieved >= 0.0) {
      std::printf("mfu=%.4f%%\n",
                  100.0 * monitor::mfu_from_achieved(mfu_achieved, mfu_peak));
      return 0;
    }
    if (mfu_throughput < 0.0)
      throw ConfigError("mfu needs --achieved-tflops or --throughput + shape");
    shape.tied_embeddings = mfu_tied;
    const auto report = monitor::mfu_report(shape, mfu_throughput, mfu_peak);
    std::printf("params=%llu flops_per_token=%.6g achieved_tflops=%.4f "
                "mfu=%.4f%%\n",
                static_cast<unsigned long long>(monitor::param_count(shape)),
                report.flops_per_token, report.achieved_tflops,
                100.0 * report.mfu);
    return 0;
  }

  if (cmd_audit->parsed()) {
    if (al_ref_n > 0) {
      leakage::ServiceDescriptor endpoint;
      endpoint.base_url = al_ref_endpoint;
      endpoint.model = al_ref_model;
      if (!al_ref_offline.empty()) endpoint.offline_path = al_ref_offline;
      if (!al_ref_log.empty()) endpoint.request_log_path = al_ref_log;
      const auto samples = leakage::request_reference_samples(
          endpoint, al_ref_template, al_ref_n);
      if (al_ref_out.empty())
        throw ConfigError("--fetch-ref-n needs --fetch-ref-out");
      std::ofstream out(al_ref_out, std::ios::binary | std::ios::trunc);
      for (const auto& s : samples) {
        std::string escaped;
        for (char c : s) {
          if (c == '\n') escaped += "\\n";
          else if (c == '\\') escaped += "\\\\";
          else escaped += c;
        }
        out << escaped << '\n';
      }
      std::printf("%zu reference samples -> %s\n", samples.size(),
                  al_ref_out.c_str());
      return 0;
    }
    if (al_splits.empty())
      throw ConfigError("audit-leakage needs --splits");
    const auto splits = leakage::read_splits(al_splits);
    const leakage::Thresholds thresholds{al_t1, al_t2};
    leakage::LeakageReport report;
    if (!al_scores.empty()) {
      const auto streams = ngram::read_external_scores(al_scores);
      const size_t want = splits.train_samples.size() +
                          splits.test_samples.size() +
                          splits.ref_samples.size();
      if (streams.size() != want)
        throw UsageError("scores file has " + std::to_string(streams.size()) +
                         " documents, splits need " + std::to_string(want));
      auto begin = streams.begin();
      std::vector<std::vector<double>> train(
          begin, begin + splits.train_samples.size());
      begin += splits.train_samples.size();
      std::vector<std::vector<double>> test(
          begin, begin + splits.test_samples.size());
      begin += splits.test_samples.size();
      std::vector<std::vector<double>> ref(begin, streams.end());
      report = leakage::audit_from_streams(train, test, ref, thresholds,
                                           al_model_id);
    } else {
      if (al_model.empty() || al_vocab.empty())
        throw ConfigError("audit-leakage needs --model/--vocab or --scores");
      const auto model = ngram::NGramModel::load(al_model);
      const auto vocab = tokenizer::Vocabulary::load(al_vocab);
      report = leakage::audit(leakage::ngram_scorer(model, vocab), splits,
                              thresholds, al_model_id);
    }
    std::printf("%s\n", leakage_report_line(report).c_str());
    if (!al_out.empty())
      write_text(al_out, leakage_report_json(report).dump(2) + "\n");
    return 0;
  }

  if (cmd_run->parsed()) {
    const auto config = cli::parse_config(run_config);
    const auto report = cli::run_pipeline(config);
    std::printf("%s", cli::run_report_json(report).c_str());
    return 0;
  }

  if (cmd_demo->parsed()) {
    const auto demo = leakage::desk_scale_demo(demo_seed);
    std::printf("%s\n", leakage_report_line(demo.clean).c_str());
    std::printf("%s\n", leakage_report_line(demo.train_contaminated).c_str());
    std::printf("%s\n", leakage_report_line(demo.test_contaminated).c_str());
    if (!demo_out.empty()) {
      ordered_json j;
      j["clean"] = leakage_report_json(demo.clean);
      j["train_contaminated"] = leakage_report_json(demo.train_contaminated);
      j["test_contaminated"] = leakage_report_json(demo.test_contaminated);
      write_text(demo_out, j.dump(2) + "\n");
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const curator::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const curator::ServiceError& e) {
    std::fprintf(stderr, "service error: %s\n", e.what());
    return 4;
  } catch (const curator::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const curator::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

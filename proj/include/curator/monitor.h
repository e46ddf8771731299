#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curator/corpus.h"
#include "curator/loss_record.h"

namespace curator::monitor {

// Strictly-after cutoff filter; undated documents are excluded so a stale
// record can never leak into an eval set. The domain label is carried in
// the source field of the output manifest.
corpus::CorpusManifest build_eval_set(const corpus::CorpusManifest& docs,
                                      const std::string& cutoff_iso_date,
                                      const std::string& domain);

// Cross-domain comparison in the style of a perplexity leaderboard: one row
// per model, one column per domain, aggregate = geometric mean, per-column
// minima marked.
struct DomainTable {
  std::vector<std::string> domains;  // column order (first appearance)
  struct Row {
    std::string model_id;
    std::vector<double> perplexities;  // per domain
    double aggregate = 0.0;            // geometric mean
  };
  std::vector<Row> rows;
  std::vector<size_t> best_row_per_domain;  // index into rows
  size_t best_aggregate_row = 0;
};

DomainTable domain_table(const std::vector<LossRecord>& records);

std::string render_domain_table(const DomainTable& table);  // aligned text
std::string domain_table_tsv(const DomainTable& table);     // machine-readable

// Pearson correlation; throws on length mismatch, fewer than two points, or
// zero variance.
double correlation(const std::vector<double>& xs,
                   const std::vector<double>& ys);

struct ModelShape {
  uint64_t layers = 0;
  uint64_t hidden = 0;
  uint64_t heads = 0;
  uint64_t ffn = 0;
  uint64_t vocab = 0;
  uint64_t seq_len = 0;
  bool tied_embeddings = false;
};

// Embeddings + per-layer attention/gated-FFN/norm parameters + final norm.
uint64_t param_count(const ModelShape& shape);

struct ThroughputReport {
  double tokens_per_sec_per_gpu = 0.0;
  double flops_per_token = 0.0;
  double achieved_tflops = 0.0;
  double peak_tflops = 0.0;
  double mfu = 0.0;  // fraction in [0, 1]
};

// Training-step cost model: 6N plus the 12 * layers * hidden * seq_len
// attention term.
double flops_per_token(const ModelShape& shape);

ThroughputReport mfu_report(const ModelShape& shape,
                            double tokens_per_sec_per_gpu, double peak_tflops);

// Direct form for published achieved-TFLOPS figures.
double mfu_from_achieved(double achieved_tflops, double peak_tflops);

}  // namespace curator::monitor

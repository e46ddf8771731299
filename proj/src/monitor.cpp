#include "curator/monitor.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "curator/errors.h"
#include "curator/util/dates.h"

namespace curator::monitor {

const char* to_string(Normalization v) {
  switch (v) {
    case Normalization::kPerToken: return "per_token";
    case Normalization::kPerChar: return "per_char";
    case Normalization::kPerByte: return "per_byte";
  }
  return "per_token";
}

Normalization normalization_from_string(const std::string& s) {
  if (s == "per_token") return Normalization::kPerToken;
  if (s == "per_char") return Normalization::kPerChar;
  if (s == "per_byte") return Normalization::kPerByte;
  throw ParseError("unknown normalization: " + s);
}

// --- loss record files -------------------------------------------------------

using nlohmann::ordered_json;

namespace {

ordered_json record_to_json(const LossRecord& r) {
  ordered_json j;
  j["model_id"] = r.model_id;
  j["checkpoint_tokens"] = r.checkpoint_tokens;
  j["domain"] = r.domain;
  j["normalization"] = to_string(r.normalization);
  j["loss"] = r.loss;
  return j;
}

LossRecord record_from_json(const ordered_json& j, size_t line_no) {
  LossRecord r;
  try {
    r.model_id = j.at("model_id").get<std::string>();
    r.checkpoint_tokens = j.value("checkpoint_tokens", uint64_t{0});
    r.domain = j.at("domain").get<std::string>();
    r.normalization =
        normalization_from_string(j.at("normalization").get<std::string>());
    r.loss = j.at("loss").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("loss record line " + std::to_string(line_no) + ": " +
                     e.what());
  }
  if (r.loss < 0.0)
    throw ParseError("loss record line " + std::to_string(line_no) +
                     ": negative loss");
  return r;
}

}  // namespace

void write_loss_records(const std::vector<LossRecord>& records,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write loss records: " + path);
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
  if (!out) throw DataError("write failure: " + path);
}

void append_loss_record(const LossRecord& record, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw DataError("cannot append loss record: " + path);
  out << record_to_json(record).dump() << '\n';
  if (!out) throw DataError("write failure: " + path);
}

std::vector<LossRecord> read_loss_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open loss records: " + path);
  std::vector<LossRecord> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("loss record line " + std::to_string(line_no) + ": " +
                       e.what());
    }
    out.push_back(record_from_json(j, line_no));
  }
  return out;
}

// --- eval sets ---------------------------------------------------------------

corpus::CorpusManifest build_eval_set(const corpus::CorpusManifest& docs,
                                      const std::string& cutoff_iso_date,
                                      const std::string& domain) {
  const auto cutoff = util::parse_iso_date(cutoff_iso_date);
  if (!cutoff)
    throw UsageError("cutoff is not a valid ISO-8601 date: " + cutoff_iso_date);
  corpus::CorpusManifest out;
  for (const auto& doc : docs.documents) {
    if (!doc.published_at) continue;  // undated cannot prove freshness
    const auto date = util::parse_iso_date(*doc.published_at);
    if (!date || !(*date > *cutoff)) continue;
    corpus::Document kept = doc;
    kept.source = domain;
    out.documents.push_back(std::move(kept));
  }
  return out;
}

// --- domain table --------------------------------------------------------------

DomainTable domain_table(const std::vector<LossRecord>& records) {
  DomainTable table;
  std::vector<std::string> models;
  std::map<std::pair<std::string, std::string>, double> cell;  // ppl
  for (const auto& r : records) {
    if (std::find(table.domains.begin(), table.domains.end(), r.domain) ==
        table.domains.end())
      table.domains.push_back(r.domain);
    if (std::find(models.begin(), models.end(), r.model_id) == models.end())
      models.push_back(r.model_id);
    cell[{r.model_id, r.domain}] = r.perplexity();
  }
  if (models.empty()) throw UsageError("no loss records");

  for (const auto& model : models) {
    DomainTable::Row row;
    row.model_id = model;
    double log_sum = 0.0;
    for (const auto& domain : table.domains) {
      const auto it = cell.find({model, domain});
      if (it == cell.end())
        throw UsageError("model '" + model + "' has no record for domain '" +
                         domain + "'");
      row.perplexities.push_back(it->second);
      log_sum += std::log(it->second);
    }
    row.aggregate =
        std::exp(log_sum / static_cast<double>(table.domains.size()));
    table.rows.push_back(std::move(row));
  }

  table.best_row_per_domain.assign(table.domains.size(), 0);
  for (size_t d = 0; d < table.domains.size(); ++d)
    for (size_t r = 1; r < table.rows.size(); ++r)
      if (table.rows[r].perplexities[d] <
          table.rows[table.best_row_per_domain[d]].perplexities[d])
        table.best_row_per_domain[d] = r;
  table.best_aggregate_row = 0;
  for (size_t r = 1; r < table.rows.size(); ++r)
    if (table.rows[r].aggregate < table.rows[table.best_aggregate_row].aggregate)
      table.best_aggregate_row = r;
  return table;
}

namespace {

std::string format_ppl(double v, bool best) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), best ? "*%.2f" : "%.2f", v);
  return buf;
}

}  // namespace

std::string render_domain_table(const DomainTable& table) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"model"};
  header.insert(header.end(), table.domains.begin(), table.domains.end());
  header.push_back("average");
  cells.push_back(header);
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::vector<std::string> line{row.model_id};
    for (size_t d = 0; d < table.domains.size(); ++d)
      line.push_back(
          format_ppl(row.perplexities[d], table.best_row_per_domain[d] == r));
    line.push_back(format_ppl(row.aggregate, table.best_aggregate_row == r));
    cells.push_back(std::move(line));
  }
  std::vector<size_t> widths(cells[0].size(), 0);
  for (const auto& row : cells)
    for (size_t c = 0; c < row.size(); ++c)
      widths[c] = std::max(widths[c], row[c].size());
  std::string out;
  for (const auto& row : cells) {
    for (size_t c = 0; c < row.size(); ++c) {
      out += row[c];
      if (c + 1 < row.size())
        out.append(widths[c] - row[c].size() + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

std::string domain_table_tsv(const DomainTable& table) {
  std::string out = "model";
  for (const auto& d : table.domains) out += '\t' + d;
  out += "\taverage\n";
  char buf[64];
  for (const auto& row : table.rows) {
    out += row.model_id;
    for (double p : row.perplexities) {
      std::snprintf(buf, sizeof(buf), "\t%.17g", p);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), "\t%.17g\n", row.aggregate);
    out += buf;
  }
  return out;
}

// --- correlation ---------------------------------------------------------------

double correlation(const std::vector<double>& xs,
                   const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw UsageError("correlation requires series of equal length");
  if (xs.size() < 2)
    throw UsageError("correlation requires at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw UsageError("correlation undefined: a series has zero variance");
  return sxy / std::sqrt(sxx * syy);
}

// --- parameter count / MFU --------------------------------------------------

uint64_t param_count(const ModelShape& shape) {
  const uint64_t embeddings =
      shape.vocab * shape.hidden * (shape.tied_embeddings ? 1 : 2);
  const uint64_t per_layer = 4 * shape.hidden * shape.hidden +
                             3 * shape.hidden * shape.ffn + 2 * shape.hidden;
  const uint64_t final_norm = shape.layers > 0 ? shape.hidden : 0;
  return embeddings + per_layer * shape.layers + final_norm;
}

double flops_per_token(const ModelShape& shape) {
  return 6.0 * static_cast<double>(param_count(shape)) +
         12.0 * static_cast<double>(shape.layers) *
             static_cast<double>(shape.hidden) *
             static_cast<double>(shape.seq_len);
}

ThroughputReport mfu_report(const ModelShape& shape,
                            double tokens_per_sec_per_gpu,
                            double peak_tflops) {
  if (tokens_per_sec_per_gpu < 0.0)
    throw UsageError("throughput must be non-negative");
  if (peak_tflops <= 0.0) throw UsageError("peak TFLOPS must be positive");
  ThroughputReport report;
  report.tokens_per_sec_per_gpu = tokens_per_sec_per_gpu;
  report.flops_per_token = flops_per_token(shape);
  report.achieved_tflops =
      tokens_per_sec_per_gpu * report.flops_per_token / 1e12;
  report.peak_tflops = peak_tflops;
  report.mfu = report.achieved_tflops / peak_tflops;
  return report;
}

double mfu_from_achieved(double achieved_tflops, double peak_tflops) {
  if (achieved_tflops < 0.0)
    throw UsageError("achieved TFLOPS must be non-negative");
  if (peak_tflops <= 0.0) throw UsageError("peak TFLOPS must be positive");
  return achieved_tflops / peak_tflops;
}

}  // namespace curator::monitor

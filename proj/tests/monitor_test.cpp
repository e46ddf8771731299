#include "curator/monitor.h"

#include <gtest/gtest.h>

#include <cmath>

#include "curator/errors.h"
#include "test_util.h"

using namespace curator;
using monitor::LossRecord;
using monitor::ModelShape;
using test_util::TempDir;

namespace {

corpus::Document dated_doc(const std::string& id, const char* date) {
  corpus::Document doc = corpus::make_document(id, "crawl", "body text");
  if (date != nullptr) doc.published_at = date;
  return doc;
}

LossRecord rec(const std::string& model, const std::string& domain,
               double ppl) {
  LossRecord r;
  r.model_id = model;
  r.domain = domain;
  r.loss = std::log(ppl);
  return r;
}

ModelShape shape_13b() {
  ModelShape s;
  s.layers = 52;
  s.hidden = 4608;
  s.heads = 36;
  s.ffn = 12288;
  s.vocab = 65536;
  s.seq_len = 4096;
  s.tied_embeddings = false;
  return s;
}

}  // namespace

TEST(EvalSet, StrictlyAfterCutoff) {
  corpus::CorpusManifest docs;
  docs.documents.push_back(dated_doc("aug31", "2023-08-31"));
  docs.documents.push_back(dated_doc("sep01", "2023-09-01"));
  docs.documents.push_back(dated_doc("sep02", "2023-09-02"));
  const auto out = monitor::build_eval_set(docs, "2023-09-01", "tech");
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.documents[0].id, "sep02");
  EXPECT_EQ(out.documents[0].source, "tech");
}

TEST(EvalSet, EmptyInputEmptyOutput) {
  EXPECT_EQ(monitor::build_eval_set({}, "2023-09-01", "tech").size(), 0u);
}

TEST(EvalSet, UndatedDocumentsExcluded) {
  corpus::CorpusManifest docs;
  docs.documents.push_back(dated_doc("undated1", nullptr));
  docs.documents.push_back(dated_doc("undated2", nullptr));
  EXPECT_EQ(monitor::build_eval_set(docs, "2023-09-01", "tech").size(), 0u);
}

TEST(EvalSet, BadCutoffRejected) {
  EXPECT_THROW(monitor::build_eval_set({}, "yesterday", "tech"), UsageError);
}

TEST(DomainTable, PublishedRowAggregates) {
  std::vector<LossRecord> records;
  const std::vector<std::pair<const char*, double>> top_row = {
      {"tech", 11.58}, {"movie", 21.84}, {"gov", 4.76},
      {"game", 17.28}, {"finance", 4.92}, {"general", 6.82}};
  const std::vector<std::pair<const char*, double>> second_row = {
      {"tech", 12.48}, {"movie", 23.48}, {"gov", 5.07},
      {"game", 18.45}, {"finance", 5.67}, {"general", 7.47}};
  for (const auto& [domain, ppl] : top_row)
    records.push_back(rec("model-a", domain, ppl));
  for (const auto& [domain, ppl] : second_row)
    records.push_back(rec("model-b", domain, ppl));
  const auto table = monitor::domain_table(records);
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_NEAR(table.rows[0].aggregate, 9.42, 0.01);
  EXPECT_NEAR(table.rows[1].aggregate, 10.25, 0.01);
  EXPECT_EQ(table.best_aggregate_row, 0u);
  for (size_t d = 0; d < table.domains.size(); ++d)
    EXPECT_EQ(table.best_row_per_domain[d], 0u);
}

TEST(DomainTable, SingleDomainAggregateIsThatValue) {
  const auto table = monitor::domain_table({rec("m", "tech", 7.25)});
  ASSERT_EQ(table.rows.size(), 1u);
  EXPECT_NEAR(table.rows[0].aggregate, 7.25, 1e-9);
}

TEST(DomainTable, MissingCellRejected) {
  std::vector<LossRecord> records{rec("a", "tech", 10.0),
                                  rec("a", "movie", 20.0),
                                  rec("b", "tech", 9.0)};
  EXPECT_THROW(monitor::domain_table(records), UsageError);
}

// Scaling one domain by c scales the aggregate by c^(1/k).
TEST(DomainTable, GeometricMeanMultiplicativity) {
  std::vector<LossRecord> base{rec("m", "a", 4.0), rec("m", "b", 9.0),
                               rec("m", "c", 16.0)};
  const double before = monitor::domain_table(base).rows[0].aggregate;
  base[1] = rec("m", "b", 9.0 * 8.0);
  const double after = monitor::domain_table(base).rows[0].aggregate;
  EXPECT_NEAR(after / before, std::cbrt(8.0), 1e-9);
}

TEST(DomainTable, BestMarkInvariantUnderMonotoneColumnTransform) {
  std::vector<LossRecord> records{rec("a", "x", 10.0), rec("b", "x", 12.0),
                                  rec("a", "y", 30.0), rec("b", "y", 25.0)};
  const auto before = monitor::domain_table(records);
  // Apply ppl -> ppl^2 (strictly monotone) to column y.
  for (auto& r : records)
    if (r.domain == "y") r.loss *= 2.0;
  const auto after = monitor::domain_table(records);
  EXPECT_EQ(before.best_row_per_domain, after.best_row_per_domain);
}

TEST(DomainTable, RenderMarksColumnMinima) {
  const auto table = monitor::domain_table(
      {rec("alpha", "x", 10.0), rec("beta", "x", 12.0)});
  const std::string text = monitor::render_domain_table(table);
  EXPECT_NE(text.find("*10.00"), std::string::npos);
  EXPECT_EQ(text.find("*12.00"), std::string::npos);
}

TEST(LossRecords, FileRoundtrip) {
  TempDir tmp("records");
  std::vector<LossRecord> records{rec("a", "tech", 10.0),
                                  rec("b", "movie", 22.5)};
  records[0].checkpoint_tokens = 1'000'000;
  records[0].normalization = monitor::Normalization::kPerChar;
  monitor::write_loss_records(records, tmp.path("r.jsonl"));
  const auto back = monitor::read_loss_records(tmp.path("r.jsonl"));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].model_id, "a");
  EXPECT_EQ(back[0].checkpoint_tokens, 1'000'000u);
  EXPECT_EQ(back[0].normalization, monitor::Normalization::kPerChar);
  EXPECT_DOUBLE_EQ(back[0].loss, records[0].loss);
  EXPECT_NEAR(back[1].perplexity(), 22.5, 1e-9);
}

TEST(Correlation, PerfectAndAntiPerfect) {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(monitor::correlation(xs, xs), 1.0);
  std::vector<double> ys;
  for (double x : xs) ys.push_back(-2.0 * x + 7.0);
  EXPECT_DOUBLE_EQ(monitor::correlation(xs, ys), -1.0);
}

// 20-point fixture; expected r precomputed with 50-digit arithmetic.
TEST(Correlation, TwentyPointGolden) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (int i = 1; i <= 20; ++i) {
    xs.push_back(i);
    ys.push_back(i * i);
  }
  EXPECT_NEAR(monitor::correlation(xs, ys), 0.9713482021963808, 1e-9);
}

TEST(Correlation, InvariantUnderPositiveAffine) {
  std::vector<double> xs{0.3, 1.7, 2.2, 5.9, 4.4, 8.8};
  std::vector<double> ys{1.2, 0.7, 3.3, 4.1, 2.8, 6.6};
  const double r = monitor::correlation(xs, ys);
  std::vector<double> xs2;
  for (double x : xs) xs2.push_back(3.5 * x + 11.0);
  EXPECT_NEAR(monitor::correlation(xs2, ys), r, 1e-12);
  std::vector<double> ys2;
  for (double y : ys) ys2.push_back(-2.0 * y + 1.0);
  EXPECT_NEAR(monitor::correlation(xs, ys2), -r, 1e-12);
}

TEST(Correlation, DegenerateInputsRejected) {
  EXPECT_THROW(monitor::correlation({1.0}, {2.0}), UsageError);
  EXPECT_THROW(monitor::correlation({1.0, 2.0}, {2.0}), UsageError);
  EXPECT_THROW(monitor::correlation({1.0, 1.0}, {1.0, 2.0}), UsageError);
}

TEST(ParamCount, ThirteenBShapeNearThirteenBillion) {
  const uint64_t params = monitor::param_count(shape_13b());
  EXPECT_EQ(params, 13'854'269'952ull);
  EXPECT_NEAR(static_cast<double>(params), 13.8e9, 0.02 * 13.8e9);
}

TEST(ParamCount, DegenerateShapeIsZero) {
  EXPECT_EQ(monitor::param_count(ModelShape{}), 0u);
}

TEST(ParamCount, DoublingLayersLessThanDoublesTotal) {
  ModelShape s = shape_13b();
  const uint64_t one = monitor::param_count(s);
  s.layers *= 2;
  const uint64_t two = monitor::param_count(s);
  EXPECT_LT(two, 2 * one);
  EXPECT_GT(two, one);
}

TEST(Mfu, PublishedRowsFromAchievedTflops) {
  EXPECT_NEAR(100.0 * monitor::mfu_from_achieved(176.2, 312.0), 56.5, 0.2);
  EXPECT_NEAR(100.0 * monitor::mfu_from_achieved(182.6, 312.0), 58.5, 0.2);
}

TEST(Mfu, FlopsPerTokenMatchesPublishedThroughput) {
  // 176.2e12 flops/s at 1873 tokens/s/GPU -> 94.07e9 flops per token.
  const double fpt = monitor::flops_per_token(shape_13b());
  EXPECT_NEAR(fpt, 176.2e12 / 1873.0, 0.03 * (176.2e12 / 1873.0));
}

TEST(Mfu, ReportInvariantsHold) {
  const auto report = monitor::mfu_report(shape_13b(), 1873.0, 312.0);
  EXPECT_NEAR(report.achieved_tflops,
              report.tokens_per_sec_per_gpu * report.flops_per_token / 1e12,
              1e-9 * report.achieved_tflops);
  EXPECT_NEAR(report.mfu, report.achieved_tflops / report.peak_tflops, 1e-12);
  EXPECT_GT(report.mfu, 0.0);
  EXPECT_LT(report.mfu, 1.0);
}

TEST(Mfu, ZeroThroughputGivesZero) {
  const auto report = monitor::mfu_report(shape_13b(), 0.0, 312.0);
  EXPECT_DOUBLE_EQ(report.mfu, 0.0);
}

TEST(Mfu, LinearInThroughputInverseInPeak) {
  const auto base = monitor::mfu_report(shape_13b(), 1000.0, 312.0);
  const auto doubled = monitor::mfu_report(shape_13b(), 2000.0, 312.0);
  EXPECT_NEAR(doubled.mfu, 2.0 * base.mfu, 1e-12);
  const auto half_peak = monitor::mfu_report(shape_13b(), 1000.0, 156.0);
  EXPECT_NEAR(half_peak.mfu, 2.0 * base.mfu, 1e-12);
}

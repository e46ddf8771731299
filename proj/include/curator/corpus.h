#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace curator::corpus {

enum class Language { kEn, kZh, kOther, kUnknown };

enum class PplBucket { kHead, kMiddle, kTail, kUnassigned };

// Closed set of rejection causes. Stages may only drop documents for one of
// these, so every drop in a run report is attributable.
enum class DropReason {
  kEmpty,        // no text left after a stage
  kLanguage,     // neither English nor Chinese
  kPplTail,      // worst perplexity bucket
  kLowQuality,   // classifier score below threshold
  kLongLine,     // code heuristics
  kMeanLine,
  kLowAlnum,
  kMarkupSampled,
  kNearDup,      // MinHash/LSH near-duplicate
  kRecurrent,    // emptied by recurrence capping
};

const char* to_string(Language v);
const char* to_string(PplBucket v);
const char* to_string(DropReason v);
Language language_from_string(const std::string& s);
PplBucket bucket_from_string(const std::string& s);
DropReason drop_reason_from_string(const std::string& s);

struct QualityAnnotations {
  double lang_confidence = 0.0;
  double wiki_ref_prob = 0.0;
  PplBucket ppl_bucket = PplBucket::kUnassigned;
  std::vector<DropReason> drop_reasons;

  bool operator==(const QualityAnnotations&) const = default;
};

struct Document {
  std::string id;
  std::string source;
  std::optional<std::string> url;
  Language language = Language::kUnknown;
  std::optional<std::string> published_at;  // ISO-8601 date or absent
  std::string text;
  uint64_t byte_len = 0;
  uint64_t char_len = 0;
  std::optional<QualityAnnotations> annotations;

  bool operator==(const Document&) const = default;
};

// Fills byte_len/char_len from text.
void recompute_lengths(Document& doc);
Document make_document(std::string id, std::string source, std::string text);

enum class Violation { kLenMismatch, kProbRange, kEmptyId, kBadDate };
const char* to_string(Violation v);

// Empty result iff every Document invariant holds.
std::vector<Violation> validate_document(const Document& doc);

struct SourceStats {
  uint64_t documents = 0;
  uint64_t bytes = 0;
  uint64_t chars = 0;
};

struct CorpusManifest {
  std::vector<Document> documents;

  // Recomputed from members, so the totals always match by construction.
  std::map<std::string, SourceStats> stats() const;
  size_t size() const { return documents.size(); }
  bool empty() const { return documents.empty(); }
};

// Line-delimited JSON, canonical key order, one document per line.
// Recomputes byte/char lengths and rejects mismatches and duplicate ids.
CorpusManifest read_manifest(const std::string& path);
void write_manifest(const CorpusManifest& manifest, const std::string& path);

// String forms used by the manifest codec (also handy for tests).
std::string document_to_json_line(const Document& doc);
Document document_from_json_line(const std::string& line, size_t line_no);

}  // namespace curator::corpus

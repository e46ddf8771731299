#include "curator/corpus.h"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "curator/errors.h"
#include "curator/util/dates.h"
#include "curator/util/utf8.h"

namespace curator::corpus {

using ordered_json = nlohmann::ordered_json;

const char* to_string(Language v) {
  switch (v) {
    case Language::kEn: return "en";
    case Language::kZh: return "zh";
    case Language::kOther: return "other";
    case Language::kUnknown: return "unknown";
  }
  return "unknown";
}

const char* to_string(PplBucket v) {
  switch (v) {
    case PplBucket::kHead: return "head";
    case PplBucket::kMiddle: return "middle";
    case PplBucket::kTail: return "tail";
    case PplBucket::kUnassigned: return "unassigned";
  }
  return "unassigned";
}

const char* to_string(DropReason v) {
  switch (v) {
    case DropReason::kEmpty: return "EMPTY";
    case DropReason::kLanguage: return "LANG";
    case DropReason::kPplTail: return "PPL_TAIL";
    case DropReason::kLowQuality: return "LOW_QUALITY";
    case DropReason::kLongLine: return "LONG_LINE";
    case DropReason::kMeanLine: return "MEAN_LINE";
    case DropReason::kLowAlnum: return "LOW_ALNUM";
    case DropReason::kMarkupSampled: return "MARKUP_SAMPLED";
    case DropReason::kNearDup: return "NEAR_DUP";
    case DropReason::kRecurrent: return "RECURRENT";
  }
  return "EMPTY";
}

Language language_from_string(const std::string& s) {
  if (s == "en") return Language::kEn;
  if (s == "zh") return Language::kZh;
  if (s == "other") return Language::kOther;
  if (s == "unknown") return Language::kUnknown;
  throw ParseError("unknown language value: " + s);
}

PplBucket bucket_from_string(const std::string& s) {
  if (s == "head") return PplBucket::kHead;
  if (s == "middle") return PplBucket::kMiddle;
  if (s == "tail") return PplBucket::kTail;
  if (s == "unassigned") return PplBucket::kUnassigned;
  throw ParseError("unknown ppl_bucket value: " + s);
}

DropReason drop_reason_from_string(const std::string& s) {
  static const std::pair<const char*, DropReason> kAll[] = {
      {"EMPTY", DropReason::kEmpty},
      {"LANG", DropReason::kLanguage},
      {"PPL_TAIL", DropReason::kPplTail},
      {"LOW_QUALITY", DropReason::kLowQuality},
      {"LONG_LINE", DropReason::kLongLine},
      {"MEAN_LINE", DropReason::kMeanLine},
      {"LOW_ALNUM", DropReason::kLowAlnum},
      {"MARKUP_SAMPLED", DropReason::kMarkupSampled},
      {"NEAR_DUP", DropReason::kNearDup},
      {"RECURRENT", DropReason::kRecurrent},
  };
  for (const auto& [name, value] : kAll)
    if (s == name) return value;
  throw ParseError("unknown drop reason: " + s);
}

void recompute_lengths(Document& doc) {
  doc.byte_len = doc.text.size();
  doc.char_len = util::utf8_length(doc.text);
}

Document make_document(std::string id, std::string source, std::string text) {
  Document doc;
  doc.id = std::move(id);
  doc.source = std::move(source);
  doc.text = std::move(text);
  recompute_lengths(doc);
  return doc;
}

const char* to_string(Violation v) {
  switch (v) {
    case Violation::kLenMismatch: return "LEN_MISMATCH";
    case Violation::kProbRange: return "PROB_RANGE";
    case Violation::kEmptyId: return "EMPTY_ID";
    case Violation::kBadDate: return "BAD_DATE";
  }
  return "?";
}

std::vector<Violation> validate_document(const Document& doc) {
  std::vector<Violation> out;
  if (doc.id.empty()) out.push_back(Violation::kEmptyId);
  if (doc.byte_len != doc.text.size() ||
      doc.char_len != util::utf8_length(doc.text))
    out.push_back(Violation::kLenMismatch);
  if (doc.annotations) {
    const auto& a = *doc.annotations;
    if (a.lang_confidence < 0.0 || a.lang_confidence > 1.0 ||
        a.wiki_ref_prob < 0.0 || a.wiki_ref_prob > 1.0)
      out.push_back(Violation::kProbRange);
  }
  if (doc.published_at && !util::parse_iso_date(*doc.published_at))
    out.push_back(Violation::kBadDate);
  return out;
}

std::map<std::string, SourceStats> CorpusManifest::stats() const {
  std::map<std::string, SourceStats> out;
  for (const auto& doc : documents) {
    auto& s = out[doc.source];
    s.documents += 1;
    s.bytes += doc.byte_len;
    s.chars += doc.char_len;
  }
  return out;
}

namespace {

ordered_json annotations_to_json(const QualityAnnotations& a) {
  ordered_json j;
  j["lang_confidence"] = a.lang_confidence;
  j["wiki_ref_prob"] = a.wiki_ref_prob;
  j["ppl_bucket"] = to_string(a.ppl_bucket);
  ordered_json reasons = ordered_json::array();
  for (DropReason r : a.drop_reasons) reasons.push_back(to_string(r));
  j["drop_reasons"] = reasons;
  return j;
}

QualityAnnotations annotations_from_json(const ordered_json& j,
                                         size_t line_no) {
  QualityAnnotations a;
  for (const auto& [key, value] : j.items()) {
    if (key == "lang_confidence") {
      a.lang_confidence = value.get<double>();
    } else if (key == "wiki_ref_prob") {
      a.wiki_ref_prob = value.get<double>();
    } else if (key == "ppl_bucket") {
      a.ppl_bucket = bucket_from_string(value.get<std::string>());
    } else if (key == "drop_reasons") {
      for (const auto& r : value)
        a.drop_reasons.push_back(drop_reason_from_string(r.get<std::string>()));
    } else {
      throw ParseError("line " + std::to_string(line_no) +
                       ": unknown annotations key '" + key + "'");
    }
  }
  return a;
}

}  // namespace

std::string document_to_json_line(const Document& doc) {
  ordered_json j;
  j["id"] = doc.id;
  j["source"] = doc.source;
  j["url"] = doc.url ? ordered_json(*doc.url) : ordered_json(nullptr);
  j["language"] = to_string(doc.language);
  j["published_at"] = doc.published_at ? ordered_json(*doc.published_at)
                                       : ordered_json(nullptr);
  j["text"] = doc.text;
  j["byte_len"] = doc.byte_len;
  j["char_len"] = doc.char_len;
  j["annotations"] = doc.annotations ? annotations_to_json(*doc.annotations)
                                     : ordered_json(nullptr);
  return j.dump();
}

Document document_from_json_line(const std::string& line, size_t line_no) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!j.is_object())
    throw ParseError("line " + std::to_string(line_no) +
                     ": record is not an object");
  Document doc;
  bool have_byte_len = false;
  bool have_char_len = false;
  uint64_t byte_len = 0;
  uint64_t char_len = 0;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "id") {
        doc.id = value.get<std::string>();
      } else if (key == "source") {
        doc.source = value.get<std::string>();
      } else if (key == "url") {
        if (!value.is_null()) doc.url = value.get<std::string>();
      } else if (key == "language") {
        doc.language = language_from_string(value.get<std::string>());
      } else if (key == "published_at") {
        if (!value.is_null()) doc.published_at = value.get<std::string>();
      } else if (key == "text") {
        doc.text = value.get<std::string>();
      } else if (key == "byte_len") {
        byte_len = value.get<uint64_t>();
        have_byte_len = true;
      } else if (key == "char_len") {
        char_len = value.get<uint64_t>();
        have_char_len = true;
      } else if (key == "annotations") {
        if (!value.is_null()) doc.annotations = annotations_from_json(value, line_no);
      } else {
        throw ParseError("line " + std::to_string(line_no) +
                         ": unknown field '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
  }
  if (doc.id.empty())
    throw ParseError("line " + std::to_string(line_no) + ": missing id");
  recompute_lengths(doc);
  if (have_byte_len && byte_len != doc.byte_len)
    throw IntegrityError("line " + std::to_string(line_no) +
                         ": byte_len " + std::to_string(byte_len) +
                         " does not match text (" +
                         std::to_string(doc.byte_len) + ")");
  if (have_char_len && char_len != doc.char_len)
    throw IntegrityError("line " + std::to_string(line_no) +
                         ": char_len " + std::to_string(char_len) +
                         " does not match text (" +
                         std::to_string(doc.char_len) + ")");
  if (doc.published_at && !util::parse_iso_date(*doc.published_at))
    throw ParseError("line " + std::to_string(line_no) +
                     ": published_at is not a valid ISO-8601 date");
  return doc;
}

CorpusManifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest: " + path);
  CorpusManifest manifest;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Document doc = document_from_json_line(line, line_no);
    if (!seen.insert(doc.id).second)
      throw IntegrityError("line " + std::to_string(line_no) +
                           ": duplicate document id '" + doc.id + "'");
    manifest.documents.push_back(std::move(doc));
  }
  return manifest;
}

void write_manifest(const CorpusManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open manifest for writing: " + path);
  for (const auto& doc : manifest.documents) {
    out << document_to_json_line(doc) << '\n';
    if (!out) throw DataError("write failure: " + path);
  }
  out.flush();
  if (!out) throw DataError("write failure: " + path);
}

}  // namespace curator::corpus

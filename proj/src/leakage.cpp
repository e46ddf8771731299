#include "curator/leakage.h"

#include <algorithm>
#include <fstream>

#include "curator/errors.h"
#include "curator/util/hash.h"

namespace curator::leakage {

const char* to_string(Flag v) {
  switch (v) {
    case Flag::kTestLeakSuspect: return "TEST_LEAK_SUSPECT";
    case Flag::kTrainOverfitSuspect: return "TRAIN_OVERFIT_SUSPECT";
  }
  return "?";
}

bool LeakageReport::has(Flag f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

std::vector<std::string> build_samples(const std::vector<std::string>& questions,
                                       const std::vector<std::string>& answers,
                                       const std::string& joiner) {
  if (questions.size() != answers.size())
    throw UsageError("build_samples: " + std::to_string(questions.size()) +
                     " questions vs " + std::to_string(answers.size()) +
                     " answers");
  std::vector<std::string> samples;
  samples.reserve(questions.size());
  for (size_t i = 0; i < questions.size(); ++i)
    samples.push_back(questions[i] + joiner + answers[i]);
  return samples;
}

SampleScorer ngram_scorer(const ngram::NGramModel& model,
                          const tokenizer::Vocabulary& vocab) {
  return [&model, &vocab](const std::string& sample) {
    return model.token_logprobs(tokenizer::encode(vocab, sample));
  };
}

namespace {

// Token-weighted mean NLL over a split.
double split_loss(const std::vector<std::vector<double>>& streams,
                  const char* split_name) {
  if (streams.empty())
    throw UsageError(std::string("audit: empty split '") + split_name + "'");
  double nll = 0.0;
  uint64_t tokens = 0;
  for (const auto& stream : streams) {
    for (double lp : stream) nll -= lp;
    tokens += stream.size();
  }
  if (tokens == 0)
    throw UsageError(std::string("audit: split '") + split_name +
                     "' has no tokens");
  return nll / static_cast<double>(tokens);
}

void apply_flags(LeakageReport& report, const Thresholds& thresholds) {
  report.flags.clear();
  if (report.delta1 <= thresholds.t1)
    report.flags.push_back(Flag::kTestLeakSuspect);
  if (report.delta2 >= thresholds.t2)
    report.flags.push_back(Flag::kTrainOverfitSuspect);
}

}  // namespace

LeakageReport audit_from_streams(
    const std::vector<std::vector<double>>& train_streams,
    const std::vector<std::vector<double>>& test_streams,
    const std::vector<std::vector<double>>& ref_streams,
    const Thresholds& thresholds, const std::string& model_id) {
  LeakageReport report;
  report.model_id = model_id;
  report.l_train = split_loss(train_streams, "train");
  report.l_test = split_loss(test_streams, "test");
  report.l_ref = split_loss(ref_streams, "ref");
  report.delta1 = report.l_test - report.l_ref;
  report.delta2 = report.l_test - report.l_train;
  apply_flags(report, thresholds);
  return report;
}

LeakageReport audit(const SampleScorer& scorer, const BenchmarkSplits& splits,
                    const Thresholds& thresholds,
                    const std::string& model_id) {
  auto score_split = [&scorer](const std::vector<std::string>& samples) {
    std::vector<std::vector<double>> streams;
    streams.reserve(samples.size());
    for (const auto& s : samples) streams.push_back(scorer(s));
    return streams;
  };
  return audit_from_streams(score_split(splits.train_samples),
                            score_split(splits.test_samples),
                            score_split(splits.ref_samples), thresholds,
                            model_id);
}

LeakageReport audit_from_losses(const std::string& model_id, double l_test,
                                double l_train, double l_ref,
                                const Thresholds& thresholds) {
  LeakageReport report;
  report.model_id = model_id;
  report.l_test = l_test;
  report.l_train = l_train;
  report.l_ref = l_ref;
  report.delta1 = l_test - l_ref;
  report.delta2 = l_test - l_train;
  apply_flags(report, thresholds);
  return report;
}

std::vector<LeakageReport> flag_outliers(std::vector<LeakageReport> reports,
                                         const Thresholds& thresholds) {
  for (auto& report : reports) apply_flags(report, thresholds);
  return reports;
}

// --- splits file -------------------------------------------------------------

namespace {

std::string escape_sample(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '\\') out += "\\\\";
    else if (c == '\n') out += "\\n";
    else if (c == '\r') out += "\\r";
    else out += c;
  }
  return out;
}

std::string unescape_sample(const std::string& s, size_t line_no) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (i + 1 >= s.size())
      throw ParseError("splits line " + std::to_string(line_no) +
                       ": dangling escape");
    ++i;
    if (s[i] == '\\') out += '\\';
    else if (s[i] == 'n') out += '\n';
    else if (s[i] == 'r') out += '\r';
    else
      throw ParseError("splits line " + std::to_string(line_no) +
                       ": bad escape \\" + std::string(1, s[i]));
  }
  return out;
}

}  // namespace

void write_splits(const BenchmarkSplits& splits, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write splits: " + path);
  out << "#train\n";
  for (const auto& s : splits.train_samples) out << escape_sample(s) << '\n';
  out << "#test\n";
  for (const auto& s : splits.test_samples) out << escape_sample(s) << '\n';
  out << "#ref\n";
  for (const auto& s : splits.ref_samples) out << escape_sample(s) << '\n';
  if (!out) throw DataError("write failure: " + path);
}

BenchmarkSplits read_splits(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open splits: " + path);
  BenchmarkSplits splits;
  std::vector<std::string>* section = nullptr;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line == "#train") {
      section = &splits.train_samples;
      continue;
    }
    if (line == "#test") {
      section = &splits.test_samples;
      continue;
    }
    if (line == "#ref") {
      section = &splits.ref_samples;
      continue;
    }
    if (section == nullptr)
      throw ParseError("splits line " + std::to_string(line_no) +
                       ": content before any section header");
    section->push_back(unescape_sample(line, line_no));
  }
  return splits;
}

// --- desk-scale contamination experiment --------------------------------------

namespace {

// Templated arithmetic word problems; all three splits are i.i.d. draws.
// The template alone would be learnable from any split, so each problem
// carries a random code sequence (inventory tags): those transitions are
// unpredictable unless the exact sample was in the training data, which is
// what separates memorization from generalization for an n-gram.
class ProblemGenerator {
 public:
  explicit ProblemGenerator(uint64_t seed) : rng_(seed) {}

  std::string code() {
    // 8 chars over a 26-symbol alphabet: any 4-byte window inside a code is
    // effectively unique to its sample, so an n-gram can only predict the
    // tail of a code it has literally seen.
    static const char* kAlphabet = "bcdfghjkmnpqrstvwxz2345689";
    std::string c;
    for (int i = 0; i < 8; ++i) c += kAlphabet[rng_.next_below(26)];
    return c;
  }

  std::pair<std::string, std::string> next() {
    static const char* kNames[] = {"tom",  "mia",  "sam",  "ana",
                                   "leo",  "zoe",  "max",  "ivy",
                                   "ben",  "eva",  "dan",  "amy"};
    static const char* kItems[] = {"apples",  "books",   "coins",
                                   "pens",    "shells",  "cards",
                                   "stones",  "stamps",  "crates",
                                   "ribbons", "marbles", "tickets"};
    static const char* kVerbs[] = {"buys", "finds", "wins", "gets",
                                   "picks", "earns"};
    const char* name = kNames[rng_.next_below(std::size(kNames))];
    const char* item = kItems[rng_.next_below(std::size(kItems))];
    const char* verb = kVerbs[rng_.next_below(std::size(kVerbs))];
    const uint64_t a = 2 + rng_.next_below(48);
    const uint64_t b = 2 + rng_.next_below(48);
    const std::string tags = "lot " + code() + " bin " + code();
    std::string question = "q: " + tags + ". " + name + " has " +
                           std::to_string(a) + " " + item + " and " + verb +
                           " " + std::to_string(b) +
                           " more. how many " + std::string(item) + " does " +
                           name + " have now?";
    std::string answer = "a: " + std::string(name) + " has " +
                         std::to_string(a + b) + " " + item + ".";
    return {std::move(question), std::move(answer)};
  }

  std::vector<std::string> samples(size_t n) {
    std::vector<std::string> questions;
    std::vector<std::string> answers;
    for (size_t i = 0; i < n; ++i) {
      auto [q, a] = next();
      questions.push_back(std::move(q));
      answers.push_back(std::move(a));
    }
    return build_samples(questions, answers, "\n");
  }

 private:
  util::SplitMixRng rng_;
};

// Unrelated filler prose the clean model trains on.
std::vector<std::string> background_corpus(uint64_t seed, size_t sentences) {
  static const char* kSubjects[] = {"the merchant", "a sailor",  "the scribe",
                                    "our neighbor", "the farmer", "a traveler",
                                    "the baker",    "the smith"};
  static const char* kVerbs[] = {"counted", "carried", "mended", "watched",
                                 "sorted",  "traded",  "stacked", "weighed"};
  static const char* kObjects[] = {"crates by the harbor", "tools in the shed",
                                   "letters from the north",
                                   "baskets of grain",     "maps of the coast",
                                   "barrels of salt",      "bolts of cloth",
                                   "sacks of flour"};
  static const char* kTails[] = {"before the rain came.",
                                 "while the bell rang.",
                                 "until the lamps burned low.",
                                 "as the tide turned.",
                                 "through the long afternoon.",
                                 "and wrote it all down."};
  util::SplitMixRng rng(seed);
  std::vector<std::string> out;
  out.reserve(sentences);
  for (size_t i = 0; i < sentences; ++i) {
    std::string s = std::string(kSubjects[rng.next_below(std::size(kSubjects))]) +
                    " " + kVerbs[rng.next_below(std::size(kVerbs))] + " " +
                    kObjects[rng.next_below(std::size(kObjects))] + " " +
                    kTails[rng.next_below(std::size(kTails))];
    out.push_back(std::move(s));
  }
  return out;
}

ngram::NGramModel train_byte_lm(const tokenizer::Vocabulary& vocab,
                                const std::vector<std::string>& texts) {
  ngram::NGramModel::Trainer trainer(5, 0.75, vocab.size());
  for (const auto& t : texts) trainer.add(tokenizer::encode(vocab, t));
  return std::move(trainer).build();
}

}  // namespace

DemoReport desk_scale_demo(uint64_t corpus_seed) {
  const size_t kSplitSize = 1500;
  ProblemGenerator gen(corpus_seed * 0x9e3779b97f4a7c15ULL + 17);
  BenchmarkSplits splits;
  splits.train_samples = gen.samples(kSplitSize);
  splits.test_samples = gen.samples(kSplitSize);
  splits.ref_samples = gen.samples(kSplitSize);

  const auto background = background_corpus(corpus_seed ^ 0xabcdef12345ULL,
                                            6000);
  const tokenizer::Vocabulary vocab = tokenizer::Vocabulary::byte_only();
  const Thresholds thresholds;

  std::vector<std::string> clean_texts = background;
  const ngram::NGramModel clean = train_byte_lm(vocab, clean_texts);

  std::vector<std::string> train_contaminated_texts = background;
  for (int rep = 0; rep < 2; ++rep)
    train_contaminated_texts.insert(train_contaminated_texts.end(),
                                    splits.train_samples.begin(),
                                    splits.train_samples.end());
  const ngram::NGramModel train_contaminated =
      train_byte_lm(vocab, train_contaminated_texts);

  std::vector<std::string> test_contaminated_texts = train_contaminated_texts;
  for (int rep = 0; rep < 2; ++rep)
    test_contaminated_texts.insert(test_contaminated_texts.end(),
                                   splits.test_samples.begin(),
                                   splits.test_samples.end());
  const ngram::NGramModel test_contaminated =
      train_byte_lm(vocab, test_contaminated_texts);

  DemoReport report;
  report.clean = audit(ngram_scorer(clean, vocab), splits, thresholds, "clean");
  report.train_contaminated =
      audit(ngram_scorer(train_contaminated, vocab), splits, thresholds,
            "train-contaminated");
  report.test_contaminated =
      audit(ngram_scorer(test_contaminated, vocab), splits, thresholds,
            "test-contaminated");
  return report;
}

}  // namespace curator::leakage

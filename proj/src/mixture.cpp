#include "curator/mixture.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "curator/errors.h"
#include "curator/util/hash.h"

namespace curator::mixture {

namespace {

constexpr double kWeightTolerance = 1e-6;

void check_weights_sum(const std::vector<SourceSpec>& sources) {
  double sum = 0.0;
  for (const auto& s : sources) {
    if (s.weight < 0.0 || s.weight > 1.0)
      throw UsageError("source '" + s.name + "' weight " +
                       std::to_string(s.weight) + " outside [0, 1]");
    sum += s.weight;
  }
  if (std::abs(sum - 1.0) > kWeightTolerance)
    throw UsageError("source weights sum to " + std::to_string(sum) +
                     ", expected 1 within 1e-6");
}

}  // namespace

std::vector<double> MixturePlan::probs_at(uint64_t step) const {
  for (const PlanSegment& seg : segments) {
    if (step < seg.first_step || step > seg.last_step) continue;
    const uint64_t span = seg.last_step - seg.first_step;
    const double t = span == 0 ? 0.0
                               : static_cast<double>(step - seg.first_step) /
                                     static_cast<double>(span);
    std::vector<double> row(seg.start_probs.size());
    for (size_t i = 0; i < row.size(); ++i)
      row[i] = seg.start_probs[i] + (seg.end_probs[i] - seg.start_probs[i]) * t;
    return row;
  }
  throw UsageError("step " + std::to_string(step) + " outside plan");
}

MixturePlan build_stage1_plan(const std::vector<SourceSpec>& sources,
                              uint64_t total_tokens, uint32_t repetition_cap) {
  if (sources.empty()) throw UsageError("no sources");
  if (total_tokens < 1) throw UsageError("total_tokens must be at least 1");
  if (repetition_cap < 1) throw UsageError("repetition_cap must be at least 1");
  check_weights_sum(sources);

  const double total = static_cast<double>(total_tokens);
  const size_t n = sources.size();
  std::vector<double> draws(n);
  std::vector<char> capped(n, 0);

  // Clamp violators to their cap and push the excess onto the others,
  // proportionally to their weights, until no new source goes over.
  double capped_draws = 0.0;
  for (;;) {
    double free_weight = 0.0;
    for (size_t i = 0; i < n; ++i)
      if (!capped[i]) free_weight += sources[i].weight;
    const double remaining = total - capped_draws;
    bool changed = false;
    for (size_t i = 0; i < n; ++i) {
      if (capped[i]) continue;
      draws[i] = free_weight <= 0.0
                     ? 0.0
                     : remaining * sources[i].weight / free_weight;
      const double limit = static_cast<double>(repetition_cap) *
                           static_cast<double>(sources[i].available_tokens);
      if (draws[i] > limit + 1e-9) {
        draws[i] = limit;
        capped[i] = 1;
        capped_draws += limit;
        changed = true;
      }
    }
    if (!changed) break;
  }

  double planned = 0.0;
  for (double d : draws) planned += d;
  if (planned + 1e-6 < total) {
    double capacity = 0.0;
    for (const auto& s : sources)
      capacity += static_cast<double>(repetition_cap) *
                  static_cast<double>(s.available_tokens);
    throw UsageError(
        "infeasible plan: repetition cap limits the corpus to " +
        std::to_string(capacity) + " tokens, short of " +
        std::to_string(total) + " by " + std::to_string(total - planned));
  }

  MixturePlan plan;
  plan.sources = sources;
  plan.steps = 1;
  plan.repetition_cap = repetition_cap;
  PlanSegment seg;
  seg.first_step = 0;
  seg.last_step = 0;
  seg.start_probs.resize(n);
  for (size_t i = 0; i < n; ++i) {
    seg.start_probs[i] = draws[i] / total;
    plan.expected_draws[sources[i].name] = draws[i];
  }
  seg.end_probs = seg.start_probs;
  plan.segments.push_back(std::move(seg));
  return plan;
}

MixturePlan build_stage2_plan(const std::vector<SourceSpec>& main_profile,
                              const SourceSpec& stem_source,
                              double stem_ratio_start, double stem_ratio_end,
                              uint64_t steps) {
  if (main_profile.empty()) throw UsageError("no main sources");
  if (steps < 1) throw UsageError("steps must be at least 1");
  if (stem_ratio_start < 0.0 || stem_ratio_start > 1.0 ||
      stem_ratio_end < 0.0 || stem_ratio_end > 1.0)
    throw UsageError("stem ratios must be in [0, 1]");
  check_weights_sum(main_profile);

  MixturePlan plan;
  plan.sources = main_profile;
  plan.sources.push_back(stem_source);
  plan.steps = steps;

  PlanSegment seg;
  seg.first_step = 0;
  seg.last_step = steps - 1;
  const size_t n = main_profile.size();
  seg.start_probs.resize(n + 1);
  seg.end_probs.resize(n + 1);
  const double end_ratio = steps == 1 ? stem_ratio_start : stem_ratio_end;
  for (size_t i = 0; i < n; ++i) {
    seg.start_probs[i] = main_profile[i].weight * (1.0 - stem_ratio_start);
    seg.end_probs[i] = main_profile[i].weight * (1.0 - end_ratio);
  }
  seg.start_probs[n] = stem_ratio_start;
  seg.end_probs[n] = end_ratio;
  plan.segments.push_back(std::move(seg));

  // Mean probability over the linear ramp, per unit of step budget.
  for (size_t i = 0; i <= n; ++i) {
    const double mean = (plan.segments[0].start_probs[i] +
                         plan.segments[0].end_probs[i]) /
                        2.0;
    plan.expected_draws[plan.sources[i].name] =
        mean * static_cast<double>(steps);
  }
  return plan;
}

std::vector<std::string> sample_stream(const MixturePlan& plan, uint64_t seed,
                                       uint64_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  const size_t k = plan.sources.size();
  std::vector<uint64_t> drawn(k, 0);
  std::vector<double> limit(k);
  for (size_t i = 0; i < k; ++i)
    limit[i] = plan.sources[i].available_tokens == 0
                   ? std::numeric_limits<double>::infinity()
                   : static_cast<double>(plan.repetition_cap) *
                         static_cast<double>(plan.sources[i].available_tokens);

  for (uint64_t i = 0; i < n; ++i) {
    const uint64_t step = static_cast<uint64_t>(
        static_cast<unsigned __int128>(i) * plan.steps / n);
    std::vector<double> row = plan.probs_at(std::min(step, plan.steps - 1));
    // Sources at their repetition cap drop out of the row.
    double mass = 0.0;
    for (size_t s = 0; s < k; ++s) {
      if (static_cast<double>(drawn[s]) + 1.0 > limit[s]) row[s] = 0.0;
      mass += row[s];
    }
    if (mass <= 0.0)
      throw UsageError("sample_stream exhausted every source at draw " +
                       std::to_string(i));
    const double u =
        util::hash_to_unit(
            util::splitmix64(seed ^ (i * 0x9e3779b97f4a7c15ULL))) *
        mass;
    double acc = 0.0;
    size_t pick = k - 1;
    for (size_t s = 0; s < k; ++s) {
      if (row[s] <= 0.0) continue;
      acc += row[s];
      if (u < acc) {
        pick = s;
        break;
      }
    }
    drawn[pick] += 1;
    out.push_back(plan.sources[pick].name);
  }
  return out;
}

// --- persistence -----------------------------------------------------------

using nlohmann::ordered_json;

void write_plan(const MixturePlan& plan, const std::string& path) {
  ordered_json j;
  ordered_json sources = ordered_json::array();
  for (const auto& s : plan.sources) {
    ordered_json src;
    src["name"] = s.name;
    src["available_tokens"] = s.available_tokens;
    src["weight"] = s.weight;
    sources.push_back(src);
  }
  j["sources"] = sources;
  j["steps"] = plan.steps;
  j["repetition_cap"] = plan.repetition_cap;
  ordered_json segments = ordered_json::array();
  for (const auto& seg : plan.segments) {
    ordered_json s;
    s["first_step"] = seg.first_step;
    s["last_step"] = seg.last_step;
    s["start_probs"] = seg.start_probs;
    s["end_probs"] = seg.end_probs;
    segments.push_back(s);
  }
  j["segments"] = segments;
  j["expected_draws"] = plan.expected_draws;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write plan: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw DataError("write failure: " + path);
}

MixturePlan read_plan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open plan: " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("plan file: ") + e.what());
  }
  MixturePlan plan;
  try {
    for (const auto& src : j.at("sources")) {
      SourceSpec s;
      s.name = src.at("name").get<std::string>();
      s.available_tokens = src.at("available_tokens").get<uint64_t>();
      s.weight = src.at("weight").get<double>();
      plan.sources.push_back(std::move(s));
    }
    plan.steps = j.at("steps").get<uint64_t>();
    plan.repetition_cap = j.at("repetition_cap").get<uint32_t>();
    for (const auto& seg : j.at("segments")) {
      PlanSegment s;
      s.first_step = seg.at("first_step").get<uint64_t>();
      s.last_step = seg.at("last_step").get<uint64_t>();
      s.start_probs = seg.at("start_probs").get<std::vector<double>>();
      s.end_probs = seg.at("end_probs").get<std::vector<double>>();
      plan.segments.push_back(std::move(s));
    }
    plan.expected_draws =
        j.at("expected_draws").get<std::map<std::string, double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("plan file: ") + e.what());
  }
  return plan;
}

std::vector<SourceSpec> read_source_specs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open source spec: " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("source spec: ") + e.what());
  }
  std::vector<SourceSpec> out;
  try {
    for (const auto& src : j) {
      SourceSpec s;
      s.name = src.at("name").get<std::string>();
      s.available_tokens = src.at("available_tokens").get<uint64_t>();
      s.weight = src.at("weight").get<double>();
      out.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("source spec: ") + e.what());
  }
  return out;
}

}  // namespace curator::mixture

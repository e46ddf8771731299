#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace curator::mixture {

struct SourceSpec {
  std::string name;
  uint64_t available_tokens = 0;
  double weight = 0.0;  // fraction of the budget; all weights sum to 1
};

// Per-step source probabilities stored as linear segments: row(t) is the
// interpolation between a segment's endpoints. Stage-1 plans are one
// constant segment; the stage-2 ramp is one sloped segment.
struct PlanSegment {
  uint64_t first_step = 0;
  uint64_t last_step = 0;  // inclusive
  std::vector<double> start_probs;
  std::vector<double> end_probs;
};

struct MixturePlan {
  std::vector<SourceSpec> sources;
  uint64_t steps = 1;
  uint32_t repetition_cap = 5;
  std::vector<PlanSegment> segments;
  std::map<std::string, double> expected_draws;  // tokens per source

  std::vector<double> probs_at(uint64_t step) const;
};

// Constant-probability plan from Table-style weights. Sources that would
// exceed repetition_cap * available_tokens are clamped there and the excess
// is redistributed proportionally among the rest, iterated to fixpoint.
MixturePlan build_stage1_plan(const std::vector<SourceSpec>& sources,
                              uint64_t total_tokens, uint32_t repetition_cap);

// Linear STEM ramp: stem probability goes start -> end across `steps`
// (constant at start when steps == 1); the main profile scales by the
// remainder. The STEM source is appended after the main sources.
MixturePlan build_stage2_plan(const std::vector<SourceSpec>& main_profile,
                              const SourceSpec& stem_source,
                              double stem_ratio_start, double stem_ratio_end,
                              uint64_t steps);

// Deterministic realization: draw i uses the row at step floor(i*steps/n).
// A source that has used up repetition_cap * available_tokens draws is
// skipped and the row renormalizes over the rest.
std::vector<std::string> sample_stream(const MixturePlan& plan, uint64_t seed,
                                       uint64_t n);

void write_plan(const MixturePlan& plan, const std::string& path);
MixturePlan read_plan(const std::string& path);

std::vector<SourceSpec> read_source_specs(const std::string& path);

}  // namespace curator::mixture

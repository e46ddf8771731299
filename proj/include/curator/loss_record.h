#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace curator::monitor {

enum class Normalization { kPerToken, kPerChar, kPerByte };

const char* to_string(Normalization v);
Normalization normalization_from_string(const std::string& s);

// One (model, dataset) evaluation: loss in nats per normalization unit.
struct LossRecord {
  std::string model_id;
  uint64_t checkpoint_tokens = 0;
  std::string domain;
  Normalization normalization = Normalization::kPerToken;
  double loss = 0.0;

  double perplexity() const { return std::exp(loss); }
};

// Line-delimited JSON records.
void write_loss_records(const std::vector<LossRecord>& records,
                        const std::string& path);
std::vector<LossRecord> read_loss_records(const std::string& path);
void append_loss_record(const LossRecord& record, const std::string& path);

}  // namespace curator::monitor

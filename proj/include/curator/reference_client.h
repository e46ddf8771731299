#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace curator::leakage {

// Completion-service contract used to build reference sets. The audit
// itself never needs the network: offline_path substitutes a local file of
// pre-generated samples with identical downstream semantics.
struct ServiceDescriptor {
  std::string base_url;       // e.g. http://localhost:8089
  std::string model;
  std::string auth_env_var = "CURATOR_SERVICE_TOKEN";
  int timeout_seconds = 30;
  int max_retries = 2;
  std::optional<std::string> offline_path;
  std::optional<std::string> request_log_path;  // one JSON line per exchange
};

// Issues n templated generation requests (POST {base_url}/v1/completions
// with {"model", "prompt", "index"}; the reply's "text" field is the
// sample). Offline mode reads the first n lines (escaped like the splits
// file) instead. Responses come back in request order.
std::vector<std::string> request_reference_samples(
    const ServiceDescriptor& endpoint, const std::string& prompt_template,
    size_t n);

}  // namespace curator::leakage

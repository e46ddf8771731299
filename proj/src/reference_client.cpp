#include "curator/reference_client.h"

#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "curator/errors.h"

namespace curator::leakage {

namespace {

using nlohmann::json;

std::string unescape_line(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      ++i;
      if (s[i] == 'n') out += '\n';
      else if (s[i] == 'r') out += '\r';
      else if (s[i] == '\\') out += '\\';
      else {
        out += '\\';
        out += s[i];
      }
    } else {
      out += s[i];
    }
  }
  return out;
}

std::vector<std::string> read_offline_samples(const std::string& path,
                                              size_t n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ServiceError("offline sample file not readable: " + path);
  std::vector<std::string> samples;
  std::string line;
  while (samples.size() < n && std::getline(in, line)) {
    if (line.empty()) continue;
    samples.push_back(unescape_line(line));
  }
  if (samples.size() < n)
    throw ServiceError("offline sample file has " +
                       std::to_string(samples.size()) + " samples, need " +
                       std::to_string(n));
  return samples;
}

class ExchangeLog {
 public:
  explicit ExchangeLog(const std::optional<std::string>& path) {
    if (path) {
      out_.open(*path, std::ios::binary | std::ios::app);
      if (!out_) throw ServiceError("cannot open request log: " + *path);
    }
  }
  void record(size_t index, const std::string& request,
              const std::string& response, int status) {
    if (!out_.is_open()) return;
    json j;
    j["index"] = index;
    j["request"] = request;
    j["status"] = status;
    j["response"] = response;
    out_ << j.dump() << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

}  // namespace

std::vector<std::string> request_reference_samples(
    const ServiceDescriptor& endpoint, const std::string& prompt_template,
    size_t n) {
  if (n == 0) return {};
  if (endpoint.offline_path)
    return read_offline_samples(*endpoint.offline_path, n);
  if (endpoint.base_url.empty())
    throw ServiceError(
        "no completion endpoint configured and no offline file given");

  httplib::Client client(endpoint.base_url);
  client.set_connection_timeout(endpoint.timeout_seconds);
  client.set_read_timeout(endpoint.timeout_seconds);
  httplib::Headers headers;
  if (const char* token = std::getenv(endpoint.auth_env_var.c_str());
      token != nullptr && token[0] != '\0')
    headers.emplace("Authorization", std::string("Bearer ") + token);

  ExchangeLog log(endpoint.request_log_path);
  std::vector<std::string> samples(n);
  for (size_t i = 0; i < n; ++i) {
    json request;
    request["model"] = endpoint.model;
    request["prompt"] = prompt_template;
    request["index"] = i;
    const std::string body = request.dump();

    httplib::Result result;
    for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
      result = client.Post("/v1/completions", headers, body,
                           "application/json");
      if (result && result->status == 200) break;
      if (attempt < endpoint.max_retries)
        std::this_thread::sleep_for(
            std::chrono::milliseconds(100 * (1 << attempt)));
    }
    if (!result)
      throw ServiceError("completion endpoint unreachable: " +
                         endpoint.base_url + " (" +
                         httplib::to_string(result.error()) + ")");
    log.record(i, body, result->body, result->status);
    if (result->status != 200)
      throw ServiceError("completion request " + std::to_string(i) +
                         " failed with HTTP " +
                         std::to_string(result->status));
    json reply;
    try {
      reply = json::parse(result->body);
      samples[i] = reply.at("text").get<std::string>();
    } catch (const json::exception& e) {
      throw ParseError("malformed completion response for request " +
                       std::to_string(i) + ": " + e.what() +
                       "; raw payload: " + result->body);
    }
  }
  return samples;
}

}  // namespace curator::leakage

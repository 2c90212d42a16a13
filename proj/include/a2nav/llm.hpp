#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "a2nav/encoder.hpp"

namespace a2nav {

struct CompletionRequest {
  std::string prompt;
  int max_tokens = 256;
  double temperature = 0.0;  // deterministic by default
  std::vector<std::string> stop;
};

// Content-hash keyed canned completions; the whole suite runs offline.
class FixtureStore {
 public:
  static std::string prompt_hash(const std::string& prompt);

  void put(const std::string& prompt, const std::string& completion);
  void put_hash(const std::string& hash, const std::string& completion);
  std::optional<std::string> find(const std::string& prompt) const;
  std::size_t size() const { return entries_.size(); }

  // Line-delimited JSON records {"hash", "completion"}.
  static FixtureStore from_text(const std::string& text);
  static FixtureStore from_file(const std::string& path);
  std::string to_text() const;

 private:
  std::map<std::string, std::string> entries_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
  bool network_error = false;
  std::string error;
};

// Injection seam for tests; the default implementation uses cpp-httplib.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& endpoint, const std::string& api_key,
                            const std::string& body) = 0;
};

std::unique_ptr<Transport> make_http_transport();

struct LlmConfig {
  std::string endpoint;  // A2NAV_LLM_ENDPOINT
  std::string api_key;   // A2NAV_LLM_API_KEY
  std::string model;     // A2NAV_LLM_MODEL
  int max_retries = 3;
  double backoff_start_s = 1.0;

  static LlmConfig from_env();
};

class LlmClient {
 public:
  // Offline mode: every completion must hit the store.
  explicit LlmClient(FixtureStore fixtures);
  // Live mode; transport and sleep are injectable for tests.
  LlmClient(LlmConfig config, std::unique_ptr<Transport> transport,
            std::function<void(double)> sleep = nullptr);

  bool fixture_mode() const { return fixtures_.has_value(); }

  std::string complete(const CompletionRequest& request);

  // Unit vector; built-in deterministic encoder unless a remote backend
  // is plugged in via set_embed_backend.
  std::vector<double> embed(const std::string& text);
  void set_embed_backend(std::shared_ptr<TextEncoder> backend);

 private:
  std::optional<FixtureStore> fixtures_;
  LlmConfig config_;
  std::unique_ptr<Transport> transport_;
  std::function<void(double)> sleep_;
  std::shared_ptr<TextEncoder> embed_backend_;
};

}  // namespace a2nav

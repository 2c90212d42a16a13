#include "a2nav/llm.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "a2nav/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace a2nav {

namespace {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string getenv_or(const char* name, const char* fallback = "") {
  const char* v = std::getenv(name);
  return v ? v : fallback;
}

// Extracts the completion text from common provider response shapes;
// anything unrecognized is returned verbatim.
std::string extract_text(const std::string& body) {
  const auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded()) return body;
  if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
    const auto& choice = doc["choices"][0];
    if (choice.contains("text")) return choice["text"].get<std::string>();
    if (choice.contains("message") && choice["message"].contains("content"))
      return choice["message"]["content"].get<std::string>();
  }
  if (doc.contains("completion")) return doc["completion"].get<std::string>();
  return body;
}

class HttpTransport : public Transport {
 public:
  HttpResponse post(const std::string& endpoint, const std::string& api_key,
                    const std::string& body) override {
    const auto path_start = endpoint.find('/', endpoint.find("//") + 2);
    const std::string base =
        path_start == std::string::npos ? endpoint : endpoint.substr(0, path_start);
    const std::string path =
        path_start == std::string::npos ? "/" : endpoint.substr(path_start);

    httplib::Client client(base);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    const auto result = client.Post(path, headers, body, "application/json");
    HttpResponse response;
    if (!result) {
      response.network_error = true;
      response.error = httplib::to_string(result.error());
      return response;
    }
    response.status = result->status;
    response.body = result->body;
    return response;
  }
};

}  // namespace

std::unique_ptr<Transport> make_http_transport() {
  return std::make_unique<HttpTransport>();
}

std::string FixtureStore::prompt_hash(const std::string& prompt) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(prompt)));
  return buf;
}

void FixtureStore::put(const std::string& prompt, const std::string& completion) {
  entries_[prompt_hash(prompt)] = completion;
}

void FixtureStore::put_hash(const std::string& hash, const std::string& completion) {
  entries_[hash] = completion;
}

std::optional<std::string> FixtureStore::find(const std::string& prompt) const {
  const auto it = entries_.find(prompt_hash(prompt));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

FixtureStore FixtureStore::from_text(const std::string& text) {
  FixtureStore store;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      store.put_hash(j.at("hash").get<std::string>(),
                     j.at("completion").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("fixture line: ") + e.what());
    }
  }
  return store;
}

FixtureStore FixtureStore::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open fixture file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

std::string FixtureStore::to_text() const {
  std::ostringstream out;
  for (const auto& [hash, completion] : entries_) {
    nlohmann::json j = {{"hash", hash}, {"completion", completion}};
    out << j.dump() << "\n";
  }
  return out.str();
}

LlmConfig LlmConfig::from_env() {
  LlmConfig config;
  config.endpoint = getenv_or("A2NAV_LLM_ENDPOINT");
  config.api_key = getenv_or("A2NAV_LLM_API_KEY");
  config.model = getenv_or("A2NAV_LLM_MODEL");
  return config;
}

LlmClient::LlmClient(FixtureStore fixtures)
    : fixtures_(std::move(fixtures)), embed_backend_(std::make_shared<TrigramEncoder>()) {}

LlmClient::LlmClient(LlmConfig config, std::unique_ptr<Transport> transport,
                     std::function<void(double)> sleep)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      sleep_(std::move(sleep)),
      embed_backend_(std::make_shared<TrigramEncoder>()) {
  if (!sleep_)
    sleep_ = [](double seconds) {
      std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    };
}

void LlmClient::set_embed_backend(std::shared_ptr<TextEncoder> backend) {
  embed_backend_ = std::move(backend);
}

std::string LlmClient::complete(const CompletionRequest& request) {
  if (request.prompt.empty()) throw SchemaError("prompt: must be non-empty");

  if (fixtures_) {
    const auto hit = fixtures_->find(request.prompt);
    if (!hit)
      throw FixtureMissError("no fixture for prompt hash " +
                             FixtureStore::prompt_hash(request.prompt));
    return *hit;
  }

  if (config_.endpoint.empty())
    throw LlmUnavailableError("A2NAV_LLM_ENDPOINT is not configured");

  nlohmann::json body = {{"prompt", request.prompt},
                         {"max_tokens", request.max_tokens},
                         {"temperature", request.temperature}};
  if (!config_.model.empty()) body["model"] = config_.model;
  if (!request.stop.empty()) body["stop"] = request.stop;
  const std::string payload = body.dump();

  std::string last_error;
  double backoff = config_.backoff_start_s;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      sleep_(backoff);
      backoff *= 2.0;
    }
    const HttpResponse response =
        transport_->post(config_.endpoint, config_.api_key, payload);
    if (response.network_error) {
      last_error = response.error;
      continue;
    }
    if (response.status == 401 || response.status == 403)
      throw AuthError("completion endpoint rejected credentials (HTTP " +
                      std::to_string(response.status) + ")");
    if (response.status >= 500 || response.status == 408 || response.status == 429) {
      last_error = "HTTP " + std::to_string(response.status);
      continue;
    }
    if (response.status >= 200 && response.status < 300)
      return extract_text(response.body);
    throw LlmUnavailableError("completion endpoint returned HTTP " +
                              std::to_string(response.status));
  }
  throw LlmUnavailableError("completion endpoint unreachable after " +
                            std::to_string(config_.max_retries) +
                            " retries: " + last_error);
}

std::vector<double> LlmClient::embed(const std::string& text) {
  if (text.empty()) throw SchemaError("embed: text must be non-empty");
  return embed_backend_->encode(text);
}

}  // namespace a2nav

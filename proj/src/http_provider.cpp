#include "herald/http_provider.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "herald/error.hpp"
#include "herald/mock_roles.hpp"

namespace herald {

using nlohmann::json;

namespace {

httplib::Result post_json(const std::string& base_url, const std::string& path,
                          const std::string& api_key, const json& body, int timeout_seconds) {
  httplib::Client client(base_url);
  client.set_connection_timeout(timeout_seconds, 0);
  client.set_read_timeout(timeout_seconds, 0);
  client.set_write_timeout(timeout_seconds, 0);
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
  return client.Post(path, headers, body.dump(), "application/json");
}

// Maps transport and HTTP failures onto the retry taxonomy; returns the
// parsed body on success.
json checked_body(const httplib::Result& res, const std::string& provider) {
  if (!res) {
    throw TransientProviderError(provider, "transport error: " + httplib::to_string(res.error()));
  }
  const int status = res->status;
  if (status == 429 || status >= 500) {
    throw TransientProviderError(provider, "HTTP " + std::to_string(status));
  }
  if (status < 200 || status >= 300) {
    throw ProviderError(provider, "HTTP " + std::to_string(status) + ": " + res->body);
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw ProviderError(provider, std::string("unparseable response: ") + e.what());
  }
}

}  // namespace

std::string api_key_env_var(std::string_view role) {
  std::string var = "HERALD_API_KEY_";
  for (char c : role) var.push_back(c >= 'a' && c <= 'z' ? static_cast<char>(c - 'a' + 'A') : c);
  return var;
}

OpenAiChatProvider::OpenAiChatProvider(std::string role, std::string base_url,
                                       std::string api_key, int timeout_seconds)
    : role_(std::move(role)),
      base_url_(std::move(base_url)),
      api_key_(std::move(api_key)),
      timeout_seconds_(timeout_seconds) {}

Completion OpenAiChatProvider::sample(const CompletionRequest& request, int sample_index) {
  const json body{
      {"model", request.model_id},
      {"messages", json::array({json{{"role", "user"}, {"content", request.prompt_text}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_output_tokens},
      {"n", 1},
  };
  const auto parsed =
      checked_body(post_json(base_url_, "/v1/chat/completions", api_key_, body, timeout_seconds_),
                   id());
  try {
    const auto& choice = parsed.at("choices").at(0);
    Completion c;
    c.text = choice.at("message").at("content").get<std::string>();
    const auto reason = choice.value("finish_reason", std::string("stop"));
    c.finish_reason = reason == "length" ? FinishReason::Length : FinishReason::Stop;
    c.provider_meta["provider"] = id();
    c.provider_meta["sample_index"] = std::to_string(sample_index);
    if (parsed.contains("id") && parsed["id"].is_string()) {
      c.provider_meta["response_id"] = parsed["id"].get<std::string>();
    }
    return c;
  } catch (const json::exception& e) {
    throw ProviderError(id(), std::string("unexpected response shape: ") + e.what());
  }
}

OpenAiEmbeddingProvider::OpenAiEmbeddingProvider(std::string base_url, std::string model,
                                                 std::string api_key, Eigen::Index dim,
                                                 int timeout_seconds)
    : base_url_(std::move(base_url)),
      model_(std::move(model)),
      api_key_(std::move(api_key)),
      dim_(dim),
      timeout_seconds_(timeout_seconds) {}

EmbeddingVector OpenAiEmbeddingProvider::embed_text(std::string_view text) const {
  const json body{{"model", model_}, {"input", std::string(text)}};
  const auto parsed =
      checked_body(post_json(base_url_, "/v1/embeddings", api_key_, body, timeout_seconds_), id());
  try {
    const auto values = parsed.at("data").at(0).at("embedding").get<std::vector<double>>();
    return Eigen::Map<const EmbeddingVector>(values.data(),
                                             static_cast<Eigen::Index>(values.size()));
  } catch (const json::exception& e) {
    throw ProviderError(id(), std::string("unexpected response shape: ") + e.what());
  }
}

std::unique_ptr<CompletionProvider> make_provider(std::string_view role,
                                                  const RoleBinding& binding) {
  if (binding.provider == "mock") {
    return std::make_unique<MockProvider>(std::string(role), mock_responder_for(role));
  }
  if (binding.provider == "openai") {
    if (binding.base_url.empty()) {
      throw InvalidInput("role " + std::string(role) + ": openai provider needs base_url");
    }
    const auto var = api_key_env_var(role);
    const char* key = std::getenv(var.c_str());
    return std::make_unique<OpenAiChatProvider>(std::string(role), binding.base_url,
                                                key ? std::string(key) : std::string());
  }
  throw InvalidInput("role " + std::string(role) + ": unknown provider '" + binding.provider + "'");
}

}  // namespace herald

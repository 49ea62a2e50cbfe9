#pragma once

#include <string>

#include "herald/gateway.hpp"
#include "herald/retrieval.hpp"

namespace herald {

// OpenAI-compatible chat endpoint (POST {base_url}/v1/chat/completions), one
// sample per call. 429, 5xx and transport failures are transient; other HTTP
// errors are not retried.
class OpenAiChatProvider final : public CompletionProvider {
 public:
  OpenAiChatProvider(std::string role, std::string base_url, std::string api_key,
                     int timeout_seconds = 120);

  std::string id() const override { return "openai:" + role_ + "@" + base_url_; }
  Completion sample(const CompletionRequest& request, int sample_index) override;

 private:
  std::string role_;
  std::string base_url_;
  std::string api_key_;
  int timeout_seconds_;
};

// OpenAI-compatible embeddings endpoint (POST {base_url}/v1/embeddings).
class OpenAiEmbeddingProvider final : public EmbeddingProvider {
 public:
  OpenAiEmbeddingProvider(std::string base_url, std::string model, std::string api_key,
                          Eigen::Index dim, int timeout_seconds = 60);

  std::string id() const override { return "openai-embed:" + model_ + "@" + base_url_; }
  Eigen::Index dim() const override { return dim_; }
  EmbeddingVector embed_text(std::string_view text) const override;

 private:
  std::string base_url_;
  std::string model_;
  std::string api_key_;
  Eigen::Index dim_;
  int timeout_seconds_;
};

/// Environment variable holding the key for `role`, e.g. HERALD_API_KEY_NLI_JUDGE.
std::string api_key_env_var(std::string_view role);

}  // namespace herald

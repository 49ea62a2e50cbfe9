#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace herald {

enum class FinishReason { Stop, Length, Error };

std::string_view to_string(FinishReason reason);

struct CompletionRequest {
  std::string prompt_text;
  int sample_count = 1;
  double temperature = 1.0;
  int max_output_tokens = 1024;
  std::string model_id;
};

struct Completion {
  std::string text;
  FinishReason finish_reason = FinishReason::Stop;
  std::map<std::string, std::string> provider_meta;
};

struct GatewayConfig {
  int max_in_flight = 8;
  int retry_limit = 3;
  int backoff_base_ms = 200;
  std::optional<std::filesystem::path> cache_dir;
  int sample_cap = 256;
  long request_budget = 0;  // provider calls allowed over the gateway's lifetime; 0 = unlimited
};

// A backend that produces one sample per call. Implementations must be safe to
// call from several threads at once. Retryable failures are reported as
// TransientProviderError, anything else as ProviderError.
class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string id() const = 0;
  virtual Completion sample(const CompletionRequest& request, int sample_index) = 0;
};

struct GatewayStats {
  long provider_calls = 0;
  long retries = 0;
  long cache_hits = 0;
  int peak_in_flight = 0;
};

class Gateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit Gateway(GatewayConfig config, Sleeper sleeper = {});

  /// Exactly request.sample_count completions, index-ordered. Throws
  /// ProviderExhausted once retries are spent, BudgetExceeded when the
  /// request budget runs out, InvalidInput on a malformed request.
  std::vector<Completion> complete(const CompletionRequest& request, CompletionProvider& provider);

  GatewayStats stats() const;
  const GatewayConfig& config() const noexcept { return config_; }

 private:
  Completion sample_with_retry(const CompletionRequest& request, CompletionProvider& provider,
                               int index);
  std::optional<Completion> cache_lookup(const std::string& key) const;
  void cache_store(const std::string& key, const Completion& completion) const;

  GatewayConfig config_;
  Sleeper sleeper_;
  mutable std::mutex mutex_;
  std::condition_variable slot_free_;
  int in_flight_ = 0;
  GatewayStats stats_;
};

/// Cache key for one sample: digest over (prompt digest, model, temperature, index).
std::string cache_key(const CompletionRequest& request, int sample_index);

// ---- role bindings ----

struct RoleBinding {
  std::string provider = "mock";  // "mock" or "openai"
  std::string model_id;
  std::string base_url;           // openai-compatible endpoint root
  double temperature = 1.0;
  int max_output_tokens = 1024;
};

inline constexpr std::string_view kRoleTranslator = "translator";
inline constexpr std::string_view kRoleBackTranslator = "back_translator";
inline constexpr std::string_view kRoleNliJudge = "nli_judge";
inline constexpr std::string_view kRoleInformalizer = "informalizer";

/// Builds the provider for `role`. Remote providers read their key from
/// HERALD_API_KEY_<ROLE> (role upper-cased).
std::unique_ptr<CompletionProvider> make_provider(std::string_view role, const RoleBinding& binding);

/// A provider plus the binding that selects its model and sampling knobs.
struct BoundRole {
  RoleBinding binding;
  std::unique_ptr<CompletionProvider> provider;

  CompletionRequest request(std::string prompt, int sample_count = 1) const {
    return CompletionRequest{std::move(prompt), sample_count, binding.temperature,
                             binding.max_output_tokens, binding.model_id};
  }
};

}  // namespace herald

#include "herald/gateway.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <thread>

#include <json.hpp>

#include "herald/digest.hpp"
#include "herald/error.hpp"
#include "herald/text.hpp"

namespace herald {

using nlohmann::json;

std::string_view to_string(FinishReason reason) {
  switch (reason) {
    case FinishReason::Stop: return "stop";
    case FinishReason::Length: return "length";
    case FinishReason::Error: return "error";
  }
  return "error";
}

namespace {

FinishReason parse_finish_reason(std::string_view s) {
  if (s == "length") return FinishReason::Length;
  if (s == "error") return FinishReason::Error;
  return FinishReason::Stop;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string cache_key(const CompletionRequest& request, int sample_index) {
  std::string material = digest(request.prompt_text);
  material += '\x1f';
  material += request.model_id;
  material += '\x1f';
  material += format_double(request.temperature);
  material += '\x1f';
  material += std::to_string(sample_index);
  return digest(material);
}

Gateway::Gateway(GatewayConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)) {
  if (config_.max_in_flight < 1) throw InvalidInput("max_in_flight must be >= 1");
  if (config_.retry_limit < 0) throw InvalidInput("retry_limit must be >= 0");
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

GatewayStats Gateway::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

std::vector<Completion> Gateway::complete(const CompletionRequest& request,
                                          CompletionProvider& provider) {
  if (request.sample_count < 1) throw InvalidInput("sample_count must be >= 1");
  if (request.sample_count > config_.sample_cap) {
    throw InvalidInput("sample_count " + std::to_string(request.sample_count) +
                       " exceeds cap " + std::to_string(config_.sample_cap));
  }
  if (request.temperature < 0) throw InvalidInput("temperature must be >= 0");
  if (request.max_output_tokens < 1) throw InvalidInput("max_output_tokens must be >= 1");

  const auto n = static_cast<std::size_t>(request.sample_count);
  std::vector<Completion> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i] = sample_with_retry(request, provider, static_cast<int>(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(config_.max_in_flight));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

Completion Gateway::sample_with_retry(const CompletionRequest& request,
                                      CompletionProvider& provider, int index) {
  std::string key;
  if (config_.cache_dir) {
    key = cache_key(request, index);
    if (auto hit = cache_lookup(key)) {
      std::lock_guard lock(mutex_);
      ++stats_.cache_hits;
      return *hit;
    }
  }

  for (int attempt = 0;; ++attempt) {
    {
      std::unique_lock lock(mutex_);
      slot_free_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
      if (config_.request_budget > 0 && stats_.provider_calls >= config_.request_budget) {
        throw BudgetExceeded("request budget of " + std::to_string(config_.request_budget) +
                             " provider calls exhausted");
      }
      ++in_flight_;
      ++stats_.provider_calls;
      stats_.peak_in_flight = std::max(stats_.peak_in_flight, in_flight_);
    }
    auto release = [&] {
      {
        std::lock_guard lock(mutex_);
        --in_flight_;
      }
      slot_free_.notify_one();
    };

    Completion completion;
    try {
      completion = provider.sample(request, index);
    } catch (const TransientProviderError& e) {
      release();
      if (attempt >= config_.retry_limit) {
        throw ProviderExhausted(provider.id(), "gave up after " + std::to_string(attempt + 1) +
                                                   " attempts: " + e.what());
      }
      {
        std::lock_guard lock(mutex_);
        ++stats_.retries;
      }
      sleeper_(std::chrono::milliseconds(static_cast<long long>(config_.backoff_base_ms)
                                         << attempt));
      continue;
    } catch (...) {
      release();
      throw;
    }
    release();
    if (completion.finish_reason == FinishReason::Error) completion.text.clear();
    if (config_.cache_dir && completion.finish_reason != FinishReason::Error) {
      cache_store(key, completion);
    }
    return completion;
  }
}

std::optional<Completion> Gateway::cache_lookup(const std::string& key) const {
  const auto path = *config_.cache_dir / key.substr(0, 2) / (key + ".json");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    const auto j = json::parse(read_file(path));
    Completion c;
    c.text = j.at("text").get<std::string>();
    c.finish_reason = parse_finish_reason(j.at("finish_reason").get<std::string>());
    c.provider_meta = j.value("provider_meta", std::map<std::string, std::string>{});
    return c;
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entry behaves as a miss and is rewritten
  }
}

void Gateway::cache_store(const std::string& key, const Completion& completion) const {
  const json j{{"text", completion.text},
               {"finish_reason", std::string(to_string(completion.finish_reason))},
               {"provider_meta", completion.provider_meta}};
  write_file_atomic(*config_.cache_dir / key.substr(0, 2) / (key + ".json"), j.dump() + "\n");
}

}  // namespace herald

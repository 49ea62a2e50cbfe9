#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "herald/gateway.hpp"

namespace herald {

// Offline stand-ins for the model roles. They are test scaffolding: each one
// reads the tagged blocks that the pipeline's prompts carry (<informal>,
// <formal>, <original>, <candidate>, <task>, <strategy>, <step ...>) and
// answers as a pure function of (prompt, sample index, model id).

using Responder =
    std::function<std::string(std::string_view prompt, int sample_index, std::string_view model_id)>;

class MockProvider final : public CompletionProvider {
 public:
  MockProvider(std::string name, Responder responder)
      : name_(std::move(name)), responder_(std::move(responder)) {}

  std::string id() const override { return "mock:" + name_; }
  Completion sample(const CompletionRequest& request, int sample_index) override {
    return Completion{responder_(request.prompt_text, sample_index, request.model_id),
                      FinishReason::Stop,
                      {{"provider", id()}}};
  }

 private:
  std::string name_;
  Responder responder_;
};

/// Whitespace-collapsed, lowercased binders + conclusion of a formal
/// statement with its name and body removed.
std::string canonical_formal_form(std::string_view formal_text);

std::string mock_translate(std::string_view prompt, int sample_index, std::string_view model_id);
std::string mock_back_translate(std::string_view prompt, int sample_index,
                                std::string_view model_id);
std::string mock_nli_judge(std::string_view prompt, int sample_index, std::string_view model_id);
std::string mock_informalize(std::string_view prompt, int sample_index,
                             std::string_view model_id);

/// Responder for a named role; unknown roles get the informalizer.
Responder mock_responder_for(std::string_view role);

}  // namespace herald

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "herald/dataset.hpp"
#include "herald/gateway.hpp"

namespace herald {

struct EmbeddingBinding {
  std::string provider = "mock";  // "mock" or "openai"
  long dim = 64;
  std::uint64_t seed = 0;
  std::string model_id;
  std::string base_url;
};

struct CompilerBinding {
  std::string backend = "mock";        // "mock" or "repl"
  std::vector<std::string> command;    // argv of the REPL driver
};

struct PipelineConfig {
  // paths
  std::optional<std::filesystem::path> corpus_export;
  std::optional<std::filesystem::path> template_registry;
  std::optional<std::filesystem::path> tactic_notes;
  std::optional<std::filesystem::path> example_store;
  std::filesystem::path output_dir = "herald-out";

  std::map<std::string, RoleBinding> roles;  // translator, back_translator, nli_judge, informalizer
  EmbeddingBinding embedding;
  CompilerBinding compiler;
  GatewayConfig gateway;

  // knobs
  int retrieval_k = 1;
  int neighbor_limit = 3;
  int batch_size = 16;
  int pass_k = 128;
  std::size_t prompt_budget_chars = 0;
  std::uint64_t dedup_seed = 0;
  std::uint64_t mix_seed = 0;
  long compile_timeout_ms = 60'000;
  std::string header_prelude = "import Mathlib\n";
  bool short_circuit = true;
  int candidate_cap = 8;
  Ratio3 provenance_ratio{1, 2, 1};
  Ratio3 direction_ratio{2, 2, 1};
  std::vector<std::string> strategies;  // augmentation strategy tags; empty = defaults

  /// Defaults: every role bound to the mock provider.
  PipelineConfig();

  /// Knob ranges and binding sanity; throws InvalidInput.
  void validate() const;

  /// Throws InvalidInput naming the first referenced input path that does not exist.
  void check_paths() const;

  /// Canonical JSON (sorted keys). `digest()` hashes exactly this text.
  std::string to_json() const;
  std::string digest() const;

  const RoleBinding& role(std::string_view name) const;
};

/// Missing keys keep their defaults; unknown keys are rejected so typos
/// surface. Relative paths resolve against `base_dir`.
PipelineConfig parse_config(std::string_view json_text,
                            const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Resolves every role binding into a provider.
BoundRole bind_role(const PipelineConfig& config, std::string_view role);

}  // namespace herald

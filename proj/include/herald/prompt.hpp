#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "herald/corpus.hpp"
#include "herald/depgraph.hpp"
#include "herald/retrieval.hpp"

namespace herald {

struct DependentTranslation {
  std::string full_name;
  int level = 0;
  std::string informal_text;
};

// Retrieved exemplar copied out of the store so contexts own their data.
struct RetrievedExample {
  std::string id;
  std::string formal_text;
  std::string informal_text;
  double score = 0.0;

  static RetrievedExample from(const ScoredExample& s) {
    return {s.example->id, s.example->formal_text, s.example->informal_text, s.score};
  }
};

struct StatementContext {
  DeclarationRecord subject;
  std::string head_statements;
  std::vector<DependentTranslation> dependent_translations;
  NeighborSet neighbors;
  std::map<std::string, std::string> neighbor_signatures;  // name -> signature
  std::vector<RetrievedExample> retrieved;
};

struct ProofContext {
  std::string formal_statement;
  std::string informal_statement;
  std::vector<ProofStep> steps;
  std::map<std::string, std::string> tactic_notes;
};

struct TemplateSegment {
  enum class Kind { Literal, Placeholder };
  Kind kind = Kind::Literal;
  std::string text;     // literal text, or the field name of a placeholder
  std::string heading;  // emitted before a non-empty placeholder value
  bool required = false;
};

struct PromptTemplate {
  std::string id;
  std::set<std::string> applies_to;  // DeclKind names, "proof", or "proof_summary"
  std::vector<TemplateSegment> segments;
  std::vector<std::string> principles;
};

inline constexpr std::string_view kProofTarget = "proof";
inline constexpr std::string_view kProofSummaryTarget = "proof_summary";
inline constexpr std::string_view kRegistrySchemaVersion = "1";

class TemplateRegistry {
 public:
  /// Parses and validates a registry document (schema_version "1").
  static TemplateRegistry parse(std::string_view json_text);
  static TemplateRegistry load(const std::filesystem::path& path);

  const std::vector<PromptTemplate>& templates() const noexcept { return templates_; }
  const std::string& default_id() const noexcept { return default_id_; }
  const PromptTemplate* find(std::string_view id) const;

 private:
  std::vector<PromptTemplate> templates_;
  std::string default_id_;
};

/// Most specific template (smallest applies_to) listing `target`; the
/// registry default otherwise. Throws NoTemplate if neither exists.
const PromptTemplate& select_template(std::string_view target, const TemplateRegistry& registry);
const PromptTemplate& select_template(DeclKind kind, const TemplateRegistry& registry);

struct RenderedPrompt {
  std::string text;
  std::string template_id;
  std::string context_digest;
  std::vector<std::string> dropped;  // context parts removed to fit the budget
};

/// `max_chars` = 0 disables budgeting. Over budget, neighbors are dropped
/// first (last one first), then head statements; dependency translations and
/// the subject are always kept.
RenderedPrompt assemble_statement_prompt(const StatementContext& ctx,
                                         const TemplateRegistry& registry,
                                         std::size_t max_chars = 0);

RenderedPrompt assemble_proof_prompt(const ProofContext& ctx, const TemplateRegistry& registry);

/// Throws LengthMismatch unless there is one translation per step.
RenderedPrompt summarize_steps_prompt(const std::vector<std::string>& stepwise_translations,
                                      const ProofContext& ctx, const TemplateRegistry& registry);

/// Leading tactic keyword of a proof line, e.g. "rw" for "rw [foo] at h".
std::string tactic_name(std::string_view tactic_text);

/// Renders hypotheses then goals ("⊢ goal"), or "no goals".
std::string render_state(const ProofState& state);

std::map<std::string, std::string> load_tactic_notes(const std::filesystem::path& path);

/// Collects the statement context for `subject`: translations of its
/// lower-level dependencies, neighbors, and retrieved exemplars.
StatementContext build_statement_context(const DeclarationRecord& subject,
                                         const CorpusIndex& index,
                                         const LevelAssignment& levels,
                                         const std::map<std::string, std::string>& translations,
                                         int neighbor_limit,
                                         std::vector<RetrievedExample> retrieved = {});

}  // namespace herald

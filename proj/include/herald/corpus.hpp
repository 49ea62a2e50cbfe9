#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace herald {

enum class DeclKind {
  Theorem,
  Instance,
  Definition,
  Structure,
  Class,
  Inductive,
  ClassInductive,
  Opaque,
};

std::string_view to_string(DeclKind kind);
std::optional<DeclKind> parse_decl_kind(std::string_view text);

struct LineSpan {
  int start = 1;
  int end = 1;
  bool operator==(const LineSpan&) const = default;
};

struct DeclarationRecord {
  std::string full_name;
  DeclKind kind = DeclKind::Theorem;
  std::string signature;
  std::optional<std::string> docstring;
  std::vector<std::string> namespace_path;
  std::string file_path;
  LineSpan line_span;
  std::set<std::string> dependencies;
  bool is_tactic_proof = false;

  bool operator==(const DeclarationRecord&) const = default;
};

struct Hypothesis {
  std::string name;
  std::string type_expr;
  bool operator==(const Hypothesis&) const = default;
};

struct ProofState {
  std::vector<Hypothesis> hypotheses;
  std::vector<std::string> goals;  // empty when the state is closed
  bool operator==(const ProofState&) const = default;
};

struct ProofStep {
  std::string tactic_text;
  ProofState state_before;
  ProofState state_after;
  int step_index = 0;
  bool operator==(const ProofStep&) const = default;
};

struct NeighborSet {
  std::vector<std::string> same_namespace;
  std::vector<std::string> same_file;
  std::vector<std::string> name_prefix_shared;
  bool operator==(const NeighborSet&) const = default;
};

// Immutable view of one ingested corpus. Construction validates every
// cross-record invariant; afterwards the index is only read.
class CorpusIndex {
 public:
  using DeclarationMap = std::map<std::string, DeclarationRecord>;
  using ProofMap = std::map<std::string, std::vector<ProofStep>>;
  using TextMap = std::map<std::string, std::string>;

  CorpusIndex() = default;
  // Throws DuplicateDeclaration or InvalidInput when invariants fail.
  CorpusIndex(std::vector<DeclarationRecord> declarations, ProofMap proofs,
              TextMap head_statements, TextMap file_headers = {});

  const DeclarationMap& declarations() const noexcept { return declarations_; }
  const ProofMap& proofs() const noexcept { return proofs_; }
  const TextMap& head_statements() const noexcept { return head_statements_; }
  // Per-file import/open preamble; used when emitting standalone statements.
  const TextMap& file_headers() const noexcept { return file_headers_; }
  // Dangling dependency notes collected at construction.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  const DeclarationRecord& at(const std::string& full_name) const;
  const DeclarationRecord* find(const std::string& full_name) const;
  const std::vector<ProofStep>* proof_of(const std::string& full_name) const;

  bool operator==(const CorpusIndex& other) const {
    return declarations_ == other.declarations_ && proofs_ == other.proofs_ &&
           head_statements_ == other.head_statements_ && file_headers_ == other.file_headers_;
  }

 private:
  DeclarationMap declarations_;
  ProofMap proofs_;
  TextMap head_statements_;
  TextMap file_headers_;
  std::vector<std::string> warnings_;
};

inline constexpr std::string_view kExportSchemaVersion = "1";

/// Parses a versioned jixia-style JSON export. Errors carry the JSON path of
/// the offending value.
CorpusIndex parse_jixia_export(std::string_view raw_json);

/// Canonical JSON rendering of an index (schema_version "1", sorted keys,
/// declarations ordered by full_name). Re-parses to an equal index.
std::string serialize(const CorpusIndex& index);

struct ScanResult {
  std::vector<DeclarationRecord> declarations;
  std::vector<std::string> diagnostics;  // skipped or unparseable regions
  std::string module_doc;                // concatenated `/-! ... -/` blocks
  std::string header;                    // import / open lines, in order
};

/// Best-effort header scanner for Lean 4 source. Dependencies stay empty.
ScanResult scan_declarations(std::string_view lean_source, std::string_view file_path = "");

/// Declaration header split into its parts, e.g. for
/// "theorem t (p : Prop) : p" -> keyword "theorem", name "t",
/// binders {"(p : Prop)"}, conclusion "p".
struct HeaderParts {
  std::string keyword;
  std::string name;
  std::vector<std::string> binders;
  std::string conclusion;
};
std::optional<HeaderParts> parse_header(std::string_view signature);

NeighborSet resolve_neighbors(const std::string& subject, const CorpusIndex& index, int limit);

}  // namespace herald

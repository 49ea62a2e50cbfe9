#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "herald/compiler.hpp"
#include "herald/gateway.hpp"

namespace herald {

enum class CompileStatus { Pass, Fail, Skipped };
enum class NliVerdict { Accept, Reject, Skipped };

std::string_view to_string(CompileStatus s);
std::string_view to_string(NliVerdict v);

struct CandidateResult {
  std::string candidate_text;
  CompileStatus compile = CompileStatus::Skipped;
  std::string diagnostic;  // compile diagnostic when compile = Fail
  std::optional<std::string> back_translation;
  NliVerdict nli = NliVerdict::Skipped;
  bool nli_parse_failure = false;
  bool final = false;  // compile = Pass and nli = Accept

  bool operator==(const CandidateResult&) const = default;
};

struct ValidationReport {
  std::string item_id;
  int k = 0;
  std::vector<CandidateResult> candidates;  // index order; truncated after the first final one when short-circuiting
  bool success = false;
  bool short_circuit = true;
  long nli_parse_failures = 0;

  std::string to_json_line() const;
  static ValidationReport from_json_line(std::string_view line);
  bool operator==(const ValidationReport&) const = default;
};

struct BenchmarkSummary {
  std::string dataset_name;
  long total = 0;
  long succeeded = 0;
  double accuracy = 0.0;
  int k = 0;

  std::string to_json() const;
  std::string to_table() const;
};

struct BenchmarkItem {
  std::string id;
  std::string informal_text;
  std::optional<std::string> header;  // replaces the default prelude for this item
};

/// JSONL of {id, informal_text, header?}. Throws SchemaError naming the line.
std::vector<BenchmarkItem> read_benchmark(std::string_view jsonl);

struct ValidationRoles {
  Gateway& gateway;
  const BoundRole& translator;
  const BoundRole& back_translator;
  const BoundRole& nli_judge;
};

struct ValidatorOptions {
  std::string header_prelude = std::string(kDefaultHeaderPrelude);
  long timeout_ms = kDefaultCompileTimeout.count();
  bool short_circuit = true;
  int candidate_cap = 8;  // candidates checked concurrently per item
};

std::string translation_prompt(std::string_view informal);
std::string back_translation_prompt(std::string_view formal);
std::string nli_prompt(std::string_view original_nl, std::string_view back_nl);

/// Verdict token contract: exactly one of ACCEPT / REJECT must occur as a
/// word. Anything else is a reject with `parse_failure` set.
NliVerdict parse_verdict(std::string_view reply, bool& parse_failure);

/// Throws InvalidInput on empty input, ProviderExhausted from the gateway.
std::string back_translate(std::string_view formal_text, Gateway& gateway, const BoundRole& role);

NliVerdict nli_check(std::string_view original_nl, std::string_view back_nl, Gateway& gateway,
                     const BoundRole& role, bool* parse_failure = nullptr);

/// Samples k translations, then runs compile -> back-translate -> NLI per
/// candidate in windows of `candidate_cap`. BackendUnavailable propagates.
ValidationReport validate_item(const BenchmarkItem& item, int k, const ValidationRoles& roles,
                               CompilerBackend& backend, const ValidatorOptions& options = {});

/// Any final candidate among the first `k` (a report truncated by
/// short-circuiting still answers correctly).
bool success_at(const ValidationReport& report, int k);

/// Throws InvalidInput on an empty list and MixedK when k differs.
BenchmarkSummary summarize(const std::vector<ValidationReport>& reports, std::string dataset_name);

}  // namespace herald

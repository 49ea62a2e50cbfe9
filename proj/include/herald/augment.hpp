#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "herald/compiler.hpp"
#include "herald/corpus.hpp"
#include "herald/error.hpp"
#include "herald/dataset.hpp"
#include "herald/gateway.hpp"
#include "herald/rng.hpp"

namespace herald {

struct SynthesizedStatement {
  std::string name;         // "<origin>_tac_<step>", plus "_g<goal>" past the first goal
  std::string formal_text;  // single declaration ending in "by sorry"
  std::string origin;
  int origin_step = 0;
  int goal_index = 0;
  std::string preamble;     // origin file's imports and opens, replayed before compiling

  bool operator==(const SynthesizedStatement&) const = default;
};

/// One theorem per goal: hypotheses become binders in order, the goal the
/// conclusion, the body `by sorry`. Anonymous instances render as `[T]`,
/// other inaccessible names (containing "✝") as fresh h1, h2, ....
/// A closed state yields an empty list.
std::vector<SynthesizedStatement> synthesize_from_state(const ProofState& state,
                                                        const std::string& origin, int step,
                                                        const std::string& preamble = {});

/// Every state_before of every step of one proof, in step order.
std::vector<SynthesizedStatement> synthesize_from_proof(const std::vector<ProofStep>& steps,
                                                        const std::string& origin,
                                                        const std::string& preamble = {});

struct RejectedCandidate {
  SynthesizedStatement candidate;
  std::string diagnostic;
};

struct CompileFilterResult {
  std::vector<SynthesizedStatement> valid;
  std::vector<RejectedCandidate> rejected;
};

struct CompileFilterOptions {
  long timeout_ms = kDefaultCompileTimeout.count();
  std::string fallback_prelude = std::string(kDefaultHeaderPrelude);  // used when a candidate has no preamble
  int parallelism = 4;
};

/// Exhaustive partition in input order. Throws BackendUnavailable.
CompileFilterResult compile_filter(const std::vector<SynthesizedStatement>& candidates,
                                   CompilerBackend& backend,
                                   const CompileFilterOptions& options = {});

/// Uniform sample without replacement of min(n_original, size) items,
/// kept in input order; a pure function of (input, n_original, seed).
template <typename T>
std::vector<T> dedup_sample(std::span<const T> augmented, long n_original, std::uint64_t seed) {
  if (n_original < 0) throw InvalidInput("n_original must be >= 0");
  SeededRng rng(seed);
  std::vector<T> out;
  for (auto i : sample_indices(rng, augmented.size(), static_cast<std::size_t>(n_original))) {
    out.push_back(augmented[i]);
  }
  return out;
}

enum class StrategyKind {
  LogicalEquivalenceRewriting,
  AbstractConceptSubstitution,
  OmissionOfImplicitCondition,
  MultiLinguisticTranslation,
};

enum class Language { Zh, Fr, Ru };

struct AugmentationStrategy {
  StrategyKind kind = StrategyKind::LogicalEquivalenceRewriting;
  Language language = Language::Zh;  // meaningful for MultiLinguisticTranslation only

  /// "logical_equivalence_rewriting", ..., "multi_linguistic_translation:zh".
  std::string tag() const;
  static AugmentationStrategy parse(std::string_view tag);
  bool operator==(const AugmentationStrategy&) const = default;
};

/// The four families, translation into Chinese.
std::vector<AugmentationStrategy> default_strategies();

struct NLVariant {
  std::string origin_pair_id;
  AugmentationStrategy strategy;
  std::string informal_text;
};

struct VariantBatch {
  std::vector<NLVariant> variants;
  long attempted = 0;
  long kept = 0;
  long dropped = 0;  // empty or identical to the original after normalisation
};

std::string augmentation_prompt(const NLFLPair& pair, const AugmentationStrategy& strategy);

/// One informalizer call per strategy. Throws ProviderExhausted.
VariantBatch informal_variants(const NLFLPair& pair,
                               std::span<const AugmentationStrategy> strategies,
                               Gateway& gateway, const BoundRole& informalizer);

/// Dataset record for a variant: same formal text, provenance informal_aug.
NLFLPair variant_pair(const NLFLPair& origin, const NLVariant& variant);

}  // namespace herald

#include "herald/augment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "herald/error.hpp"
#include "herald/text.hpp"

namespace herald {

namespace {

constexpr std::string_view kInaccessible = "✝";

bool inaccessible(const std::string& name) { return name.find(kInaccessible) != std::string::npos; }

std::string binder_for(const Hypothesis& h, const std::string& name) {
  const auto type = collapse_whitespace(h.type_expr);
  if (type.size() >= 2 && type.front() == '[' && type.back() == ']') return type;
  if (name.empty()) return "[" + type + "]";
  return "(" + name + " : " + type + ")";
}

}  // namespace

std::vector<SynthesizedStatement> synthesize_from_state(const ProofState& state,
                                                        const std::string& origin, int step,
                                                        const std::string& preamble) {
  if (state.goals.empty()) return {};

  std::set<std::string> taken;
  for (const auto& h : state.hypotheses) {
    for (const auto& n : split(h.name, ' ')) {
      if (!n.empty() && !inaccessible(n)) taken.insert(n);
    }
  }
  int fresh = 0;
  std::vector<std::string> binders;
  for (const auto& h : state.hypotheses) {
    std::vector<std::string> names;
    bool instance = false;
    for (const auto& n : split(collapse_whitespace(h.name), ' ')) {
      if (n.empty()) continue;
      if (!inaccessible(n)) {
        names.push_back(n);
      } else if (n.starts_with("inst")) {
        instance = true;
      } else {
        std::string candidate;
        do {
          candidate = "h" + std::to_string(++fresh);
        } while (taken.count(candidate));
        taken.insert(candidate);
        names.push_back(candidate);
      }
    }
    if (instance && names.empty()) {
      binders.push_back(binder_for(h, {}));
    } else {
      binders.push_back(binder_for(h, join(names, " ")));
    }
  }

  std::vector<SynthesizedStatement> out;
  for (std::size_t g = 0; g < state.goals.size(); ++g) {
    SynthesizedStatement s;
    s.origin = origin;
    s.origin_step = step;
    s.goal_index = static_cast<int>(g);
    s.preamble = preamble;
    s.name = origin + "_tac_" + std::to_string(step);
    if (g > 0) s.name += "_g" + std::to_string(g);
    s.formal_text = "theorem " + s.name;
    for (const auto& b : binders) s.formal_text += " " + b;
    s.formal_text += " : " + collapse_whitespace(state.goals[g]) + " := by sorry";
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SynthesizedStatement> synthesize_from_proof(const std::vector<ProofStep>& steps,
                                                        const std::string& origin,
                                                        const std::string& preamble) {
  std::vector<SynthesizedStatement> out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    for (auto& s : synthesize_from_state(steps[i].state_before, origin, static_cast<int>(i), preamble)) {
      out.push_back(std::move(s));
    }
  }
  return out;
}

CompileFilterResult compile_filter(const std::vector<SynthesizedStatement>& candidates,
                                   CompilerBackend& backend, const CompileFilterOptions& options) {
  std::vector<std::optional<CompileOutcome>> outcomes(candidates.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    const auto workers = std::min<std::size_t>(std::max(options.parallelism, 1), candidates.size());
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < candidates.size(); i = next++) {
          try {
            const auto& c = candidates[i];
            const auto& prelude = c.preamble.empty() ? options.fallback_prelude : c.preamble;
            outcomes[i] = compile_check(c.formal_text, backend, options.timeout_ms, prelude);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = candidates.size();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);

  CompileFilterResult result;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (outcomes[i]->ok) {
      result.valid.push_back(candidates[i]);
    } else {
      result.rejected.push_back({candidates[i], outcomes[i]->diagnostic});
    }
  }
  return result;
}

std::string AugmentationStrategy::tag() const {
  switch (kind) {
    case StrategyKind::LogicalEquivalenceRewriting: return "logical_equivalence_rewriting";
    case StrategyKind::AbstractConceptSubstitution: return "abstract_concept_substitution";
    case StrategyKind::OmissionOfImplicitCondition: return "omission_of_implicit_condition";
    case StrategyKind::MultiLinguisticTranslation: {
      const char* lang = language == Language::Zh ? "zh" : language == Language::Fr ? "fr" : "ru";
      return std::string("multi_linguistic_translation:") + lang;
    }
  }
  return "?";
}

AugmentationStrategy AugmentationStrategy::parse(std::string_view tag) {
  for (auto k : {StrategyKind::LogicalEquivalenceRewriting, StrategyKind::AbstractConceptSubstitution,
                 StrategyKind::OmissionOfImplicitCondition}) {
    AugmentationStrategy s{k, Language::Zh};
    if (s.tag() == tag) return s;
  }
  for (auto l : {Language::Zh, Language::Fr, Language::Ru}) {
    AugmentationStrategy s{StrategyKind::MultiLinguisticTranslation, l};
    if (s.tag() == tag) return s;
  }
  throw InvalidInput("unknown augmentation strategy '" + std::string(tag) + "'");
}

std::vector<AugmentationStrategy> default_strategies() {
  return {{StrategyKind::LogicalEquivalenceRewriting, Language::Zh},
          {StrategyKind::AbstractConceptSubstitution, Language::Zh},
          {StrategyKind::OmissionOfImplicitCondition, Language::Zh},
          {StrategyKind::MultiLinguisticTranslation, Language::Zh}};
}

std::string augmentation_prompt(const NLFLPair& pair, const AugmentationStrategy& strategy) {
  std::string instruction;
  switch (strategy.kind) {
    case StrategyKind::LogicalEquivalenceRewriting:
      instruction = "Rewrite the statement in a logically equivalent form, for example by "
                    "reordering hypotheses and conclusion.";
      break;
    case StrategyKind::AbstractConceptSubstitution:
      instruction = "Restate it by replacing a concept with an equivalent, more abstract one.";
      break;
    case StrategyKind::OmissionOfImplicitCondition:
      instruction = "Restate it leaving out conditions a mathematician would take as implicit.";
      break;
    case StrategyKind::MultiLinguisticTranslation:
      instruction = "Translate the statement into the language given by the strategy code.";
      break;
  }
  return tagged("task", "augment") + "\n" + tagged("strategy", strategy.tag()) + "\n\n" +
         instruction + " Keep the mathematical meaning unchanged and answer with the new "
                       "statement only.\n\n" +
         tagged("formal", pair.formal_text) + "\n" + tagged("informal", pair.informal_text) + "\n";
}

VariantBatch informal_variants(const NLFLPair& pair,
                               std::span<const AugmentationStrategy> strategies,
                               Gateway& gateway, const BoundRole& informalizer) {
  if (trim(pair.formal_text).empty() || trim(pair.informal_text).empty()) {
    throw InvalidInput("pair " + pair.id + " needs both texts for augmentation");
  }
  VariantBatch batch;
  const auto original = loose_form(pair.informal_text);
  for (const auto& strategy : strategies) {
    ++batch.attempted;
    auto completions =
        gateway.complete(informalizer.request(augmentation_prompt(pair, strategy)), *informalizer.provider);
    auto text = trim(completions.front().text);
    if (text.empty() || loose_form(text) == original) {
      ++batch.dropped;
      continue;
    }
    batch.variants.push_back({pair.id, strategy, std::move(text)});
    ++batch.kept;
  }
  return batch;
}

NLFLPair variant_pair(const NLFLPair& origin, const NLVariant& variant) {
  auto p = origin;
  auto tag = variant.strategy.tag();
  std::replace(tag.begin(), tag.end(), ':', '_');
  p.id = origin.id + "__" + tag;
  p.informal_text = variant.informal_text;
  p.provenance = Provenance::InformalAug;
  p.direction = Direction::NlToFl;
  return p;
}

}  // namespace herald

#include "herald/mock_roles.hpp"

#include <regex>
#include <vector>

#include "herald/corpus.hpp"
#include "herald/digest.hpp"
#include "herald/text.hpp"

namespace herald {

namespace {

std::uint64_t mix_hash(std::string_view a, int index, std::string_view model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  feed(a);
  feed(std::to_string(index));
  feed(model);
  return h;
}

std::string strip_body(std::string_view formal) {
  // Drop everything from the first top-level ":=".
  int depth = 0;
  for (std::size_t i = 0; i + 1 < formal.size(); ++i) {
    const char c = formal[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (depth == 0 && c == ':' && formal[i + 1] == '=') return trim(formal.substr(0, i));
  }
  return trim(formal);
}

std::string lower_first(std::string s) {
  if (!s.empty() && s[0] >= 'A' && s[0] <= 'Z') s[0] = static_cast<char>(s[0] - 'A' + 'a');
  return s;
}

std::string strip_final_period(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == ' ')) s.pop_back();
  return s;
}

std::string rewrite_for_strategy(const std::string& strategy, const std::string& informal) {
  const auto text = collapse_whitespace(informal);
  if (strategy == "logical_equivalence_rewriting") {
    static const std::regex if_then(R"(^[Ii]f (.+?), then (.+?)\.?$)");
    std::smatch m;
    if (std::regex_match(text, m, if_then)) return m[2].str() + " whenever " + m[1].str();
    return "Equivalently, " + lower_first(text);
  }
  if (strategy == "abstract_concept_substitution") {
    static const std::vector<std::pair<std::regex, std::string>> concepts{
        {std::regex(R"(\binvertible\b)"), "nonsingular"},
        {std::regex(R"(\bbijective\b)"), "an isomorphism of sets"},
        {std::regex(R"(\bprime number\b)"), "irreducible element of the integers"},
    };
    static const std::regex two_sided_inverse(R"(^(?:The )?(?:square )?matrix (\$?\w+\$?) has a two-sided inverse\.?$)");
    std::smatch m;
    if (std::regex_match(text, m, two_sided_inverse)) return m[1].str() + " is nonsingular";
    for (const auto& [pattern, replacement] : concepts) {
      if (std::regex_search(text, pattern)) return std::regex_replace(text, pattern, replacement);
    }
    return "In more abstract terms: " + lower_first(text);
  }
  if (strategy == "omission_of_implicit_condition") {
    const auto comma = text.find(", ");
    if ((text.starts_with("For any") || text.starts_with("Let") || text.starts_with("Suppose")) &&
        comma != std::string::npos && comma + 2 < text.size()) {
      auto rest = text.substr(comma + 2);
      if (!rest.empty() && rest[0] >= 'a' && rest[0] <= 'z') {
        rest[0] = static_cast<char>(rest[0] - 'a' + 'A');
      }
      return rest;
    }
    return "Informally, " + lower_first(text);
  }
  if (strategy.starts_with("multi_linguistic_translation:")) {
    const auto lang = strategy.substr(strategy.find(':') + 1);
    return "[" + lang + "] " + text;
  }
  return "Restated: " + text;
}

}  // namespace

std::string canonical_formal_form(std::string_view formal_text) {
  const auto header = strip_body(formal_text);
  if (const auto parts = parse_header(header); parts && !parts->conclusion.empty()) {
    auto body = join(parts->binders, " ");
    if (!body.empty()) body += " ";
    body += parts->conclusion;
    return loose_form(body);
  }
  return loose_form(header);
}

std::string mock_translate(std::string_view prompt, int sample_index, std::string_view model_id) {
  const auto informal = strip_final_period(
      collapse_whitespace(extract_tagged(prompt, "informal").value_or(std::string(prompt))));
  const auto h = mix_hash(digest(prompt), sample_index, model_id);
  const auto name = "candidate_" + std::to_string(sample_index);
  switch (h % 4) {
    case 1: return "theorem " + name + " : := by";
    case 2: return "theorem " + name + " : True := by sorry";
    default: return "theorem " + name + " : " + informal + " := by sorry";
  }
}

std::string mock_back_translate(std::string_view prompt, int, std::string_view) {
  const auto formal = extract_tagged(prompt, "formal").value_or(std::string(prompt));
  return canonical_formal_form(formal);
}

std::string mock_nli_judge(std::string_view prompt, int, std::string_view) {
  const auto original =
      strip_final_period(loose_form(extract_tagged(prompt, "original").value_or("")));
  const auto candidate =
      strip_final_period(loose_form(extract_tagged(prompt, "candidate").value_or("")));
  if (original.empty() || candidate.empty()) return "REJECT";
  const bool contained = original.find(candidate) != std::string::npos ||
                         candidate.find(original) != std::string::npos;
  return contained ? "ACCEPT" : "REJECT";
}

std::string mock_informalize(std::string_view prompt, int, std::string_view) {
  const auto task = extract_tagged(prompt, "task").value_or("informalize-statement");

  if (task == "augment") {
    return rewrite_for_strategy(extract_tagged(prompt, "strategy").value_or(""),
                                extract_tagged(prompt, "informal").value_or(""));
  }

  if (task == "informalize-proof-steps") {
    std::string out;
    const auto steps = extract_indexed(prompt, "step");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      std::string tactic = "the next tactic";
      if (const auto t = steps[i].find("Tactic: "); t != std::string::npos) {
        tactic = trim(steps[i].substr(t + 8, steps[i].find('\n', t) - t - 8));
      }
      out += "<step index=\"" + std::to_string(i) + "\">\nWe apply " + tactic +
             " to advance the proof.\n</step>\n";
    }
    return out;
  }

  if (task == "summarize-proof") {
    std::vector<std::string> parts;
    for (const auto& t : extract_indexed(prompt, "translation")) {
      parts.push_back(collapse_whitespace(t));
    }
    return "Proof. " + join(parts, " ") + " This completes the proof.";
  }

  const auto formal = extract_tagged(prompt, "formal").value_or("");
  if (const auto parts = parse_header(strip_body(formal)); parts && !parts->conclusion.empty()) {
    const auto subject = parts->name.empty() ? std::string("this statement") : parts->name;
    if (parts->binders.empty()) {
      return "Statement " + subject + ": we have " + collapse_whitespace(parts->conclusion) + ".";
    }
    return "Statement " + subject + ": for " + collapse_whitespace(join(parts->binders, ", ")) +
           ", we have " + collapse_whitespace(parts->conclusion) + ".";
  }
  return "Informal rendering of: " + collapse_whitespace(formal.empty() ? prompt : formal);
}

Responder mock_responder_for(std::string_view role) {
  if (role == kRoleTranslator) return mock_translate;
  if (role == kRoleBackTranslator) return mock_back_translate;
  if (role == kRoleNliJudge) return mock_nli_judge;
  return mock_informalize;
}

}  // namespace herald

#include "herald/validator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "herald/error.hpp"
#include "herald/text.hpp"

namespace herald {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(CompileStatus s) {
  switch (s) {
    case CompileStatus::Pass: return "pass";
    case CompileStatus::Fail: return "fail";
    case CompileStatus::Skipped: return "skipped";
  }
  return "?";
}

std::string_view to_string(NliVerdict v) {
  switch (v) {
    case NliVerdict::Accept: return "accept";
    case NliVerdict::Reject: return "reject";
    case NliVerdict::Skipped: return "skipped";
  }
  return "?";
}

namespace {

CompileStatus parse_compile_status(const std::string& s) {
  for (auto c : {CompileStatus::Pass, CompileStatus::Fail, CompileStatus::Skipped}) {
    if (to_string(c) == s) return c;
  }
  throw InvalidInput("unknown compile status '" + s + "'");
}

NliVerdict parse_nli(const std::string& s) {
  for (auto v : {NliVerdict::Accept, NliVerdict::Reject, NliVerdict::Skipped}) {
    if (to_string(v) == s) return v;
  }
  throw InvalidInput("unknown nli verdict '" + s + "'");
}

bool has_word(std::string_view text, std::string_view word) {
  const auto is_word = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  };
  for (auto pos = text.find(word); pos != std::string_view::npos; pos = text.find(word, pos + 1)) {
    const bool left = pos == 0 || !is_word(text[pos - 1]);
    const auto end = pos + word.size();
    const bool right = end == text.size() || !is_word(text[end]);
    if (left && right) return true;
  }
  return false;
}

}  // namespace

std::string ValidationReport::to_json_line() const {
  ordered_json cands = ordered_json::array();
  for (const auto& c : candidates) {
    ordered_json j;
    j["candidate_text"] = c.candidate_text;
    j["compile"] = to_string(c.compile);
    j["diagnostic"] = c.diagnostic;
    j["back_translation"] = c.back_translation ? ordered_json(*c.back_translation) : ordered_json();
    j["nli"] = to_string(c.nli);
    j["nli_parse_failure"] = c.nli_parse_failure;
    j["final"] = c.final;
    cands.push_back(std::move(j));
  }
  ordered_json j;
  j["item_id"] = item_id;
  j["k"] = k;
  j["success"] = success;
  j["short_circuit"] = short_circuit;
  j["nli_parse_failures"] = nli_parse_failures;
  j["candidates"] = std::move(cands);
  return j.dump();
}

ValidationReport ValidationReport::from_json_line(std::string_view line) {
  try {
    const auto j = json::parse(line);
    ValidationReport r;
    r.item_id = j.at("item_id").get<std::string>();
    r.k = j.at("k").get<int>();
    r.success = j.at("success").get<bool>();
    r.short_circuit = j.at("short_circuit").get<bool>();
    r.nli_parse_failures = j.at("nli_parse_failures").get<long>();
    for (const auto& c : j.at("candidates")) {
      CandidateResult cr;
      cr.candidate_text = c.at("candidate_text").get<std::string>();
      cr.compile = parse_compile_status(c.at("compile").get<std::string>());
      cr.diagnostic = c.at("diagnostic").get<std::string>();
      if (!c.at("back_translation").is_null()) cr.back_translation = c["back_translation"].get<std::string>();
      cr.nli = parse_nli(c.at("nli").get<std::string>());
      cr.nli_parse_failure = c.at("nli_parse_failure").get<bool>();
      cr.final = c.at("final").get<bool>();
      r.candidates.push_back(std::move(cr));
    }
    return r;
  } catch (const json::exception& e) {
    throw SchemaError("report", e.what());
  }
}

std::string BenchmarkSummary::to_json() const {
  json j{{"dataset_name", dataset_name},
         {"total", total},
         {"succeeded", succeeded},
         {"accuracy", accuracy},
         {"k", k}};
  return j.dump(2) + "\n";
}

std::string BenchmarkSummary::to_table() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-24s %6s %9s %9s %9s\n%-24s %6d %9ld %9ld %8.2f%%\n", "dataset",
                "k", "total", "succeeded", "accuracy", dataset_name.c_str(), k, total, succeeded,
                accuracy * 100.0);
  return buf;
}

std::vector<BenchmarkItem> read_benchmark(std::string_view jsonl) {
  std::vector<BenchmarkItem> items;
  std::size_t line_no = 0;
  for (const auto& line : split(jsonl, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto where = "line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(where, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        !j.contains("informal_text") || !j["informal_text"].is_string()) {
      throw SchemaError(where, "expected {id: string, informal_text: string, header?: string}");
    }
    BenchmarkItem item{j["id"].get<std::string>(), j["informal_text"].get<std::string>(), {}};
    if (j.contains("header") && !j["header"].is_null()) {
      if (!j["header"].is_string()) throw SchemaError(where, "header must be a string");
      item.header = j["header"].get<std::string>();
    }
    if (trim(item.informal_text).empty()) throw SchemaError(where, "empty informal_text");
    items.push_back(std::move(item));
  }
  return items;
}

std::string translation_prompt(std::string_view informal) {
  return tagged("task", "translate") +
         "\n\nTranslate the following statement into a single Lean 4 Mathlib theorem with the "
         "body `by sorry`. Answer with the Lean code only.\n\n" +
         tagged("informal", informal) + "\n";
}

std::string back_translation_prompt(std::string_view formal) {
  return tagged("task", "back-translate") +
         "\n\nTranslate the following Lean 4 statement into natural-language mathematics. "
         "Answer with the statement only.\n\n" +
         tagged("formal", formal) + "\n";
}

std::string nli_prompt(std::string_view original_nl, std::string_view back_nl) {
  return tagged("task", "nli") +
         "\n\nDo the two statements below state the same mathematical fact? Answer with exactly "
         "one word: ACCEPT if they are equivalent, REJECT otherwise.\n\n" +
         tagged("original", original_nl) + "\n" + tagged("candidate", back_nl) + "\n";
}

NliVerdict parse_verdict(std::string_view reply, bool& parse_failure) {
  const bool accept = has_word(reply, "ACCEPT");
  const bool reject = has_word(reply, "REJECT");
  parse_failure = accept == reject;
  return accept && !reject ? NliVerdict::Accept : NliVerdict::Reject;
}

std::string back_translate(std::string_view formal_text, Gateway& gateway, const BoundRole& role) {
  if (trim(formal_text).empty()) throw InvalidInput("back_translate: empty formal text");
  const auto out = gateway.complete(role.request(back_translation_prompt(formal_text)), *role.provider);
  return trim(out.front().text);
}

NliVerdict nli_check(std::string_view original_nl, std::string_view back_nl, Gateway& gateway,
                     const BoundRole& role, bool* parse_failure) {
  if (trim(original_nl).empty() || trim(back_nl).empty()) {
    throw InvalidInput("nli_check: both texts must be non-empty");
  }
  const auto out = gateway.complete(role.request(nli_prompt(original_nl, back_nl)), *role.provider);
  bool failed = false;
  const auto verdict = parse_verdict(out.front().text, failed);
  if (parse_failure) *parse_failure = failed;
  return verdict;
}

ValidationReport validate_item(const BenchmarkItem& item, int k, const ValidationRoles& roles,
                               CompilerBackend& backend, const ValidatorOptions& options) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  if (options.candidate_cap < 1) throw InvalidInput("candidate_cap must be >= 1");
  const auto& prelude = item.header ? *item.header : options.header_prelude;

  const auto translations = roles.gateway.complete(
      roles.translator.request(translation_prompt(item.informal_text), k), *roles.translator.provider);

  std::vector<CandidateResult> results(translations.size());
  const auto run_one = [&](std::size_t i) {
    auto& r = results[i];
    r.candidate_text = trim(translations[i].text);
    if (translations[i].finish_reason == FinishReason::Error || r.candidate_text.empty()) {
      r.compile = CompileStatus::Fail;
      r.diagnostic = "empty translation";
      return;
    }
    const auto outcome = compile_check(r.candidate_text, backend, options.timeout_ms, prelude);
    if (!outcome.ok) {
      r.compile = CompileStatus::Fail;
      r.diagnostic = outcome.diagnostic;
      return;
    }
    r.compile = CompileStatus::Pass;
    r.back_translation = back_translate(r.candidate_text, roles.gateway, roles.back_translator);
    if (r.back_translation->empty()) {
      r.nli = NliVerdict::Reject;
      return;
    }
    r.nli = nli_check(item.informal_text, *r.back_translation, roles.gateway, roles.nli_judge,
                      &r.nli_parse_failure);
    r.final = r.nli == NliVerdict::Accept;
  };

  std::size_t done = 0;
  std::optional<std::size_t> first_final;
  while (done < results.size() && !(options.short_circuit && first_final)) {
    const auto end = std::min(results.size(), done + static_cast<std::size_t>(options.candidate_cap));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> window;
      for (auto i = done; i < end; ++i) {
        window.emplace_back([&, i] {
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
    for (auto i = done; i < end && !first_final; ++i) {
      if (results[i].final) first_final = i;
    }
    done = end;
  }

  ValidationReport report;
  report.item_id = item.id;
  report.k = k;
  report.short_circuit = options.short_circuit;
  const auto keep = options.short_circuit && first_final ? *first_final + 1 : done;
  results.resize(keep);
  for (const auto& r : results) report.nli_parse_failures += r.nli_parse_failure ? 1 : 0;
  report.success = std::any_of(results.begin(), results.end(), [](const auto& r) { return r.final; });
  report.candidates = std::move(results);
  return report;
}

bool success_at(const ValidationReport& report, int k) {
  const auto n = std::min<std::size_t>(report.candidates.size(), static_cast<std::size_t>(std::max(k, 0)));
  return std::any_of(report.candidates.begin(), report.candidates.begin() + static_cast<long>(n),
                     [](const auto& c) { return c.final; });
}

BenchmarkSummary summarize(const std::vector<ValidationReport>& reports, std::string dataset_name) {
  if (reports.empty()) throw InvalidInput("summarize: no reports");
  BenchmarkSummary s;
  s.dataset_name = std::move(dataset_name);
  s.k = reports.front().k;
  for (const auto& r : reports) {
    if (r.k != s.k) {
      throw MixedK("reports mix k=" + std::to_string(s.k) + " and k=" + std::to_string(r.k));
    }
    ++s.total;
    if (r.success) ++s.succeeded;
  }
  s.accuracy = static_cast<double>(s.succeeded) / static_cast<double>(s.total);
  return s;
}

}  // namespace herald

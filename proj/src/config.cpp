#include "herald/config.hpp"

#include <set>

#include <json.hpp>

#include "herald/augment.hpp"
#include "herald/digest.hpp"
#include "herald/error.hpp"
#include "herald/text.hpp"

namespace herald {

using nlohmann::json;

namespace {

const std::vector<std::string_view> kRoles{kRoleTranslator, kRoleBackTranslator, kRoleNliJudge,
                                           kRoleInformalizer};

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (!known.count(k)) throw SchemaError(path + "." + k, "unknown key");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& path) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(path + "." + key, "wrong type");
  }
}

void read_path(const json& obj, const char* key, std::optional<std::filesystem::path>& out,
               const std::string& path, const std::filesystem::path& base) {
  if (!obj.contains(key) || obj[key].is_null()) return;
  std::string s;
  read(obj, key, s, path);
  std::filesystem::path p(s);
  out = p.is_absolute() || base.empty() ? p : base / p;
}

json binding_json(const RoleBinding& b) {
  return json{{"provider", b.provider},
              {"model_id", b.model_id},
              {"base_url", b.base_url},
              {"temperature", b.temperature},
              {"max_output_tokens", b.max_output_tokens}};
}

json opt_path(const std::optional<std::filesystem::path>& p) {
  return p ? json(p->generic_string()) : json();
}

}  // namespace

PipelineConfig::PipelineConfig() {
  for (auto r : kRoles) {
    RoleBinding b;
    b.model_id = "mock-" + std::string(r);
    roles.emplace(std::string(r), b);
  }
}

void PipelineConfig::validate() const {
  if (pass_k < 1 || pass_k > 256) throw InvalidInput("pass_k must be in [1, 256]");
  if (pass_k > gateway.sample_cap) throw InvalidInput("pass_k exceeds gateway.sample_cap");
  if (retrieval_k < 1) throw InvalidInput("retrieval_k must be >= 1");
  if (neighbor_limit < 0) throw InvalidInput("neighbor_limit must be >= 0");
  if (batch_size < 1) throw InvalidInput("batch_size must be >= 1");
  if (compile_timeout_ms < 1) throw InvalidInput("compile_timeout_ms must be >= 1");
  if (candidate_cap < 1) throw InvalidInput("candidate_cap must be >= 1");
  if (gateway.max_in_flight < 1) throw InvalidInput("gateway.max_in_flight must be >= 1");
  if (gateway.retry_limit < 0) throw InvalidInput("gateway.retry_limit must be >= 0");
  if (gateway.backoff_base_ms < 0) throw InvalidInput("gateway.backoff_base_ms must be >= 0");
  if (embedding.dim < 1) throw InvalidInput("embedding.dim must be >= 1");
  if (embedding.provider != "mock" && embedding.provider != "openai") {
    throw InvalidInput("embedding.provider must be mock or openai");
  }
  if (compiler.backend != "mock" && compiler.backend != "repl") {
    throw InvalidInput("compiler.backend must be mock or repl");
  }
  if (compiler.backend == "repl" && compiler.command.empty()) {
    throw InvalidInput("compiler.command is required for the repl backend");
  }
  for (auto r : kRoles) {
    const auto& b = role(r);
    if (b.provider != "mock" && b.provider != "openai") {
      throw InvalidInput("roles." + std::string(r) + ".provider must be mock or openai");
    }
    if (b.temperature < 0) throw InvalidInput("roles." + std::string(r) + ".temperature must be >= 0");
    if (b.max_output_tokens < 1) {
      throw InvalidInput("roles." + std::string(r) + ".max_output_tokens must be >= 1");
    }
  }
  for (const auto& s : strategies) {
    if (s.empty()) throw InvalidInput("empty augmentation strategy");
    AugmentationStrategy::parse(s);
  }
}

void PipelineConfig::check_paths() const {
  for (const auto* p : {&corpus_export, &template_registry, &tactic_notes, &example_store}) {
    if (*p && !std::filesystem::exists(**p)) {
      throw InvalidInput("configured path does not exist: " + (*p)->string());
    }
  }
}

const RoleBinding& PipelineConfig::role(std::string_view name) const {
  const auto it = roles.find(std::string(name));
  if (it == roles.end()) throw InvalidInput("no binding for role " + std::string(name));
  return it->second;
}

std::string PipelineConfig::to_json() const {
  // The output location is where artifacts go, not what produces them, so it
  // stays out of the canonical form and the digest.
  json roles_json = json::object();
  for (const auto& [name, b] : roles) roles_json[name] = binding_json(b);
  json j{
      {"paths",
       {{"corpus_export", opt_path(corpus_export)},
        {"template_registry", opt_path(template_registry)},
        {"tactic_notes", opt_path(tactic_notes)},
        {"example_store", opt_path(example_store)}}},
      {"roles", roles_json},
      {"embedding",
       {{"provider", embedding.provider},
        {"dim", embedding.dim},
        {"seed", embedding.seed},
        {"model_id", embedding.model_id},
        {"base_url", embedding.base_url}}},
      {"compiler", {{"backend", compiler.backend}, {"command", compiler.command}}},
      {"gateway",
       {{"max_in_flight", gateway.max_in_flight},
        {"retry_limit", gateway.retry_limit},
        {"backoff_base_ms", gateway.backoff_base_ms},
        {"cache_dir", gateway.cache_dir ? json(gateway.cache_dir->generic_string()) : json()},
        {"sample_cap", gateway.sample_cap},
        {"request_budget", gateway.request_budget}}},
      {"knobs",
       {{"retrieval_k", retrieval_k},
        {"neighbor_limit", neighbor_limit},
        {"batch_size", batch_size},
        {"pass_k", pass_k},
        {"prompt_budget_chars", prompt_budget_chars},
        {"dedup_seed", dedup_seed},
        {"mix_seed", mix_seed},
        {"compile_timeout_ms", compile_timeout_ms},
        {"header_prelude", header_prelude},
        {"short_circuit", short_circuit},
        {"candidate_cap", candidate_cap},
        {"provenance_ratio", provenance_ratio.str()},
        {"direction_ratio", direction_ratio.str()},
        {"strategies", strategies}}},
  };
  return j.dump(2) + "\n";
}

std::string PipelineConfig::digest() const { return herald::digest(to_json()); }

PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  PipelineConfig c;
  reject_unknown(doc, {"paths", "roles", "embedding", "compiler", "gateway", "knobs"}, "$");

  if (doc.contains("paths")) {
    const auto& p = doc["paths"];
    reject_unknown(p, {"corpus_export", "template_registry", "tactic_notes", "example_store", "output_dir"},
                   "$.paths");
    read_path(p, "corpus_export", c.corpus_export, "$.paths", base_dir);
    read_path(p, "template_registry", c.template_registry, "$.paths", base_dir);
    read_path(p, "tactic_notes", c.tactic_notes, "$.paths", base_dir);
    read_path(p, "example_store", c.example_store, "$.paths", base_dir);
    std::optional<std::filesystem::path> out;
    read_path(p, "output_dir", out, "$.paths", base_dir);
    if (out) c.output_dir = *out;
  }
  if (doc.contains("roles")) {
    const auto& roles = doc["roles"];
    reject_unknown(roles, {kRoles.begin(), kRoles.end()}, "$.roles");
    for (const auto& [name, b] : roles.items()) {
      const auto path = "$.roles." + name;
      reject_unknown(b, {"provider", "model_id", "base_url", "temperature", "max_output_tokens"}, path);
      auto& rb = c.roles[name];
      read(b, "provider", rb.provider, path);
      read(b, "model_id", rb.model_id, path);
      read(b, "base_url", rb.base_url, path);
      read(b, "temperature", rb.temperature, path);
      read(b, "max_output_tokens", rb.max_output_tokens, path);
    }
  }
  if (doc.contains("embedding")) {
    const auto& e = doc["embedding"];
    reject_unknown(e, {"provider", "dim", "seed", "model_id", "base_url"}, "$.embedding");
    read(e, "provider", c.embedding.provider, "$.embedding");
    read(e, "dim", c.embedding.dim, "$.embedding");
    read(e, "seed", c.embedding.seed, "$.embedding");
    read(e, "model_id", c.embedding.model_id, "$.embedding");
    read(e, "base_url", c.embedding.base_url, "$.embedding");
  }
  if (doc.contains("compiler")) {
    const auto& e = doc["compiler"];
    reject_unknown(e, {"backend", "command"}, "$.compiler");
    read(e, "backend", c.compiler.backend, "$.compiler");
    read(e, "command", c.compiler.command, "$.compiler");
  }
  if (doc.contains("gateway")) {
    const auto& g = doc["gateway"];
    reject_unknown(g, {"max_in_flight", "retry_limit", "backoff_base_ms", "cache_dir", "sample_cap",
                       "request_budget"},
                   "$.gateway");
    read(g, "max_in_flight", c.gateway.max_in_flight, "$.gateway");
    read(g, "retry_limit", c.gateway.retry_limit, "$.gateway");
    read(g, "backoff_base_ms", c.gateway.backoff_base_ms, "$.gateway");
    read(g, "sample_cap", c.gateway.sample_cap, "$.gateway");
    read(g, "request_budget", c.gateway.request_budget, "$.gateway");
    read_path(g, "cache_dir", c.gateway.cache_dir, "$.gateway", base_dir);
  }
  if (doc.contains("knobs")) {
    const auto& k = doc["knobs"];
    const std::string path = "$.knobs";
    reject_unknown(k, {"retrieval_k", "neighbor_limit", "batch_size", "pass_k", "prompt_budget_chars",
                       "dedup_seed", "mix_seed", "compile_timeout_ms", "header_prelude",
                       "short_circuit", "candidate_cap", "provenance_ratio", "direction_ratio",
                       "strategies"},
                   path);
    read(k, "retrieval_k", c.retrieval_k, path);
    read(k, "neighbor_limit", c.neighbor_limit, path);
    read(k, "batch_size", c.batch_size, path);
    read(k, "pass_k", c.pass_k, path);
    read(k, "prompt_budget_chars", c.prompt_budget_chars, path);
    read(k, "dedup_seed", c.dedup_seed, path);
    read(k, "mix_seed", c.mix_seed, path);
    read(k, "compile_timeout_ms", c.compile_timeout_ms, path);
    read(k, "header_prelude", c.header_prelude, path);
    read(k, "short_circuit", c.short_circuit, path);
    read(k, "candidate_cap", c.candidate_cap, path);
    read(k, "strategies", c.strategies, path);
    std::string ratio;
    if (k.contains("provenance_ratio")) {
      read(k, "provenance_ratio", ratio, path);
      c.provenance_ratio = Ratio3::parse(ratio);
    }
    if (k.contains("direction_ratio")) {
      read(k, "direction_ratio", ratio, path);
      c.direction_ratio = Ratio3::parse(ratio);
    }
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  auto config = parse_config(read_file(path), path.parent_path());
  config.check_paths();
  return config;
}

BoundRole bind_role(const PipelineConfig& config, std::string_view role) {
  const auto& b = config.role(role);
  return BoundRole{b, make_provider(role, b)};
}

}  // namespace herald

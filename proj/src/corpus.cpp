#include "herald/corpus.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <tuple>

#include <json.hpp>

#include "herald/error.hpp"
#include "herald/text.hpp"

namespace herald {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<DeclKind, std::string_view>, 8> kKindNames{{
    {DeclKind::Theorem, "theorem"},
    {DeclKind::Instance, "instance"},
    {DeclKind::Definition, "definition"},
    {DeclKind::Structure, "structure"},
    {DeclKind::Class, "class"},
    {DeclKind::Inductive, "inductive"},
    {DeclKind::ClassInductive, "classInductive"},
    {DeclKind::Opaque, "opaque"},
}};

void check_state(const ProofState& state, const std::string& where) {
  std::set<std::string> seen;
  for (const auto& h : state.hypotheses) {
    if (!seen.insert(h.name).second) {
      throw InvalidInput(where + ": duplicate hypothesis name '" + h.name + "'");
    }
  }
}

// ---- JSON reading with path-carrying errors ----

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "." + key, "missing required field");
  return *it;
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected string");
  return v.get<std::string>();
}

int get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected integer");
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw SchemaError(path, "integer out of range");
  }
  return static_cast<int>(x);
}

std::vector<std::string> get_string_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(get_string(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::map<std::string, std::string> get_text_map(const json& root, const char* key,
                                                const std::string& path, bool required) {
  std::map<std::string, std::string> out;
  const auto it = root.find(key);
  if (it == root.end()) {
    if (required) throw SchemaError(path + "." + key, "missing required field");
    return out;
  }
  if (!it->is_object()) throw SchemaError(path + "." + key, "expected object");
  for (const auto& [k, v] : it->items()) {
    out.emplace(k, get_string(v, path + "." + key + "[\"" + k + "\"]"));
  }
  return out;
}

ProofState read_state(const json& v, const std::string& path) {
  ProofState state;
  const auto& hyps = member(v, "hypotheses", path);
  if (!hyps.is_array()) throw SchemaError(path + ".hypotheses", "expected array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const auto hp = path + ".hypotheses[" + std::to_string(i) + "]";
    const auto& pair = hyps[i];
    if (!pair.is_array() || pair.size() != 2) throw SchemaError(hp, "expected [name, type]");
    Hypothesis h{get_string(pair[0], hp + "[0]"), get_string(pair[1], hp + "[1]")};
    if (!seen.insert(h.name).second) {
      throw SchemaError(hp + "[0]", "duplicate hypothesis name '" + h.name + "'");
    }
    state.hypotheses.push_back(std::move(h));
  }
  state.goals = get_string_list(member(v, "goals", path), path + ".goals");
  return state;
}

DeclarationRecord read_declaration(const json& v, const std::string& path) {
  DeclarationRecord d;
  d.full_name = get_string(member(v, "full_name", path), path + ".full_name");
  if (d.full_name.empty()) throw SchemaError(path + ".full_name", "empty name");
  const auto kind_text = get_string(member(v, "kind", path), path + ".kind");
  const auto kind = parse_decl_kind(kind_text);
  if (!kind) throw SchemaError(path + ".kind", "unknown declaration kind '" + kind_text + "'");
  d.kind = *kind;
  d.signature = get_string(member(v, "signature", path), path + ".signature");
  if (const auto it = v.find("docstring"); it != v.end() && !it->is_null()) {
    d.docstring = get_string(*it, path + ".docstring");
  }
  d.namespace_path = get_string_list(member(v, "namespace_path", path), path + ".namespace_path");
  d.file_path = get_string(member(v, "file_path", path), path + ".file_path");
  const auto& span = member(v, "line_span", path);
  d.line_span.start = get_int(member(span, "start", path + ".line_span"), path + ".line_span.start");
  d.line_span.end = get_int(member(span, "end", path + ".line_span"), path + ".line_span.end");
  if (d.line_span.start < 1) throw SchemaError(path + ".line_span.start", "must be >= 1");
  if (d.line_span.end < d.line_span.start) {
    throw SchemaError(path + ".line_span.end", "must be >= start");
  }
  const auto deps_path = path + ".dependencies";
  for (auto& dep : get_string_list(member(v, "dependencies", path), deps_path)) {
    if (dep == d.full_name) throw SchemaError(deps_path, "declaration depends on itself");
    d.dependencies.insert(std::move(dep));
  }
  const auto& tactic = member(v, "is_tactic_proof", path);
  if (!tactic.is_boolean()) throw SchemaError(path + ".is_tactic_proof", "expected boolean");
  d.is_tactic_proof = tactic.get<bool>();
  return d;
}

json state_json(const ProofState& state) {
  json hyps = json::array();
  for (const auto& h : state.hypotheses) hyps.push_back(json::array({h.name, h.type_expr}));
  return json{{"hypotheses", std::move(hyps)}, {"goals", state.goals}};
}

int common_prefix(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const auto n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return static_cast<int>(i);
}

}  // namespace

std::string_view to_string(DeclKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "theorem";
}

std::optional<DeclKind> parse_decl_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

CorpusIndex::CorpusIndex(std::vector<DeclarationRecord> declarations, ProofMap proofs,
                         TextMap head_statements, TextMap file_headers)
    : proofs_(std::move(proofs)),
      head_statements_(std::move(head_statements)),
      file_headers_(std::move(file_headers)) {
  for (auto& d : declarations) {
    if (d.dependencies.count(d.full_name)) {
      throw InvalidInput(d.full_name + ": declaration depends on itself");
    }
    if (d.line_span.start < 1 || d.line_span.end < d.line_span.start) {
      throw InvalidInput(d.full_name + ": invalid line span");
    }
    const auto name = d.full_name;
    if (!declarations_.emplace(name, std::move(d)).second) throw DuplicateDeclaration(name);
  }
  for (const auto& [name, steps] : proofs_) {
    const auto it = declarations_.find(name);
    if (it == declarations_.end()) throw InvalidInput("proof for unknown declaration " + name);
    if (it->second.kind != DeclKind::Theorem && it->second.kind != DeclKind::Instance) {
      throw InvalidInput("proof attached to non-theorem declaration " + name);
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (steps[i].step_index != static_cast<int>(i)) {
        throw InvalidInput(name + ": step indices must be contiguous from 0");
      }
      check_state(steps[i].state_before, name + " step " + std::to_string(i));
      check_state(steps[i].state_after, name + " step " + std::to_string(i));
    }
  }
  for (const auto& [name, d] : declarations_) {
    for (const auto& dep : d.dependencies) {
      if (!declarations_.count(dep)) {
        warnings_.push_back("dangling dependency: " + name + " -> " + dep);
      }
    }
  }
}

const DeclarationRecord& CorpusIndex::at(const std::string& full_name) const {
  const auto* d = find(full_name);
  if (!d) throw UnknownDeclaration(full_name);
  return *d;
}

const DeclarationRecord* CorpusIndex::find(const std::string& full_name) const {
  const auto it = declarations_.find(full_name);
  return it == declarations_.end() ? nullptr : &it->second;
}

const std::vector<ProofStep>* CorpusIndex::proof_of(const std::string& full_name) const {
  const auto it = proofs_.find(full_name);
  return it == proofs_.end() ? nullptr : &it->second;
}

CorpusIndex parse_jixia_export(std::string_view raw_json) {
  json root;
  try {
    root = json::parse(raw_json);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw SchemaError("$", "expected object");
  const auto version = get_string(member(root, "schema_version", "$"), "$.schema_version");
  if (version != kExportSchemaVersion) {
    throw SchemaError("$.schema_version", "unsupported schema version '" + version + "'");
  }

  const auto& decls = member(root, "declarations", "$");
  if (!decls.is_array()) throw SchemaError("$.declarations", "expected array");
  std::vector<DeclarationRecord> records;
  std::set<std::string> names;
  for (std::size_t i = 0; i < decls.size(); ++i) {
    auto d = read_declaration(decls[i], "$.declarations[" + std::to_string(i) + "]");
    if (!names.insert(d.full_name).second) throw DuplicateDeclaration(d.full_name);
    records.push_back(std::move(d));
  }
  std::map<std::string, DeclKind> kinds;
  for (const auto& d : records) kinds.emplace(d.full_name, d.kind);

  CorpusIndex::ProofMap proofs;
  if (const auto it = root.find("proofs"); it != root.end()) {
    if (!it->is_object()) throw SchemaError("$.proofs", "expected object");
    for (const auto& [name, steps_json] : it->items()) {
      const auto path = "$.proofs[\"" + name + "\"]";
      const auto kind = kinds.find(name);
      if (kind == kinds.end()) throw SchemaError(path, "proof for unknown declaration");
      if (kind->second != DeclKind::Theorem && kind->second != DeclKind::Instance) {
        throw SchemaError(path, "proofs are only allowed for theorem or instance");
      }
      if (!steps_json.is_array()) throw SchemaError(path, "expected array");
      std::vector<ProofStep> steps;
      for (std::size_t i = 0; i < steps_json.size(); ++i) {
        const auto sp = path + "[" + std::to_string(i) + "]";
        const auto& s = steps_json[i];
        ProofStep step;
        step.tactic_text = get_string(member(s, "tactic_text", sp), sp + ".tactic_text");
        step.state_before = read_state(member(s, "state_before", sp), sp + ".state_before");
        step.state_after = read_state(member(s, "state_after", sp), sp + ".state_after");
        step.step_index = static_cast<int>(i);
        if (const auto idx = s.find("step_index"); idx != s.end()) {
          if (get_int(*idx, sp + ".step_index") != static_cast<int>(i)) {
            throw SchemaError(sp + ".step_index", "step indices must be contiguous from 0");
          }
        }
        steps.push_back(std::move(step));
      }
      proofs.emplace(name, std::move(steps));
    }
  }
  auto heads = get_text_map(root, "head_statements", "$", false);
  auto file_headers = get_text_map(root, "file_headers", "$", false);
  return CorpusIndex(std::move(records), std::move(proofs), std::move(heads),
                     std::move(file_headers));
}

std::string serialize(const CorpusIndex& index) {
  json decls = json::array();
  for (const auto& [name, d] : index.declarations()) {
    decls.push_back(json{
        {"full_name", d.full_name},
        {"kind", std::string(to_string(d.kind))},
        {"signature", d.signature},
        {"docstring", d.docstring ? json(*d.docstring) : json(nullptr)},
        {"namespace_path", d.namespace_path},
        {"file_path", d.file_path},
        {"line_span", json{{"start", d.line_span.start}, {"end", d.line_span.end}}},
        {"dependencies", std::vector<std::string>(d.dependencies.begin(), d.dependencies.end())},
        {"is_tactic_proof", d.is_tactic_proof},
    });
  }
  json proofs = json::object();
  for (const auto& [name, steps] : index.proofs()) {
    json arr = json::array();
    for (const auto& s : steps) {
      arr.push_back(json{{"tactic_text", s.tactic_text},
                         {"step_index", s.step_index},
                         {"state_before", state_json(s.state_before)},
                         {"state_after", state_json(s.state_after)}});
    }
    proofs[name] = std::move(arr);
  }
  json root{{"schema_version", std::string(kExportSchemaVersion)},
            {"declarations", std::move(decls)},
            {"proofs", std::move(proofs)},
            {"head_statements", index.head_statements()}};
  if (!index.file_headers().empty()) root["file_headers"] = index.file_headers();
  return root.dump(2) + "\n";
}

NeighborSet resolve_neighbors(const std::string& subject, const CorpusIndex& index, int limit) {
  if (limit < 1) throw InvalidInput("neighbor limit must be >= 1");
  const auto& self = index.at(subject);
  const auto self_parts = split(self.full_name, '.');

  struct Near {
    int distance;
    std::string name;
    auto operator<=>(const Near&) const = default;
  };
  std::vector<std::string> same_ns;
  std::vector<Near> same_file;
  std::vector<std::pair<int, std::string>> prefixed;
  int best_prefix = 0;

  for (const auto& [name, d] : index.declarations()) {
    if (name == subject) continue;
    if (!self.namespace_path.empty() && d.namespace_path == self.namespace_path) {
      same_ns.push_back(name);
    }
    if (d.file_path == self.file_path) {
      same_file.push_back({std::abs(d.line_span.start - self.line_span.start), name});
    }
    const int shared = common_prefix(self_parts, split(name, '.'));
    if (shared >= 1) {
      prefixed.emplace_back(shared, name);
      best_prefix = std::max(best_prefix, shared);
    }
  }

  NeighborSet out;
  const auto cap = static_cast<std::size_t>(limit);
  // declarations() is ordered by name, so same_ns is already lexicographic.
  same_ns.resize(std::min(cap, same_ns.size()));
  out.same_namespace = std::move(same_ns);
  std::sort(same_file.begin(), same_file.end());
  for (std::size_t i = 0; i < same_file.size() && i < cap; ++i) {
    out.same_file.push_back(same_file[i].name);
  }
  for (const auto& [shared, name] : prefixed) {
    if (shared == best_prefix && out.name_prefix_shared.size() < cap) {
      out.name_prefix_shared.push_back(name);
    }
  }
  return out;
}

}  // namespace herald

#include "herald/prompt.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>

#include <json.hpp>

#include "herald/digest.hpp"
#include "herald/error.hpp"
#include "herald/text.hpp"

namespace herald {

using nlohmann::json;

namespace {

const std::set<std::string>& statement_fields() {
  static const std::set<std::string> f{"principles",  "retrieved",  "head_statements",
                                       "docstring",   "dependent_translations",
                                       "neighbors",   "signature",  "kind",
                                       "name"};
  return f;
}

const std::set<std::string>& proof_fields() {
  static const std::set<std::string> f{"principles", "formal_statement", "informal_statement",
                                       "steps"};
  return f;
}

const std::set<std::string>& summary_fields() {
  static const std::set<std::string> f{"principles", "formal_statement", "informal_statement",
                                       "stepwise_translations"};
  return f;
}

bool is_statement_target(const std::string& t) { return parse_decl_kind(t).has_value(); }

const std::set<std::string>& fields_for(const std::string& target) {
  if (target == kProofTarget) return proof_fields();
  if (target == kProofSummaryTarget) return summary_fields();
  return statement_fields();
}

template <typename T>
T required_member(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw SchemaError(path + "." + key, "missing");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(path + "." + key, "wrong type");
  }
}

std::vector<std::string> string_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) throw SchemaError(path + "[" + std::to_string(i) + "]", "not a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

// Field name -> rendered value (empty = absent).
using FieldValues = std::map<std::string, std::string>;

std::string numbered(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += std::to_string(i + 1) + ". " + items[i] + "\n";
  }
  if (!out.empty()) out.pop_back();
  return out;
}

std::string render(const PromptTemplate& tpl, const FieldValues& values) {
  std::string out;
  for (const auto& seg : tpl.segments) {
    if (seg.kind == TemplateSegment::Kind::Literal) {
      out += seg.text;
      continue;
    }
    const auto it = values.find(seg.text);
    const bool present = it != values.end() && !it->second.empty();
    if (!present) {
      if (seg.required) throw MissingField(seg.text);
      continue;
    }
    out += seg.heading;
    out += it->second;
    out += "\n\n";
  }
  while (!out.empty() && (out.back() == '\n' || out.back() == ' ')) out.pop_back();
  out += '\n';
  return out;
}

RenderedPrompt finish(const PromptTemplate& tpl, std::string text) {
  RenderedPrompt p;
  p.context_digest = digest(text);
  p.text = std::move(text);
  p.template_id = tpl.id;
  return p;
}

std::string format_score(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", s);
  return buf;
}

std::string render_retrieved(const std::vector<RetrievedExample>& retrieved) {
  std::string out;
  for (std::size_t i = 0; i < retrieved.size(); ++i) {
    const auto& r = retrieved[i];
    if (i) out += "\n\n";
    out += "Example " + std::to_string(i + 1) + " (similarity " + format_score(r.score) + ")\n";
    out += "Formal:\n" + r.formal_text + "\nInformal:\n" + r.informal_text;
  }
  return out;
}

std::string render_dependencies(std::vector<DependentTranslation> deps) {
  std::sort(deps.begin(), deps.end(), [](const auto& a, const auto& b) {
    return std::tie(a.level, a.full_name) < std::tie(b.level, b.full_name);
  });
  std::string out;
  for (const auto& d : deps) {
    if (!out.empty()) out += '\n';
    out += "- " + d.full_name + ": " + d.informal_text;
  }
  return out;
}

std::vector<std::string> ordered_neighbors(const NeighborSet& n) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto* list : {&n.same_namespace, &n.same_file, &n.name_prefix_shared}) {
    for (const auto& name : *list) {
      if (seen.insert(name).second) out.push_back(name);
    }
  }
  return out;
}

std::string render_neighbors(const std::vector<std::string>& names,
                             const std::map<std::string, std::string>& signatures) {
  std::string out;
  for (const auto& name : names) {
    if (!out.empty()) out += '\n';
    const auto it = signatures.find(name);
    out += "- " + (it != signatures.end() ? it->second : name);
  }
  return out;
}

void check_proof_context(const ProofContext& ctx) {
  if (trim(ctx.informal_statement).empty()) throw InvalidInput("proof context: empty informal statement");
  if (ctx.steps.empty()) throw InvalidInput("proof context: no steps");
}

FieldValues proof_values(const PromptTemplate& tpl, const ProofContext& ctx) {
  return {{"principles", numbered(tpl.principles)},
          {"formal_statement", tagged("formal", ctx.formal_statement)},
          {"informal_statement", tagged("informal", ctx.informal_statement)}};
}

}  // namespace

TemplateRegistry TemplateRegistry::parse(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("$", "expected an object");
  const auto version = required_member<std::string>(doc, "schema_version", "$");
  if (version != kRegistrySchemaVersion) {
    throw SchemaError("$.schema_version", "unsupported version '" + version + "'");
  }

  TemplateRegistry reg;
  std::vector<std::string> shared_principles;
  if (doc.contains("principles")) shared_principles = string_list(doc["principles"], "$.principles");
  if (doc.contains("default_template")) {
    reg.default_id_ = required_member<std::string>(doc, "default_template", "$");
  }

  const auto& templates = doc.contains("templates") ? doc["templates"] : json::array();
  if (!templates.is_array()) throw SchemaError("$.templates", "expected an array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    const auto path = "$.templates[" + std::to_string(i) + "]";
    const auto& t = templates[i];
    PromptTemplate tpl;
    tpl.id = required_member<std::string>(t, "id", path);
    if (!ids.insert(tpl.id).second) throw SchemaError(path + ".id", "duplicate id " + tpl.id);

    if (!t.contains("applies_to")) throw SchemaError(path + ".applies_to", "missing");
    for (const auto& target : string_list(t["applies_to"], path + ".applies_to")) {
      if (!is_statement_target(target) && target != kProofTarget && target != kProofSummaryTarget) {
        throw SchemaError(path + ".applies_to", "unknown target '" + target + "'");
      }
      tpl.applies_to.insert(target);
    }
    tpl.principles = t.contains("principles") ? string_list(t["principles"], path + ".principles")
                                              : shared_principles;

    const bool statement_template =
        tpl.applies_to.empty() ||
        std::any_of(tpl.applies_to.begin(), tpl.applies_to.end(), is_statement_target);
    if (statement_template && tpl.principles.empty()) {
      throw SchemaError(path + ".principles", "statement templates need principles");
    }

    std::set<std::string> allowed;
    if (tpl.applies_to.empty()) allowed = statement_fields();
    for (const auto& target : tpl.applies_to) {
      const auto& f = fields_for(target);
      allowed.insert(f.begin(), f.end());
    }

    if (!t.contains("segments") || !t["segments"].is_array()) {
      throw SchemaError(path + ".segments", "expected an array");
    }
    const auto& segs = t["segments"];
    for (std::size_t j = 0; j < segs.size(); ++j) {
      const auto spath = path + ".segments[" + std::to_string(j) + "]";
      const auto& s = segs[j];
      TemplateSegment seg;
      if (s.is_object() && s.contains("text")) {
        seg.text = required_member<std::string>(s, "text", spath);
      } else if (s.is_object() && s.contains("field")) {
        seg.kind = TemplateSegment::Kind::Placeholder;
        seg.text = required_member<std::string>(s, "field", spath);
        if (!allowed.count(seg.text)) {
          throw SchemaError(spath + ".field", "unknown field '" + seg.text + "'");
        }
        if (s.contains("heading")) seg.heading = required_member<std::string>(s, "heading", spath);
        if (s.contains("required")) seg.required = required_member<bool>(s, "required", spath);
      } else {
        throw SchemaError(spath, "segment needs 'text' or 'field'");
      }
      tpl.segments.push_back(std::move(seg));
    }
    reg.templates_.push_back(std::move(tpl));
  }
  if (!reg.default_id_.empty() && !reg.find(reg.default_id_)) {
    throw SchemaError("$.default_template", "no template with id '" + reg.default_id_ + "'");
  }
  return reg;
}

TemplateRegistry TemplateRegistry::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

const PromptTemplate* TemplateRegistry::find(std::string_view id) const {
  for (const auto& t : templates_) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

const PromptTemplate& select_template(std::string_view target, const TemplateRegistry& registry) {
  const PromptTemplate* best = nullptr;
  for (const auto& t : registry.templates()) {
    if (!t.applies_to.count(std::string(target))) continue;
    if (!best || t.applies_to.size() < best->applies_to.size()) best = &t;
  }
  if (best) return *best;
  if (const auto* d = registry.find(registry.default_id())) return *d;
  throw NoTemplate("no template for '" + std::string(target) + "' and no default");
}

const PromptTemplate& select_template(DeclKind kind, const TemplateRegistry& registry) {
  return select_template(to_string(kind), registry);
}

RenderedPrompt assemble_statement_prompt(const StatementContext& ctx,
                                         const TemplateRegistry& registry,
                                         std::size_t max_chars) {
  const auto& tpl = select_template(ctx.subject.kind, registry);
  auto neighbors = ordered_neighbors(ctx.neighbors);
  bool keep_head = true;
  std::vector<std::string> dropped;

  const auto build = [&] {
    FieldValues v{
        {"principles", numbered(tpl.principles)},
        {"retrieved", render_retrieved(ctx.retrieved)},
        {"head_statements", keep_head ? trim(ctx.head_statements) : std::string()},
        {"docstring", ctx.subject.docstring ? trim(*ctx.subject.docstring) : std::string()},
        {"dependent_translations", render_dependencies(ctx.dependent_translations)},
        {"neighbors", render_neighbors(neighbors, ctx.neighbor_signatures)},
        {"signature", tagged("formal", ctx.subject.signature)},
        {"kind", std::string(to_string(ctx.subject.kind))},
        {"name", ctx.subject.full_name},
    };
    return render(tpl, v);
  };

  auto text = build();
  while (max_chars > 0 && text.size() > max_chars) {
    if (!neighbors.empty()) {
      dropped.push_back("neighbor:" + neighbors.back());
      neighbors.pop_back();
    } else if (keep_head && !trim(ctx.head_statements).empty()) {
      keep_head = false;
      dropped.push_back("head_statements");
    } else {
      break;
    }
    text = build();
  }
  auto out = finish(tpl, std::move(text));
  out.dropped = std::move(dropped);
  return out;
}

RenderedPrompt assemble_proof_prompt(const ProofContext& ctx, const TemplateRegistry& registry) {
  check_proof_context(ctx);
  const auto& tpl = select_template(kProofTarget, registry);
  std::string steps;
  for (std::size_t i = 0; i < ctx.steps.size(); ++i) {
    const auto& s = ctx.steps[i];
    const auto note = ctx.tactic_notes.find(tactic_name(s.tactic_text));
    if (i) steps += "\n";
    steps += "<step index=\"" + std::to_string(i) + "\">\n";
    steps += "Tactic: " + collapse_whitespace(s.tactic_text) + "\n";
    steps += "Note: " + (note != ctx.tactic_notes.end() ? note->second : std::string("(no note)")) + "\n";
    steps += "State before:\n" + render_state(s.state_before) + "\n";
    steps += "State after:\n" + render_state(s.state_after) + "\n";
    steps += "</step>";
  }
  auto values = proof_values(tpl, ctx);
  values["steps"] = steps;
  return finish(tpl, render(tpl, values));
}

RenderedPrompt summarize_steps_prompt(const std::vector<std::string>& stepwise_translations,
                                      const ProofContext& ctx, const TemplateRegistry& registry) {
  if (stepwise_translations.size() != ctx.steps.size()) {
    throw LengthMismatch(ctx.steps.size(), stepwise_translations.size());
  }
  check_proof_context(ctx);
  const auto& tpl = select_template(kProofSummaryTarget, registry);
  std::string body;
  for (std::size_t i = 0; i < stepwise_translations.size(); ++i) {
    if (i) body += "\n";
    body += "<translation index=\"" + std::to_string(i) + "\">\n" + trim(stepwise_translations[i]) +
            "\n</translation>";
  }
  auto values = proof_values(tpl, ctx);
  values["stepwise_translations"] = body;
  return finish(tpl, render(tpl, values));
}

std::string tactic_name(std::string_view tactic_text) {
  auto s = trim(tactic_text);
  // Focus bullets and structuring dots carry no meaning for the lookup.
  for (const std::string_view bullet : {"· ", ". "}) {
    while (s.starts_with(bullet)) s = trim(std::string_view(s).substr(bullet.size()));
  }
  std::size_t end = 0;
  while (end < s.size() && s[end] != ' ' && s[end] != '\t' && s[end] != '\n' && s[end] != '[' &&
         s[end] != '(' && s[end] != '<') {
    ++end;
  }
  return s.substr(0, end);
}

std::string render_state(const ProofState& state) {
  if (state.goals.empty()) return "no goals";
  std::string out;
  for (const auto& h : state.hypotheses) out += h.name + " : " + h.type_expr + "\n";
  for (std::size_t i = 0; i < state.goals.size(); ++i) {
    if (i) out += "\n";
    out += "⊢ " + state.goals[i];
  }
  return out;
}

std::map<std::string, std::string> load_tactic_notes(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError(path.string(), "expected an object of tactic -> note");
  std::map<std::string, std::string> notes;
  for (const auto& [k, v] : doc.items()) {
    if (!v.is_string()) throw SchemaError("$." + k, "note must be a string");
    notes.emplace(k, v.get<std::string>());
  }
  return notes;
}

StatementContext build_statement_context(const DeclarationRecord& subject,
                                         const CorpusIndex& index,
                                         const LevelAssignment& levels,
                                         const std::map<std::string, std::string>& translations,
                                         int neighbor_limit,
                                         std::vector<RetrievedExample> retrieved) {
  StatementContext ctx;
  ctx.subject = subject;
  if (const auto h = index.head_statements().find(subject.file_path);
      h != index.head_statements().end()) {
    ctx.head_statements = h->second;
  }
  const auto level_of = [&](const std::string& n) {
    const auto it = levels.level_of.find(n);
    return it == levels.level_of.end() ? -1 : it->second;
  };
  const int own = level_of(subject.full_name);
  for (const auto& dep : subject.dependencies) {
    const auto t = translations.find(dep);
    const int lvl = level_of(dep);
    if (t == translations.end() || lvl < 0 || (own >= 0 && lvl >= own)) continue;
    ctx.dependent_translations.push_back({dep, lvl, t->second});
  }
  if (neighbor_limit > 0) {
    ctx.neighbors = resolve_neighbors(subject.full_name, index, neighbor_limit);
    for (const auto& n : ordered_neighbors(ctx.neighbors)) {
      if (const auto* d = index.find(n)) ctx.neighbor_signatures.emplace(n, d->signature);
    }
  }
  ctx.retrieved = std::move(retrieved);
  return ctx;
}

}  // namespace herald

#include "herald/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "herald/augment.hpp"
#include "herald/corpus.hpp"
#include "herald/dataset.hpp"
#include "herald/depgraph.hpp"
#include "herald/http_provider.hpp"
#include "herald/prompt.hpp"
#include "herald/text.hpp"
#include "herald/validator.hpp"

namespace herald {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const Interrupted*>(&e)) return exit_code::kInterrupted;
  if (dynamic_cast<const ProviderError*>(&e) || dynamic_cast<const BudgetExceeded*>(&e)) {
    return exit_code::kProvider;
  }
  if (dynamic_cast<const BackendUnavailable*>(&e) || dynamic_cast<const IoError*>(&e)) {
    return exit_code::kBackend;
  }
  if (dynamic_cast<const Error*>(&e)) return exit_code::kInput;
  return exit_code::kBackend;
}

std::atomic<bool>& interrupt_requested() {
  static std::atomic<bool> flag{false};
  return flag;
}

namespace {

void check_interrupt() {
  if (interrupt_requested().load()) throw Interrupted();
}

// Runs f(0..n-1) on up to `width` threads; the first exception wins.
template <typename F>
void parallel_for(std::size_t n, std::size_t width, F&& f) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(n, std::max<std::size_t>(width, 1)); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            f(i);
          } catch (...) {
            std::lock_guard lock(m);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void append_line_synced(const fs::path& path, std::string_view line) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError("open " + path.string() + ": " + std::strerror(errno));
  std::string buf(line);
  buf += '\n';
  std::size_t off = 0;
  while (off < buf.size()) {
    const ssize_t n = ::write(fd, buf.data() + off, buf.size() - off);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) {
      ::close(fd);
      throw IoError("write " + path.string() + ": " + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

std::vector<std::string> complete_lines(const fs::path& path) {
  if (!fs::exists(path)) return {};
  const auto text = read_file(path);
  auto lines = split(text, '\n');
  lines.pop_back();  // empty after a final newline, or a torn partial line
  return lines;
}

std::string dump_sorted(const json& j) { return j.dump(2) + "\n"; }

CorpusIndex load_index(const fs::path& path) { return parse_jixia_export(read_file(path)); }

void write_manifest(const fs::path& path, const std::string& stage, const PipelineConfig& config,
                    json extra) {
  extra["stage"] = stage;
  extra["config_digest"] = config.digest();
  write_file_atomic(path, dump_sorted(extra));
}

// Informalize resumes only into an output tree made by the same config.
void guard_config(const fs::path& manifest, const PipelineConfig& config) {
  if (!fs::exists(manifest)) return;
  json m;
  try {
    m = json::parse(read_file(manifest));
  } catch (const json::parse_error&) {
    throw ConfigMismatch(manifest.string() + " is unreadable; refusing to resume");
  }
  if (m.value("config_digest", std::string()) != config.digest()) {
    throw ConfigMismatch(manifest.string() + " was written under config digest " +
                         m.value("config_digest", std::string("?")) + ", current is " +
                         config.digest());
  }
}

TemplateRegistry load_registry(const PipelineConfig& config) {
  if (!config.template_registry) throw InvalidInput("paths.template_registry is not set");
  return TemplateRegistry::load(*config.template_registry);
}

std::string strip_sorry_body(const std::string& formal) {
  static constexpr std::string_view body = " := by sorry";
  if (formal.ends_with(body)) return formal.substr(0, formal.size() - body.size());
  return formal;
}

std::string level_file(int level) { return "level_" + std::to_string(level) + ".jsonl"; }

// Rewrites `path` keeping the first complete record per committed id.
std::vector<json> reconcile(const fs::path& path, const std::set<std::string>& committed) {
  if (!fs::exists(path)) return {};
  std::vector<json> kept;
  std::string kept_text;
  std::set<std::string> seen;
  for (const auto& line : complete_lines(path)) {
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      continue;
    }
    const auto id = j.value("id", std::string());
    if (!committed.count(id) || !seen.insert(id).second) continue;
    kept_text += line + "\n";
    kept.push_back(std::move(j));
  }
  if (read_file(path) != kept_text) write_file_atomic(path, kept_text);
  return kept;
}

}  // namespace

std::unique_ptr<CompilerBackend> make_backend(const PipelineConfig& config) {
  if (config.compiler.backend == "repl") return std::make_unique<ReplBackend>(config.compiler.command);
  return std::make_unique<MockCompilerBackend>();
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const PipelineConfig& config) {
  const auto& e = config.embedding;
  if (e.provider == "openai") {
    const auto var = api_key_env_var("embedding");
    const char* key = std::getenv(var.c_str());
    return std::make_unique<OpenAiEmbeddingProvider>(e.base_url, e.model_id, key ? key : "", e.dim);
  }
  return std::make_unique<MockEmbeddingProvider>(e.dim, e.seed);
}

// ---- ingest ----

void run_ingest(const PipelineConfig& config, const IngestOptions& options, std::ostream& log) {
  if (options.export_path.has_value() == options.source_dir.has_value()) {
    throw InvalidInput("ingest needs exactly one of --export or --from-source");
  }
  CorpusIndex index;
  json extra;
  if (options.export_path) {
    index = load_index(*options.export_path);
    extra["source"] = "export";
  } else {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(*options.source_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".lean") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<DeclarationRecord> decls;
    CorpusIndex::TextMap heads;
    CorpusIndex::TextMap headers;
    json diagnostics = json::array();
    for (const auto& f : files) {
      const auto rel = fs::relative(f, *options.source_dir).generic_string();
      auto scan = scan_declarations(read_file(f), rel);
      for (auto& d : scan.declarations) decls.push_back(std::move(d));
      for (const auto& d : scan.diagnostics) diagnostics.push_back(rel + ": " + d);
      if (!scan.module_doc.empty()) heads[rel] = scan.module_doc;
      if (!scan.header.empty()) headers[rel] = scan.header;
    }
    index = CorpusIndex(std::move(decls), {}, std::move(heads), std::move(headers));
    extra["source"] = "lean_sources";
    extra["files"] = files.size();
    extra["scan_diagnostics"] = diagnostics;
  }
  fs::create_directories(options.out_dir);
  write_file_atomic(options.out_dir / "index.json", serialize(index));
  extra["declarations"] = index.declarations().size();
  extra["proofs"] = index.proofs().size();
  extra["warnings"] = index.warnings();

  if (options.examples) {
    if (!options.store_out) throw InvalidInput("--examples needs --store-out");
    std::vector<Annotation> annotations;
    std::size_t line_no = 0;
    for (const auto& line : split(read_file(*options.examples), '\n')) {
      ++line_no;
      if (trim(line).empty()) continue;
      try {
        const auto j = json::parse(line);
        annotations.push_back({j.at("id").get<std::string>(), j.at("formal_text").get<std::string>(),
                               j.at("informal_text").get<std::string>()});
      } catch (const json::exception& e) {
        throw SchemaError("line " + std::to_string(line_no), e.what());
      }
    }
    const auto provider = make_embedding_provider(config);
    save_store(build_store(annotations, *provider), *options.store_out);
    extra["examples"] = annotations.size();
  }
  write_manifest(options.out_dir / "ingest_manifest.json", "ingest", config, extra);
  log << "ingested " << index.declarations().size() << " declarations, " << index.proofs().size()
      << " proofs\n";
  for (const auto& w : index.warnings()) log << "warning: " << w << "\n";
}

// ---- stratify ----

void run_stratify(const PipelineConfig& config, const StratifyOptions& options, std::ostream& log) {
  const auto index = load_index(options.index);
  const auto graph = build_graph(index);
  const auto levels = stratify(graph);
  fs::create_directories(options.out_dir);
  json j{{"level_of", levels.level_of},
         {"levels", levels.levels},
         {"unresolved_dependencies", graph.unresolved_dependencies},
         {"batches", schedule(levels, config.batch_size)}};
  write_file_atomic(options.out_dir / "levels.json", dump_sorted(j));
  write_file_atomic(options.out_dir / "graph.dot", to_dot(graph, &levels));
  write_manifest(options.out_dir / "stratify_manifest.json", "stratify", config,
                 {{"levels", levels.levels.size()}, {"nodes", graph.nodes.size()},
                  {"batch_size", config.batch_size}});
  log << graph.nodes.size() << " declarations in " << levels.levels.size() << " levels\n";
}

// ---- informalize ----

namespace {

struct RetrievalSetup {
  std::optional<ExampleStore> store;
  std::unique_ptr<EmbeddingProvider> provider;

  std::vector<RetrievedExample> query(const std::string& text, int k) const {
    std::vector<RetrievedExample> out;
    if (!store || store->count() == 0) return out;
    for (const auto& s : query_knn(*store, embed(text, *provider), k)) {
      out.push_back(RetrievedExample::from(s));
    }
    return out;
  }
};

RetrievalSetup setup_retrieval(const PipelineConfig& config) {
  RetrievalSetup r;
  if (!config.example_store) return r;
  r.store = load_store(*config.example_store);
  r.provider = make_embedding_provider(config);
  if (r.store->count() > 0 && r.provider->dim() != r.store->dim()) {
    throw InvalidInput("embedding.dim " + std::to_string(r.provider->dim()) +
                       " does not match the example store (" + std::to_string(r.store->dim()) + ")");
  }
  return r;
}

}  // namespace

void run_informalize(const PipelineConfig& config, const InformalizeOptions& options,
                     std::ostream& log) {
  const auto index = load_index(options.index);
  const auto graph = build_graph(index);
  const auto levels = stratify(graph);
  const auto registry = load_registry(config);
  const auto notes = config.tactic_notes ? load_tactic_notes(*config.tactic_notes)
                                         : std::map<std::string, std::string>{};
  const auto retrieval = setup_retrieval(config);
  const auto& out = options.out_dir;

  const auto context_for = [&](const DeclarationRecord& d,
                               const std::map<std::string, std::string>& translations) {
    return build_statement_context(d, index, levels, translations, config.neighbor_limit,
                                   retrieval.query(d.signature, config.retrieval_k));
  };

  if (options.dry_run) {
    long written = 0;
    for (std::size_t lvl = 0; lvl < levels.levels.size(); ++lvl) {
      for (const auto& name : levels.levels[lvl]) {
        const auto prompt = assemble_statement_prompt(context_for(index.at(name), {}), registry,
                                                      config.prompt_budget_chars);
        write_file_atomic(out / "prompts" / ("level_" + std::to_string(lvl)) / (name + ".txt"),
                          prompt.text);
        ++written;
      }
    }
    log << "dry run: wrote " << written << " statement prompts, no provider calls\n";
    return;
  }

  const auto manifest_path = out / "informalize_manifest.json";
  guard_config(manifest_path, config);
  fs::create_directories(out);
  write_manifest(manifest_path, "informalize", config, {{"status", "running"}});

  const auto ledger_path = out / "ledger.jsonl";
  std::set<std::string> committed;
  for (const auto& line : complete_lines(ledger_path)) {
    try {
      committed.insert(json::parse(line).at("id").get<std::string>());
    } catch (const json::exception&) {
    }
  }

  std::map<std::string, std::string> translations;
  std::map<std::string, json> statement_records;
  std::map<std::string, json> proof_records;
  for (std::size_t lvl = 0; lvl < levels.levels.size(); ++lvl) {
    for (auto& j : reconcile(out / "statements" / level_file(static_cast<int>(lvl)), committed)) {
      const auto name = j["full_name"].get<std::string>();
      translations[name] = j["informal_text"].get<std::string>();
      statement_records[name] = std::move(j);
    }
    for (auto& j : reconcile(out / "proofs" / level_file(static_cast<int>(lvl)), committed)) {
      const auto name = j["full_name"].get<std::string>();
      proof_records[name] = std::move(j);
    }
  }

  Gateway gateway(config.gateway);
  const auto informalizer = bind_role(config, kRoleInformalizer);
  const auto width = static_cast<std::size_t>(config.gateway.max_in_flight);
  // The ledger line is the commit point; a record without one is dropped on resume.
  const auto commit = [&](const fs::path& file, const std::string& line, const std::string& id) {
    append_line_synced(file, line);
    append_line_synced(ledger_path, json{{"id", id}}.dump());
    committed.insert(id);
  };
  const auto ask = [&](const std::string& prompt) {
    return trim(gateway.complete(informalizer.request(prompt), *informalizer.provider).front().text);
  };

  // Statements, level by level so every dependency translation is available.
  long new_statements = 0;
  for (std::size_t lvl = 0; lvl < levels.levels.size(); ++lvl) {
    std::vector<std::string> pending;
    for (const auto& n : levels.levels[lvl]) {
      if (!committed.count("stmt:" + n)) pending.push_back(n);
    }
    const auto file = out / "statements" / level_file(static_cast<int>(lvl));
    for (std::size_t b = 0; b < pending.size(); b += static_cast<std::size_t>(config.batch_size)) {
      const auto e = std::min(pending.size(), b + static_cast<std::size_t>(config.batch_size));
      std::vector<std::string> lines(e - b);
      parallel_for(e - b, width, [&](std::size_t i) {
        const auto& d = index.at(pending[b + i]);
        const auto prompt =
            assemble_statement_prompt(context_for(d, translations), registry, config.prompt_budget_chars);
        ordered_json r;
        r["id"] = "stmt:" + d.full_name;
        r["full_name"] = d.full_name;
        r["kind"] = to_string(d.kind);
        r["level"] = lvl;
        r["formal_text"] = d.signature;
        r["informal_text"] = ask(prompt.text);
        r["template_id"] = prompt.template_id;
        r["context_digest"] = prompt.context_digest;
        lines[i] = r.dump();
      });
      for (std::size_t i = 0; i < lines.size(); ++i) {
        auto j = json::parse(lines[i]);
        commit(file, lines[i], j["id"].get<std::string>());
        translations[pending[b + i]] = j["informal_text"].get<std::string>();
        statement_records[pending[b + i]] = std::move(j);
        ++new_statements;
      }
      check_interrupt();
    }
  }

  // Proofs, after the statement pass for the same declaration.
  long new_proofs = 0;
  long proof_failures = 0;
  for (std::size_t lvl = 0; lvl < levels.levels.size(); ++lvl) {
    std::vector<std::string> pending;
    for (const auto& n : levels.levels[lvl]) {
      if (index.proof_of(n) && translations.count(n) && !committed.count("proof:" + n)) {
        pending.push_back(n);
      }
    }
    const auto file = out / "proofs" / level_file(static_cast<int>(lvl));
    for (std::size_t b = 0; b < pending.size(); b += static_cast<std::size_t>(config.batch_size)) {
      const auto e = std::min(pending.size(), b + static_cast<std::size_t>(config.batch_size));
      std::vector<std::string> lines(e - b);
      parallel_for(e - b, width, [&](std::size_t i) {
        const auto& name = pending[b + i];
        const auto& d = index.at(name);
        ProofContext ctx{d.signature, translations.at(name), *index.proof_of(name), notes};
        const auto stepwise = extract_indexed(ask(assemble_proof_prompt(ctx, registry).text), "step");
        ordered_json r;
        r["id"] = "proof:" + name;
        r["full_name"] = name;
        r["level"] = lvl;
        r["stepwise"] = stepwise;
        if (stepwise.size() != ctx.steps.size()) {
          r["informal_proof"] = nullptr;
          r["error"] = LengthMismatch(ctx.steps.size(), stepwise.size()).what();
        } else {
          r["informal_proof"] = ask(summarize_steps_prompt(stepwise, ctx, registry).text);
        }
        lines[i] = r.dump();
      });
      for (const auto& line : lines) {
        const auto j = json::parse(line);
        commit(file, line, j["id"].get<std::string>());
        if (j["informal_proof"].is_null()) ++proof_failures;
        proof_records[j["full_name"].get<std::string>()] = j;
        ++new_proofs;
      }
      check_interrupt();
    }
  }

  // Dataset view: statement pairs in level order, then proof pairs.
  std::vector<NLFLPair> pairs;
  for (std::size_t lvl = 0; lvl < levels.levels.size(); ++lvl) {
    for (const auto& n : levels.levels[lvl]) {
      const auto it = statement_records.find(n);
      if (it == statement_records.end()) continue;
      const auto& r = it->second;
      if (trim(r["informal_text"].get<std::string>()).empty()) continue;
      NLFLPair p;
      p.id = r["id"].get<std::string>();
      p.formal_text = r["formal_text"].get<std::string>();
      p.informal_text = r["informal_text"].get<std::string>();
      p.source_name = n;
      p.level = static_cast<int>(lvl);
      p.kind = r["kind"].get<std::string>();
      pairs.push_back(std::move(p));
    }
  }
  for (std::size_t lvl = 0; lvl < levels.levels.size(); ++lvl) {
    for (const auto& n : levels.levels[lvl]) {
      const auto it = proof_records.find(n);
      if (it == proof_records.end() || it->second["informal_proof"].is_null()) continue;
      std::string formal = index.at(n).signature + " := by";
      for (const auto& s : *index.proof_of(n)) formal += "\n  " + s.tactic_text;
      NLFLPair p;
      p.id = "proof:" + n;
      p.formal_text = formal;
      p.informal_text = translations.at(n) + "\n\n" + it->second["informal_proof"].get<std::string>();
      p.source_name = n;
      p.level = static_cast<int>(lvl);
      p.kind = std::string(to_string(index.at(n).kind));
      p.record_type = "proof";
      pairs.push_back(std::move(p));
    }
  }
  write_pairs(pairs, out / "pairs_original.jsonl");

  write_manifest(manifest_path, "informalize", config,
                 {{"status", "complete"},
                  {"levels", levels.levels.size()},
                  {"statements", statement_records.size()},
                  {"proofs", proof_records.size()},
                  {"proof_failures", proof_failures},
                  {"pairs", pairs.size()}});
  log << "informalized " << new_statements << " statements and " << new_proofs
      << " proofs this run (" << statement_records.size() << "/" << index.declarations().size()
      << " statements total)\n";
}

// ---- augment ----

void run_augment(const PipelineConfig& config, const AugmentOptions& options, std::ostream& log) {
  if (!options.tactic && !options.informal) throw InvalidInput("augment needs --tactic and/or --informal");
  const auto& out = options.out_dir;
  fs::create_directories(out);
  json extra{{"dedup_seed", config.dedup_seed}};
  Gateway gateway(config.gateway);
  const auto informalizer = bind_role(config, kRoleInformalizer);
  const auto width = static_cast<std::size_t>(config.gateway.max_in_flight);

  if (options.tactic) {
    if (!options.index) throw InvalidInput("--tactic needs --index");
    const auto index = load_index(*options.index);
    const auto registry = load_registry(config);
    std::vector<SynthesizedStatement> candidates;
    for (const auto& [name, steps] : index.proofs()) {
      const auto& file = index.at(name).file_path;
      const auto h = index.file_headers().find(file);
      const auto preamble = h == index.file_headers().end() ? std::string() : h->second;
      for (auto& s : synthesize_from_proof(steps, name, preamble)) candidates.push_back(std::move(s));
    }
    const auto backend = make_backend(config);
    const auto filtered = compile_filter(
        candidates, *backend,
        {config.compile_timeout_ms, config.header_prelude, static_cast<int>(config.candidate_cap)});

    const auto statement_json = [](const SynthesizedStatement& s) {
      ordered_json j;
      j["name"] = s.name;
      j["origin"] = s.origin;
      j["origin_step"] = s.origin_step;
      j["goal_index"] = s.goal_index;
      j["formal_text"] = s.formal_text;
      j["preamble"] = s.preamble;
      return j;
    };
    std::string valid_text;
    for (const auto& s : filtered.valid) valid_text += statement_json(s).dump() + "\n";
    write_file_atomic(out / "synthesized.jsonl", valid_text);
    std::string rejected_text;
    for (const auto& r : filtered.rejected) {
      ordered_json j;
      j["name"] = r.candidate.name;
      j["formal_text"] = r.candidate.formal_text;
      j["diagnostic"] = r.diagnostic;
      rejected_text += j.dump() + "\n";
    }
    write_file_atomic(out / "rejected.jsonl", rejected_text);

    const long n_original = options.n_original.value_or(static_cast<long>(index.proofs().size()));
    const auto sampled = dedup_sample(std::span<const SynthesizedStatement>(filtered.valid),
                                      n_original, config.dedup_seed);
    std::string sampled_text;
    for (const auto& s : sampled) sampled_text += statement_json(s).dump() + "\n";
    write_file_atomic(out / "sampled.jsonl", sampled_text);

    std::vector<NLFLPair> pairs(sampled.size());
    parallel_for(sampled.size(), width, [&](std::size_t i) {
      const auto& s = sampled[i];
      DeclarationRecord subject;
      subject.full_name = s.name;
      subject.kind = DeclKind::Theorem;
      subject.signature = strip_sorry_body(s.formal_text);
      subject.file_path = index.at(s.origin).file_path;
      StatementContext ctx;
      ctx.subject = subject;
      const auto prompt = assemble_statement_prompt(ctx, registry, config.prompt_budget_chars);
      auto& p = pairs[i];
      p.id = "tac:" + s.name;
      p.formal_text = s.formal_text;
      p.informal_text = trim(
          gateway.complete(informalizer.request(prompt.text), *informalizer.provider).front().text);
      p.provenance = Provenance::TacticAug;
      p.source_name = s.origin;
      p.kind = "theorem";
    });
    std::erase_if(pairs, [](const NLFLPair& p) { return p.informal_text.empty(); });
    write_pairs(pairs, out / "pairs_tactic_aug.jsonl");
    extra["tactic"] = {{"candidates", candidates.size()},
                       {"valid", filtered.valid.size()},
                       {"rejected", filtered.rejected.size()},
                       {"n_original", n_original},
                       {"sampled", sampled.size()},
                       {"pairs", pairs.size()}};
    log << "tactic augmentation: " << candidates.size() << " candidates, " << filtered.valid.size()
        << " valid, " << sampled.size() << " sampled\n";
  }

  if (options.informal) {
    if (!options.pairs) throw InvalidInput("--informal needs --pairs");
    std::vector<NLFLPair> origins;
    for (auto& p : read_pairs(*options.pairs)) {
      if (p.provenance == Provenance::Original && p.record_type != "proof") origins.push_back(std::move(p));
    }
    std::vector<AugmentationStrategy> strategies;
    for (const auto& tag : config.strategies) strategies.push_back(AugmentationStrategy::parse(tag));
    if (strategies.empty()) strategies = default_strategies();

    std::vector<VariantBatch> batches(origins.size());
    parallel_for(origins.size(), width, [&](std::size_t i) {
      batches[i] = informal_variants(origins[i], strategies, gateway, informalizer);
    });
    std::vector<NLFLPair> pairs;
    long attempted = 0, kept = 0, dropped = 0;
    for (std::size_t i = 0; i < origins.size(); ++i) {
      attempted += batches[i].attempted;
      kept += batches[i].kept;
      dropped += batches[i].dropped;
      for (const auto& v : batches[i].variants) pairs.push_back(variant_pair(origins[i], v));
    }
    write_pairs(pairs, out / "pairs_informal_aug.jsonl");
    json tags = json::array();
    for (const auto& s : strategies) tags.push_back(s.tag());
    extra["informal"] = {{"origins", origins.size()}, {"strategies", tags},
                         {"attempted", attempted},   {"kept", kept},
                         {"dropped", dropped}};
    log << "informal augmentation: " << kept << " of " << attempted << " variants kept\n";
  }
  write_manifest(out / "augment_manifest.json", "augment", config, extra);
}

// ---- mix ----

void run_mix(const PipelineConfig& config, const MixCommandOptions& options, std::ostream& log) {
  MixPools pools{read_pairs(options.original), read_pairs(options.tactic_aug),
                 read_pairs(options.informal_aug), read_pairs(options.general)};
  MixOptions mo;
  mo.provenance_ratio = config.provenance_ratio;
  mo.direction_ratio = config.direction_ratio;
  mo.base_pairs = options.base_pairs;
  mo.seed = config.mix_seed;
  const auto result = mix(pools, mo);
  fs::create_directories(options.out_dir);
  const auto written = write_pairs(result.dataset, options.out_dir / "dataset.jsonl");
  auto manifest = json::parse(result.manifest.to_json());
  manifest["records_written"] = written;
  write_manifest(options.out_dir / "mix_manifest.json", "mix", config, manifest);
  for (const auto& w : result.manifest.warnings) log << "warning: " << w << "\n";
  log << "mixed " << written << " records (" << result.manifest.ratio_spec << ")\n";
}

// ---- validate ----

void run_validate(const PipelineConfig& config, const ValidateOptions& options, std::ostream& log) {
  const auto items = read_benchmark(read_file(options.bench));
  if (items.empty()) throw InvalidInput("benchmark " + options.bench.string() + " has no items");
  Gateway gateway(config.gateway);
  const auto translator = bind_role(config, kRoleTranslator);
  const auto back = bind_role(config, kRoleBackTranslator);
  const auto judge = bind_role(config, kRoleNliJudge);
  const auto backend = make_backend(config);
  const ValidationRoles roles{gateway, translator, back, judge};
  ValidatorOptions vo{config.header_prelude, config.compile_timeout_ms, config.short_circuit,
                      config.candidate_cap};

  std::vector<ValidationReport> reports;
  json aborted = json::array();
  std::string report_text;
  long parse_failures = 0;
  for (const auto& item : items) {
    try {
      auto r = validate_item(item, config.pass_k, roles, *backend, vo);
      parse_failures += r.nli_parse_failures;
      report_text += r.to_json_line() + "\n";
      reports.push_back(std::move(r));
    } catch (const BackendUnavailable& e) {
      aborted.push_back({{"id", item.id}, {"reason", e.what()}});
      log << "item " << item.id << " aborted: " << e.what() << "\n";
    }
    check_interrupt();
  }
  fs::create_directories(options.out_dir);
  write_file_atomic(options.out_dir / "reports.jsonl", report_text);
  const auto name = options.dataset_name.empty() ? options.bench.stem().string() : options.dataset_name;
  json extra{{"k", config.pass_k},
             {"items", items.size()},
             {"aborted", aborted},
             {"short_circuit", config.short_circuit},
             {"nli_parse_failures", parse_failures}};
  if (reports.empty()) {
    write_manifest(options.out_dir / "validate_manifest.json", "validate", config, extra);
    throw BackendUnavailable("every item was aborted by the compiler backend");
  }
  const auto summary = summarize(reports, name);
  write_file_atomic(options.out_dir / "summary.json", summary.to_json());
  write_file_atomic(options.out_dir / "summary.txt", summary.to_table());
  write_manifest(options.out_dir / "validate_manifest.json", "validate", config, extra);
  log << summary.to_table();
}

// ---- stats ----

void run_stats(const StatsOptions& options, std::ostream& out) {
  const auto s = stats(options.dataset);
  if (options.json_out) write_file_atomic(*options.json_out, s.to_json());
  out << s.to_table();
}

}  // namespace herald

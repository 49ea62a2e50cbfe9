// herald: command-line driver for the informalization / augmentation /
// validation pipeline. Every subcommand reads one JSON config (--config) and
// lets flags override individual keys.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "herald/config.hpp"
#include "herald/dataset.hpp"
#include "herald/pipeline.hpp"

namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0    success\n"
    "  2    invalid input: schema error, bad config, dependency cycle, config changed on resume\n"
    "  3    provider exhausted or request budget spent (rerun the same command to resume)\n"
    "  4    compiler backend unavailable, I/O failure, or other error\n"
    "  130  interrupted; finished batches are kept\n"
    "Environment: HERALD_API_KEY_<ROLE> supplies the key for an openai-bound role.";

extern "C" void on_sigint(int) { herald::interrupt_requested().store(true); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"herald: Lean 4 statement and proof informalization pipeline"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "pipeline config (JSON)")->check(CLI::ExistingFile);

  // Config overrides shared by several subcommands.
  std::optional<std::string> templates, tactic_notes, example_store;
  std::optional<int> retrieval_k, batch_size, pass_k;
  std::optional<std::uint64_t> dedup_seed, mix_seed;
  std::optional<std::string> ratio, dirmix;
  std::optional<long> timeout_ms;
  bool no_short_circuit = false;

  auto* ingest = app.add_subcommand("ingest", "parse a corpus export or Lean sources into index.json");
  herald::IngestOptions ingest_opts;
  std::string ingest_out;
  std::optional<std::string> export_path, source_dir, examples, store_out;
  ingest->add_option("--export", export_path, "jixia-style JSON export");
  ingest->add_option("--from-source", source_dir, "directory of .lean files (header scanner)");
  ingest->add_option("--examples", examples, "annotated examples JSONL for the exemplar store");
  ingest->add_option("--store-out", store_out, "where to write the exemplar store");
  ingest->add_option("--out", ingest_out, "output directory")->required();

  auto* strat = app.add_subcommand("stratify", "compute dependency levels and batches");
  std::string strat_index, strat_out;
  strat->add_option("--index", strat_index, "index.json from ingest")->required()->check(CLI::ExistingFile);
  strat->add_option("--out", strat_out, "output directory")->required();
  strat->add_option("--batch-size", batch_size, "names per batch");

  auto* inf = app.add_subcommand("informalize", "translate statements then proofs, level by level");
  std::string inf_index, inf_out;
  bool dry_run = false;
  inf->add_option("--index", inf_index, "index.json from ingest")->required()->check(CLI::ExistingFile);
  inf->add_option("--out", inf_out, "output directory (resumable)")->required();
  inf->add_flag("--dry-run", dry_run, "write prompts only; no provider calls");
  inf->add_option("--templates", templates, "template registry JSON");
  inf->add_option("--tactic-notes", tactic_notes, "tactic notes JSON");
  inf->add_option("--example-store", example_store, "exemplar store directory");
  inf->add_option("--retrieval-k", retrieval_k, "exemplars per prompt");
  inf->add_option("--batch-size", batch_size, "declarations per batch");

  auto* aug = app.add_subcommand("augment", "tactic-based and informal augmentation");
  std::string aug_out;
  std::optional<std::string> aug_index, aug_pairs;
  std::optional<long> n_original;
  bool tactic = false, informal = false;
  aug->add_flag("--tactic", tactic, "synthesize statements from proof states");
  aug->add_flag("--informal", informal, "rewrite informal statements with the four strategies");
  aug->add_option("--index", aug_index, "index.json (for --tactic)");
  aug->add_option("--pairs", aug_pairs, "pairs_original.jsonl (for --informal)");
  aug->add_option("--dedup-seed", dedup_seed, "seed for sampling synthesized statements");
  aug->add_option("--n-original", n_original, "sample size (default: number of proofs)");
  aug->add_option("--templates", templates, "template registry JSON");
  aug->add_option("--out", aug_out, "output directory")->required();

  auto* mixc = app.add_subcommand("mix", "assemble a training mixture and its manifest");
  herald::MixCommandOptions mix_opts;
  std::string mix_original, mix_tactic, mix_informal, mix_general, mix_out;
  std::optional<long> base_pairs;
  mixc->add_option("--original", mix_original, "original pairs JSONL")->required()->check(CLI::ExistingFile);
  mixc->add_option("--tactic-aug", mix_tactic, "tactic-augmented pairs JSONL")->required()->check(CLI::ExistingFile);
  mixc->add_option("--informal-aug", mix_informal, "informal-augmented pairs JSONL")->required()->check(CLI::ExistingFile);
  mixc->add_option("--general", mix_general, "general-domain records JSONL")->required()->check(CLI::ExistingFile);
  mixc->add_option("--ratio", ratio, "provenance ratio original:tactic:informal (default 1:2:1)");
  mixc->add_option("--dirmix", dirmix, "nl_to_fl:fl_to_nl:general ratio (default 2:2:1)");
  mixc->add_option("--seed", mix_seed, "shuffle and sampling seed");
  mixc->add_option("--pairs", base_pairs, "pairs to draw before mirroring (default: as many as fit)");
  mixc->add_option("--out", mix_out, "output directory")->required();

  auto* val = app.add_subcommand("validate", "translate, compile, back-translate and judge a benchmark");
  std::string bench, val_out, dataset_name;
  val->add_option("--bench", bench, "benchmark JSONL {id, informal_text, header?}")->required()->check(CLI::ExistingFile);
  val->add_option("--k", pass_k, "candidates per item (pass@k)");
  val->add_option("--timeout-ms", timeout_ms, "per-candidate compile timeout");
  val->add_flag("--no-short-circuit", no_short_circuit, "check every candidate even after a success");
  val->add_option("--name", dataset_name, "dataset name in the summary");
  val->add_option("--out", val_out, "output directory")->required();

  auto* st = app.add_subcommand("stats", "count a dataset by provenance, direction, kind and level");
  std::string stats_dataset;
  std::optional<std::string> stats_json;
  st->add_option("dataset", stats_dataset, "dataset JSONL")->required()->check(CLI::ExistingFile);
  st->add_option("--json", stats_json, "also write the counts as JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? herald::exit_code::kOk : herald::exit_code::kInput;
  }
  std::signal(SIGINT, on_sigint);

  try {
    auto config = config_path.empty() ? herald::PipelineConfig{} : herald::load_config(config_path);
    if (templates) config.template_registry = *templates;
    if (tactic_notes) config.tactic_notes = *tactic_notes;
    if (example_store) config.example_store = *example_store;
    if (retrieval_k) config.retrieval_k = *retrieval_k;
    if (batch_size) config.batch_size = *batch_size;
    if (pass_k) config.pass_k = *pass_k;
    if (dedup_seed) config.dedup_seed = *dedup_seed;
    if (mix_seed) config.mix_seed = *mix_seed;
    if (ratio) config.provenance_ratio = herald::Ratio3::parse(*ratio);
    if (dirmix) config.direction_ratio = herald::Ratio3::parse(*dirmix);
    if (timeout_ms) config.compile_timeout_ms = *timeout_ms;
    if (no_short_circuit) config.short_circuit = false;
    config.validate();
    config.check_paths();

    if (*ingest) {
      if (export_path) ingest_opts.export_path = *export_path;
      if (source_dir) ingest_opts.source_dir = *source_dir;
      if (examples) ingest_opts.examples = *examples;
      if (store_out) ingest_opts.store_out = *store_out;
      ingest_opts.out_dir = ingest_out;
      herald::run_ingest(config, ingest_opts, std::cerr);
    } else if (*strat) {
      herald::run_stratify(config, {strat_index, strat_out}, std::cerr);
    } else if (*inf) {
      herald::run_informalize(config, {inf_index, inf_out, dry_run}, std::cerr);
    } else if (*aug) {
      herald::AugmentOptions o;
      o.out_dir = aug_out;
      if (aug_index) o.index = *aug_index;
      if (aug_pairs) o.pairs = *aug_pairs;
      o.tactic = tactic;
      o.informal = informal;
      o.n_original = n_original;
      herald::run_augment(config, o, std::cerr);
    } else if (*mixc) {
      mix_opts = {mix_original, mix_tactic, mix_informal, mix_general, mix_out, base_pairs};
      herald::run_mix(config, mix_opts, std::cerr);
    } else if (*val) {
      herald::run_validate(config, {bench, val_out, dataset_name}, std::cerr);
    } else if (*st) {
      herald::StatsOptions o{stats_dataset, {}};
      if (stats_json) o.json_out = *stats_json;
      herald::run_stats(o, std::cout);
    }
  } catch (const std::exception& e) {
    const int code = herald::exit_code_for(e);
    std::cerr << "herald: " << e.what() << "\n";
    if (code == herald::exit_code::kProvider || code == herald::exit_code::kInterrupted) {
      std::cerr << "herald: completed work is kept; rerun the same command to resume\n";
    }
    return code;
  }
  return herald::exit_code::kOk;
}

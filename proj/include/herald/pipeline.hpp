#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "herald/compiler.hpp"
#include "herald/config.hpp"
#include "herald/error.hpp"
#include "herald/retrieval.hpp"

namespace herald {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kInput = 2;        // schema, config, cycle, or tampered resume
inline constexpr int kProvider = 3;     // provider exhaustion or budget; resumable
inline constexpr int kBackend = 4;      // compiler backend unavailable, IO, anything else
inline constexpr int kInterrupted = 130;
}  // namespace exit_code

// Raised when resuming into an output directory produced under another config.
class ConfigMismatch : public Error {
 public:
  using Error::Error;
};

class Interrupted : public Error {
 public:
  Interrupted() : Error("interrupted; completed work is in the ledger") {}
};

int exit_code_for(const std::exception& e);

/// Set from a SIGINT handler; long-running stages stop after the batch in flight.
std::atomic<bool>& interrupt_requested();

struct IngestOptions {
  std::optional<std::filesystem::path> export_path;
  std::optional<std::filesystem::path> source_dir;
  std::optional<std::filesystem::path> examples;   // annotations JSONL for the exemplar store
  std::optional<std::filesystem::path> store_out;
  std::filesystem::path out_dir;
};

struct StratifyOptions {
  std::filesystem::path index;
  std::filesystem::path out_dir;
};

struct InformalizeOptions {
  std::filesystem::path index;
  std::filesystem::path out_dir;
  bool dry_run = false;
};

struct AugmentOptions {
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> index;  // required for tactic augmentation
  std::optional<std::filesystem::path> pairs;  // original pairs, required for informal augmentation
  bool tactic = false;
  bool informal = false;
  std::optional<long> n_original;  // dedup target; defaults to the number of proofs in the index
};

struct MixCommandOptions {
  std::filesystem::path original;
  std::filesystem::path tactic_aug;
  std::filesystem::path informal_aug;
  std::filesystem::path general;
  std::filesystem::path out_dir;
  std::optional<long> base_pairs;
};

struct ValidateOptions {
  std::filesystem::path bench;
  std::filesystem::path out_dir;
  std::string dataset_name;
};

struct StatsOptions {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> json_out;
};

void run_ingest(const PipelineConfig& config, const IngestOptions& options, std::ostream& log);
void run_stratify(const PipelineConfig& config, const StratifyOptions& options, std::ostream& log);
void run_informalize(const PipelineConfig& config, const InformalizeOptions& options,
                     std::ostream& log);
void run_augment(const PipelineConfig& config, const AugmentOptions& options, std::ostream& log);
void run_mix(const PipelineConfig& config, const MixCommandOptions& options, std::ostream& log);
void run_validate(const PipelineConfig& config, const ValidateOptions& options, std::ostream& log);
void run_stats(const StatsOptions& options, std::ostream& out);

std::unique_ptr<CompilerBackend> make_backend(const PipelineConfig& config);
std::unique_ptr<EmbeddingProvider> make_embedding_provider(const PipelineConfig& config);

}  // namespace herald

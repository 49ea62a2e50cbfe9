#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace herald {

enum class Direction { NlToFl, FlToNl, General };
enum class Provenance { Original, TacticAug, InformalAug, General };

std::string_view to_string(Direction d);
std::string_view to_string(Provenance p);
std::optional<Direction> parse_direction(std::string_view s);
std::optional<Provenance> parse_provenance(std::string_view s);

struct NLFLPair {
  std::string id;
  std::string formal_text;
  std::string informal_text;
  Direction direction = Direction::NlToFl;
  Provenance provenance = Provenance::Original;
  std::optional<std::string> source_name;
  std::optional<int> level;
  std::optional<std::string> kind;         // declaration kind of the source, when known
  std::optional<std::string> record_type;  // "proof" for proof pairs

  bool operator==(const NLFLPair&) const = default;
};

inline constexpr std::string_view kDatasetSchemaVersion = "1";

/// Throws InvalidInput when a record breaks the pair invariants (empty id or
/// text; only general records may carry an empty formal text).
void check_pair(const NLFLPair& pair);

/// One JSON object per line with a fixed key order; optional fields are
/// omitted when absent.
std::string to_jsonl_line(const NLFLPair& pair);
NLFLPair pair_from_json_line(std::string_view line, std::size_t line_number);

/// Atomic write (temp file, fsync, rename). Returns the record count.
std::size_t write_pairs(const std::vector<NLFLPair>& pairs, const std::filesystem::path& path);

/// Throws IoError, or SchemaError naming the 1-based line.
std::vector<NLFLPair> read_pairs(const std::filesystem::path& path);

/// Each nl_to_fl pair followed by its fl_to_nl mirror (id + "_rev").
/// Throws InvalidInput on any other direction, so mirroring twice is rejected.
std::vector<NLFLPair> mirror_directions(const std::vector<NLFLPair>& pairs);

struct Ratio3 {
  int a = 1;
  int b = 1;
  int c = 1;

  /// "a:b:c" with positive integers.
  static Ratio3 parse(std::string_view text);
  std::string str() const;
  bool operator==(const Ratio3&) const = default;
};

/// Largest-remainder split of `total` by `ratio`; ties on the remainder go
/// to the earlier class. Each share differs from the ideal by less than 1.
std::vector<long> largest_remainder(long total, const std::vector<int>& ratio);

struct MixPools {
  std::vector<NLFLPair> original;
  std::vector<NLFLPair> tactic_aug;
  std::vector<NLFLPair> informal_aug;
  std::vector<NLFLPair> general;
};

struct MixOptions {
  Ratio3 provenance_ratio{1, 2, 1};
  Ratio3 direction_ratio{2, 2, 1};
  std::optional<long> base_pairs;  // pairs drawn before mirroring; largest feasible when unset
  std::uint64_t seed = 0;
};

struct MixManifest {
  std::map<std::string, long> counts;            // emitted records per provenance
  std::map<std::string, long> direction_counts;  // emitted records per direction
  std::map<std::string, long> pair_counts;       // pairs per provenance before mirroring
  std::uint64_t seed = 0;
  std::string ratio_spec;
  long total = 0;
  std::vector<std::string> warnings;

  std::string to_json() const;
};

struct MixResult {
  std::vector<NLFLPair> dataset;
  MixManifest manifest;
};

/// The provenance ratio is applied to the pairs drawn before mirroring; the
/// direction ratio then splits the emitted records among nl_to_fl, fl_to_nl
/// and general. Short pools scale the request down (recorded as a warning).
/// Throws EmptyPool when a pool needed by a positive ratio component is empty.
MixResult mix(const MixPools& pools, const MixOptions& options);

struct DatasetStats {
  long total = 0;
  std::map<std::string, long> by_provenance;
  std::map<std::string, long> by_direction;
  std::map<std::string, long> by_kind;
  std::map<std::string, long> by_record_type;
  std::map<int, long> level_histogram;
  // Summary columns: original statements, augmented statements, proofs.
  long original = 0;
  long augmented = 0;
  long proofs = 0;

  std::string to_json() const;
  std::string to_table() const;
};

DatasetStats stats(const std::filesystem::path& dataset_path);

}  // namespace herald

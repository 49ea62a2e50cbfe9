#include "herald/dataset.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "herald/error.hpp"
#include "herald/rng.hpp"
#include "herald/text.hpp"

namespace herald {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::NlToFl: return "nl_to_fl";
    case Direction::FlToNl: return "fl_to_nl";
    case Direction::General: return "general";
  }
  return "?";
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Original: return "original";
    case Provenance::TacticAug: return "tactic_aug";
    case Provenance::InformalAug: return "informal_aug";
    case Provenance::General: return "general";
  }
  return "?";
}

std::optional<Direction> parse_direction(std::string_view s) {
  for (auto d : {Direction::NlToFl, Direction::FlToNl, Direction::General}) {
    if (to_string(d) == s) return d;
  }
  return std::nullopt;
}

std::optional<Provenance> parse_provenance(std::string_view s) {
  for (auto p : {Provenance::Original, Provenance::TacticAug, Provenance::InformalAug,
                 Provenance::General}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

void check_pair(const NLFLPair& pair) {
  if (pair.id.empty()) throw InvalidInput("pair with empty id");
  if (pair.informal_text.empty()) throw InvalidInput("pair " + pair.id + ": empty informal_text");
  if (pair.formal_text.empty() && pair.provenance != Provenance::General) {
    throw InvalidInput("pair " + pair.id + ": empty formal_text");
  }
}

std::string to_jsonl_line(const NLFLPair& p) {
  ordered_json j;
  j["id"] = p.id;
  j["direction"] = to_string(p.direction);
  j["provenance"] = to_string(p.provenance);
  j["formal_text"] = p.formal_text;
  j["informal_text"] = p.informal_text;
  if (p.source_name) j["source_name"] = *p.source_name;
  if (p.level) j["level"] = *p.level;
  if (p.kind) j["kind"] = *p.kind;
  if (p.record_type) j["record_type"] = *p.record_type;
  return j.dump();
}

NLFLPair pair_from_json_line(std::string_view line, std::size_t line_number) {
  const auto where = "line " + std::to_string(line_number);
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw SchemaError(where, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError(where, "expected an object");
  const auto str = [&](const char* key, bool required) -> std::optional<std::string> {
    if (!j.contains(key) || j[key].is_null()) {
      if (required) throw SchemaError(where, std::string("missing field '") + key + "'");
      return std::nullopt;
    }
    if (!j[key].is_string()) throw SchemaError(where, std::string("field '") + key + "' must be a string");
    return j[key].get<std::string>();
  };
  NLFLPair p;
  p.id = *str("id", true);
  p.formal_text = *str("formal_text", true);
  p.informal_text = *str("informal_text", true);
  const auto dir = parse_direction(*str("direction", true));
  if (!dir) throw SchemaError(where, "unknown direction");
  p.direction = *dir;
  const auto prov = parse_provenance(*str("provenance", true));
  if (!prov) throw SchemaError(where, "unknown provenance");
  p.provenance = *prov;
  p.source_name = str("source_name", false);
  p.kind = str("kind", false);
  p.record_type = str("record_type", false);
  if (j.contains("level") && !j["level"].is_null()) {
    if (!j["level"].is_number_integer()) throw SchemaError(where, "field 'level' must be an integer");
    p.level = j["level"].get<int>();
  }
  try {
    check_pair(p);
  } catch (const InvalidInput& e) {
    throw SchemaError(where, e.what());
  }
  return p;
}

std::size_t write_pairs(const std::vector<NLFLPair>& pairs, const std::filesystem::path& path) {
  std::string out;
  for (const auto& p : pairs) {
    check_pair(p);
    out += to_jsonl_line(p);
    out += '\n';
  }
  write_file_atomic(path, out);
  return pairs.size();
}

std::vector<NLFLPair> read_pairs(const std::filesystem::path& path) {
  const auto text = read_file(path);
  std::vector<NLFLPair> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    ++line_no;
    out.push_back(pair_from_json_line(std::string_view(text).substr(pos, nl - pos), line_no));
    pos = nl + 1;
  }
  return out;
}

std::vector<NLFLPair> mirror_directions(const std::vector<NLFLPair>& pairs) {
  std::vector<NLFLPair> out;
  out.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    if (p.direction != Direction::NlToFl) {
      throw InvalidInput("mirror_directions: pair " + p.id + " is " +
                         std::string(to_string(p.direction)) + ", expected nl_to_fl");
    }
    out.push_back(p);
    auto rev = p;
    rev.id += "_rev";
    rev.direction = Direction::FlToNl;
    out.push_back(std::move(rev));
  }
  return out;
}

Ratio3 Ratio3::parse(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw InvalidInput("ratio '" + std::string(text) + "' is not a:b:c");
  std::array<int, 3> v{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto t = trim(parts[i]);
    std::size_t used = 0;
    int x = 0;
    try {
      x = std::stoi(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (t.empty() || used != t.size() || x < 1) {
      throw InvalidInput("ratio '" + std::string(text) + "' needs positive integers");
    }
    v[i] = x;
  }
  return {v[0], v[1], v[2]};
}

std::string Ratio3::str() const {
  return std::to_string(a) + ":" + std::to_string(b) + ":" + std::to_string(c);
}

std::vector<long> largest_remainder(long total, const std::vector<int>& ratio) {
  long long sum = 0;
  for (int r : ratio) {
    if (r < 0) throw InvalidInput("negative ratio component");
    sum += r;
  }
  if (sum == 0) throw InvalidInput("ratio sums to zero");
  std::vector<long> out(ratio.size());
  std::vector<std::pair<long long, std::size_t>> rem;
  long assigned = 0;
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    const long long num = static_cast<long long>(total) * ratio[i];
    out[i] = static_cast<long>(num / sum);
    assigned += out[i];
    rem.emplace_back(num % sum, i);
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (long k = 0; k < total - assigned; ++k) ++out[rem[static_cast<std::size_t>(k)].second];
  return out;
}

namespace {

// Largest total in [0, upper] whose split fits within `caps`.
long largest_fitting(long upper, const std::vector<int>& ratio, const std::vector<long>& caps) {
  for (long t = upper; t > 0; --t) {
    const auto split_counts = largest_remainder(t, ratio);
    bool fits = true;
    for (std::size_t i = 0; i < caps.size(); ++i) fits = fits && split_counts[i] <= caps[i];
    if (fits) return t;
  }
  return 0;
}

long upper_bound_for(const std::vector<int>& ratio, const std::vector<long>& caps) {
  long long sum = 0;
  for (int r : ratio) sum += r;
  long long best = -1;
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    const long long t = (caps[i] + 1) * sum / ratio[i] + 1;
    if (best < 0 || t < best) best = t;
  }
  return static_cast<long>(best);
}

std::vector<NLFLPair> pick(SeededRng& rng, const std::vector<NLFLPair>& pool, long n) {
  std::vector<NLFLPair> out;
  for (auto i : sample_indices(rng, pool.size(), static_cast<std::size_t>(n))) out.push_back(pool[i]);
  return out;
}

}  // namespace

std::string MixManifest::to_json() const {
  json j{{"counts", counts},
         {"direction_counts", direction_counts},
         {"pair_counts", pair_counts},
         {"seed", seed},
         {"ratio_spec", ratio_spec},
         {"total", total},
         {"warnings", warnings}};
  return j.dump(2) + "\n";
}

MixResult mix(const MixPools& pools, const MixOptions& options) {
  const std::array<std::pair<const char*, const std::vector<NLFLPair>*>, 3> sources{{
      {"original", &pools.original},
      {"tactic_aug", &pools.tactic_aug},
      {"informal_aug", &pools.informal_aug},
  }};
  for (const auto& [name, pool] : sources) {
    if (pool->empty()) throw EmptyPool(name);
  }
  if (pools.general.empty()) throw EmptyPool("general");
  if (options.base_pairs && *options.base_pairs < 1) throw InvalidInput("base_pairs must be >= 1");

  const auto& pr = options.provenance_ratio;
  const auto& dr = options.direction_ratio;
  const std::vector<int> prov_ratio{pr.a, pr.b, pr.c};
  const std::vector<long> pool_sizes{static_cast<long>(pools.original.size()),
                                     static_cast<long>(pools.tactic_aug.size()),
                                     static_cast<long>(pools.informal_aug.size())};

  MixResult result;
  auto& m = result.manifest;
  m.seed = options.seed;
  m.ratio_spec = "provenance " + pr.str() + " applied to pairs before mirroring; direction " +
                 dr.str() + " over nl_to_fl:fl_to_nl:general";

  const long feasible = largest_fitting(upper_bound_for(prov_ratio, pool_sizes), prov_ratio, pool_sizes);
  long n_pairs = options.base_pairs.value_or(feasible);
  if (n_pairs > feasible) {
    m.warnings.push_back("requested " + std::to_string(n_pairs) + " pairs; pools allow " +
                         std::to_string(feasible));
    n_pairs = feasible;
  }
  const auto per_prov = largest_remainder(n_pairs, prov_ratio);

  SeededRng rng(options.seed);
  std::vector<NLFLPair> forward;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    m.pair_counts[sources[i].first] = per_prov[i];
    for (auto& p : pick(rng, *sources[i].second, per_prov[i])) forward.push_back(std::move(p));
  }
  auto mirrored = mirror_directions(forward);
  std::vector<NLFLPair> reverse;
  forward.clear();
  for (auto& p : mirrored) {
    (p.direction == Direction::NlToFl ? forward : reverse).push_back(std::move(p));
  }

  const std::vector<int> dir_ratio{dr.a, dr.b, dr.c};
  const std::vector<long> dir_caps{static_cast<long>(forward.size()),
                                   static_cast<long>(reverse.size()),
                                   static_cast<long>(pools.general.size())};
  const long total = largest_fitting(upper_bound_for(dir_ratio, dir_caps), dir_ratio, dir_caps);
  const auto per_dir = largest_remainder(total, dir_ratio);
  if (per_dir[0] < dir_caps[0] || per_dir[1] < dir_caps[1]) {
    m.warnings.push_back("general pool of " + std::to_string(dir_caps[2]) +
                         " limits the direction mix; dropped " +
                         std::to_string(dir_caps[0] - per_dir[0]) + " nl_to_fl and " +
                         std::to_string(dir_caps[1] - per_dir[1]) + " fl_to_nl records");
  }

  auto& out = result.dataset;
  for (auto& p : pick(rng, forward, per_dir[0])) out.push_back(std::move(p));
  for (auto& p : pick(rng, reverse, per_dir[1])) out.push_back(std::move(p));
  for (auto& p : pick(rng, pools.general, per_dir[2])) {
    p.direction = Direction::General;
    p.provenance = Provenance::General;
    out.push_back(std::move(p));
  }
  rng.shuffle(std::span<NLFLPair>(out));

  for (auto p : {Provenance::Original, Provenance::TacticAug, Provenance::InformalAug,
                 Provenance::General}) {
    m.counts[std::string(to_string(p))] = 0;
  }
  for (auto d : {Direction::NlToFl, Direction::FlToNl, Direction::General}) {
    m.direction_counts[std::string(to_string(d))] = 0;
  }
  for (const auto& p : out) {
    ++m.counts[std::string(to_string(p.provenance))];
    ++m.direction_counts[std::string(to_string(p.direction))];
  }
  m.total = static_cast<long>(out.size());
  return result;
}

std::string DatasetStats::to_json() const {
  std::map<std::string, long> levels;
  for (const auto& [l, c] : level_histogram) levels[std::to_string(l)] = c;
  json j{{"total", total},
         {"by_provenance", by_provenance},
         {"by_direction", by_direction},
         {"by_kind", by_kind},
         {"by_record_type", by_record_type},
         {"level_histogram", levels},
         {"summary", {{"original", original}, {"augmented", augmented}, {"proofs", proofs}}}};
  return j.dump(2) + "\n";
}

std::string DatasetStats::to_table() const {
  std::ostringstream os;
  const auto row = [&os](const std::string& label, long value) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %-22s %10ld\n", label.c_str(), value);
    os << buf;
  };
  const auto section = [&](const std::string& title, const std::map<std::string, long>& m) {
    os << title << "\n";
    for (const auto& [k, v] : m) row(k, v);
  };
  os << "Summary\n";
  row("original", original);
  row("augmented", augmented);
  row("proofs", proofs);
  row("total", total);
  section("By provenance", by_provenance);
  section("By direction", by_direction);
  section("By kind", by_kind);
  section("By record type", by_record_type);
  os << "Level histogram\n";
  for (const auto& [l, c] : level_histogram) row("level " + std::to_string(l), c);
  return os.str();
}

DatasetStats stats(const std::filesystem::path& dataset_path) {
  DatasetStats s;
  for (auto p : {Provenance::Original, Provenance::TacticAug, Provenance::InformalAug,
                 Provenance::General}) {
    s.by_provenance[std::string(to_string(p))] = 0;
  }
  for (auto d : {Direction::NlToFl, Direction::FlToNl, Direction::General}) {
    s.by_direction[std::string(to_string(d))] = 0;
  }
  for (const auto& p : read_pairs(dataset_path)) {
    ++s.total;
    ++s.by_provenance[std::string(to_string(p.provenance))];
    ++s.by_direction[std::string(to_string(p.direction))];
    ++s.by_kind[p.kind.value_or("unknown")];
    ++s.by_record_type[p.record_type.value_or("statement")];
    if (p.level) ++s.level_histogram[*p.level];
    const bool proof = p.record_type == "proof";
    if (proof) {
      ++s.proofs;
    } else if (p.provenance == Provenance::Original) {
      ++s.original;
    } else if (p.provenance == Provenance::TacticAug || p.provenance == Provenance::InformalAug) {
      ++s.augmented;
    }
  }
  return s;
}

}  // namespace herald

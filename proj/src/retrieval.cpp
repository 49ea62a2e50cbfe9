#include "herald/retrieval.hpp"

#include <set>
#include <sstream>

#include <json.hpp>

#include "herald/text.hpp"

namespace herald {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::uint64_t seed, std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool ranks_before(const ScoredExample& a, const ScoredExample& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.example->id < b.example->id;
}

}  // namespace

ExampleStore index_examples(std::vector<AnnotatedExample> examples) {
  ExampleStore store;
  if (examples.empty()) return store;
  const auto dim = examples.front().embedding.size();
  std::set<std::string> ids;
  for (const auto& ex : examples) {
    if (!ids.insert(ex.id).second) throw DuplicateId(ex.id);
    if (ex.embedding.size() != dim) throw DimensionMismatch(dim, ex.embedding.size());
    if (ex.formal_text.empty() || ex.informal_text.empty()) {
      throw InvalidInput("example " + ex.id + " has an empty text");
    }
    if (!ex.embedding.allFinite()) throw InvalidInput("example " + ex.id + " has NaN/Inf");
    if (ex.embedding.squaredNorm() == 0.0) throw ZeroVector();
  }
  if (dim < 1) throw InvalidInput("embedding dim must be >= 1");
  store.embeddings_.resize(dim, static_cast<Eigen::Index>(examples.size()));
  for (std::size_t i = 0; i < examples.size(); ++i) {
    store.embeddings_.col(static_cast<Eigen::Index>(i)) = examples[i].embedding;
  }
  store.examples_ = std::move(examples);
  return store;
}

std::vector<ScoredExample> query_knn(const ExampleStore& store, const EmbeddingVector& query,
                                     int k) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  if (store.count() == 0) return {};
  if (query.size() != store.dim()) throw DimensionMismatch(store.dim(), query.size());

  std::vector<ScoredExample> scored;
  scored.reserve(store.count());
  for (std::size_t i = 0; i < store.count(); ++i) {
    const auto col = store.embeddings().col(static_cast<Eigen::Index>(i));
    scored.push_back({&store.examples()[i], cosine(col, query)});
  }
  const auto take = std::min(scored.size(), static_cast<std::size_t>(k));
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), ranks_before);
  scored.resize(take);
  return scored;
}

void save_store(const ExampleStore& store, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::string lines;
  for (const auto& ex : store.examples()) {
    json row{{"id", ex.id},
             {"formal_text", ex.formal_text},
             {"informal_text", ex.informal_text},
             {"embedding", std::vector<double>(ex.embedding.data(),
                                               ex.embedding.data() + ex.embedding.size())}};
    lines += row.dump() + "\n";
  }
  const json meta{{"schema_version", std::string(kStoreSchemaVersion)},
                  {"dim", store.dim()},
                  {"count", store.count()}};

  const fs::path staging = dir.string() + ".staging";
  fs::remove_all(staging);
  write_file_atomic(staging / "examples.jsonl", lines);
  write_file_atomic(staging / "meta.json", meta.dump(2) + "\n");
  fs::remove_all(dir);
  fs::rename(staging, dir);
}

ExampleStore load_store(const std::filesystem::path& dir) {
  json meta;
  try {
    meta = json::parse(read_file(dir / "meta.json"));
  } catch (const json::exception& e) {
    throw SchemaError("meta.json", e.what());
  }
  if (meta.value("schema_version", "") != kStoreSchemaVersion) {
    throw SchemaError("meta.json.schema_version", "unsupported store schema");
  }
  const auto dim = meta.at("dim").get<Eigen::Index>();
  const auto count = meta.at("count").get<std::size_t>();

  std::vector<AnnotatedExample> examples;
  std::istringstream in(read_file(dir / "examples.jsonl"));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      const auto row = json::parse(line);
      AnnotatedExample ex;
      ex.id = row.at("id").get<std::string>();
      ex.formal_text = row.at("formal_text").get<std::string>();
      ex.informal_text = row.at("informal_text").get<std::string>();
      const auto values = row.at("embedding").get<std::vector<double>>();
      ex.embedding = Eigen::Map<const EmbeddingVector>(values.data(),
                                                       static_cast<Eigen::Index>(values.size()));
      examples.push_back(std::move(ex));
    } catch (const json::exception& e) {
      throw SchemaError("examples.jsonl line " + std::to_string(lineno), e.what());
    }
  }
  if (examples.size() != count) {
    throw SchemaError("meta.json.count", "count does not match examples.jsonl");
  }
  auto store = index_examples(std::move(examples));
  if (store.count() > 0 && store.dim() != dim) throw DimensionMismatch(dim, store.dim());
  return store;
}

MockEmbeddingProvider::MockEmbeddingProvider(Eigen::Index dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
  if (dim < 1) throw InvalidInput("embedding dim must be >= 1");
}

std::string MockEmbeddingProvider::id() const {
  return "mock-embed-" + std::to_string(dim_) + "-" + std::to_string(seed_);
}

EmbeddingVector MockEmbeddingProvider::embed_text(std::string_view text) const {
  const auto words = split(collapse_whitespace(text), ' ');
  EmbeddingVector v = EmbeddingVector::Zero(dim_);
  const auto bucket = [&](std::string_view feature) {
    return static_cast<Eigen::Index>(fnv1a(seed_, feature) % static_cast<std::uint64_t>(dim_));
  };
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i].empty()) continue;
    v[bucket(words[i])] += 1.0;
    if (i + 1 < words.size()) v[bucket(words[i] + " " + words[i + 1])] += 1.0;
  }
  const double norm = v.norm();
  if (norm == 0.0) throw InvalidInput("text has no tokens to embed");
  return v / norm;
}

EmbeddingVector embed(std::string_view text, const EmbeddingProvider& provider) {
  if (trim(text).empty()) throw InvalidInput("cannot embed empty text");
  EmbeddingVector v;
  try {
    v = provider.embed_text(text);
  } catch (const ProviderError&) {
    throw;
  } catch (const InvalidInput&) {
    throw;
  } catch (const std::exception& e) {
    throw ProviderError(provider.id(), e.what());
  }
  if (v.size() != provider.dim()) throw DimensionMismatch(provider.dim(), v.size());
  if (!v.allFinite()) throw ProviderError(provider.id(), "embedding contains NaN/Inf");
  return v;
}

ExampleStore build_store(const std::vector<Annotation>& annotations,
                         const EmbeddingProvider& provider) {
  std::vector<AnnotatedExample> examples;
  examples.reserve(annotations.size());
  for (const auto& a : annotations) {
    examples.push_back({a.id, a.formal_text, a.informal_text, embed(a.formal_text, provider)});
  }
  return index_examples(std::move(examples));
}

}  // namespace herald

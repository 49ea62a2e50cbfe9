#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "herald/error.hpp"

namespace herald {

using EmbeddingVector = Eigen::VectorXd;

/// Cosine similarity dot(u, v) / (|u| |v|), clamped to [-1, 1].
/// Symmetric bit-for-bit: cosine(u, v) == cosine(v, u).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine(const Eigen::MatrixBase<DerivedA>& u,
                                 const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  static_assert(std::is_same_v<Scalar, typename DerivedB::Scalar>, "mixed scalar types");
  if (u.size() != v.size()) throw DimensionMismatch(u.size(), v.size());
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) throw ZeroVector();
  const Scalar c = u.dot(v) / (nu * nv);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

struct AnnotatedExample {
  std::string id;
  std::string formal_text;
  std::string informal_text;
  EmbeddingVector embedding;
};

struct ScoredExample {
  const AnnotatedExample* example = nullptr;
  double score = 0.0;
};

// Immutable exact-search store. Embeddings are kept column-wise so a query
// is one pass over contiguous memory.
class ExampleStore {
 public:
  ExampleStore() = default;

  Eigen::Index dim() const noexcept { return embeddings_.rows(); }
  std::size_t count() const noexcept { return examples_.size(); }
  const std::vector<AnnotatedExample>& examples() const noexcept { return examples_; }
  const Eigen::MatrixXd& embeddings() const noexcept { return embeddings_; }

  friend ExampleStore index_examples(std::vector<AnnotatedExample> examples);

 private:
  std::vector<AnnotatedExample> examples_;
  Eigen::MatrixXd embeddings_;  // dim x count
};

/// Throws DuplicateId, DimensionMismatch, or InvalidInput (empty text,
/// non-finite or zero embedding).
ExampleStore index_examples(std::vector<AnnotatedExample> examples);

/// Top min(k, count) by descending cosine, ties broken by ascending id.
/// An empty store yields an empty result regardless of the query.
std::vector<ScoredExample> query_knn(const ExampleStore& store, const EmbeddingVector& query,
                                     int k);

inline constexpr std::string_view kStoreSchemaVersion = "1";

/// Writes meta.json + examples.jsonl into `dir`, replacing it atomically.
void save_store(const ExampleStore& store, const std::filesystem::path& dir);
ExampleStore load_store(const std::filesystem::path& dir);

// ---- embedding providers ----

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string id() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual EmbeddingVector embed_text(std::string_view text) const = 0;
};

/// Deterministic offline provider: word unigrams and bigrams hashed (FNV-1a,
/// seeded) into `dim` buckets, then L2-normalised.
class MockEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit MockEmbeddingProvider(Eigen::Index dim, std::uint64_t seed = 0);
  std::string id() const override;
  Eigen::Index dim() const override { return dim_; }
  EmbeddingVector embed_text(std::string_view text) const override;

 private:
  Eigen::Index dim_;
  std::uint64_t seed_;
};

/// Validated embedding: non-empty text, provider-declared dim, finite values.
/// Provider failures surface as ProviderError naming the provider.
EmbeddingVector embed(std::string_view text, const EmbeddingProvider& provider);

struct Annotation {
  std::string id;
  std::string formal_text;
  std::string informal_text;
};

/// Embeds every annotation's formal text, then indexes. Nothing is returned
/// (or persisted by callers) unless every embedding succeeds.
ExampleStore build_store(const std::vector<Annotation>& annotations,
                         const EmbeddingProvider& provider);

}  // namespace herald

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "herald/error.hpp"
#include "herald/retrieval.hpp"
#include "support.hpp"

namespace herald {
namespace {

EmbeddingVector vec(std::initializer_list<double> xs) {
  EmbeddingVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

long double cosine_ld(const EmbeddingVector& u, const EmbeddingVector& v) {
  long double dot = 0, nu = 0, nv = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    dot += static_cast<long double>(u(i)) * v(i);
    nu += static_cast<long double>(u(i)) * u(i);
    nv += static_cast<long double>(v(i)) * v(i);
  }
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::vector<AnnotatedExample> random_examples(std::mt19937_64& gen, int n, int dim) {
  std::normal_distribution<double> normal;
  std::vector<AnnotatedExample> out;
  for (int i = 0; i < n; ++i) {
    EmbeddingVector e(dim);
    if (i > 0 && gen() % 8 == 0) {
      // exact ties: a copy, or a power-of-two multiple, of an earlier vector
      e = out[gen() % out.size()].embedding * (gen() % 2 ? 1.0 : 4.0);
    } else {
      for (int d = 0; d < dim; ++d) e(d) = normal(gen);
    }
    out.push_back({"id" + std::to_string(gen() % 100000) + "_" + std::to_string(i), "f", "i", e});
  }
  return out;
}

TEST(Cosine, ClosedForms) {
  EXPECT_EQ(cosine(vec({1, 0, 0}), vec({1, 0, 0})), 1.0);
  EXPECT_EQ(cosine(vec({1, 0}), vec({0, 1})), 0.0);
  EXPECT_NEAR(cosine(vec({1, 1}), vec({1, 0})), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(cosine(vec({1, 1}), vec({1, 0})), 0.7071067811865475, 1e-12);
}

TEST(Cosine, Errors) {
  EXPECT_THROW(cosine(vec({1, 0}), vec({1, 0, 0})), DimensionMismatch);
  EXPECT_THROW(cosine(vec({0, 0}), vec({1, 0})), ZeroVector);
}

TEST(Cosine, SymmetricAndSelfSimilar) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 500; ++t) {
    EmbeddingVector u(1 + t % 100), v(1 + t % 100);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      u(i) = normal(gen);
      v(i) = normal(gen);
    }
    EXPECT_EQ(cosine(u, v), cosine(v, u));
    EXPECT_NEAR(cosine(u, u), 1.0, 1e-9);
    EXPECT_NEAR(static_cast<long double>(cosine(u, v)), cosine_ld(u, v), 1e-9L);
  }
}

TEST(Store, EmptyAndLarge) {
  const auto empty = index_examples({});
  EXPECT_EQ(empty.count(), 0u);
  EXPECT_TRUE(query_knn(empty, vec({1, 2}), 3).empty());

  std::mt19937_64 gen(2);
  const auto store = index_examples(random_examples(gen, 1000, 64));
  EXPECT_EQ(store.count(), 1000u);
  EXPECT_EQ(store.dim(), 64);
}

TEST(Store, Validation) {
  EXPECT_THROW(index_examples({{"a", "f", "i", vec({1, 0})}, {"a", "f", "i", vec({0, 1})}}), DuplicateId);
  EXPECT_THROW(index_examples({{"a", "f", "i", vec({1, 0})}, {"b", "f", "i", vec({0, 1, 0})}}),
               DimensionMismatch);
  EXPECT_THROW(index_examples({{"a", "", "i", vec({1, 0})}}), InvalidInput);
  EXPECT_THROW(index_examples({{"a", "f", "i", vec({NAN, 0})}}), InvalidInput);
  const auto store = index_examples({{"a", "f", "i", vec({1, 0})}});
  EXPECT_THROW(query_knn(store, vec({1, 0, 0}), 1), DimensionMismatch);
  EXPECT_THROW(query_knn(store, vec({1, 0}), 0), InvalidInput);
}

TEST(Query, SingleExampleAndExactMatch) {
  const auto one = index_examples({{"only", "f", "i", vec({0.3, -2})}});
  const auto r = query_knn(one, vec({5, 5}), 4);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].example->id, "only");

  const auto store = index_examples({{"a", "f", "i", vec({1, 2, 3})}, {"b", "f", "i", vec({3, 2, 1})}});
  const auto hit = query_knn(store, vec({3, 2, 1}), 1);
  ASSERT_EQ(hit.size(), 1u);
  EXPECT_EQ(hit[0].example->id, "b");
  EXPECT_DOUBLE_EQ(hit[0].score, 1.0);
}

TEST(Query, TiesGoToTheSmallerId) {
  const auto store = index_examples(
      {{"z", "f", "i", vec({1, 0})}, {"m", "f", "i", vec({2, 0})}, {"a", "f", "i", vec({0, 1})}});
  const auto r = query_knn(store, vec({1, 0}), 3);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].example->id, "m");
  EXPECT_EQ(r[1].example->id, "z");
  EXPECT_EQ(r[2].example->id, "a");
}

// Oracle: score every example in extended precision, then sort by
// (score desc, id asc).
TEST(Query, MatchesExhaustiveOracle) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 60; ++trial) {
    const int dim = 8 + static_cast<int>(gen() % 121);
    auto examples = random_examples(gen, 200, dim);
    const auto store = index_examples(examples);
    EmbeddingVector q(dim);
    for (int d = 0; d < dim; ++d) q(d) = normal(gen);

    std::vector<std::pair<long double, std::string>> oracle;
    for (const auto& e : examples) oracle.emplace_back(cosine_ld(q, e.embedding), e.id);
    std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    const auto got = query_knn(store, q, 10);
    ASSERT_EQ(got.size(), 10u);
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].example->id, oracle[i].second) << "trial " << trial << " rank " << i;
      EXPECT_NEAR(static_cast<long double>(got[i].score), oracle[i].first, 1e-9L);
    }
  }
}

TEST(Query, RankingIsScaleInvariant) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> normal;
  const auto store = index_examples(random_examples(gen, 150, 16));
  EmbeddingVector q(16);
  for (int d = 0; d < 16; ++d) q(d) = normal(gen);
  const auto ids = [&](const EmbeddingVector& query) {
    std::vector<std::string> out;
    for (const auto& s : query_knn(store, query, 20)) out.push_back(s.example->id);
    return out;
  };
  const auto base = ids(q);
  for (double scale : {0.5, 2.0, 1024.0}) EXPECT_EQ(ids(q * scale), base) << scale;
}

TEST(Store, PersistenceRoundTrip) {
  testing::TempDir dir;
  std::mt19937_64 gen(5);
  auto examples = random_examples(gen, 40, 12);
  examples[3].informal_text = "ünïcode ∀ε>0 \"quoted\"\nsecond line";
  examples[5].embedding(0) = 1e-300;
  examples[6].embedding(1) = 0.1 + 0.2;
  const auto store = index_examples(examples);
  save_store(store, dir / "store");
  save_store(store, dir / "store");  // replacing an existing store
  const auto loaded = load_store(dir / "store");
  ASSERT_EQ(loaded.count(), store.count());
  EXPECT_EQ(loaded.dim(), store.dim());
  for (std::size_t i = 0; i < store.count(); ++i) {
    const auto& a = store.examples()[i];
    const auto& b = loaded.examples()[i];
    EXPECT_EQ(a.id, b.id);
    EXPECT_EQ(a.formal_text, b.formal_text);
    EXPECT_EQ(a.informal_text, b.informal_text);
    for (Eigen::Index d = 0; d < a.embedding.size(); ++d) EXPECT_EQ(a.embedding(d), b.embedding(d));
  }
  EXPECT_EQ(loaded.embeddings(), store.embeddings());
}

TEST(Store, CorruptMetaIsASchemaError) {
  testing::TempDir dir;
  save_store(index_examples({{"a", "f", "i", vec({1, 0})}}), dir / "s");
  write_file_atomic(dir / "s" / "meta.json", "{\"schema_version\": \"1\", \"dim\": 2, \"count\": 3}");
  EXPECT_THROW(load_store(dir / "s"), SchemaError);
}

TEST(MockEmbedding, DeterministicAndNormalised) {
  MockEmbeddingProvider p(64, 11);
  const auto a = embed("theorem add_comm (a b : ℕ) : a + b = b + a", p);
  const auto b = embed("theorem add_comm (a b : ℕ) : a + b = b + a", p);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 64);
  EXPECT_NEAR(a.norm(), 1.0, 1e-9);
  EXPECT_NE(embed("something else entirely", p), a);
  EXPECT_NE(embed("theorem add_comm (a b : ℕ) : a + b = b + a", MockEmbeddingProvider(64, 12)), a);
  EXPECT_THROW(embed("  ", p), InvalidInput);
}

class FailingProvider final : public EmbeddingProvider {
 public:
  std::string id() const override { return "remote:down"; }
  Eigen::Index dim() const override { return 8; }
  EmbeddingVector embed_text(std::string_view text) const override {
    if (text.find("fail") != std::string_view::npos) throw std::runtime_error("connection refused");
    return EmbeddingVector::Ones(8);
  }
};

TEST(MockEmbedding, OutageSurfacesProviderAndWritesNothing) {
  FailingProvider p;
  try {
    embed("please fail", p);
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.provider(), "remote:down");
  }
  testing::TempDir dir;
  const auto run = [&] {
    save_store(build_store({{"a", "ok", "x"}, {"b", "fail here", "y"}}, p), dir / "store");
  };
  EXPECT_THROW(run(), ProviderError);
  EXPECT_FALSE(std::filesystem::exists(dir / "store"));
}

}  // namespace
}  // namespace herald

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "herald/dataset.hpp"
#include "herald/error.hpp"
#include "herald/rng.hpp"
#include "support.hpp"

namespace herald {
namespace {

NLFLPair pair(std::string id, Provenance prov = Provenance::Original) {
  return NLFLPair{id, "theorem " + id + " : True := trivial", "Statement " + id + ".", Direction::NlToFl, prov};
}

std::vector<NLFLPair> pool(const std::string& prefix, std::size_t n, Provenance prov) {
  std::vector<NLFLPair> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(pair(prefix + std::to_string(i), prov));
  return out;
}

std::vector<NLFLPair> general_pool(std::size_t n) {
  std::vector<NLFLPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"gen:" + std::to_string(i), "", "Instruction " + std::to_string(i), Direction::General,
                   Provenance::General});
  }
  return out;
}

std::size_t line_count(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

std::vector<NLFLPair> generated_pairs(std::mt19937_64& gen, std::size_t n) {
  static const std::vector<std::string> texts{"∀ ε > 0, ∃ δ", "tab\there", "quote \" and \\ slash", "line\nbreak",
                                              "plain", "emoji 🙂", "x"};
  std::vector<NLFLPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    NLFLPair p;
    p.id = "g" + std::to_string(i);
    p.formal_text = texts[gen() % texts.size()] + std::to_string(gen() % 1000);
    p.informal_text = texts[gen() % texts.size()];
    p.direction = gen() % 2 ? Direction::NlToFl : Direction::FlToNl;
    p.provenance = static_cast<Provenance>(gen() % 3);
    if (gen() % 2) p.source_name = "Mathlib.X" + std::to_string(i);
    if (gen() % 2) p.level = static_cast<int>(gen() % 7);
    if (gen() % 3 == 0) p.kind = "theorem";
    if (gen() % 5 == 0) p.record_type = "proof";
    out.push_back(std::move(p));
  }
  return out;
}

TEST(Pairs, RoundTripSizes) {
  testing::TempDir dir;
  std::mt19937_64 gen(1);
  for (std::size_t n : {0u, 3u, 10'000u}) {
    const auto pairs = generated_pairs(gen, n);
    const auto path = dir / ("p" + std::to_string(n) + ".jsonl");
    EXPECT_EQ(write_pairs(pairs, path), n);
    EXPECT_EQ(line_count(path), n);
    EXPECT_EQ(read_pairs(path), pairs);
  }
  EXPECT_EQ(std::filesystem::file_size(dir / "p0.jsonl"), 0u);
}

TEST(Pairs, FixedKeyOrderAndOptionalFields) {
  auto p = pair("a");
  EXPECT_EQ(to_jsonl_line(p),
            R"({"id":"a","direction":"nl_to_fl","provenance":"original","formal_text":"theorem a : True := trivial","informal_text":"Statement a."})");
  p.level = 2;
  p.record_type = "proof";
  EXPECT_NE(to_jsonl_line(p).find(R"("level":2)"), std::string::npos);
  EXPECT_EQ(pair_from_json_line(to_jsonl_line(p), 1), p);
}

TEST(Pairs, Invariants) {
  auto p = pair("a");
  p.formal_text.clear();
  EXPECT_THROW(check_pair(p), InvalidInput);
  p.provenance = Provenance::General;
  p.direction = Direction::General;
  EXPECT_NO_THROW(check_pair(p));
  p.informal_text.clear();
  EXPECT_THROW(check_pair(p), InvalidInput);
  EXPECT_THROW(pair_from_json_line(R"({"id":"","formal_text":"f","informal_text":"i","direction":"nl_to_fl","provenance":"original"})", 4),
               SchemaError);
}

TEST(Pairs, MalformedLineIsNamed) {
  testing::TempDir dir;
  write_file_atomic(dir / "bad.jsonl", to_jsonl_line(pair("a")) + "\n{not json\n" + to_jsonl_line(pair("b")) + "\n");
  try {
    read_pairs(dir / "bad.jsonl");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.where(), "line 2");
  }
  EXPECT_THROW(read_pairs(dir / "missing.jsonl"), IoError);
}

TEST(Mirror, DirectionsAndIds) {
  EXPECT_TRUE(mirror_directions({}).empty());
  const auto m = mirror_directions({pair("a"), pair("b")});
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[0].id, "a");
  EXPECT_EQ(m[0].direction, Direction::NlToFl);
  EXPECT_EQ(m[1].id, "a_rev");
  EXPECT_EQ(m[1].direction, Direction::FlToNl);
  EXPECT_EQ(m[1].formal_text, m[0].formal_text);
  EXPECT_EQ(m[1].informal_text, m[0].informal_text);
  EXPECT_THROW(mirror_directions(m), InvalidInput);
}

TEST(Ratio, ParseAndLargestRemainder) {
  EXPECT_EQ(Ratio3::parse("1:2:1"), (Ratio3{1, 2, 1}));
  EXPECT_EQ((Ratio3{2, 2, 1}.str()), "2:2:1");
  for (const auto* bad : {"1:2", "0:1:1", "a:b:c", "1:2:1:1", "-1:2:1", ""}) {
    EXPECT_THROW(Ratio3::parse(bad), InvalidInput) << bad;
  }
  EXPECT_EQ(largest_remainder(200, {1, 2, 1}), (std::vector<long>{50, 100, 50}));
  EXPECT_EQ(largest_remainder(500, {2, 2, 1}), (std::vector<long>{200, 200, 100}));
  EXPECT_EQ(largest_remainder(5, {1, 2, 1}), (std::vector<long>{1, 3, 1}));  // 1.25, 2.5, 1.25
  EXPECT_EQ(largest_remainder(7, {1, 1, 1}), (std::vector<long>{3, 2, 2}));
  for (long total = 0; total < 300; ++total) {
    const auto split = largest_remainder(total, {2, 2, 1});
    EXPECT_EQ(split[0] + split[1] + split[2], total);
    for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(split[i] - total * (i < 2 ? 2 : 1) / 5.0), 1.0);
  }
}

TEST(Mix, ReferenceCounts) {
  const MixPools pools{pool("o", 100, Provenance::Original), pool("t", 100, Provenance::TacticAug),
                       pool("i", 100, Provenance::InformalAug), general_pool(100)};
  MixOptions opts;
  opts.base_pairs = 200;
  const auto r = mix(pools, opts);
  EXPECT_EQ(r.manifest.pair_counts,
            (std::map<std::string, long>{{"informal_aug", 50}, {"original", 50}, {"tactic_aug", 100}}));
  EXPECT_EQ(r.manifest.direction_counts,
            (std::map<std::string, long>{{"fl_to_nl", 200}, {"general", 100}, {"nl_to_fl", 200}}));
  EXPECT_EQ(r.manifest.total, 500);
  EXPECT_EQ(r.dataset.size(), 500u);
  EXPECT_TRUE(r.manifest.warnings.empty());
  long sum = 0;
  for (const auto& [k, v] : r.manifest.counts) sum += v;
  EXPECT_EQ(sum, 500);
  EXPECT_EQ(r.manifest.counts.at("tactic_aug"), 200);
}

TEST(Mix, DeterministicBySeed) {
  testing::TempDir dir;
  const MixPools pools{pool("o", 37, Provenance::Original), pool("t", 90, Provenance::TacticAug),
                       pool("i", 41, Provenance::InformalAug), general_pool(60)};
  MixOptions opts;
  opts.seed = 11;
  write_pairs(mix(pools, opts).dataset, dir / "a.jsonl");
  write_pairs(mix(pools, opts).dataset, dir / "b.jsonl");
  EXPECT_EQ(read_file(dir / "a.jsonl"), read_file(dir / "b.jsonl"));
  opts.seed = 12;
  write_pairs(mix(pools, opts).dataset, dir / "c.jsonl");
  EXPECT_NE(read_file(dir / "a.jsonl"), read_file(dir / "c.jsonl"));
}

TEST(Mix, EmptyPoolsAndScaling) {
  MixPools pools{pool("o", 10, Provenance::Original), {}, pool("i", 10, Provenance::InformalAug), general_pool(10)};
  EXPECT_THROW(mix(pools, {}), EmptyPool);
  pools.tactic_aug = pool("t", 10, Provenance::TacticAug);
  pools.general.clear();
  EXPECT_THROW(mix(pools, {}), EmptyPool);
  pools.general = general_pool(1000);
  MixOptions opts;
  opts.base_pairs = 1000;
  const auto r = mix(pools, opts);
  EXPECT_FALSE(r.manifest.warnings.empty());
  EXPECT_EQ(r.manifest.pair_counts.at("tactic_aug"), 10);
}

// Realised counts stay within 1 of the ideal split, and the manifest agrees
// with what lands on disk.
TEST(Mix, RatiosHoldAcrossPoolSizes) {
  testing::TempDir dir;
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 100; ++trial) {
    const MixPools pools{pool("o", 1 + gen() % 400, Provenance::Original),
                         pool("t", 1 + gen() % 400, Provenance::TacticAug),
                         pool("i", 1 + gen() % 400, Provenance::InformalAug), general_pool(1 + gen() % 400)};
    MixOptions opts;
    opts.seed = trial;
    const auto r = mix(pools, opts);
    const auto& m = r.manifest;
    long pairs = 0;
    for (const auto& [k, v] : m.pair_counts) pairs += v;
    EXPECT_LE(std::abs(m.pair_counts.at("original") - pairs / 4.0), 1.0);
    EXPECT_LE(std::abs(m.pair_counts.at("tactic_aug") - pairs / 2.0), 1.0);
    EXPECT_LE(std::abs(m.pair_counts.at("informal_aug") - pairs / 4.0), 1.0);
    EXPECT_LE(std::abs(m.direction_counts.at("nl_to_fl") - m.total * 0.4), 1.0);
    EXPECT_LE(std::abs(m.direction_counts.at("fl_to_nl") - m.total * 0.4), 1.0);
    EXPECT_LE(std::abs(m.direction_counts.at("general") - m.total * 0.2), 1.0);
    const auto path = dir / "mix.jsonl";
    EXPECT_EQ(write_pairs(r.dataset, path), static_cast<std::size_t>(m.total));
    EXPECT_EQ(line_count(path), static_cast<std::size_t>(m.total));
  }
}

TEST(Stats, CountsAndEmptyFile) {
  testing::TempDir dir;
  write_file_atomic(dir / "empty.jsonl", "");
  const auto empty = stats(dir / "empty.jsonl");
  EXPECT_EQ(empty.total, 0);
  EXPECT_EQ(empty.by_provenance.at("original"), 0);
  EXPECT_EQ(empty.original + empty.augmented + empty.proofs, 0);
  EXPECT_NE(empty.to_table().find("total"), std::string::npos);

  auto proof = pair("pr");
  proof.record_type = "proof";
  proof.level = 1;
  auto aug = pair("t0", Provenance::TacticAug);
  aug.level = 1;
  write_pairs({pair("a"), pair("b"), proof, aug, pair("i0", Provenance::InformalAug)}, dir / "d.jsonl");
  const auto s = stats(dir / "d.jsonl");
  EXPECT_EQ(s.total, 5);
  EXPECT_EQ(s.original, 2);
  EXPECT_EQ(s.augmented, 2);
  EXPECT_EQ(s.proofs, 1);
  EXPECT_EQ(s.level_histogram.at(1), 2);
  EXPECT_EQ(s.by_record_type.at("proof"), 1);
  EXPECT_NE(s.to_json().find("\"proofs\": 1"), std::string::npos);

  write_file_atomic(dir / "bad.jsonl", to_jsonl_line(pair("a")) + "\n" + to_jsonl_line(pair("b")) + "\n]\n");
  try {
    stats(dir / "bad.jsonl");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.where(), "line 3");
  }
}

}  // namespace
}  // namespace herald

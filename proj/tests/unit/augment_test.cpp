#include <gtest/gtest.h>

#include <map>
#include <set>

#include "herald/augment.hpp"
#include "herald/mock_roles.hpp"
#include "herald/text.hpp"
#include "support.hpp"

namespace herald {
namespace {

ProofState state(std::vector<Hypothesis> hyps, std::vector<std::string> goals) {
  return ProofState{std::move(hyps), std::move(goals)};
}

TEST(Synthesize, RunningExample) {
  const auto out = synthesize_from_state(
      state({{"p", "Prop"}, {"q", "Prop"}, {"r", "Prop"}, {"h", "p ∧ q ∧ r"}}, {"q ∧ p ∧ r"}), "ex", 0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].formal_text,
            "theorem ex_tac_0 (p : Prop) (q : Prop) (r : Prop) (h : p ∧ q ∧ r) : q ∧ p ∧ r := by sorry");
  EXPECT_EQ(out[0].name, "ex_tac_0");
  EXPECT_EQ(out[0].goal_index, 0);
}

TEST(Synthesize, RunningExampleFromTheCorpusFixture) {
  const auto idx = parse_jixia_export(testing::read_fixture("corpus30.json"));
  const auto all = synthesize_from_proof(*idx.proof_of("ex"), "ex");
  ASSERT_FALSE(all.empty());
  EXPECT_EQ(all[0].formal_text,
            "theorem ex_tac_0 (p : Prop) (q : Prop) (r : Prop) (h : p ∧ q ∧ r) : q ∧ p ∧ r := by sorry");
}

TEST(Synthesize, ClosedStateAndTwoGoals) {
  EXPECT_TRUE(synthesize_from_state(state({{"p", "Prop"}}, {}), "x", 3).empty());
  const auto two = synthesize_from_state(state({{"c", "Color"}}, {"c = c", "c ≠ d"}), "Color.next", 2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].goal_index, 0);
  EXPECT_EQ(two[1].goal_index, 1);
  EXPECT_EQ(two[0].name, "Color.next_tac_2");
  EXPECT_EQ(two[1].name, "Color.next_tac_2_g1");
  EXPECT_EQ(two[1].formal_text, "theorem Color.next_tac_2_g1 (c : Color) : c ≠ d := by sorry");
}

TEST(Synthesize, InaccessibleNames) {
  const auto out = synthesize_from_state(
      state({{"F", "Type u_1"}, {"inst✝", "Field F"}, {"a✝", "F"}, {"h1", "0 < 1"}, {"x✝ y", "ℕ"}}, {"True"}),
      "n", 0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].formal_text,
            "theorem n_tac_0 (F : Type u_1) [Field F] (h2 : F) (h1 : 0 < 1) (h3 y : ℕ) : True := by sorry");
}

TEST(Synthesize, PreambleIsRecorded) {
  const auto out = synthesize_from_state(state({}, {"1 = 1"}), "t", 0, "import Mathlib\nopen Polynomial\n");
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].preamble, "import Mathlib\nopen Polynomial\n");
  EXPECT_EQ(out[0].formal_text, "theorem t_tac_0 : 1 = 1 := by sorry");
}

// Each statement re-parses as one theorem whose binders line up with the
// hypotheses that produced it.
TEST(Synthesize, RoundTripOverFiftyProofs) {
  const auto idx = parse_jixia_export(testing::read_fixture("proofs50.json"));
  ASSERT_EQ(idx.proofs().size(), 50u);
  long statements = 0;
  for (const auto& [name, steps] : idx.proofs()) {
    for (std::size_t s = 0; s < steps.size(); ++s) {
      const auto& st = steps[s].state_before;
      const auto out = synthesize_from_state(st, name, static_cast<int>(s));
      ASSERT_EQ(out.size(), st.goals.size());
      for (const auto& stmt : out) {
        ++statements;
        const auto scan = scan_declarations(stmt.formal_text + "\n");
        ASSERT_EQ(scan.declarations.size(), 1u) << stmt.formal_text;
        EXPECT_TRUE(scan.diagnostics.empty()) << stmt.formal_text;
        EXPECT_EQ(scan.declarations[0].kind, DeclKind::Theorem);
        EXPECT_EQ(scan.declarations[0].full_name, stmt.name);
        const auto parts = parse_header(scan.declarations[0].signature);
        ASSERT_TRUE(parts);
        ASSERT_EQ(parts->binders.size(), st.hypotheses.size()) << stmt.formal_text;
        for (std::size_t i = 0; i < st.hypotheses.size(); ++i) {
          const auto& h = st.hypotheses[i];
          const auto& b = parts->binders[i];
          EXPECT_NE(b.find(collapse_whitespace(h.type_expr)), std::string::npos) << b;
          if (h.name.find("✝") == std::string::npos) EXPECT_TRUE(b.starts_with("(" + h.name + " :")) << b;
        }
        EXPECT_EQ(parts->conclusion, collapse_whitespace(st.goals[stmt.goal_index]));
      }
    }
  }
  EXPECT_GT(statements, 100);
}

TEST(CompileFilter, PartitionIsExhaustiveAndOrdered) {
  MockCompilerBackend backend;
  EXPECT_TRUE(compile_filter({}, backend).valid.empty());
  EXPECT_TRUE(compile_filter({}, backend).rejected.empty());

  std::vector<SynthesizedStatement> cands;
  for (int i = 0; i < 30; ++i) {
    SynthesizedStatement s;
    s.name = "c" + std::to_string(i);
    s.formal_text = i % 3 == 0 ? "theorem " + s.name + " : := by" : "theorem " + s.name + " : " + std::to_string(i) + " = " +
                                                                         std::to_string(i) + " := by sorry";
    cands.push_back(s);
  }
  const auto r = compile_filter(cands, backend, {.parallelism = 5});
  EXPECT_EQ(r.valid.size() + r.rejected.size(), cands.size());
  EXPECT_EQ(r.rejected.size(), 10u);
  for (std::size_t i = 1; i < r.valid.size(); ++i) {
    EXPECT_LT(std::stoi(r.valid[i - 1].name.substr(1)), std::stoi(r.valid[i].name.substr(1)));
  }
  for (const auto& rej : r.rejected) EXPECT_FALSE(rej.diagnostic.empty());
}

TEST(CompileFilter, UsesThePreamble) {
  MockCompilerBackend backend;
  auto s = synthesize_from_state(state({}, {"1 = 1"}), "t", 0, "import Mathlib\nopen Foo\n")[0];
  backend.script("import Mathlib\nopen Foo\n" + s.formal_text + "\n", CompileOutcome::fail("unknown namespace Foo"));
  const auto r = compile_filter({s}, backend);
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].diagnostic, "unknown namespace Foo");
  s.preamble.clear();
  EXPECT_EQ(compile_filter({s}, backend).valid.size(), 1u);
}

TEST(CompileFilter, BackendOutagePropagates) {
  MockCompilerBackend backend;
  backend.set_available(false);
  const auto s = synthesize_from_state(state({}, {"1 = 1"}), "t", 0);
  EXPECT_THROW(compile_filter(s, backend), BackendUnavailable);
}

TEST(Dedup, SmallCases) {
  std::vector<int> ten(10);
  for (int i = 0; i < 10; ++i) ten[i] = i;
  EXPECT_EQ(dedup_sample<int>(ten, 10, 1), ten);
  EXPECT_EQ(dedup_sample<int>(ten, 50, 1), ten);
  EXPECT_TRUE(dedup_sample<int>(ten, 0, 1).empty());
  EXPECT_THROW(dedup_sample<int>(ten, -1, 1), InvalidInput);

  std::vector<int> hundred(100);
  for (int i = 0; i < 100; ++i) hundred[i] = 1000 + i;
  const auto a = dedup_sample<int>(hundred, 20, 7);
  EXPECT_EQ(a, dedup_sample<int>(hundred, 20, 7));
  EXPECT_EQ(a.size(), 20u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<int>(a.begin(), a.end()).size(), 20u);
  for (int x : a) EXPECT_TRUE(x >= 1000 && x < 1100);
}

TEST(Dedup, InclusionFrequency) {
  std::vector<int> pool(1000);
  for (int i = 0; i < 1000; ++i) pool[i] = i;
  std::vector<int> hits(1000);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    for (int x : dedup_sample<int>(pool, 250, seed)) ++hits[x];
  }
  // Each count is Binomial(200, 0.25): sd about 0.031, so roughly 10% of
  // items fall outside +-0.05 while none should stray past 5 sd.
  int within = 0;
  double mean = 0;
  for (int h : hits) {
    const double f = h / 200.0;
    EXPECT_LT(std::abs(f - 0.25), 0.155);
    within += std::abs(f - 0.25) <= 0.05;
    mean += f;
  }
  EXPECT_NEAR(mean / 1000, 0.25, 1e-12);
  EXPECT_GT(within, 850);
  EXPECT_LT(within, 950);
}

TEST(Strategies, TagsRoundTrip) {
  EXPECT_EQ(default_strategies().size(), 4u);
  for (const auto* tag : {"logical_equivalence_rewriting", "abstract_concept_substitution",
                          "omission_of_implicit_condition", "multi_linguistic_translation:zh",
                          "multi_linguistic_translation:fr", "multi_linguistic_translation:ru"}) {
    EXPECT_EQ(AugmentationStrategy::parse(tag).tag(), tag);
  }
  EXPECT_THROW(AugmentationStrategy::parse("multi_linguistic_translation:de"), InvalidInput);
  EXPECT_THROW(AugmentationStrategy::parse("paraphrase"), InvalidInput);
}

class Variants : public ::testing::Test {
 protected:
  Gateway gateway{GatewayConfig{}, [](std::chrono::milliseconds) {}};
  BoundRole informalizer{RoleBinding{}, std::make_unique<MockProvider>("informalizer", mock_informalize)};

  NLFLPair pair(std::string informal) {
    return NLFLPair{"p1", "theorem t (A B : Prop) (h : A) : B := by sorry", std::move(informal)};
  }
};

TEST_F(Variants, CannedRewrites) {
  const auto strategies = default_strategies();
  const auto batch = informal_variants(pair("If A, then B."), std::span(strategies).first(1), gateway, informalizer);
  ASSERT_EQ(batch.variants.size(), 1u);
  EXPECT_EQ(batch.variants[0].informal_text, "B whenever A");
  EXPECT_EQ(batch.variants[0].strategy.kind, StrategyKind::LogicalEquivalenceRewriting);

  const std::vector<AugmentationStrategy> abstract{{StrategyKind::AbstractConceptSubstitution}};
  const auto inv = informal_variants(
      pair("The square matrix M has a two-sided inverse."), abstract, gateway, informalizer);
  ASSERT_EQ(inv.variants.size(), 1u);
  EXPECT_NE(inv.variants[0].informal_text.find("nonsingular"), std::string::npos);

  const std::vector<AugmentationStrategy> zh{{StrategyKind::MultiLinguisticTranslation, Language::Zh}};
  const auto a = informal_variants(pair("Two is even."), zh, gateway, informalizer);
  const auto b = informal_variants(pair("Two is even."), zh, gateway, informalizer);
  ASSERT_EQ(a.variants.size(), 1u);
  EXPECT_EQ(a.variants[0].informal_text, b.variants[0].informal_text);
  EXPECT_TRUE(a.variants[0].informal_text.starts_with("[zh]"));
}

TEST_F(Variants, CountsAreConserved) {
  // An informalizer that parrots the original for every other strategy.
  int calls = 0;
  BoundRole parrot{RoleBinding{}, std::make_unique<MockProvider>("parrot", [&](std::string_view prompt, int, std::string_view) {
                     const auto text = extract_tagged(prompt, "informal").value_or("");
                     return ++calls % 2 ? "  " + ascii_lower(text) + " " : "something new " + std::to_string(calls);
                   })};
  const auto strategies = default_strategies();
  const auto batch = informal_variants(pair("Every Group is nonempty."), strategies, gateway, parrot);
  EXPECT_EQ(batch.attempted, 4);
  EXPECT_EQ(batch.kept, 2);
  EXPECT_EQ(batch.dropped, 2);
  EXPECT_EQ(batch.attempted, batch.kept + batch.dropped);
  for (const auto& v : batch.variants) {
    EXPECT_EQ(v.origin_pair_id, "p1");
    EXPECT_NE(loose_form(v.informal_text), loose_form("Every Group is nonempty."));
  }
  EXPECT_EQ(batch.variants[0].strategy.tag(), "abstract_concept_substitution");
  EXPECT_THROW(informal_variants(pair(""), strategies, gateway, parrot), InvalidInput);
}

TEST_F(Variants, VariantPairKeepsFormalText) {
  const auto origin = pair("If A, then B.");
  const auto v = variant_pair(origin, {"p1", {StrategyKind::MultiLinguisticTranslation, Language::Ru}, "[ru] ..."});
  EXPECT_EQ(v.id, "p1__multi_linguistic_translation_ru");
  EXPECT_EQ(v.formal_text, origin.formal_text);
  EXPECT_EQ(v.provenance, Provenance::InformalAug);
}

}  // namespace
}  // namespace herald

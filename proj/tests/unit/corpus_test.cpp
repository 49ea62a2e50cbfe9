#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <random>

#include "herald/corpus.hpp"
#include "herald/error.hpp"
#include "support.hpp"

namespace herald {
namespace {

using nlohmann::json;

json decl_json(const std::string& name, const std::string& kind, std::vector<std::string> deps = {},
               int line = 1, const std::string& file = "A.lean") {
  return json{{"full_name", name},
              {"kind", kind},
              {"signature", kind + " " + name + " : True"},
              {"docstring", nullptr},
              {"namespace_path", json::array()},
              {"file_path", file},
              {"line_span", {{"start", line}, {"end", line + 1}}},
              {"dependencies", deps},
              {"is_tactic_proof", false}};
}

json export_json(json decls, json proofs = json::object()) {
  return json{{"schema_version", "1"},
              {"declarations", std::move(decls)},
              {"proofs", std::move(proofs)},
              {"head_statements", json::object()}};
}

std::string schema_error_where(const std::string& text) {
  try {
    parse_jixia_export(text);
  } catch (const SchemaError& e) {
    return e.where();
  }
  return "<no error>";
}

TEST(ParseExport, TwoTheoremsOneReference) {
  const auto idx = parse_jixia_export(
      export_json({decl_json("A", "theorem"), decl_json("B", "theorem", {"A"})}).dump());
  EXPECT_EQ(idx.declarations().size(), 2u);
  EXPECT_EQ(idx.at("B").dependencies, std::set<std::string>{"A"});
  EXPECT_TRUE(idx.warnings().empty());
}

TEST(ParseExport, UnknownKindIsRejectedWithPath) {
  const auto text = export_json({decl_json("A", "theorem"), decl_json("ax", "axiom")}).dump();
  EXPECT_EQ(schema_error_where(text), "$.declarations[1].kind");
  try {
    parse_jixia_export(text);
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("axiom"), std::string::npos);
  }
}

TEST(ParseExport, MissingFieldNamesItsPath) {
  auto d = decl_json("A", "theorem");
  d.erase("signature");
  EXPECT_EQ(schema_error_where(export_json({d}).dump()), "$.declarations[0].signature");
  EXPECT_EQ(schema_error_where("{\"declarations\": []}"), "$.schema_version");
  EXPECT_EQ(schema_error_where("{not json"), "$");
}

TEST(ParseExport, DuplicateDeclaration) {
  EXPECT_THROW(parse_jixia_export(export_json({decl_json("A", "theorem"), decl_json("A", "theorem")}).dump()),
               DuplicateDeclaration);
}

TEST(ParseExport, DanglingDependencyIsAWarning) {
  const auto idx = parse_jixia_export(export_json({decl_json("A", "theorem", {"Outside.x"})}).dump());
  ASSERT_EQ(idx.warnings().size(), 1u);
  EXPECT_NE(idx.warnings()[0].find("Outside.x"), std::string::npos);
}

TEST(ParseExport, ProofInvariants) {
  const json step{{"tactic_text", "rfl"},
                  {"state_before", {{"hypotheses", json::array()}, {"goals", {"1 = 1"}}}},
                  {"state_after", {{"hypotheses", json::array()}, {"goals", json::array()}}}};
  // proof attached to a definition
  EXPECT_EQ(schema_error_where(export_json({decl_json("d", "definition")}, {{"d", {step}}}).dump()),
            "$.proofs[\"d\"]");
  // proof for an unknown declaration
  EXPECT_EQ(schema_error_where(export_json({decl_json("t", "theorem")}, {{"u", {step}}}).dump()),
            "$.proofs[\"u\"]");
  // non-contiguous step index
  auto bad = step;
  bad["step_index"] = 1;
  EXPECT_EQ(schema_error_where(export_json({decl_json("t", "theorem")}, {{"t", {bad}}}).dump()),
            "$.proofs[\"t\"][0].step_index");
  // duplicate hypothesis name
  auto dup = step;
  dup["state_before"]["hypotheses"] = json::array({json::array({"h", "p"}), json::array({"h", "q"})});
  EXPECT_EQ(schema_error_where(export_json({decl_json("t", "theorem")}, {{"t", {dup}}}).dump()),
            "$.proofs[\"t\"][0].state_before.hypotheses[1][0]");
}

TEST(ParseExport, SelfDependencyAndBadSpanAreRejected) {
  EXPECT_THROW(parse_jixia_export(export_json({decl_json("A", "theorem", {"A"})}).dump()), Error);
  auto d = decl_json("A", "theorem");
  d["line_span"] = {{"start", 5}, {"end", 4}};
  EXPECT_THROW(parse_jixia_export(export_json({d}).dump()), Error);
}

TEST(ParseExport, DiteFixtureKeepsItsDocstring) {
  const auto idx = parse_jixia_export(testing::read_fixture("corpus30.json"));
  const auto& d = idx.at("dite_eq_or_eq");
  EXPECT_EQ(d.kind, DeclKind::Theorem);
  ASSERT_TRUE(d.docstring.has_value());
  EXPECT_FALSE(d.docstring->empty());
  EXPECT_FALSE(d.is_tactic_proof);
  EXPECT_EQ(idx.declarations().size(), 30u);
}

TEST(ParseExport, SerializeRoundTripsTheFixtures) {
  for (const auto* name : {"corpus30.json", "proofs50.json"}) {
    const auto idx = parse_jixia_export(testing::read_fixture(name));
    const auto text = serialize(idx);
    const auto again = parse_jixia_export(text);
    EXPECT_EQ(idx, again) << name;
    EXPECT_EQ(serialize(again), text) << name;
  }
}

// Generated well-formed exports: parsing never throws and round-trips.
TEST(ParseExport, TotalOverGeneratedExports) {
  const std::vector<std::string> kinds{"theorem",   "instance", "definition",     "structure",
                                       "class",     "inductive", "classInductive", "opaque"};
  std::mt19937 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 20);
    json decls = json::array();
    json proofs = json::object();
    for (int i = 0; i < n; ++i) {
      std::vector<std::string> deps;
      for (int j = 0; j < i; ++j) {
        if (gen() % 4 == 0) deps.push_back("N" + std::to_string(j) + ".x");
      }
      if (gen() % 5 == 0) deps.push_back("External.y" + std::to_string(i));
      const auto& kind = kinds[gen() % kinds.size()];
      auto d = decl_json("N" + std::to_string(i) + ".x", kind, deps, 1 + static_cast<int>(gen() % 100),
                         "F" + std::to_string(gen() % 3) + ".lean");
      if (gen() % 2) d["docstring"] = "doc ∀ " + std::to_string(i);
      d["namespace_path"] = {"N" + std::to_string(i)};
      decls.push_back(d);
      if ((kind == "theorem" || kind == "instance") && gen() % 2) {
        json steps = json::array();
        const int k = 1 + static_cast<int>(gen() % 3);
        for (int s = 0; s < k; ++s) {
          steps.push_back({{"tactic_text", "simp"},
                           {"step_index", s},
                           {"state_before", {{"hypotheses", json::array({json::array({"h", "p"}), json::array({"x✝", "ℕ"})})}, {"goals", {"g"}}}},
                           {"state_after", {{"hypotheses", json::array({json::array({"h", "p"})})}, {"goals", json::array()}}}});
        }
        proofs[d["full_name"].get<std::string>()] = steps;
      }
    }
    const auto text = export_json(decls, proofs).dump();
    CorpusIndex idx;
    ASSERT_NO_THROW(idx = parse_jixia_export(text)) << "trial " << trial;
    EXPECT_EQ(parse_jixia_export(serialize(idx)), idx);
  }
}

TEST(Scanner, SingleTacticTheorem) {
  const auto scan = scan_declarations("theorem t (p : Prop) : p → p := by intro h; exact h");
  ASSERT_EQ(scan.declarations.size(), 1u);
  const auto& d = scan.declarations[0];
  EXPECT_EQ(d.full_name, "t");
  EXPECT_EQ(d.kind, DeclKind::Theorem);
  EXPECT_TRUE(d.is_tactic_proof);
  EXPECT_EQ(d.signature, "theorem t (p : Prop) : p → p");
  EXPECT_TRUE(d.dependencies.empty());
}

TEST(Scanner, EmptyFile) {
  const auto scan = scan_declarations("");
  EXPECT_TRUE(scan.declarations.empty());
  EXPECT_TRUE(scan.diagnostics.empty());
}

TEST(Scanner, NormalExtensionsFile) {
  const auto scan = scan_declarations(testing::read_fixture("normal_extensions.lean"), "NE.lean");
  ASSERT_EQ(scan.declarations.size(), 8u);
  for (const auto& d : scan.declarations) {
    EXPECT_EQ(d.kind, DeclKind::Theorem) << d.full_name;
    ASSERT_TRUE(d.docstring.has_value()) << d.full_name;
    EXPECT_FALSE(d.docstring->empty()) << d.full_name;
    EXPECT_EQ(d.file_path, "NE.lean");
  }
  EXPECT_EQ(scan.declarations[0].full_name, "tower_top_of_normal");
  EXPECT_TRUE(scan.declarations[0].is_tactic_proof);
  EXPECT_NE(scan.declarations[0].docstring->find("tower of algebraic field extensions"),
            std::string::npos);
  EXPECT_EQ(scan.declarations[7].full_name, "embeddings_aut_eq_of_isAlgNormal_tac_12245");
  EXPECT_EQ(scan.header, "import Mathlib\nopen Polynomial\n");
  EXPECT_TRUE(scan.diagnostics.empty());
}

TEST(Scanner, KindsAndNamespaces) {
  const auto scan = scan_declarations(
      "namespace Foo\n"
      "/-- doc -/\n"
      "def bar (n : ℕ) : ℕ := n\n"
      "structure Pt where\n  x : ℕ\n"
      "instance : Inhabited Pt := ⟨⟨0⟩⟩\n"
      "class inductive C\n  | a\n"
      "opaque o : ℕ\n"
      "end Foo\n");
  ASSERT_EQ(scan.declarations.size(), 5u);
  EXPECT_EQ(scan.declarations[0].full_name, "Foo.bar");
  EXPECT_EQ(scan.declarations[0].kind, DeclKind::Definition);
  EXPECT_EQ(scan.declarations[0].docstring, "doc");
  EXPECT_EQ(scan.declarations[0].namespace_path, std::vector<std::string>{"Foo"});
  EXPECT_EQ(scan.declarations[1].kind, DeclKind::Structure);
  EXPECT_EQ(scan.declarations[2].kind, DeclKind::Instance);
  EXPECT_EQ(scan.declarations[3].kind, DeclKind::ClassInductive);
  EXPECT_EQ(scan.declarations[4].kind, DeclKind::Opaque);
}

// Re-scanning an emitted signature yields the same header.
TEST(Scanner, SignaturesRescanToThemselves) {
  const auto scan = scan_declarations(testing::read_fixture("normal_extensions.lean"));
  for (const auto& d : scan.declarations) {
    const auto again = scan_declarations(d.signature + " := by sorry");
    ASSERT_EQ(again.declarations.size(), 1u) << d.signature;
    EXPECT_EQ(again.declarations[0].signature, d.signature);
    EXPECT_EQ(again.declarations[0].kind, d.kind);
  }
}

TEST(ParseHeader, SplitsBindersAndConclusion) {
  const auto h = parse_header("theorem t (p : Prop) [inst : Decidable p] {α : Type*} : p ∨ ¬p");
  ASSERT_TRUE(h.has_value());
  EXPECT_EQ(h->keyword, "theorem");
  EXPECT_EQ(h->name, "t");
  EXPECT_EQ(h->binders,
            (std::vector<std::string>{"(p : Prop)", "[inst : Decidable p]", "{α : Type*}"}));
  EXPECT_EQ(h->conclusion, "p ∨ ¬p");
}

CorpusIndex neighbor_index(const std::vector<std::tuple<std::string, std::string, int>>& decls) {
  std::vector<DeclarationRecord> records;
  for (const auto& [name, file, line] : decls) {
    DeclarationRecord d;
    d.full_name = name;
    d.signature = "theorem " + name + " : True";
    auto parts = split(name, '.');
    parts.pop_back();
    d.namespace_path = parts;
    d.file_path = file;
    d.line_span = {line, line};
    records.push_back(d);
  }
  return CorpusIndex(records, {}, {});
}

TEST(Neighbors, ForcedByDefinition) {
  const auto idx = neighbor_index({{"A.b", "f.lean", 1}, {"A.c", "f.lean", 5}});
  const auto n = resolve_neighbors("A.b", idx, 5);
  EXPECT_EQ(n.same_namespace, std::vector<std::string>{"A.c"});
  EXPECT_EQ(n.same_file, std::vector<std::string>{"A.c"});
  EXPECT_EQ(n.name_prefix_shared, std::vector<std::string>{"A.c"});
}

TEST(Neighbors, NoSiblings) {
  const auto idx = neighbor_index({{"top", "f.lean", 1}, {"B.x", "g.lean", 1}});
  const auto n = resolve_neighbors("top", idx, 3);
  EXPECT_TRUE(n.same_namespace.empty());
  EXPECT_TRUE(n.same_file.empty());
  EXPECT_THROW(resolve_neighbors("missing", idx, 3), UnknownDeclaration);
  EXPECT_THROW(resolve_neighbors("top", idx, 0), InvalidInput);
}

// Oracle: enumerate every other declaration and apply the ordering rules directly.
TEST(Neighbors, MatchesBruteForceOnTenDeclarations) {
  const std::vector<std::tuple<std::string, std::string, int>> decls{
      {"A.B.f", "x.lean", 10}, {"A.B.g", "x.lean", 14}, {"A.B.h", "y.lean", 3},
      {"A.C.f", "x.lean", 30}, {"A.d", "x.lean", 8},    {"A.B.k", "x.lean", 12},
      {"B.f", "y.lean", 20},   {"A.B.l", "y.lean", 9},  {"top", "x.lean", 1},
      {"A.C.g", "z.lean", 4}};
  const auto idx = neighbor_index(decls);
  const int limit = 3;
  for (const auto& [subject, sfile, sline] : decls) {
    const auto got = resolve_neighbors(subject, idx, limit);
    const auto& self = idx.at(subject);

    std::vector<std::string> ns;
    std::vector<std::pair<int, std::string>> file;
    std::map<int, std::vector<std::string>> by_prefix;
    const auto sp = split(subject, '.');
    for (const auto& [name, file_path, line] : decls) {
      if (name == subject) continue;
      const auto& d = idx.at(name);
      if (!self.namespace_path.empty() && d.namespace_path == self.namespace_path) ns.push_back(name);
      if (file_path == sfile) file.emplace_back(std::abs(line - sline), name);
      const auto np = split(name, '.');
      int k = 0;
      while (k < static_cast<int>(std::min(sp.size(), np.size())) && sp[k] == np[k]) ++k;
      if (k >= 1) by_prefix[k].push_back(name);
    }
    std::sort(ns.begin(), ns.end());
    std::sort(file.begin(), file.end());
    std::vector<std::string> want_file;
    for (const auto& [dist, name] : file) want_file.push_back(name);
    std::vector<std::string> want_prefix;
    if (!by_prefix.empty()) {
      want_prefix = by_prefix.rbegin()->second;
      std::sort(want_prefix.begin(), want_prefix.end());
    }
    const auto cut = [&](std::vector<std::string> v) {
      if (v.size() > static_cast<std::size_t>(limit)) v.resize(limit);
      return v;
    };
    EXPECT_EQ(got.same_namespace, cut(ns)) << subject;
    EXPECT_EQ(got.same_file, cut(want_file)) << subject;
    EXPECT_EQ(got.name_prefix_shared, cut(want_prefix)) << subject;
    for (const auto* list : {&got.same_namespace, &got.same_file, &got.name_prefix_shared}) {
      EXPECT_LE(list->size(), 3u);
      for (const auto& name : *list) {
        EXPECT_NE(name, subject);
        EXPECT_NE(idx.find(name), nullptr);
      }
    }
  }
}

}  // namespace
}  // namespace herald

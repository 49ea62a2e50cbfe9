#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "herald/corpus.hpp"

namespace herald {

// Edges point from prerequisite to dependent.
struct DepGraph {
  std::set<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edges;
  int unresolved_dependencies = 0;  // dependencies dropped by build_graph

  /// Inserts an edge, adding both endpoints as nodes. Self-edges are rejected.
  void add_edge(const std::string& prerequisite, const std::string& dependent);
};

struct LevelAssignment {
  std::map<std::string, int> level_of;
  std::vector<std::vector<std::string>> levels;  // each level sorted by name
};

DepGraph build_graph(const CorpusIndex& index);

/// Throws CycleError whose cycle() is a witness path [a, b, ..., a].
void check_acyclic(const DepGraph& graph);

/// Level 0 for nodes without prerequisites, else 1 + the maximum prerequisite
/// level. Throws CycleError on cyclic input.
LevelAssignment stratify(const DepGraph& graph);

/// Level-ordered, name-ordered batches of at most `batch_size` names.
std::vector<std::vector<std::string>> schedule(const LevelAssignment& assignment, int batch_size);

/// Graphviz rendering; nodes grouped into one rank per level when given.
std::string to_dot(const DepGraph& graph, const LevelAssignment* levels = nullptr);

}  // namespace herald

#include "herald/depgraph.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "herald/error.hpp"
#include "herald/text.hpp"

namespace herald {

CycleError::CycleError(std::vector<std::string> cycle)
    : Error("dependency cycle: " + join(cycle, " -> ")), cycle_(std::move(cycle)) {}

namespace {

// Dense adjacency over the sorted node set; indices follow name order so
// every traversal below is deterministic.
struct Adjacency {
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> next;
  std::vector<std::vector<std::size_t>> prev;

  explicit Adjacency(const DepGraph& g) : names(g.nodes.begin(), g.nodes.end()) {
    std::unordered_map<std::string, std::size_t> id;
    id.reserve(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) id.emplace(names[i], i);
    next.resize(names.size());
    prev.resize(names.size());
    for (const auto& [u, v] : g.edges) {
      const auto a = id.at(u);
      const auto b = id.at(v);
      next[a].push_back(b);
      prev[b].push_back(a);
    }
  }
};

std::vector<std::string> find_cycle(const Adjacency& adj) {
  enum : char { White, Grey, Black };
  const auto n = adj.names.size();
  std::vector<char> color(n, White);
  std::vector<std::size_t> parent(n, n);
  // Iterative DFS; each frame is (node, next child position).
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (color[root] != White) continue;
    stack.emplace_back(root, 0);
    color[root] = Grey;
    while (!stack.empty()) {
      auto& [u, child] = stack.back();
      if (child == adj.next[u].size()) {
        color[u] = Black;
        stack.pop_back();
        continue;
      }
      const auto v = adj.next[u][child++];
      if (color[v] == Grey) {
        std::vector<std::string> cycle{adj.names[v]};
        std::vector<std::size_t> path;
        for (auto w = u; w != v; w = parent[w]) path.push_back(w);
        for (auto it = path.rbegin(); it != path.rend(); ++it) cycle.push_back(adj.names[*it]);
        cycle.push_back(adj.names[v]);
        return cycle;
      }
      if (color[v] == White) {
        color[v] = Grey;
        parent[v] = u;
        stack.emplace_back(v, 0);
      }
    }
  }
  return {};
}

}  // namespace

void DepGraph::add_edge(const std::string& prerequisite, const std::string& dependent) {
  if (prerequisite == dependent) throw InvalidInput("self-edge on " + prerequisite);
  nodes.insert(prerequisite);
  nodes.insert(dependent);
  edges.emplace(prerequisite, dependent);
}

DepGraph build_graph(const CorpusIndex& index) {
  DepGraph g;
  for (const auto& [name, d] : index.declarations()) {
    g.nodes.insert(name);
    for (const auto& dep : d.dependencies) {
      if (index.find(dep)) {
        g.edges.emplace(dep, name);
      } else {
        ++g.unresolved_dependencies;
      }
    }
  }
  return g;
}

void check_acyclic(const DepGraph& graph) {
  auto cycle = find_cycle(Adjacency(graph));
  if (!cycle.empty()) throw CycleError(std::move(cycle));
}

LevelAssignment stratify(const DepGraph& graph) {
  const Adjacency adj(graph);
  const auto n = adj.names.size();
  std::vector<std::size_t> pending(n);
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    pending[i] = adj.prev[i].size();
    if (pending[i] == 0) ready.push_back(i);
  }
  std::vector<int> level(n, 0);
  std::size_t done = 0;
  // Kahn order: a node is visited only after all prerequisites, so its level
  // is final when it is popped.
  while (!ready.empty()) {
    const auto u = ready.back();
    ready.pop_back();
    ++done;
    for (const auto v : adj.next[u]) {
      level[v] = std::max(level[v], level[u] + 1);
      if (--pending[v] == 0) ready.push_back(v);
    }
  }
  if (done != n) throw CycleError(find_cycle(adj));

  LevelAssignment out;
  int max_level = -1;
  for (std::size_t i = 0; i < n; ++i) {
    out.level_of.emplace(adj.names[i], level[i]);
    max_level = std::max(max_level, level[i]);
  }
  out.levels.resize(static_cast<std::size_t>(max_level + 1));
  for (std::size_t i = 0; i < n; ++i) {
    out.levels[static_cast<std::size_t>(level[i])].push_back(adj.names[i]);
  }
  return out;
}

std::vector<std::vector<std::string>> schedule(const LevelAssignment& assignment,
                                               int batch_size) {
  if (batch_size < 1) throw InvalidInput("batch_size must be >= 1");
  const auto cap = static_cast<std::size_t>(batch_size);
  std::vector<std::vector<std::string>> batches;
  for (auto level : assignment.levels) {
    std::sort(level.begin(), level.end());
    for (std::size_t i = 0; i < level.size(); i += cap) {
      const auto end = std::min(level.size(), i + cap);
      batches.emplace_back(level.begin() + static_cast<std::ptrdiff_t>(i),
                           level.begin() + static_cast<std::ptrdiff_t>(end));
    }
  }
  return batches;
}

std::string to_dot(const DepGraph& graph, const LevelAssignment* levels) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q.push_back('\\');
      q.push_back(c);
    }
    return q + "\"";
  };
  std::ostringstream out;
  out << "digraph deps {\n  rankdir=BT;\n";
  if (levels) {
    for (std::size_t i = 0; i < levels->levels.size(); ++i) {
      out << "  subgraph level_" << i << " {\n    rank=same;\n";
      for (const auto& name : levels->levels[i]) out << "    " << quote(name) << ";\n";
      out << "  }\n";
    }
  } else {
    for (const auto& name : graph.nodes) out << "  " << quote(name) << ";\n";
  }
  for (const auto& [u, v] : graph.edges) out << "  " << quote(u) << " -> " << quote(v) << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace herald

#include "glrec/graph.hpp"

#include <algorithm>

#include "glrec/rng.hpp"

namespace glrec {

const char* to_string(NodeKind k) {
  return k == NodeKind::Candidate ? "candidate" : "job";
}

const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Message: return "message";
    case EdgeKind::Interview: return "interview";
    case EdgeKind::Match: return "match";
    case EdgeKind::Browse: return "browse";
  }
  return "?";
}

NodeKind node_kind_from_string(const std::string& s) {
  if (s == "candidate") return NodeKind::Candidate;
  if (s == "job") return NodeKind::Job;
  throw Error("UnknownNodeKind", "unrecognized node kind '" + s + "'");
}

EdgeKind edge_kind_from_string(const std::string& s) {
  if (s == "message") return EdgeKind::Message;
  if (s == "interview") return EdgeKind::Interview;
  if (s == "match") return EdgeKind::Match;
  if (s == "browse") return EdgeKind::Browse;
  throw Error("UnknownEdgeKind", "unrecognized edge kind '" + s + "'");
}

NodeId HeteroGraph::add_node(NodeKind kind) {
  if (frozen_) throw Error("GraphFrozen", "add_node after freeze");
  kinds_.push_back(kind);
  out_.emplace_back();
  in_.emplace_back();
  return static_cast<NodeId>(kinds_.size() - 1);
}

void HeteroGraph::check_node(NodeId n) const {
  if (n >= kinds_.size())
    throw Error("UnknownNode", "node " + std::to_string(n) + " not in graph");
}

void HeteroGraph::add_edge(NodeId src, EdgeKind kind, NodeId dst) {
  if (frozen_) throw Error("GraphFrozen", "add_edge after freeze");
  check_node(src);
  check_node(dst);
  if (kinds_[src] == kinds_[dst])
    throw Error("SameKindEndpoints",
                "edge " + std::to_string(src) + "->" + std::to_string(dst) +
                    " links two " + to_string(kinds_[src]) + " nodes");
  edges_.push_back({src, kind, dst});
  const auto idx = static_cast<uint32_t>(edges_.size() - 1);
  out_[src].push_back(idx);
  in_[dst].push_back(idx);
}

NodeKind HeteroGraph::kind(NodeId n) const {
  check_node(n);
  return kinds_[n];
}

const std::vector<uint32_t>& HeteroGraph::outgoing(NodeId n) const {
  check_node(n);
  return out_[n];
}

const std::vector<uint32_t>& HeteroGraph::incoming(NodeId n) const {
  check_node(n);
  return in_[n];
}

bool HeteroGraph::has_edge(NodeId a, EdgeKind kind, NodeId b) const {
  check_node(a);
  check_node(b);
  for (uint32_t e : out_[a])
    if (edges_[e].kind == kind && edges_[e].dst == b) return true;
  for (uint32_t e : in_[a])
    if (edges_[e].kind == kind && edges_[e].src == b) return true;
  return false;
}

std::vector<MetaPathInstance> sample_meta_paths(const HeteroGraph& graph, NodeId start,
                                                int max_edges, int num_walks, uint64_t seed) {
  if (graph.kind(start) != NodeKind::Candidate)
    throw Error("UnknownNode", "meta-path walks start at a candidate node");
  if (max_edges < 1) throw Error("InvalidArgument", "max_edges must be >= 1");

  std::vector<MetaPathInstance> result;
  if (graph.outgoing(start).empty()) return result;

  Rng rng(seed);
  for (int w = 0; w < num_walks; ++w) {
    const int target_len = static_cast<int>(rng.uniform_int(1, max_edges));
    MetaPathInstance inst;
    inst.nodes.push_back(start);
    NodeId cur = start;
    int32_t prev_edge = -1;
    for (int step = 0; step < target_len; ++step) {
      // Candidate moves: (edge index, next node). First step is outgoing only.
      std::vector<std::pair<uint32_t, NodeId>> moves;
      for (uint32_t e : graph.outgoing(cur)) {
        if (static_cast<int32_t>(e) == prev_edge) continue;
        moves.emplace_back(e, graph.edges()[e].dst);
      }
      if (step > 0) {
        for (uint32_t e : graph.incoming(cur)) {
          if (static_cast<int32_t>(e) == prev_edge) continue;
          moves.emplace_back(e, graph.edges()[e].src);
        }
      }
      if (moves.empty()) break;
      const auto& [edge_idx, next] =
          moves[static_cast<size_t>(rng.next_u64() % moves.size())];
      inst.edges.push_back(graph.edges()[edge_idx].kind);
      inst.nodes.push_back(next);
      prev_edge = static_cast<int32_t>(edge_idx);
      cur = next;
    }
    if (!inst.edges.empty()) result.push_back(std::move(inst));
  }
  return result;
}

double path_similarity(const std::vector<int>& tokens_i, const std::vector<int>& tokens_j) {
  if (tokens_i.empty() || tokens_j.empty())
    throw Error("EmptyTokenSet", "path_similarity requires nonempty token sets");
  size_t a = 0, b = 0, both = 0;
  while (a < tokens_i.size() && b < tokens_j.size()) {
    if (tokens_i[a] == tokens_j[b]) {
      ++both;
      ++a;
      ++b;
    } else if (tokens_i[a] < tokens_j[b]) {
      ++a;
    } else {
      ++b;
    }
  }
  const size_t uni = tokens_i.size() + tokens_j.size() - both;
  return static_cast<double>(both) / static_cast<double>(uni);
}

std::vector<MetaPathInstance> select_diverse_paths(const std::vector<MetaPathInstance>& instances,
                                                   double gamma, int max_paths) {
  if (gamma < 0.0 || gamma > 1.0)
    throw Error("InvalidArgument", "gamma must lie in [0,1]");
  std::vector<MetaPathInstance> kept;
  for (const auto& inst : instances) {
    if (static_cast<int>(kept.size()) >= max_paths) break;
    bool diverse = true;
    for (const auto& k : kept) {
      if (path_similarity(inst.tokens, k.tokens) > gamma) {
        diverse = false;
        break;
      }
    }
    if (diverse) kept.push_back(inst);
  }
  return kept;
}

}  // namespace glrec

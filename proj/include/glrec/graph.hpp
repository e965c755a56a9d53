#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glrec/error.hpp"

namespace glrec {

using NodeId = uint32_t;

enum class NodeKind : uint8_t { Candidate, Job };

enum class EdgeKind : uint8_t { Message, Interview, Match, Browse };

const char* to_string(NodeKind k);
const char* to_string(EdgeKind k);
NodeKind node_kind_from_string(const std::string& s);
EdgeKind edge_kind_from_string(const std::string& s);

struct Edge {
  NodeId src;
  EdgeKind kind;
  NodeId dst;
};

// One sampled alternating candidate/job walk. `tokens` is the deduplicated
// token-id set of the rendered prompt, filled lazily by the prompt builder.
struct MetaPathInstance {
  std::vector<NodeId> nodes;       // length l+1
  std::vector<EdgeKind> edges;     // length l
  std::vector<int> tokens;         // sorted, unique
  std::string prompt_text;
};

// Directed heterogeneous candidate<->job behavior graph. Mutable during
// construction; freeze() before sharing across readers.
class HeteroGraph {
 public:
  NodeId add_node(NodeKind kind);
  void add_edge(NodeId src, EdgeKind kind, NodeId dst);
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  size_t node_count() const { return kinds_.size(); }
  size_t edge_count() const { return edges_.size(); }
  NodeKind kind(NodeId n) const;
  const std::vector<Edge>& edges() const { return edges_; }
  // Indices into edges() leaving / entering the node.
  const std::vector<uint32_t>& outgoing(NodeId n) const;
  const std::vector<uint32_t>& incoming(NodeId n) const;
  bool has_edge(NodeId a, EdgeKind kind, NodeId b) const;  // either direction

 private:
  void check_node(NodeId n) const;

  std::vector<NodeKind> kinds_;
  std::vector<Edge> edges_;
  std::vector<std::vector<uint32_t>> out_;
  std::vector<std::vector<uint32_t>> in_;
  bool frozen_ = false;
};

// Random-walk meta-path sampler. The first step follows an outgoing edge of
// `start` (interactions the candidate initiated); later steps pick uniformly
// among outgoing and incoming edges, never re-traversing the edge just used.
// Walk length is drawn uniformly in [1, max_edges]. Deterministic by seed.
std::vector<MetaPathInstance> sample_meta_paths(const HeteroGraph& graph, NodeId start,
                                                int max_edges, int num_walks, uint64_t seed);

// Jaccard overlap of two token-id sets (each sorted, unique, nonempty).
double path_similarity(const std::vector<int>& tokens_i, const std::vector<int>& tokens_j);

// Greedy first-come selection: keep an instance iff its similarity to every
// already-kept instance is <= gamma, until max_paths are kept.
std::vector<MetaPathInstance> select_diverse_paths(const std::vector<MetaPathInstance>& instances,
                                                   double gamma, int max_paths);

}  // namespace glrec

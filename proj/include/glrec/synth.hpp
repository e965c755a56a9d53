#pragma once

#include <map>
#include <vector>

#include "glrec/graph.hpp"
#include "glrec/prompt.hpp"

namespace glrec {

struct WorldConfig {
  int n_candidates = 200;
  int n_jobs = 300;
  int n_skills = 24;
  int n_position_titles = 4;
  int interactions_per_candidate = 6;
  double theta_match = 0.2;   // label = 1 iff skill-overlap affinity >= theta
  double noise_rate = 0.05;   // label flip probability, in [0, 0.5)
  uint64_t seed = 1;

  void validate() const;
};

struct LabeledPair {
  NodeId candidate = 0;
  NodeId job = 0;
  int label = 0;        // post-noise
  double affinity = 0;  // planted skill-overlap ratio
};

struct PairwiseTriple {
  NodeId candidate = 0;
  NodeId job_a = 0;
  NodeId job_b = 0;
  std::string label;  // "A" or "B": the higher-affinity side
};

// Synthetic recruitment world with planted skill-cluster preference
// structure: candidates and jobs carry latent skill subsets drawn mostly from
// one cluster, labels follow skill overlap, and behavior-graph neighborhoods
// reflect the same latent clusters so meta-paths carry signal.
struct World {
  WorldConfig config;
  HeteroGraph graph;
  std::vector<NodeId> candidates;
  std::vector<NodeId> jobs;
  std::map<NodeId, CandidateProfile> profiles;
  std::map<NodeId, JobDescription> jds;
  std::map<NodeId, std::vector<int>> latent_skills;  // sorted skill ids
  std::vector<LabeledPair> pairs;                    // balanced per candidate
  std::vector<std::string> skill_names;
  std::vector<std::string> position_titles;
};

double skill_affinity(const std::vector<int>& a, const std::vector<int>& b);

World generate_world(const WorldConfig& config);

// Point-wise: the balanced labeled pairs. Pair-wise: (c, j_pos, j_neg)
// triples with the A/B assignment decided by a fair seeded coin.
std::vector<LabeledPair> make_pointwise_dataset(const World& world);
std::vector<PairwiseTriple> make_pairwise_dataset(const World& world);

}  // namespace glrec

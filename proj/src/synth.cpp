#include "glrec/synth.hpp"

#include <algorithm>
#include <set>

#include "glrec/error.hpp"
#include "glrec/rng.hpp"

namespace glrec {

void WorldConfig::validate() const {
  if (n_candidates < 10 || n_jobs < 10)
    throw Error("InvalidConfig", "world needs at least 10 candidates and 10 jobs");
  if (n_skills < 4) throw Error("InvalidConfig", "world needs at least 4 skills");
  if (n_position_titles < 2) throw Error("InvalidConfig", "need at least 2 position titles");
  if (noise_rate < 0.0 || noise_rate >= 0.5)
    throw Error("InvalidConfig", "noise rate must lie in [0, 0.5)");
  if (theta_match < 0.0 || theta_match > 1.0)
    throw Error("InvalidConfig", "theta_match must lie in [0, 1]");
}

double skill_affinity(const std::vector<int>& a, const std::vector<int>& b) {
  size_t i = 0, j = 0, both = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) { ++both; ++i; ++j; }
    else if (a[i] < b[j]) ++i;
    else ++j;
  }
  const size_t uni = a.size() + b.size() - both;
  return uni == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(uni);
}

namespace {

const char* kSyllables[16] = {"ba", "ce", "di", "fo", "gu", "ka", "le", "mi",
                              "no", "pu", "ra", "se", "ti", "vo", "zu", "xa"};

std::string coined_word(int i, const char* suffix) {
  std::string w = kSyllables[i % 16];
  w += kSyllables[(i / 16) % 16];
  if (i >= 256) w += kSyllables[(i / 256) % 16];
  return w + suffix;
}

std::string join_slash(const std::vector<int>& skill_ids, const std::vector<std::string>& names) {
  std::string out;
  for (int s : skill_ids) {
    if (!out.empty()) out += "/";
    out += names[static_cast<size_t>(s)];
  }
  return out;
}

std::vector<int> draw_skills(Rng& rng, int cluster, int n_clusters, int n_skills, int n_cluster_draws,
                             int n_random_draws) {
  std::set<int> skills;
  // Skill s belongs to cluster s % n_clusters.
  const int cluster_size = (n_skills + n_clusters - 1 - cluster) / n_clusters;
  while (static_cast<int>(skills.size()) < std::min(n_cluster_draws, cluster_size)) {
    const int k = static_cast<int>(rng.uniform_int(0, cluster_size - 1));
    skills.insert(cluster + k * n_clusters);
  }
  const int want = n_cluster_draws + n_random_draws;
  while (static_cast<int>(skills.size()) < want) {
    skills.insert(static_cast<int>(rng.uniform_int(0, n_skills - 1)));
  }
  return {skills.begin(), skills.end()};
}

}  // namespace

World generate_world(const WorldConfig& config) {
  config.validate();
  World world;
  world.config = config;
  Rng rng(config.seed);

  const int n_clusters = std::max(2, config.n_skills / 6);

  for (int i = 0; i < config.n_skills; ++i)
    world.skill_names.push_back(coined_word(i, "dev"));
  for (int i = 0; i < config.n_position_titles; ++i)
    world.position_titles.push_back(coined_word(i, "eer"));


  // Candidates: latent skills mostly from one cluster; the rendered profile
  // shows only a small noisy subset, so the clean cluster signal lives in the
  // behavior graph rather than the profile text.
  std::vector<int> cand_cluster, job_cluster;
  for (int i = 0; i < config.n_candidates; ++i) {
    const NodeId node = world.graph.add_node(NodeKind::Candidate);
    world.candidates.push_back(node);
    const int cluster = static_cast<int>(rng.uniform_int(0, n_clusters - 1));
    cand_cluster.push_back(cluster);
    auto skills = draw_skills(rng, cluster, n_clusters, config.n_skills, 4, 1);
    world.latent_skills[node] = skills;

    CandidateProfile p;
    p.node = node;
    std::vector<int> shown = skills;
    rng.shuffle(shown);
    shown.resize(1);
    std::sort(shown.begin(), shown.end());
    p.attributes = {
        {"Skills", join_slash(shown, world.skill_names)},
    };
    p.summary = "a job seeker";
    world.profiles[node] = p;
  }

  for (int i = 0; i < config.n_jobs; ++i) {
    const NodeId node = world.graph.add_node(NodeKind::Job);
    world.jobs.push_back(node);
    const int cluster = static_cast<int>(rng.uniform_int(0, n_clusters - 1));
    job_cluster.push_back(cluster);
    auto skills = draw_skills(rng, cluster, n_clusters, config.n_skills, 4, 0);
    world.latent_skills[node] = skills;

    // Titles cycle through clusters: title t serves cluster t % n_clusters.
    std::vector<int> titles_for_cluster;
    for (int t = 0; t < config.n_position_titles; ++t)
      if (t % n_clusters == cluster) titles_for_cluster.push_back(t);
    if (titles_for_cluster.empty()) titles_for_cluster.push_back(cluster % config.n_position_titles);
    const int title =
        titles_for_cluster[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(titles_for_cluster.size()) - 1))];

    JobDescription jd;
    jd.node = node;
    jd.position_title = world.position_titles[static_cast<size_t>(title)];
    jd.attributes = {
        {"Position Title", jd.position_title},
        {"Skill Requirements", join_slash(skills, world.skill_names)},
    };
    jd.summary = jd.position_title;
    world.jds[node] = jd;
  }

  // Balanced labeled pairs: per candidate, two positives and two negatives by
  // planted affinity, then labels flipped at the noise rate.
  auto affinity = [&](NodeId c, NodeId j) {
    return skill_affinity(world.latent_skills[c], world.latent_skills[j]);
  };
  for (size_t ci = 0; ci < world.candidates.size(); ++ci) {
    const NodeId c = world.candidates[ci];
    std::vector<NodeId> pos, neg;
    std::vector<size_t> job_order(world.jobs.size());
    for (size_t k = 0; k < job_order.size(); ++k) job_order[k] = k;
    rng.shuffle(job_order);
    for (size_t k : job_order) {
      const NodeId j = world.jobs[k];
      if (affinity(c, j) >= config.theta_match) {
        if (pos.size() < 2) pos.push_back(j);
      } else if (neg.size() < 2) {
        neg.push_back(j);
      }
      if (pos.size() >= 2 && neg.size() >= 2) break;
    }
    for (NodeId j : pos) {
      LabeledPair lp{c, j, 1, affinity(c, j)};
      if (rng.uniform() < config.noise_rate) lp.label = 0;
      world.pairs.push_back(lp);
    }
    for (NodeId j : neg) {
      LabeledPair lp{c, j, 0, affinity(c, j)};
      if (rng.uniform() < config.noise_rate) lp.label = 1;
      world.pairs.push_back(lp);
    }
  }
  bool any_pos = false, any_neg = false;
  for (const auto& p : world.pairs) (p.label ? any_pos : any_neg) = true;
  if (!any_pos || !any_neg)
    throw Error("DegenerateWorld",
                "one label class is empty; adjust theta_match or skill pools and regenerate");

  // Interaction edges: neighbors mostly share the candidate's cluster, and
  // edge kinds follow the affinity strata (Interview > Message > Browse).
  for (size_t ci = 0; ci < world.candidates.size(); ++ci) {
    const NodeId c = world.candidates[ci];
    std::vector<NodeId> same_cluster;
    for (size_t k = 0; k < world.jobs.size(); ++k)
      if (job_cluster[k] == cand_cluster[ci]) same_cluster.push_back(world.jobs[k]);
    for (int e = 0; e < config.interactions_per_candidate; ++e) {
      NodeId j;
      if (!same_cluster.empty() && rng.uniform() < 0.9) {
        j = same_cluster[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(same_cluster.size()) - 1))];
      } else {
        j = world.jobs[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(world.jobs.size()) - 1))];
      }
      const double a = affinity(c, j);
      EdgeKind kind;
      if (a >= config.theta_match)
        kind = rng.uniform() < 0.6 ? EdgeKind::Interview : EdgeKind::Message;
      else
        kind = EdgeKind::Browse;
      world.graph.add_edge(c, kind, j);
    }
  }
  // Match edges exist only between labeled-positive pairs.
  for (const auto& p : world.pairs) {
    if (p.label == 1 && rng.uniform() < 0.5) world.graph.add_edge(p.job, EdgeKind::Match, p.candidate);
  }
  world.graph.freeze();
  return world;
}

std::vector<LabeledPair> make_pointwise_dataset(const World& world) { return world.pairs; }

std::vector<PairwiseTriple> make_pairwise_dataset(const World& world) {
  Rng rng(world.config.seed ^ 0x9a1b2c3dULL);
  std::map<NodeId, std::pair<std::vector<NodeId>, std::vector<NodeId>>> by_user;
  for (const auto& p : world.pairs) {
    auto& [pos, neg] = by_user[p.candidate];
    // Pairwise preference follows the planted affinity, not the noisy label.
    (p.affinity >= world.config.theta_match ? pos : neg).push_back(p.job);
  }
  std::vector<PairwiseTriple> out;
  for (const auto& [c, pn] : by_user) {
    for (size_t i = 0; i < pn.first.size() && i < pn.second.size(); ++i) {
      PairwiseTriple t;
      t.candidate = c;
      const bool a_is_pos = rng.uniform() < 0.5;
      t.job_a = a_is_pos ? pn.first[i] : pn.second[i];
      t.job_b = a_is_pos ? pn.second[i] : pn.first[i];
      t.label = a_is_pos ? "A" : "B";
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace glrec

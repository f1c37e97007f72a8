#pragma once

// Online exploration loop and offline pessimistic exploitation. The online
// loop alternates data collection under the current policy, maximum-likelihood
// refits of the latent-factor model, covariance rebuilds in the learned
// feature space, and optimistic planning with an elliptical bonus. The
// offline path fits once on a behavior dataset and plans against a pessimism
// penalty of the same form.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lvrep/env.hpp"
#include "lvrep/explore.hpp"
#include "lvrep/latent_model.hpp"
#include "lvrep/rng.hpp"

namespace lvrep {

struct TransitionTuple {
    int s = 0;
    int a = 0;
    int s_next = 0;
    int a_next = 0;
    int s_after = 0;  // state reached from (s_next, a_next)
};

struct AgentConfig {
    int n_episodes = 100;
    int n_latent = 2;
    FitConfig fit;
    // bonus.alpha is ignored; the per-episode scale comes from alpha_schedule
    // with the constants below. Set alpha_c = 0 to disable the bonus.
    BonusParams bonus;
    double alpha_c = 0.1;
    double alpha_c_norm = 1.0;
    double delta = 0.1;            // confidence level inside the schedule
    double model_class_log = 0.0;  // log model-class size term
    int refit_every = 1;
    int tuples_per_episode = 1;
    double plan_tol = 1e-10;
    std::uint64_t seed = 0;
    // If true, the bonus covariance also absorbs the second-hop transitions;
    // default keeps it over first-hop data only.
    bool cov_include_second_hop = false;

    void validate() const;
};

struct EpisodeRecord {
    int episode = 0;
    double value = 0.0;      // true value of the policy produced this episode
    double v_star = 0.0;     // optimal value of the environment
    double regret = 0.0;     // cumulative sum of (v_star - value)
    double tv_error = 0.0;   // model TV error under averaged-occupancy x uniform-action weights
    double mean_bonus = 0.0; // over the first-hop dataset
    double max_bonus = 0.0;
    double wall_ms = 0.0;
};

struct RunLog {
    std::vector<EpisodeRecord> episodes;
    std::vector<std::string> warnings;
    std::map<std::string, double> diagnostics;
};

struct OnlineResult {
    std::vector<Policy> policies;  // pi_0 (uniform) through pi_N
    RunLog log;
    LatentFactorModel model;       // last fitted model (unfit if n_episodes = 0)
    bool model_fitted = false;
    TransitionDataset first_hop;
    TransitionDataset second_hop;
};

struct OfflineResult {
    Policy policy;
    RunLog log;
    LatentFactorModel model;
    TransitionDataset data;
};

// One draw of the five-stage collection protocol:
//   s ~ discounted occupancy of `policy`, a ~ U(A), s' ~ T(.|s,a),
//   a' ~ U(A), s~ ~ T(.|s',a').
TransitionTuple collect_tuple(const TabularMDP& mdp, const Policy& policy, Rng& rng);

// Online loop. `rng` is the run's master stream; collection and fitting draw
// from fixed child streams so the collected dataset is identical across bonus
// configurations with the same seed.
OnlineResult run_online(const TabularMDP& mdp, const AgentConfig& cfg, Rng& rng);

// Offline exploitation from n_samples behavior-policy transitions. Reports
// coverage diagnostics (importance bound omega = max 1/pi_b(a|s), feature
// concentrability of the returned policy) in the log.
OfflineResult run_offline(const TabularMDP& mdp, const Policy& behavior, int n_samples,
                          const AgentConfig& cfg, Rng& rng);

// CSV with header: episode,value,v_star,regret,tv_error,mean_bonus,max_bonus,wall_ms
std::string runlog_to_csv(const RunLog& log);
std::string runlog_to_json(const RunLog& log);

}  // namespace lvrep

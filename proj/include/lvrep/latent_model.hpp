#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lvrep/env.hpp"
#include "lvrep/errors.hpp"
#include "lvrep/rng.hpp"

namespace lvrep {

// Latent-factorized transition model: T(s'|s,a) = sum_z phi[(s,a),z] mu[z,s'].
// phi rows are the conditional latent distributions p(z|s,a) — these double as
// the feature vectors everything downstream (bonuses, linear Q) runs on — and
// mu rows are the emission distributions p(s'|z).
struct LatentFactorModel {
    int n_states = 0;
    int n_actions = 0;
    int n_latent = 0;
    Eigen::MatrixXd phi;  // (n_states*n_actions) x n_latent, row-stochastic
    Eigen::MatrixXd mu;   // n_latent x n_states, row-stochastic

    int row(int s, int a) const { return s * n_actions + a; }
    void validate() const;
};

// Observed (s, a, s') triples plus a dense multiplicity tally so that
// likelihood/EM passes cost O(#unique triples), not O(#triples).
struct TransitionDataset {
    int n_states = 0;
    int n_actions = 0;
    std::vector<std::array<int, 3>> triples;
    Eigen::MatrixXd counts;      // (n_states*n_actions) x n_states multiplicities
    Eigen::VectorXd row_totals;  // per-(s,a) totals

    TransitionDataset() = default;
    TransitionDataset(int n_states_, int n_actions_);
    void add(int s, int a, int s_next);
    std::size_t size() const { return triples.size(); }
    int row(int s, int a) const { return s * n_actions + a; }
    // Union of two datasets over the same space.
    static TransitionDataset merged(const TransitionDataset& a, const TransitionDataset& b);
};

struct FitConfig {
    int max_iters = 200;
    double tol = 1e-7;  // stop when the objective improves by less than this
    int restarts = 3;
    double init_concentration = 1.0;  // Dirichlet parameter for random inits
    enum class Mode { EM, GRADIENT } mode = Mode::EM;
    double learning_rate = 0.5;  // GRADIENT mode only

    void validate() const;
};

// Random low-rank ground truth: factor rows drawn from Dirichlet(concentration).
// Returns both the composed MDP and the generating factors, so tests can treat
// the generator as the identifiable target.
struct BlockMDPSpec {
    int n_states = 0;
    int n_actions = 0;
    int n_latent = 0;
    double concentration = 1.0;
    std::uint64_t seed = 0;
    double gamma = 0.95;
    // Rewards are sampled uniformly in [0,1] so planning problems are nontrivial.
    void validate() const;
};
struct BlockMDP {
    TabularMDP mdp;
    LatentFactorModel generator;
};
BlockMDP build_random_block_mdp(const BlockMDPSpec& spec);

// T_hat[(s,a), s'] = sum_z phi[(s,a),z] mu[z,s'] as an (s*a) x s' matrix.
Eigen::MatrixXd compose_transition(const LatentFactorModel& model);

// q*(z) = phi[(s,a),z] mu[z,s'] / T_hat(s'|s,a). Throws numeric_error when the
// composed probability of the observed triple is zero (posterior undefined).
Eigen::VectorXd exact_posterior(const LatentFactorModel& model, int s, int a, int s_next);

// Sum over triples of log T_hat(s'|s,a); -infinity is returned as the error
// value when any observed triple has zero composed probability.
double log_likelihood(const LatentFactorModel& model, const TransitionDataset& data);

// Variational objective: sum over triples of E_q[log mu[z,s']] - KL(q || phi),
// with 0 log 0 = 0. q has one distribution over latents per triple, aligned
// with data.triples. Mass placed where phi is zero yields -infinity.
double elbo(const LatentFactorModel& model, const std::vector<Eigen::VectorXd>& q,
            const TransitionDataset& data);

// One exact EM sweep: posteriors per observed triple, then row-normalized
// expected counts with additive smoothing 1e-8. (s,a) rows with no data keep
// their current distribution. Never decreases the log-likelihood beyond
// floating-point slack.
LatentFactorModel em_step(const LatentFactorModel& model, const TransitionDataset& data);

// Continue likelihood maximization from a given starting model (EM by
// default, gradient ascent in GRADIENT mode), stopping on cfg.tol / max_iters.
// Writes the final log-likelihood through final_ll when non-null.
LatentFactorModel refine(const LatentFactorModel& init, const TransitionDataset& data,
                         const FitConfig& cfg, double* final_ll = nullptr);

// Best-of-restarts maximization of the data log-likelihood, EM by default or
// plain gradient ascent on softmax logits in GRADIENT mode. Restart ties
// break toward the earlier restart.
LatentFactorModel fit(const TransitionDataset& data, int n_latent, const FitConfig& cfg, Rng& rng);

// Ancestral sample: z ~ phi[(s,a),.], then s' ~ mu[z,.].
int sample_next_state(const LatentFactorModel& model, int s, int a, Rng& rng);

// Weighted model-vs-truth transition error, with per-row total variation
// distance TV = (1/2)·L1. Squared convention: sum_{s,a} w(s,a)·TV(row)^2;
// set squared=false for the plain weighted TV distance.
double tv_error(const LatentFactorModel& model, const TabularMDP& truth,
                const Eigen::MatrixXd& weighting, bool squared = true);

// JSON round-trip ({"n_states","n_actions","n_latent","phi","mu"});
// deserialization re-validates row stochasticity.
std::string model_to_json(const LatentFactorModel& model);
LatentFactorModel model_from_json(const std::string& text);

// Random row-stochastic model with Dirichlet(concentration) rows (shared by
// fit restarts and the block-MDP generator).
LatentFactorModel random_model(int n_states, int n_actions, int n_latent,
                               double concentration, Rng& rng);

}  // namespace lvrep

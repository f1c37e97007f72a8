#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "lvrep/errors.hpp"
#include "lvrep/rng.hpp"

namespace lvrep {

// Ground-truth finite MDP. The transition tensor is stored as an
// (n_states*n_actions) x n_states row-stochastic matrix with row index
// s*n_actions + a; JSON serialization uses the nested [s][a][s'] layout.
struct TabularMDP {
    int n_states = 0;
    int n_actions = 0;
    double gamma = 0.0;
    Eigen::VectorXd init_dist;    // over states
    Eigen::MatrixXd reward;       // n_states x n_actions, entries in [0,1]
    Eigen::MatrixXd transition;   // (n_states*n_actions) x n_states

    int row(int s, int a) const { return s * n_actions + a; }
    // Throws config_error if any structural invariant is violated.
    void validate() const;
};

// Stochastic policy; rows are distributions over actions.
struct Policy {
    Eigen::MatrixXd probs;  // n_states x n_actions

    void validate() const;
    static Policy uniform(int n_states, int n_actions);
    static Policy deterministic(const Eigen::VectorXi& actions, int n_actions);
};

// Normalized discounted state-action visitation distribution (sums to 1).
struct OccupancyMeasure {
    Eigen::MatrixXd dist;  // n_states x n_actions

    void validate() const;
    Eigen::VectorXd state_marginal() const { return dist.rowwise().sum(); }
};

// RiverSwim-style chain: RIGHT advances with probability 1-slip and otherwise
// splits the slip mass between staying put and moving left (mass clamped at
// the ends); LEFT moves left deterministically. Reward 1 sits at
// (last state, RIGHT) and a small distractor 0.005 at (state 0, LEFT), so a
// greedy agent with no exploration bonus parks at the left end. Action 0 is
// LEFT, action 1 is RIGHT; the start distribution is concentrated at state 0.
inline constexpr int kChainLeft = 0;
inline constexpr int kChainRight = 1;
TabularMDP build_chain_mdp(int n_states, double slip, double gamma);

// Exact optimal control: Q-value iteration run until the Bellman optimality
// residual is <= tol in sup norm. reward_override (if non-null) replaces the
// MDP's reward and may lie outside [0,1] (bonus-augmented planning relies on
// this). Greedy ties break toward the lowest action index.
struct ValueIterationResult {
    Eigen::MatrixXd q;  // n_states x n_actions
    Eigen::VectorXd v;  // n_states
    Policy greedy;
};
ValueIterationResult exact_value_iteration(const TabularMDP& mdp,
                                           const Eigen::MatrixXd* reward_override,
                                           double tol);

// Exact evaluation of a fixed policy by direct linear solve:
// (I - gamma P_pi) V = r_pi, then Q = r + gamma T V.
struct PolicyEvaluationResult {
    Eigen::MatrixXd q;
    Eigen::VectorXd v;
    double init_value = 0.0;  // E_{s ~ init_dist}[V(s)]
};
PolicyEvaluationResult exact_policy_evaluation(const TabularMDP& mdp, const Policy& policy,
                                               const Eigen::MatrixXd* reward_override = nullptr);

// Normalized discounted occupancy d = (1-gamma) d0 pi + gamma P_pi^T d,
// computed by a direct dense solve on the state marginal.
OccupancyMeasure occupancy_measure(const TabularMDP& mdp, const Policy& policy);

// One draw from the normalized occupancy: roll the policy from s0 ~ d0 and
// return the current state the first time an independent Bernoulli(1-gamma)
// fires (checked before each step, so gamma ~ 0 returns s0).
int sample_occupancy_state(const TabularMDP& mdp, const Policy& policy, Rng& rng);

// Worst-case ratio of target-policy to behavior feature second moments:
// the largest generalized eigenvalue of (A, B) with A = E_{d^target}[phi phi^T]
// and B = E_{behavior}[phi phi^T]. Throws numeric_error naming a null
// direction if B is singular on a direction where A has mass.
double concentrability(const TabularMDP& mdp, const Policy& target,
                       const OccupancyMeasure& behavior_dist,
                       const std::function<Eigen::VectorXd(int, int)>& features);

// JSON round-trip ({"n_states","n_actions","gamma","init_dist","reward","transition"}).
std::string mdp_to_json(const TabularMDP& mdp);
TabularMDP mdp_from_json(const std::string& text);

std::string policy_to_json(const Policy& policy);
Policy policy_from_json(const std::string& text);

}  // namespace lvrep

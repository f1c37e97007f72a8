#pragma once

// Planning on a learned latent-factor model with a reward shaped by an
// exploration bonus (optimistic) or pessimism penalty (offline). Two
// routes: compose the model into a dense MDP and run exact value iteration,
// or run fitted value iteration directly in the linear feature class; the
// two are mathematically identical here and cross-checked in tests.

#include <Eigen/Dense>

#include "lvrep/env.hpp"
#include "lvrep/features.hpp"
#include "lvrep/latent_model.hpp"

namespace lvrep {

enum class AdjustmentSign { OPTIMISTIC, PESSIMISTIC };

struct AugmentedReward {
    Eigen::MatrixXd base;        // (s,a) reward
    Eigen::MatrixXd adjustment;  // bonus (>= 0) or penalty (<= 0)
    AdjustmentSign sign = AdjustmentSign::OPTIMISTIC;

    void validate() const;
    Eigen::MatrixXd total() const { return base + adjustment; }
};

struct PlanResult {
    Eigen::MatrixXd q;
    Eigen::VectorXd v;
    Policy policy;  // deterministic, lowest-index tie-break
};

struct LinearPlanResult {
    LinearQ q_latent;   // latent weights of the final iterate
    Eigen::MatrixXd q;  // Q implied by those weights
    Policy policy;
    int iters_used = 0;
    bool converged = false;  // false means the iteration cap was hit first
};

// Composes the model's transition matrix, runs exact value iteration with
// reward base + adjustment to Bellman residual <= tol.
PlanResult plan_on_model(const LatentFactorModel& model, const AugmentedReward& aug,
                         double gamma, double tol);

// Fitted value iteration in the linear-Q class:
//   w(z) = sum_{s'} mu[z,s'] * max_a Q_prev(s',a),
//   Q(s,a) = (base+adjustment)(s,a) + gamma * <phi(s,a), w>.
// Runs at most `iters` sweeps, stopping early once the iterate is stationary
// to machine precision.
LinearPlanResult linear_q_planner(const LatentFactorModel& model, const AugmentedReward& aug,
                                  double gamma, int iters);

}  // namespace lvrep

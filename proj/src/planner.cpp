#include "lvrep/planner.hpp"

#include <cmath>

#include "lvrep/errors.hpp"

namespace lvrep {

void AugmentedReward::validate() const {
    if (base.rows() != adjustment.rows() || base.cols() != adjustment.cols())
        throw config_error("AugmentedReward: base/adjustment shape mismatch");
    if (!base.allFinite() || !adjustment.allFinite())
        throw config_error("AugmentedReward: non-finite entries");
    if (sign == AdjustmentSign::OPTIMISTIC && adjustment.minCoeff() < 0.0)
        throw config_error("AugmentedReward: optimistic adjustment must be entrywise >= 0");
    if (sign == AdjustmentSign::PESSIMISTIC && adjustment.maxCoeff() > 0.0)
        throw config_error("AugmentedReward: pessimistic adjustment must be entrywise <= 0");
}

namespace {

TabularMDP composed_mdp(const LatentFactorModel& model, const Eigen::MatrixXd& base, double gamma) {
    TabularMDP mdp;
    mdp.n_states = model.n_states;
    mdp.n_actions = model.n_actions;
    mdp.gamma = gamma;
    mdp.init_dist = Eigen::VectorXd::Constant(model.n_states, 1.0 / model.n_states);
    mdp.reward = base;
    mdp.transition = compose_transition(model);
    for (int i = 0; i < mdp.transition.rows(); ++i) {
        const double total = mdp.transition.row(i).sum();
        if (!(total > 0.0)) throw numeric_error("plan_on_model: composed transition row sums to zero");
        mdp.transition.row(i) /= total;
    }
    return mdp;
}

}  // namespace

PlanResult plan_on_model(const LatentFactorModel& model, const AugmentedReward& aug,
                         double gamma, double tol) {
    aug.validate();
    if (aug.base.rows() != model.n_states || aug.base.cols() != model.n_actions)
        throw config_error("plan_on_model: reward shape mismatch");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw config_error("plan_on_model: gamma must lie in [0,1)");
    if (!(tol > 0.0)) throw config_error("plan_on_model: tol must be positive");

    const TabularMDP mdp = composed_mdp(model, aug.base, gamma);
    const Eigen::MatrixXd shaped = aug.total();
    const ValueIterationResult vi = exact_value_iteration(mdp, &shaped, tol);
    PlanResult out;
    out.q = vi.q;
    out.v = vi.v;
    out.policy = vi.greedy;
    return out;
}

LinearPlanResult linear_q_planner(const LatentFactorModel& model, const AugmentedReward& aug,
                                  double gamma, int iters) {
    aug.validate();
    if (aug.base.rows() != model.n_states || aug.base.cols() != model.n_actions)
        throw config_error("linear_q_planner: reward shape mismatch");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw config_error("linear_q_planner: gamma must lie in [0,1)");
    if (iters < 1) throw config_error("linear_q_planner: iters must be >= 1");

    const int S = model.n_states, A = model.n_actions;
    const Eigen::MatrixXd shaped = aug.total();
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(S, A);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(model.n_latent);

    LinearPlanResult out;
    for (int it = 0; it < iters; ++it) {
        const Eigen::VectorXd v = q.rowwise().maxCoeff();
        w = model.mu * v;
        Eigen::MatrixXd next(S, A);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a)
                next(s, a) = shaped(s, a) + gamma * model.phi.row(model.row(s, a)).dot(w);
        const double diff = (next - q).cwiseAbs().maxCoeff();
        q = next;
        out.iters_used = it + 1;
        if (gamma * diff <= 1e-12) {
            out.converged = true;
            break;
        }
    }

    out.q = q;
    out.q_latent.reward_weight = 1.0;
    out.q_latent.latent_weights = w;
    Eigen::VectorXi greedy(S);
    for (int s = 0; s < S; ++s) {
        int best = 0;
        for (int a = 1; a < A; ++a)
            if (q(s, a) > q(s, best)) best = a;
        greedy[s] = best;
    }
    out.policy = Policy::deterministic(greedy, A);
    return out;
}

}  // namespace lvrep

#include "lvrep/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lvrep {

namespace {

void check_distribution(const Eigen::VectorXd& p, double tol, const std::string& what) {
    if (p.size() == 0) throw config_error(what + ": empty");
    if (p.minCoeff() < 0.0) throw config_error(what + ": negative entry");
    if (std::abs(p.sum() - 1.0) > tol) {
        std::ostringstream msg;
        msg << what << ": sums to " << p.sum() << " (expected 1 within " << tol << ")";
        throw config_error(msg.str());
    }
}

}  // namespace

void TabularMDP::validate() const {
    if (n_states <= 0 || n_actions <= 0) throw config_error("TabularMDP: nonpositive sizes");
    if (!(gamma > 0.0 && gamma < 1.0)) throw config_error("TabularMDP: gamma must lie in (0,1)");
    if (init_dist.size() != n_states) throw config_error("TabularMDP: init_dist size mismatch");
    check_distribution(init_dist, 1e-12, "TabularMDP init_dist");
    if (reward.rows() != n_states || reward.cols() != n_actions)
        throw config_error("TabularMDP: reward shape mismatch");
    if (reward.minCoeff() < 0.0 || reward.maxCoeff() > 1.0)
        throw config_error("TabularMDP: reward entries must lie in [0,1]");
    if (transition.rows() != static_cast<long>(n_states) * n_actions || transition.cols() != n_states)
        throw config_error("TabularMDP: transition shape mismatch");
    for (int s = 0; s < n_states; ++s)
        for (int a = 0; a < n_actions; ++a) {
            std::ostringstream what;
            what << "TabularMDP transition row (s=" << s << ", a=" << a << ")";
            check_distribution(transition.row(row(s, a)).transpose(), 1e-12, what.str());
        }
}

void Policy::validate() const {
    if (probs.rows() <= 0 || probs.cols() <= 0) throw config_error("Policy: empty");
    for (int s = 0; s < probs.rows(); ++s) {
        std::ostringstream what;
        what << "Policy row s=" << s;
        check_distribution(probs.row(s).transpose(), 1e-12, what.str());
    }
}

Policy Policy::uniform(int n_states, int n_actions) {
    Policy p;
    p.probs = Eigen::MatrixXd::Constant(n_states, n_actions, 1.0 / n_actions);
    return p;
}

Policy Policy::deterministic(const Eigen::VectorXi& actions, int n_actions) {
    Policy p;
    p.probs = Eigen::MatrixXd::Zero(actions.size(), n_actions);
    for (int s = 0; s < actions.size(); ++s) {
        if (actions[s] < 0 || actions[s] >= n_actions) throw config_error("Policy: action out of range");
        p.probs(s, actions[s]) = 1.0;
    }
    return p;
}

void OccupancyMeasure::validate() const {
    if (dist.minCoeff() < -1e-12) throw config_error("OccupancyMeasure: negative entry");
    if (std::abs(dist.sum() - 1.0) > 1e-9) throw config_error("OccupancyMeasure: not normalized");
}

TabularMDP build_chain_mdp(int n_states, double slip, double gamma) {
    if (n_states < 3) throw config_error("build_chain_mdp: need at least 3 states");
    if (!(slip >= 0.0 && slip < 1.0)) throw config_error("build_chain_mdp: slip must lie in [0,1)");
    if (!(gamma > 0.0 && gamma < 1.0)) throw config_error("build_chain_mdp: gamma must lie in (0,1)");

    TabularMDP mdp;
    mdp.n_states = n_states;
    mdp.n_actions = 2;
    mdp.gamma = gamma;
    mdp.init_dist = Eigen::VectorXd::Zero(n_states);
    mdp.init_dist[0] = 1.0;
    mdp.reward = Eigen::MatrixXd::Zero(n_states, 2);
    mdp.reward(0, kChainLeft) = 0.005;
    mdp.reward(n_states - 1, kChainRight) = 1.0;
    mdp.transition = Eigen::MatrixXd::Zero(static_cast<long>(n_states) * 2, n_states);
    for (int s = 0; s < n_states; ++s) {
        const int left = std::max(s - 1, 0);
        const int right = std::min(s + 1, n_states - 1);
        mdp.transition(mdp.row(s, kChainLeft), left) = 1.0;
        // Slip mass splits evenly between staying and sliding left; at the
        // boundaries the clamped targets coincide and the mass merges.
        mdp.transition(mdp.row(s, kChainRight), right) += 1.0 - slip;
        mdp.transition(mdp.row(s, kChainRight), s) += slip / 2.0;
        mdp.transition(mdp.row(s, kChainRight), left) += slip / 2.0;
    }
    mdp.validate();
    return mdp;
}

ValueIterationResult exact_value_iteration(const TabularMDP& mdp,
                                           const Eigen::MatrixXd* reward_override,
                                           double tol) {
    if (!(tol > 0.0)) throw config_error("exact_value_iteration: tol must be positive");
    const Eigen::MatrixXd& r = reward_override ? *reward_override : mdp.reward;
    if (r.rows() != mdp.n_states || r.cols() != mdp.n_actions)
        throw config_error("exact_value_iteration: reward override shape mismatch");

    const int S = mdp.n_states, A = mdp.n_actions;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(S, A);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(S);
    // gamma * ||Q_{k+1} - Q_k||_inf bounds the Bellman residual of Q_{k+1},
    // so iterate until that certificate meets tol.
    const long max_iters = 4'000'000;
    double diff = std::numeric_limits<double>::infinity();
    for (long it = 0; it < max_iters; ++it) {
        Eigen::MatrixXd q_next(S, A);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a)
                q_next(s, a) = r(s, a) + mdp.gamma * mdp.transition.row(mdp.row(s, a)).dot(v);
        diff = (q_next - q).cwiseAbs().maxCoeff();
        q = q_next;
        v = q.rowwise().maxCoeff();
        if (mdp.gamma * diff <= tol) {
            Eigen::VectorXi greedy(S);
            for (int s = 0; s < S; ++s) {
                int best = 0;
                for (int a = 1; a < A; ++a)
                    if (q(s, a) > q(s, best)) best = a;  // strict: ties keep the lowest index
                greedy[s] = best;
            }
            return {q, v, Policy::deterministic(greedy, A)};
        }
    }
    std::ostringstream msg;
    msg << "exact_value_iteration: no convergence within " << max_iters
        << " iterations (residual bound " << mdp.gamma * diff << ", tol " << tol << ")";
    throw numeric_error(msg.str());
}

PolicyEvaluationResult exact_policy_evaluation(const TabularMDP& mdp, const Policy& policy,
                                               const Eigen::MatrixXd* reward_override) {
    const Eigen::MatrixXd& r = reward_override ? *reward_override : mdp.reward;
    const int S = mdp.n_states, A = mdp.n_actions;
    if (policy.probs.rows() != S || policy.probs.cols() != A)
        throw config_error("exact_policy_evaluation: policy shape mismatch");

    // State-to-state chain under the policy and the policy-averaged reward.
    Eigen::MatrixXd p_pi = Eigen::MatrixXd::Zero(S, S);
    Eigen::VectorXd r_pi = Eigen::VectorXd::Zero(S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            p_pi.row(s) += policy.probs(s, a) * mdp.transition.row(mdp.row(s, a));
            r_pi[s] += policy.probs(s, a) * r(s, a);
        }

    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(S, S) - mdp.gamma * p_pi;
    const Eigen::VectorXd v = system.partialPivLu().solve(r_pi);

    PolicyEvaluationResult out;
    out.v = v;
    out.q.resize(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            out.q(s, a) = r(s, a) + mdp.gamma * mdp.transition.row(mdp.row(s, a)).dot(v);
    out.init_value = mdp.init_dist.dot(v);
    return out;
}

OccupancyMeasure occupancy_measure(const TabularMDP& mdp, const Policy& policy) {
    const int S = mdp.n_states, A = mdp.n_actions;
    if (policy.probs.rows() != S || policy.probs.cols() != A)
        throw config_error("occupancy_measure: policy shape mismatch");

    // d(s,a) factorizes as d_state(s) * pi(a|s); solve the state marginal
    // fixed point d_state = (1-gamma) d0 + gamma P_pi^T d_state directly.
    Eigen::MatrixXd p_pi = Eigen::MatrixXd::Zero(S, S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            p_pi.row(s) += policy.probs(s, a) * mdp.transition.row(mdp.row(s, a));

    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(S, S) - mdp.gamma * p_pi.transpose();
    Eigen::VectorXd d_state = system.partialPivLu().solve((1.0 - mdp.gamma) * mdp.init_dist);
    d_state = d_state.cwiseMax(0.0);  // clamp solver dust

    OccupancyMeasure occ;
    occ.dist = d_state.asDiagonal() * policy.probs;

    // The direct solve must satisfy the defining recursion; this guards
    // against ill-conditioning rather than logic errors.
    double residual = 0.0;
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double flow = 0.0;
            for (int sp = 0; sp < S; ++sp)
                for (int ap = 0; ap < A; ++ap)
                    flow += occ.dist(sp, ap) * mdp.transition(mdp.row(sp, ap), s);
            const double rhs = (1.0 - mdp.gamma) * mdp.init_dist[s] * policy.probs(s, a)
                               + mdp.gamma * flow * policy.probs(s, a);
            residual = std::max(residual, std::abs(occ.dist(s, a) - rhs));
        }
    if (residual > 1e-9) {
        std::ostringstream msg;
        msg << "occupancy_measure: recursion residual " << residual << " exceeds 1e-9";
        throw numeric_error(msg.str());
    }
    return occ;
}

int sample_occupancy_state(const TabularMDP& mdp, const Policy& policy, Rng& rng) {
    int s = rng.categorical(mdp.init_dist);
    // Stop test precedes each step so the stop-at-t distribution is
    // (1-gamma) gamma^t, the normalized occupancy's time marginal.
    while (!rng.bernoulli(1.0 - mdp.gamma)) {
        const int a = rng.categorical(policy.probs.row(s).transpose());
        s = rng.categorical(mdp.transition.row(mdp.row(s, a)).transpose());
    }
    return s;
}

double concentrability(const TabularMDP& mdp, const Policy& target,
                       const OccupancyMeasure& behavior_dist,
                       const std::function<Eigen::VectorXd(int, int)>& features) {
    const int S = mdp.n_states, A = mdp.n_actions;
    const OccupancyMeasure target_occ = occupancy_measure(mdp, target);

    const int dim = static_cast<int>(features(0, 0).size());
    Eigen::MatrixXd a_mat = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd b_mat = Eigen::MatrixXd::Zero(dim, dim);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const Eigen::VectorXd phi = features(s, a);
            if (phi.size() != dim) throw config_error("concentrability: inconsistent feature dims");
            if (target_occ.dist(s, a) > 0.0) a_mat += target_occ.dist(s, a) * phi * phi.transpose();
            if (behavior_dist.dist(s, a) > 0.0) b_mat += behavior_dist.dist(s, a) * phi * phi.transpose();
        }

    // Work in B's positive eigenspace. A direction where B vanishes but A
    // does not means the behavior data cannot certify the target policy.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b_eig(b_mat);
    const double b_scale = std::max(b_eig.eigenvalues().maxCoeff(), 0.0);
    const double null_tol = std::max(b_scale, 1.0) * 1e-12;
    std::vector<int> keep;
    for (int i = 0; i < dim; ++i) {
        if (b_eig.eigenvalues()[i] > null_tol) {
            keep.push_back(i);
        } else {
            const Eigen::VectorXd dir = b_eig.eigenvectors().col(i);
            const double a_mass = dir.dot(a_mat * dir);
            if (a_mass > 1e-10) {
                std::ostringstream msg;
                msg << "concentrability: behavior second moment is singular along a direction "
                       "carrying target mass "
                    << a_mass << "; null direction = [";
                for (int j = 0; j < dim; ++j) msg << (j ? ", " : "") << dir[j];
                msg << "]";
                throw numeric_error(msg.str());
            }
        }
    }
    if (keep.empty()) return 0.0;  // target has no feature mass anywhere B does not cover

    Eigen::MatrixXd basis(dim, static_cast<int>(keep.size()));
    for (size_t j = 0; j < keep.size(); ++j) basis.col(static_cast<int>(j)) = b_eig.eigenvectors().col(keep[j]);
    const Eigen::MatrixXd a_red = basis.transpose() * a_mat * basis;
    const Eigen::MatrixXd b_red = basis.transpose() * b_mat * basis;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> gen(a_red, b_red);
    return gen.eigenvalues().maxCoeff();
}

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw config_error(what + ": expected a non-empty array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols) throw config_error(what + ": ragged rows");
        for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

}  // namespace

std::string mdp_to_json(const TabularMDP& mdp) {
    json j;
    j["n_states"] = mdp.n_states;
    j["n_actions"] = mdp.n_actions;
    j["gamma"] = mdp.gamma;
    j["init_dist"] = std::vector<double>(mdp.init_dist.data(), mdp.init_dist.data() + mdp.init_dist.size());
    j["reward"] = matrix_to_json(mdp.reward);
    json transition = json::array();
    for (int s = 0; s < mdp.n_states; ++s) {
        json per_action = json::array();
        for (int a = 0; a < mdp.n_actions; ++a) {
            json row = json::array();
            for (int sp = 0; sp < mdp.n_states; ++sp) row.push_back(mdp.transition(mdp.row(s, a), sp));
            per_action.push_back(std::move(row));
        }
        transition.push_back(std::move(per_action));
    }
    j["transition"] = std::move(transition);
    return j.dump(2);
}

TabularMDP mdp_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw config_error(std::string("mdp_from_json: parse failure: ") + e.what());
    }
    TabularMDP mdp;
    try {
        mdp.n_states = j.at("n_states").get<int>();
        mdp.n_actions = j.at("n_actions").get<int>();
        mdp.gamma = j.at("gamma").get<double>();
        const auto init = j.at("init_dist").get<std::vector<double>>();
        mdp.init_dist = Eigen::Map<const Eigen::VectorXd>(init.data(), static_cast<long>(init.size()));
        mdp.reward = matrix_from_json(j.at("reward"), "mdp reward");
        const json& t = j.at("transition");
        if (static_cast<int>(t.size()) != mdp.n_states) throw config_error("mdp transition: bad outer size");
        mdp.transition.resize(static_cast<long>(mdp.n_states) * mdp.n_actions, mdp.n_states);
        for (int s = 0; s < mdp.n_states; ++s) {
            if (static_cast<int>(t[s].size()) != mdp.n_actions)
                throw config_error("mdp transition: bad action arity");
            for (int a = 0; a < mdp.n_actions; ++a)
                for (int sp = 0; sp < mdp.n_states; ++sp)
                    mdp.transition(mdp.row(s, a), sp) = t[s][a][sp].get<double>();
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("mdp_from_json: ") + e.what());
    }
    mdp.validate();
    return mdp;
}

std::string policy_to_json(const Policy& policy) {
    json j;
    j["probs"] = matrix_to_json(policy.probs);
    return j.dump(2);
}

Policy policy_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw config_error(std::string("policy_from_json: parse failure: ") + e.what());
    }
    Policy p;
    p.probs = matrix_from_json(j.at("probs"), "policy probs");
    p.validate();
    return p;
}

}  // namespace lvrep

#include "lvrep/agent.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lvrep/errors.hpp"
#include "lvrep/features.hpp"
#include "lvrep/planner.hpp"

namespace lvrep {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

std::vector<Eigen::VectorXd> dataset_features(const LatentFactorModel& model,
                                              const TransitionDataset& data) {
    std::vector<Eigen::VectorXd> feats;
    feats.reserve(data.size());
    for (const auto& t : data.triples)
        feats.push_back(model.phi.row(model.row(t[0], t[1])).transpose());
    return feats;
}

Eigen::MatrixXd bonus_table(const LatentFactorModel& model, const CovarianceState& cov,
                            const BonusParams& params) {
    Eigen::MatrixXd table(model.n_states, model.n_actions);
    for (int s = 0; s < model.n_states; ++s)
        for (int a = 0; a < model.n_actions; ++a)
            table(s, a) = bonus(cov, model.phi.row(model.row(s, a)).transpose(), params);
    return table;
}

// Dataset-weighted mean and max of a per-(s,a) table.
void dataset_bonus_stats(const Eigen::MatrixXd& table, const TransitionDataset& data,
                         double* mean_out, double* max_out) {
    double total = 0.0, weighted = 0.0, best = 0.0;
    for (int s = 0; s < table.rows(); ++s)
        for (int a = 0; a < table.cols(); ++a) {
            const double c = data.counts.row(data.row(s, a)).sum();
            if (c <= 0.0) continue;
            total += c;
            weighted += c * table(s, a);
            best = std::max(best, table(s, a));
        }
    *mean_out = total > 0.0 ? weighted / total : 0.0;
    *max_out = best;
}

[[noreturn]] void rethrow_with_episode(int episode, const std::exception& e, bool is_config) {
    std::ostringstream msg;
    msg << "episode " << episode << ": " << e.what();
    if (is_config) throw config_error(msg.str());
    throw numeric_error(msg.str());
}

}  // namespace

void AgentConfig::validate() const {
    if (n_episodes < 0) throw config_error("AgentConfig: n_episodes must be >= 0");
    if (n_latent < 1) throw config_error("AgentConfig: n_latent must be >= 1");
    fit.validate();
    BonusParams check = bonus;
    check.alpha = 0.0;  // alpha comes from the schedule, not from here
    check.validate();
    if (alpha_c < 0.0) throw config_error("AgentConfig: alpha_c must be >= 0");
    if (alpha_c_norm < 0.0) throw config_error("AgentConfig: alpha_c_norm must be >= 0");
    if (!(delta > 0.0 && delta < 1.0)) throw config_error("AgentConfig: delta must lie in (0,1)");
    if (model_class_log < 0.0) throw config_error("AgentConfig: model_class_log must be >= 0");
    if (refit_every < 1) throw config_error("AgentConfig: refit_every must be >= 1");
    if (tuples_per_episode < 1) throw config_error("AgentConfig: tuples_per_episode must be >= 1");
    if (!(plan_tol > 0.0)) throw config_error("AgentConfig: plan_tol must be positive");
}

TransitionTuple collect_tuple(const TabularMDP& mdp, const Policy& policy, Rng& rng) {
    TransitionTuple t;
    t.s = sample_occupancy_state(mdp, policy, rng);
    t.a = rng.uniform_int(mdp.n_actions);
    t.s_next = rng.categorical(mdp.transition.row(mdp.row(t.s, t.a)).transpose());
    t.a_next = rng.uniform_int(mdp.n_actions);
    t.s_after = rng.categorical(mdp.transition.row(mdp.row(t.s_next, t.a_next)).transpose());
    return t;
}

OnlineResult run_online(const TabularMDP& mdp, const AgentConfig& cfg, Rng& rng) {
    mdp.validate();
    cfg.validate();
    Rng collect_rng = rng.child(0);
    Rng fit_rng = rng.child(1);

    OnlineResult out;
    out.first_hop = TransitionDataset(mdp.n_states, mdp.n_actions);
    out.second_hop = TransitionDataset(mdp.n_states, mdp.n_actions);
    out.policies.push_back(Policy::uniform(mdp.n_states, mdp.n_actions));
    if (cfg.n_episodes == 0) return out;

    const ValueIterationResult star = exact_value_iteration(mdp, nullptr, 1e-12);
    const double v_star = mdp.init_dist.dot(star.v);

    Eigen::VectorXd occupancy_sum = Eigen::VectorXd::Zero(mdp.n_states);
    CovarianceState cov = cov_init(cfg.n_latent, cfg.bonus.lambda);
    BonusParams active = cfg.bonus;
    active.alpha = 0.0;
    Eigen::MatrixXd bonus_tab = Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_actions);
    double cumulative_regret = 0.0;

    for (int n = 1; n <= cfg.n_episodes; ++n) {
        const auto start = std::chrono::steady_clock::now();
        const Policy behavior = out.policies.back();
        occupancy_sum += occupancy_measure(mdp, behavior).state_marginal();

        for (int t = 0; t < cfg.tuples_per_episode; ++t) {
            const TransitionTuple tuple = collect_tuple(mdp, behavior, collect_rng);
            out.first_hop.add(tuple.s, tuple.a, tuple.s_next);
            out.second_hop.add(tuple.s_next, tuple.a_next, tuple.s_after);
        }

        const bool refit = (n - 1) % cfg.refit_every == 0;
        try {
            if (refit) {
                const TransitionDataset training =
                    TransitionDataset::merged(out.first_hop, out.second_hop);
                LatentFactorModel fresh = fit(training, cfg.n_latent, cfg.fit, fit_rng);
                if (out.model_fitted) {
                    // Keep the previous parameters in the candidate pool:
                    // continuing from them guards against fresh restarts that
                    // land in a worse likelihood basin.
                    double warm_ll = 0.0, fresh_ll = 0.0;
                    LatentFactorModel warm = refine(out.model, training, cfg.fit, &warm_ll);
                    fresh_ll = log_likelihood(fresh, training);
                    out.model = warm_ll >= fresh_ll ? warm : fresh;
                } else {
                    out.model = fresh;
                }
                out.model_fitted = true;

                const std::vector<Eigen::VectorXd> feats = dataset_features(
                    out.model, cfg.cov_include_second_hop ? training : out.first_hop);
                cov = cov_rebuild(feats, cfg.n_latent, cfg.bonus.lambda);
                active = cfg.bonus;
                active.alpha =
                    alpha_schedule(n, mdp.gamma, mdp.n_actions, cfg.bonus.lambda,
                                   cfg.model_class_log, cfg.delta, cfg.alpha_c, cfg.alpha_c_norm);
                bonus_tab = bonus_table(out.model, cov, active);

                AugmentedReward aug;
                aug.base = mdp.reward;
                aug.adjustment = bonus_tab;
                aug.sign = AdjustmentSign::OPTIMISTIC;
                const PlanResult plan = plan_on_model(out.model, aug, mdp.gamma, cfg.plan_tol);
                out.policies.push_back(plan.policy);
            } else {
                out.policies.push_back(behavior);
            }
        } catch (const config_error& e) {
            rethrow_with_episode(n, e, true);
        } catch (const numeric_error& e) {
            rethrow_with_episode(n, e, false);
        }

        EpisodeRecord rec;
        rec.episode = n;
        rec.value = exact_policy_evaluation(mdp, out.policies.back()).init_value;
        rec.v_star = v_star;
        // V* >= V^pi up to the value-iteration tolerance; clamp so the logged
        // cumulative regret is exactly nondecreasing.
        cumulative_regret += std::max(v_star - rec.value, 0.0);
        rec.regret = cumulative_regret;
        Eigen::MatrixXd weighting =
            (occupancy_sum / static_cast<double>(n) / mdp.n_actions).replicate(1, mdp.n_actions);
        rec.tv_error = out.model_fitted ? tv_error(out.model, mdp, weighting, false) : 1.0;
        dataset_bonus_stats(bonus_tab, out.first_hop, &rec.mean_bonus, &rec.max_bonus);
        rec.wall_ms = elapsed_ms(start);
        out.log.episodes.push_back(rec);
    }
    return out;
}

OfflineResult run_offline(const TabularMDP& mdp, const Policy& behavior, int n_samples,
                          const AgentConfig& cfg, Rng& rng) {
    mdp.validate();
    cfg.validate();
    behavior.validate();
    if (behavior.probs.rows() != mdp.n_states || behavior.probs.cols() != mdp.n_actions)
        throw config_error("run_offline: behavior policy shape mismatch");
    if (n_samples < 1) throw config_error("run_offline: n_samples must be >= 1 (empty dataset)");

    const auto start = std::chrono::steady_clock::now();
    Rng collect_rng = rng.child(0);
    Rng fit_rng = rng.child(1);

    OfflineResult out;
    out.data = TransitionDataset(mdp.n_states, mdp.n_actions);

    const double min_action_prob = behavior.probs.minCoeff();
    if (min_action_prob > 0.0) {
        out.log.diagnostics["omega"] = 1.0 / min_action_prob;
    } else {
        out.log.diagnostics["omega"] = kInf;
        out.log.warnings.push_back(
            "behavior policy assigns zero probability to some action; importance bound omega is "
            "infinite");
    }

    for (int i = 0; i < n_samples; ++i) {
        const int s = sample_occupancy_state(mdp, behavior, collect_rng);
        const int a = collect_rng.categorical(behavior.probs.row(s).transpose());
        const int s_next = collect_rng.categorical(mdp.transition.row(mdp.row(s, a)).transpose());
        out.data.add(s, a, s_next);
    }

    out.model = fit(out.data, cfg.n_latent, cfg.fit, fit_rng);
    const CovarianceState cov =
        cov_rebuild(dataset_features(out.model, out.data), cfg.n_latent, cfg.bonus.lambda);
    BonusParams active = cfg.bonus;
    active.alpha = alpha_schedule(n_samples, mdp.gamma, mdp.n_actions, cfg.bonus.lambda,
                                  cfg.model_class_log, cfg.delta, cfg.alpha_c, cfg.alpha_c_norm);
    const Eigen::MatrixXd penalty = bonus_table(out.model, cov, active);

    AugmentedReward aug;
    aug.base = mdp.reward;
    aug.adjustment = -penalty;
    aug.sign = AdjustmentSign::PESSIMISTIC;
    const PlanResult plan = plan_on_model(out.model, aug, mdp.gamma, cfg.plan_tol);
    out.policy = plan.policy;

    const ValueIterationResult star = exact_value_iteration(mdp, nullptr, 1e-12);
    const double v_star = mdp.init_dist.dot(star.v);

    const OccupancyMeasure behavior_occ = occupancy_measure(mdp, behavior);
    try {
        auto feature_of = [&](int s, int a) {
            return Eigen::VectorXd(out.model.phi.row(out.model.row(s, a)).transpose());
        };
        out.log.diagnostics["concentrability"] =
            concentrability(mdp, out.policy, behavior_occ, feature_of);
    } catch (const numeric_error& e) {
        out.log.diagnostics["concentrability"] = kInf;
        out.log.warnings.push_back(std::string("concentrability diagnostic unavailable: ") +
                                   e.what());
    }
    out.log.diagnostics["alpha"] = active.alpha;
    out.log.diagnostics["n_samples"] = static_cast<double>(n_samples);

    EpisodeRecord rec;
    rec.episode = 1;
    rec.value = exact_policy_evaluation(mdp, out.policy).init_value;
    rec.v_star = v_star;
    rec.regret = std::max(v_star - rec.value, 0.0);
    Eigen::MatrixXd weighting = behavior.probs;
    for (int s = 0; s < mdp.n_states; ++s) weighting.row(s) *= behavior_occ.state_marginal()[s];
    rec.tv_error = tv_error(out.model, mdp, weighting, false);
    dataset_bonus_stats(penalty, out.data, &rec.mean_bonus, &rec.max_bonus);
    rec.wall_ms = elapsed_ms(start);
    out.log.episodes.push_back(rec);
    return out;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json json_number(double v) {
    // JSON has no infinity/NaN literals; encode them as strings.
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

}  // namespace

std::string runlog_to_csv(const RunLog& log) {
    std::ostringstream out;
    out << "episode,value,v_star,regret,tv_error,mean_bonus,max_bonus,wall_ms\n";
    for (const auto& rec : log.episodes) {
        out << rec.episode << ',' << format_double(rec.value) << ',' << format_double(rec.v_star)
            << ',' << format_double(rec.regret) << ',' << format_double(rec.tv_error) << ','
            << format_double(rec.mean_bonus) << ',' << format_double(rec.max_bonus) << ','
            << format_double(rec.wall_ms) << '\n';
    }
    return out.str();
}

std::string runlog_to_json(const RunLog& log) {
    nlohmann::json j;
    j["episodes"] = nlohmann::json::array();
    for (const auto& rec : log.episodes) {
        nlohmann::json r;
        r["episode"] = rec.episode;
        r["value"] = json_number(rec.value);
        r["v_star"] = json_number(rec.v_star);
        r["regret"] = json_number(rec.regret);
        r["tv_error"] = json_number(rec.tv_error);
        r["mean_bonus"] = json_number(rec.mean_bonus);
        r["max_bonus"] = json_number(rec.max_bonus);
        r["wall_ms"] = json_number(rec.wall_ms);
        j["episodes"].push_back(std::move(r));
    }
    j["warnings"] = log.warnings;
    j["diagnostics"] = nlohmann::json::object();
    for (const auto& [key, value] : log.diagnostics) j["diagnostics"][key] = json_number(value);
    return j.dump(2);
}

}  // namespace lvrep

#include "lvrep/latent_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lvrep {

namespace {

constexpr double kSmoothing = 1e-8;  // additive M-step smoothing
const double kNegInf = -std::numeric_limits<double>::infinity();

void check_stochastic_rows(const Eigen::MatrixXd& m, const std::string& what) {
    for (int i = 0; i < m.rows(); ++i) {
        if (m.row(i).minCoeff() < 0.0) {
            std::ostringstream msg;
            msg << what << " row " << i << ": negative entry";
            throw config_error(msg.str());
        }
        if (std::abs(m.row(i).sum() - 1.0) > 1e-12) {
            std::ostringstream msg;
            msg << what << " row " << i << ": sums to " << m.row(i).sum();
            throw config_error(msg.str());
        }
    }
}

}  // namespace

void LatentFactorModel::validate() const {
    if (n_states <= 0 || n_actions <= 0 || n_latent <= 0)
        throw config_error("LatentFactorModel: nonpositive sizes");
    if (phi.rows() != static_cast<long>(n_states) * n_actions || phi.cols() != n_latent)
        throw config_error("LatentFactorModel: phi shape mismatch");
    if (mu.rows() != n_latent || mu.cols() != n_states)
        throw config_error("LatentFactorModel: mu shape mismatch");
    check_stochastic_rows(phi, "phi");
    check_stochastic_rows(mu, "mu");
}

TransitionDataset::TransitionDataset(int n_states_, int n_actions_)
    : n_states(n_states_), n_actions(n_actions_) {
    if (n_states <= 0 || n_actions <= 0) throw config_error("TransitionDataset: nonpositive sizes");
    counts = Eigen::MatrixXd::Zero(static_cast<long>(n_states) * n_actions, n_states);
    row_totals = Eigen::VectorXd::Zero(static_cast<long>(n_states) * n_actions);
}

void TransitionDataset::add(int s, int a, int s_next) {
    if (s < 0 || s >= n_states || a < 0 || a >= n_actions || s_next < 0 || s_next >= n_states)
        throw config_error("TransitionDataset::add: index out of range");
    triples.push_back({s, a, s_next});
    counts(row(s, a), s_next) += 1.0;
    row_totals[row(s, a)] += 1.0;
}

TransitionDataset TransitionDataset::merged(const TransitionDataset& a, const TransitionDataset& b) {
    if (a.n_states != b.n_states || a.n_actions != b.n_actions)
        throw config_error("TransitionDataset::merged: mismatched spaces");
    TransitionDataset out(a.n_states, a.n_actions);
    out.triples = a.triples;
    out.triples.insert(out.triples.end(), b.triples.begin(), b.triples.end());
    out.counts = a.counts + b.counts;
    out.row_totals = a.row_totals + b.row_totals;
    return out;
}

void FitConfig::validate() const {
    if (max_iters < 1) throw config_error("FitConfig: max_iters must be >= 1");
    if (!(tol > 0.0)) throw config_error("FitConfig: tol must be positive");
    if (restarts < 1) throw config_error("FitConfig: restarts must be >= 1");
    if (!(init_concentration > 0.0)) throw config_error("FitConfig: init_concentration must be positive");
    if (mode == Mode::GRADIENT && !(learning_rate > 0.0))
        throw config_error("FitConfig: learning_rate must be positive in GRADIENT mode");
}

void BlockMDPSpec::validate() const {
    if (n_states <= 0 || n_actions <= 0 || n_latent <= 0)
        throw config_error("BlockMDPSpec: nonpositive sizes");
    if (n_latent > n_states) throw config_error("BlockMDPSpec: n_latent must be <= n_states");
    if (!(concentration > 0.0)) throw config_error("BlockMDPSpec: concentration must be positive");
    if (!(gamma > 0.0 && gamma < 1.0)) throw config_error("BlockMDPSpec: gamma must lie in (0,1)");
}

LatentFactorModel random_model(int n_states, int n_actions, int n_latent,
                               double concentration, Rng& rng) {
    LatentFactorModel model;
    model.n_states = n_states;
    model.n_actions = n_actions;
    model.n_latent = n_latent;
    model.phi.resize(static_cast<long>(n_states) * n_actions, n_latent);
    for (int i = 0; i < model.phi.rows(); ++i)
        model.phi.row(i) = rng.dirichlet(n_latent, concentration).transpose();
    model.mu.resize(n_latent, n_states);
    for (int z = 0; z < n_latent; ++z)
        model.mu.row(z) = rng.dirichlet(n_states, concentration).transpose();
    return model;
}

BlockMDP build_random_block_mdp(const BlockMDPSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    BlockMDP out;
    out.generator = random_model(spec.n_states, spec.n_actions, spec.n_latent, spec.concentration, rng);

    out.mdp.n_states = spec.n_states;
    out.mdp.n_actions = spec.n_actions;
    out.mdp.gamma = spec.gamma;
    out.mdp.init_dist = Eigen::VectorXd::Constant(spec.n_states, 1.0 / spec.n_states);
    out.mdp.reward.resize(spec.n_states, spec.n_actions);
    for (int s = 0; s < spec.n_states; ++s)
        for (int a = 0; a < spec.n_actions; ++a) out.mdp.reward(s, a) = rng.uniform01();
    out.mdp.transition = compose_transition(out.generator);
    // Composition of row-stochastic factors can carry ~1e-16 rounding per
    // entry; renormalize rows so the MDP meets its exact-sum invariant.
    for (int i = 0; i < out.mdp.transition.rows(); ++i)
        out.mdp.transition.row(i) /= out.mdp.transition.row(i).sum();
    out.mdp.validate();
    return out;
}

Eigen::MatrixXd compose_transition(const LatentFactorModel& model) {
    return model.phi * model.mu;
}

Eigen::VectorXd exact_posterior(const LatentFactorModel& model, int s, int a, int s_next) {
    if (s < 0 || s >= model.n_states || a < 0 || a >= model.n_actions || s_next < 0 ||
        s_next >= model.n_states)
        throw config_error("exact_posterior: index out of range");
    const Eigen::VectorXd joint =
        model.phi.row(model.row(s, a)).transpose().cwiseProduct(model.mu.col(s_next));
    const double total = joint.sum();
    if (!(total > 0.0)) {
        std::ostringstream msg;
        msg << "exact_posterior: composed probability of (s=" << s << ", a=" << a
            << ", s'=" << s_next << ") is zero; posterior undefined";
        throw numeric_error(msg.str());
    }
    return joint / total;
}

double log_likelihood(const LatentFactorModel& model, const TransitionDataset& data) {
    if (data.n_states != model.n_states || data.n_actions != model.n_actions)
        throw config_error("log_likelihood: dataset/model space mismatch");
    if (data.triples.empty()) return 0.0;
    double ll = 0.0;
    for (int sa = 0; sa < data.counts.rows(); ++sa) {
        if (data.row_totals[sa] == 0.0) continue;
        const Eigen::VectorXd t_row = (model.phi.row(sa) * model.mu).transpose();
        for (int sp = 0; sp < data.n_states; ++sp) {
            const double c = data.counts(sa, sp);
            if (c == 0.0) continue;
            if (!(t_row[sp] > 0.0)) return kNegInf;
            ll += c * std::log(t_row[sp]);
        }
    }
    return ll;
}

double elbo(const LatentFactorModel& model, const std::vector<Eigen::VectorXd>& q,
            const TransitionDataset& data) {
    if (q.size() != data.triples.size())
        throw config_error("elbo: need exactly one posterior vector per triple");
    double total = 0.0;
    for (std::size_t t = 0; t < data.triples.size(); ++t) {
        const auto [s, a, sp] = data.triples[t];
        const Eigen::VectorXd& qt = q[t];
        if (qt.size() != model.n_latent) throw config_error("elbo: posterior dimension mismatch");
        if (qt.minCoeff() < -1e-12 || std::abs(qt.sum() - 1.0) > 1e-9)
            throw config_error("elbo: q is not a distribution over latents");
        const auto phi_row = model.phi.row(model.row(s, a));
        for (int z = 0; z < model.n_latent; ++z) {
            const double qz = qt[z];
            if (qz <= 0.0) continue;  // 0 log 0 = 0
            if (!(phi_row[z] > 0.0)) return kNegInf;  // KL against zero mass
            const double emit = model.mu(z, sp);
            if (!(emit > 0.0)) return kNegInf;
            total += qz * (std::log(emit) - std::log(qz / phi_row[z]));
        }
    }
    return total;
}

LatentFactorModel em_step(const LatentFactorModel& model, const TransitionDataset& data) {
    if (data.triples.empty()) throw config_error("em_step: empty dataset");
    if (data.n_states != model.n_states || data.n_actions != model.n_actions)
        throw config_error("em_step: dataset/model space mismatch");
    const int Z = model.n_latent, S = model.n_states;

    Eigen::MatrixXd phi_acc = Eigen::MatrixXd::Zero(model.phi.rows(), Z);
    Eigen::MatrixXd mu_acc = Eigen::MatrixXd::Zero(Z, S);
    for (int sa = 0; sa < data.counts.rows(); ++sa) {
        if (data.row_totals[sa] == 0.0) continue;
        for (int sp = 0; sp < S; ++sp) {
            const double c = data.counts(sa, sp);
            if (c == 0.0) continue;
            Eigen::VectorXd joint = model.phi.row(sa).transpose().cwiseProduct(model.mu.col(sp));
            const double total = joint.sum();
            if (!(total > 0.0)) {
                std::ostringstream msg;
                msg << "em_step: zero composed probability for observed triple (row " << sa
                    << ", s'=" << sp << ")";
                throw numeric_error(msg.str());
            }
            joint *= c / total;  // c * posterior
            phi_acc.row(sa) += joint.transpose();
            mu_acc.col(sp) += joint;
        }
    }

    LatentFactorModel next = model;
    for (int sa = 0; sa < model.phi.rows(); ++sa) {
        if (data.row_totals[sa] == 0.0) continue;  // unseen rows keep their distribution
        const Eigen::VectorXd smoothed = phi_acc.row(sa).transpose().array() + kSmoothing;
        next.phi.row(sa) = (smoothed / smoothed.sum()).transpose();
    }
    for (int z = 0; z < Z; ++z) {
        const Eigen::VectorXd smoothed = mu_acc.row(z).transpose().array() + kSmoothing;
        next.mu.row(z) = (smoothed / smoothed.sum()).transpose();
    }
    return next;
}

namespace {

// Gradient-ascent alternative to EM: plain ascent on softmax logits of both
// factor matrices, maximizing the mean log-likelihood. The gradient reuses the
// posterior computation (d logT / d logits has the classic
// "expected count minus model count" form).
LatentFactorModel gradient_fit_one(const TransitionDataset& data, LatentFactorModel model,
                                   const FitConfig& cfg, double* final_ll) {
    const int Z = model.n_latent, S = model.n_states;
    const double n_total = static_cast<double>(data.triples.size());
    Eigen::MatrixXd phi_logits = model.phi.array().max(1e-300).log();
    Eigen::MatrixXd mu_logits = model.mu.array().max(1e-300).log();

    auto resoftmax = [](Eigen::MatrixXd& logits) {
        Eigen::MatrixXd probs(logits.rows(), logits.cols());
        for (int i = 0; i < logits.rows(); ++i) {
            const Eigen::ArrayXd shifted = logits.row(i).array() - logits.row(i).maxCoeff();
            const Eigen::ArrayXd e = shifted.exp();
            probs.row(i) = (e / e.sum()).matrix().transpose();
        }
        return probs;
    };

    double prev = log_likelihood(model, data);
    for (int it = 0; it < cfg.max_iters; ++it) {
        Eigen::MatrixXd phi_acc = Eigen::MatrixXd::Zero(model.phi.rows(), Z);
        Eigen::MatrixXd mu_acc = Eigen::MatrixXd::Zero(Z, S);
        for (int sa = 0; sa < data.counts.rows(); ++sa) {
            if (data.row_totals[sa] == 0.0) continue;
            for (int sp = 0; sp < S; ++sp) {
                const double c = data.counts(sa, sp);
                if (c == 0.0) continue;
                Eigen::VectorXd joint = model.phi.row(sa).transpose().cwiseProduct(model.mu.col(sp));
                const double total = joint.sum();
                if (!(total > 0.0)) throw numeric_error("gradient fit: zero composed probability");
                joint *= c / total;
                phi_acc.row(sa) += joint.transpose();
                mu_acc.col(sp) += joint;
            }
        }
        for (int sa = 0; sa < model.phi.rows(); ++sa) {
            if (data.row_totals[sa] == 0.0) continue;
            phi_logits.row(sa) += (cfg.learning_rate / n_total)
                                  * (phi_acc.row(sa) - data.row_totals[sa] * model.phi.row(sa));
        }
        for (int z = 0; z < Z; ++z)
            mu_logits.row(z) += (cfg.learning_rate / n_total)
                                * (mu_acc.row(z) - mu_acc.row(z).sum() * model.mu.row(z));
        model.phi = resoftmax(phi_logits);
        model.mu = resoftmax(mu_logits);

        const double ll = log_likelihood(model, data);
        if (std::abs(ll - prev) < cfg.tol) {
            prev = ll;
            break;
        }
        prev = ll;
    }
    *final_ll = prev;
    return model;
}

}  // namespace

LatentFactorModel refine(const LatentFactorModel& init, const TransitionDataset& data,
                         const FitConfig& cfg, double* final_ll) {
    cfg.validate();
    init.validate();
    if (data.triples.empty()) throw config_error("refine: empty dataset");
    if (init.n_states != data.n_states || init.n_actions != data.n_actions)
        throw config_error("refine: model and dataset shapes disagree");

    LatentFactorModel model = init;
    double ll = log_likelihood(model, data);
    if (cfg.mode == FitConfig::Mode::GRADIENT) {
        model = gradient_fit_one(data, model, cfg, &ll);
    } else {
        for (int it = 0; it < cfg.max_iters; ++it) {
            model = em_step(model, data);
            const double next_ll = log_likelihood(model, data);
            const double gain = next_ll - ll;
            ll = next_ll;
            if (gain < cfg.tol) break;
        }
    }
    if (final_ll) *final_ll = ll;
    return model;
}

LatentFactorModel fit(const TransitionDataset& data, int n_latent, const FitConfig& cfg, Rng& rng) {
    cfg.validate();
    if (n_latent <= 0) throw config_error("fit: n_latent must be positive");
    if (data.triples.empty()) throw config_error("fit: empty dataset");

    LatentFactorModel best;
    double best_ll = kNegInf;
    bool have_best = false;
    for (int restart = 0; restart < cfg.restarts; ++restart) {
        LatentFactorModel model =
            random_model(data.n_states, data.n_actions, n_latent, cfg.init_concentration, rng);
        double ll;
        model = refine(model, data, cfg, &ll);
        if (!have_best || ll > best_ll) {  // ties keep the earlier restart
            best = model;
            best_ll = ll;
            have_best = true;
        }
    }
    return best;
}

int sample_next_state(const LatentFactorModel& model, int s, int a, Rng& rng) {
    const int z = rng.categorical(model.phi.row(model.row(s, a)).transpose());
    return rng.categorical(model.mu.row(z).transpose());
}

double tv_error(const LatentFactorModel& model, const TabularMDP& truth,
                const Eigen::MatrixXd& weighting, bool squared) {
    if (model.n_states != truth.n_states || model.n_actions != truth.n_actions)
        throw config_error("tv_error: model/truth space mismatch");
    if (weighting.rows() != truth.n_states || weighting.cols() != truth.n_actions)
        throw config_error("tv_error: weighting shape mismatch");
    if (std::abs(weighting.sum() - 1.0) > 1e-9 || weighting.minCoeff() < -1e-12)
        throw config_error("tv_error: weighting must be a distribution over (s,a)");

    const Eigen::MatrixXd composed = compose_transition(model);
    double total = 0.0;
    for (int s = 0; s < truth.n_states; ++s)
        for (int a = 0; a < truth.n_actions; ++a) {
            const double w = weighting(s, a);
            if (w <= 0.0) continue;
            const double tv =
                0.5
                * (composed.row(model.row(s, a)) - truth.transition.row(truth.row(s, a)))
                      .cwiseAbs()
                      .sum();
            total += w * (squared ? tv * tv : tv);
        }
    return total;
}

std::string model_to_json(const LatentFactorModel& model) {
    nlohmann::json j;
    j["n_states"] = model.n_states;
    j["n_actions"] = model.n_actions;
    j["n_latent"] = model.n_latent;
    auto dump_matrix = [](const Eigen::MatrixXd& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < m.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    j["phi"] = dump_matrix(model.phi);
    j["mu"] = dump_matrix(model.mu);
    return j.dump(2);
}

LatentFactorModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw config_error(std::string("model_from_json: parse failure: ") + e.what());
    }
    LatentFactorModel model;
    try {
        model.n_states = j.at("n_states").get<int>();
        model.n_actions = j.at("n_actions").get<int>();
        model.n_latent = j.at("n_latent").get<int>();
        auto load_matrix = [](const nlohmann::json& arr, long rows, long cols, const char* what) {
            if (static_cast<long>(arr.size()) != rows)
                throw config_error(std::string(what) + ": bad row count");
            Eigen::MatrixXd m(rows, cols);
            for (long i = 0; i < rows; ++i) {
                if (static_cast<long>(arr[i].size()) != cols)
                    throw config_error(std::string(what) + ": bad column count");
                for (long c = 0; c < cols; ++c) m(i, c) = arr[i][c].get<double>();
            }
            return m;
        };
        model.phi = load_matrix(j.at("phi"), static_cast<long>(model.n_states) * model.n_actions,
                                model.n_latent, "model phi");
        model.mu = load_matrix(j.at("mu"), model.n_latent, model.n_states, "model mu");
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("model_from_json: ") + e.what());
    }
    model.validate();
    return model;
}

}  // namespace lvrep

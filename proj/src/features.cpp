#include "lvrep/features.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "lvrep/errors.hpp"

namespace lvrep {

void RandomFeatureMap::validate() const {
    if (m < 1) throw config_error("RandomFeatureMap: m must be >= 1");
    if (embed_dim < 1) throw config_error("RandomFeatureMap: embed_dim must be >= 1");
    if (!(bandwidth > 0.0)) throw config_error("RandomFeatureMap: bandwidth must be positive");
    if (frequencies.rows() != m || frequencies.cols() != embed_dim)
        throw config_error("RandomFeatureMap: frequencies shape mismatch");
    if (offsets.size() != m) throw config_error("RandomFeatureMap: offsets length mismatch");
    for (int i = 0; i < m; ++i)
        if (offsets[i] < 0.0 || offsets[i] >= 2.0 * std::numbers::pi)
            throw config_error("RandomFeatureMap: offset outside [0, 2pi)");
}

double RandomFeatureMap::psi_one(int i, const Eigen::VectorXd& x) const {
    if (i < 0 || i >= m) throw config_error("RandomFeatureMap::psi_one: feature index out of range");
    if (x.size() != embed_dim) throw config_error("RandomFeatureMap::psi_one: input dimension mismatch");
    return std::numbers::sqrt2 * std::cos(frequencies.row(i).dot(x) + offsets[i]);
}

Eigen::VectorXd RandomFeatureMap::psi(const Eigen::VectorXd& x) const {
    if (x.size() != embed_dim) throw config_error("RandomFeatureMap::psi: input dimension mismatch");
    Eigen::VectorXd out = frequencies * x + offsets;
    return std::numbers::sqrt2 * out.array().cos();
}

FeatureVector lvrep_feature(const LatentFactorModel& model, int s, int a) {
    if (s < 0 || s >= model.n_states || a < 0 || a >= model.n_actions)
        throw config_error("lvrep_feature: index out of range");
    return FeatureVector{model.phi.row(model.row(s, a)).transpose()};
}

double exact_q(const LatentFactorModel& model, const LinearQ& q_latent,
               const Eigen::MatrixXd& reward, int s, int a, double gamma) {
    if (q_latent.latent_weights.size() != model.n_latent)
        throw config_error("exact_q: latent_weights length must equal n_latent");
    if (reward.rows() != model.n_states || reward.cols() != model.n_actions)
        throw config_error("exact_q: reward shape mismatch");
    if (s < 0 || s >= model.n_states || a < 0 || a >= model.n_actions)
        throw config_error("exact_q: index out of range");
    return q_latent.reward_weight * reward(s, a)
           + gamma * model.phi.row(model.row(s, a)).dot(q_latent.latent_weights);
}

RandomFeatureMap build_rff(double bandwidth, int m, int embed_dim, Rng& rng) {
    if (m < 1) throw config_error("build_rff: m must be >= 1");
    if (embed_dim < 1) throw config_error("build_rff: embed_dim must be >= 1");
    if (!(bandwidth > 0.0)) throw config_error("build_rff: bandwidth must be positive");
    RandomFeatureMap map;
    map.m = m;
    map.embed_dim = embed_dim;
    map.bandwidth = bandwidth;
    map.frequencies.resize(m, embed_dim);
    map.offsets.resize(m);
    const double freq_scale = std::numbers::sqrt2 / bandwidth;
    for (int i = 0; i < m; ++i) {
        for (int d = 0; d < embed_dim; ++d) map.frequencies(i, d) = freq_scale * rng.normal();
        map.offsets[i] = 2.0 * std::numbers::pi * rng.uniform01();
    }
    return map;
}

double mc_q(const LatentFactorModel& model, const RandomFeatureMap& rff,
            const LinearQ& q_latent, const Eigen::MatrixXd& reward, int s, int a,
            int n_mc, Rng& rng, double gamma) {
    if (q_latent.latent_weights.size() != rff.m)
        throw config_error("mc_q: latent_weights length must equal rff.m");
    if (rff.embed_dim != model.n_latent)
        throw config_error("mc_q: feature map embedding dimension must equal n_latent");
    if (reward.rows() != model.n_states || reward.cols() != model.n_actions)
        throw config_error("mc_q: reward shape mismatch");
    if (s < 0 || s >= model.n_states || a < 0 || a >= model.n_actions)
        throw config_error("mc_q: index out of range");
    if (n_mc < 1) throw config_error("mc_q: n_mc must be >= 1");

    const Eigen::VectorXd mixing = model.phi.row(model.row(s, a)).transpose();
    std::vector<int> draws(n_mc);
    for (int i = 0; i < n_mc; ++i) draws[i] = rng.categorical(mixing);

    double acc = 0.0;
    Eigen::VectorXd embed = Eigen::VectorXd::Zero(model.n_latent);
    for (int i = 0; i < rff.m; ++i) {
        const int z = draws[i % n_mc];
        embed[z] = 1.0;
        acc += q_latent.latent_weights[i] * rff.psi_one(i, embed);
        embed[z] = 0.0;
    }
    return q_latent.reward_weight * reward(s, a) + gamma * acc / rff.m;
}

double kernel_estimate(const RandomFeatureMap& rff, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& y) {
    return rff.psi(x).dot(rff.psi(y)) / rff.m;
}

std::string rff_to_json(const RandomFeatureMap& rff) {
    nlohmann::json j;
    j["m"] = rff.m;
    j["embed_dim"] = rff.embed_dim;
    j["bandwidth"] = rff.bandwidth;
    nlohmann::json freqs = nlohmann::json::array();
    for (int i = 0; i < rff.m; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int d = 0; d < rff.embed_dim; ++d) row.push_back(rff.frequencies(i, d));
        freqs.push_back(std::move(row));
    }
    j["frequencies"] = std::move(freqs);
    nlohmann::json offs = nlohmann::json::array();
    for (int i = 0; i < rff.m; ++i) offs.push_back(rff.offsets[i]);
    j["offsets"] = std::move(offs);
    return j.dump(2);
}

RandomFeatureMap rff_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw config_error(std::string("rff_from_json: parse failure: ") + e.what());
    }
    RandomFeatureMap map;
    try {
        map.m = j.at("m").get<int>();
        map.embed_dim = j.at("embed_dim").get<int>();
        map.bandwidth = j.at("bandwidth").get<double>();
        const auto& freqs = j.at("frequencies");
        if (static_cast<int>(freqs.size()) != map.m)
            throw config_error("rff_from_json: bad frequency row count");
        map.frequencies.resize(map.m, map.embed_dim);
        for (int i = 0; i < map.m; ++i) {
            if (static_cast<int>(freqs[i].size()) != map.embed_dim)
                throw config_error("rff_from_json: bad frequency column count");
            for (int d = 0; d < map.embed_dim; ++d) map.frequencies(i, d) = freqs[i][d].get<double>();
        }
        const auto& offs = j.at("offsets");
        if (static_cast<int>(offs.size()) != map.m)
            throw config_error("rff_from_json: bad offsets length");
        map.offsets.resize(map.m);
        for (int i = 0; i < map.m; ++i) map.offsets[i] = offs[i].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("rff_from_json: ") + e.what());
    }
    map.validate();
    return map;
}

}  // namespace lvrep

#pragma once

// Feature extraction for latent-factor models. The exact mode reads the
// latent mixing row p̂(·|s,a) directly as the feature vector, which makes
// Q-functions linear in the features: Q(s,a) = w0·r(s,a) + γ⟨φ(s,a), w⟩.
// The random-feature mode approximates a Gaussian-kernel function class over
// one-hot latent embeddings, for the Monte-Carlo Q estimator.

#include <string>

#include <Eigen/Dense>

#include "lvrep/latent_model.hpp"
#include "lvrep/rng.hpp"

namespace lvrep {

struct FeatureVector {
    Eigen::VectorXd values;
};

// Random Fourier map for the kernel k(x,x') = exp(-|x-x'|^2 / bandwidth^2):
// psi_i(x) = sqrt(2)·cos(<freq_i, x> + offset_i), with freq_i drawn from the
// kernel's spectral measure N(0, (sqrt(2)/bandwidth)^2 I).
struct RandomFeatureMap {
    int m = 0;                    // number of features
    int embed_dim = 0;            // dimension of the input embedding space
    double bandwidth = 1.0;       // Gaussian kernel scale
    Eigen::MatrixXd frequencies;  // m x embed_dim
    Eigen::VectorXd offsets;      // m, each in [0, 2pi)

    void validate() const;
    // One feature evaluated at x.
    double psi_one(int i, const Eigen::VectorXd& x) const;
    // All m features evaluated at x.
    Eigen::VectorXd psi(const Eigen::VectorXd& x) const;
};

struct LinearQ {
    double reward_weight = 1.0;
    Eigen::VectorXd latent_weights;
};

// The phi row for (s,a): a probability vector over latents.
FeatureVector lvrep_feature(const LatentFactorModel& model, int s, int a);

// reward_weight·r(s,a) + gamma·<phi(s,a), latent_weights>.
double exact_q(const LatentFactorModel& model, const LinearQ& q_latent,
               const Eigen::MatrixXd& reward, int s, int a, double gamma);

// Frequencies and offsets are drawn feature-by-feature (frequency row, then
// offset), so maps built from the same seed with different m agree on their
// common prefix.
RandomFeatureMap build_rff(double bandwidth, int m, int embed_dim, Rng& rng);

// Monte-Carlo estimate of the kernel-smoothed Q value: draws n_mc latents
// z ~ p̂(z|s,a), embeds them one-hot, and pairs feature i with sample
// i mod n_mc:  reward_weight·r(s,a) + (gamma/m) Σ_i w_i·psi_i(z_{i mod n_mc}).
double mc_q(const LatentFactorModel& model, const RandomFeatureMap& rff,
            const LinearQ& q_latent, const Eigen::MatrixXd& reward, int s, int a,
            int n_mc, Rng& rng, double gamma);

// (1/m)·<psi(x), psi(y)> — the map's estimate of the Gaussian kernel.
double kernel_estimate(const RandomFeatureMap& rff, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& y);

std::string rff_to_json(const RandomFeatureMap& rff);
RandomFeatureMap rff_from_json(const std::string& text);

}  // namespace lvrep

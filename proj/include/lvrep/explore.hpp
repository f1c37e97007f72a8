#pragma once

// Covariance tracking over feature vectors and the exploration bonus /
// pessimism penalty built from it. The covariance is Σ̂ = Σ_i φ_i φ_iᵀ + λI;
// bonuses are functions of the quadratic form φᵀΣ̂⁻¹φ.

#include <vector>

#include <Eigen/Dense>

#include "lvrep/errors.hpp"

namespace lvrep {

struct CovarianceState {
    int dim = 0;
    double lambda = 1.0;
    long count = 0;  // feature vectors absorbed
    Eigen::MatrixXd sigma;
    Eigen::MatrixXd sigma_inv;

    void validate() const;
};

enum class BonusMode { NORM_CLIPPED, QUADRATIC };

struct BonusParams {
    double alpha = 1.0;   // >= 0; zero disables the bonus (ablation)
    double lambda = 1.0;  // must match the covariance regularizer
    BonusMode mode = BonusMode::NORM_CLIPPED;
    double clip = 2.0;  // cap for NORM_CLIPPED

    void validate() const;
};

// sigma = lambda * I, count = 0.
CovarianceState cov_init(int dim, double lambda);

// Absorb one feature vector: sigma += phi phiᵀ, with the inverse maintained
// by the rank-one inverse-update identity. Every 64 updates the inverse is
// refactorized from sigma directly to bound floating-point drift.
CovarianceState cov_update(const CovarianceState& state, const Eigen::VectorXd& phi);

// Batch construction: equivalent to cov_init followed by cov_update over the
// list, computed by direct factorization.
CovarianceState cov_rebuild(const std::vector<Eigen::VectorXd>& features, int dim, double lambda);

// NORM_CLIPPED: min(alpha * sqrt(phiᵀ sigma_inv phi), clip).
// QUADRATIC:    alpha * phiᵀ sigma_inv phi.
double bonus(const CovarianceState& state, const Eigen::VectorXd& phi, const BonusParams& params);

// Bonus scale for episode n:
//   c * (gamma / (1 - gamma)) * sqrt(n_actions * (model_class_log + log(n / delta))
//                                     + lambda * c_norm).
double alpha_schedule(long n, double gamma, int n_actions, double lambda,
                      double model_class_log, double delta, double c = 0.1,
                      double c_norm = 1.0);

}  // namespace lvrep

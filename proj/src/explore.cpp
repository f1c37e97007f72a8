#include "lvrep/explore.hpp"

#include <cmath>
#include <sstream>

namespace lvrep {

namespace {

constexpr long kRefactorPeriod = 64;

Eigen::MatrixXd symmetric_inverse(const Eigen::MatrixXd& m) {
    // m is positive definite by construction (lambda I plus a Gram sum).
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw numeric_error("covariance refactorization: matrix not positive definite");
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
    return 0.5 * (inv + inv.transpose());
}

}  // namespace

void CovarianceState::validate() const {
    if (dim <= 0) throw config_error("CovarianceState: dim must be positive");
    if (!(lambda > 0.0)) throw config_error("CovarianceState: lambda must be positive");
    if (count < 0) throw config_error("CovarianceState: negative count");
    if (sigma.rows() != dim || sigma.cols() != dim || sigma_inv.rows() != dim ||
        sigma_inv.cols() != dim)
        throw config_error("CovarianceState: matrix shape mismatch");
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw config_error("CovarianceState: sigma not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        sigma - lambda * Eigen::MatrixXd::Identity(dim, dim));
    if (eig.eigenvalues().minCoeff() < -1e-9)
        throw config_error("CovarianceState: sigma - lambda*I not positive semidefinite");
    if ((sigma * sigma_inv - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-8)
        throw config_error("CovarianceState: sigma_inv is not the inverse of sigma");
}

void BonusParams::validate() const {
    if (alpha < 0.0) throw config_error("BonusParams: alpha must be nonnegative");
    if (!(lambda > 0.0)) throw config_error("BonusParams: lambda must be positive");
    if (!(clip > 0.0)) throw config_error("BonusParams: clip must be positive");
}

CovarianceState cov_init(int dim, double lambda) {
    if (dim <= 0) throw config_error("cov_init: dim must be positive");
    if (!(lambda > 0.0)) throw config_error("cov_init: lambda must be positive");
    CovarianceState state;
    state.dim = dim;
    state.lambda = lambda;
    state.count = 0;
    state.sigma = lambda * Eigen::MatrixXd::Identity(dim, dim);
    state.sigma_inv = (1.0 / lambda) * Eigen::MatrixXd::Identity(dim, dim);
    return state;
}

CovarianceState cov_update(const CovarianceState& state, const Eigen::VectorXd& phi) {
    if (phi.size() != state.dim) throw config_error("cov_update: feature dimension mismatch");
    CovarianceState next = state;
    next.sigma += phi * phi.transpose();
    next.count += 1;

    if (next.count % kRefactorPeriod == 0) {
        next.sigma_inv = symmetric_inverse(next.sigma);
        return next;
    }
    const Eigen::VectorXd u = state.sigma_inv * phi;
    const double denom = 1.0 + phi.dot(u);
    if (!(denom > 0.0)) {
        std::ostringstream msg;
        msg << "cov_update: rank-one update denominator " << denom
            << " is not positive; covariance lost positive definiteness";
        throw numeric_error(msg.str());
    }
    next.sigma_inv -= (u * u.transpose()) / denom;
    next.sigma_inv = 0.5 * (next.sigma_inv + next.sigma_inv.transpose()).eval();
    return next;
}

CovarianceState cov_rebuild(const std::vector<Eigen::VectorXd>& features, int dim, double lambda) {
    CovarianceState state = cov_init(dim, lambda);
    for (const auto& phi : features) {
        if (phi.size() != dim) throw config_error("cov_rebuild: feature dimension mismatch");
        state.sigma += phi * phi.transpose();
    }
    state.count = static_cast<long>(features.size());
    if (!features.empty()) state.sigma_inv = symmetric_inverse(state.sigma);
    return state;
}

double bonus(const CovarianceState& state, const Eigen::VectorXd& phi, const BonusParams& params) {
    params.validate();
    if (phi.size() != state.dim) throw config_error("bonus: feature dimension mismatch");
    const double quad = std::max(0.0, phi.dot(state.sigma_inv * phi));
    if (params.mode == BonusMode::QUADRATIC) return params.alpha * quad;
    return std::min(params.alpha * std::sqrt(quad), params.clip);
}

double alpha_schedule(long n, double gamma, int n_actions, double lambda,
                      double model_class_log, double delta, double c, double c_norm) {
    if (n < 1) throw config_error("alpha_schedule: episode index must be >= 1");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw config_error("alpha_schedule: gamma must lie in [0,1)");
    if (n_actions < 1) throw config_error("alpha_schedule: n_actions must be >= 1");
    if (!(lambda > 0.0)) throw config_error("alpha_schedule: lambda must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw config_error("alpha_schedule: delta must lie in (0,1)");
    if (model_class_log < 0.0) throw config_error("alpha_schedule: model_class_log must be >= 0");
    const double inside =
        n_actions * (model_class_log + std::log(static_cast<double>(n) / delta)) + lambda * c_norm;
    return c * (gamma / (1.0 - gamma)) * std::sqrt(std::max(0.0, inside));
}

}  // namespace lvrep

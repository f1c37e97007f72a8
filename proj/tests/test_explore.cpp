#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "lvrep/errors.hpp"
#include "lvrep/explore.hpp"
#include "lvrep/rng.hpp"

using namespace lvrep;

namespace {

Eigen::VectorXd basis(int dim, int i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e[i] = 1.0;
    return e;
}

}  // namespace

TEST_CASE("fresh covariance is the scaled identity") {
    const CovarianceState c = cov_init(4, 2.5);
    CHECK(c.dim == 4);
    CHECK(c.count == 0);
    CHECK((c.sigma - 2.5 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((c.sigma_inv - 0.4 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
    c.validate();

    CHECK_THROWS_AS((void)cov_init(0, 1.0), config_error);
    CHECK_THROWS_AS((void)cov_init(3, 0.0), config_error);
}

TEST_CASE("absorbing the zero vector changes only the count") {
    CovarianceState c = cov_init(3, 1.0);
    const CovarianceState after = cov_update(c, Eigen::VectorXd::Zero(3));
    CHECK(after.count == 1);
    CHECK((after.sigma - c.sigma).cwiseAbs().maxCoeff() == 0.0);
    CHECK((after.sigma_inv - c.sigma_inv).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("a single basis update has a closed form") {
    const CovarianceState c = cov_update(cov_init(3, 1.0), basis(3, 0));
    Eigen::MatrixXd expect_sigma = Eigen::MatrixXd::Identity(3, 3);
    expect_sigma(0, 0) = 2.0;
    CHECK((c.sigma - expect_sigma).cwiseAbs().maxCoeff() < 1e-15);
    Eigen::MatrixXd expect_inv = Eigen::MatrixXd::Identity(3, 3);
    expect_inv(0, 0) = 0.5;
    CHECK((c.sigma_inv - expect_inv).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(c.count == 1);
}

TEST_CASE("incremental inverse tracks the direct inverse over many updates") {
    Rng rng(101);
    CovarianceState c = cov_init(8, 1.0);
    Eigen::MatrixXd direct = Eigen::MatrixXd::Identity(8, 8);
    for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd phi = rng.dirichlet(8, 0.7);
        c = cov_update(c, phi);
        direct += phi * phi.transpose();
    }
    CHECK(c.count == 200);
    CHECK((c.sigma - direct).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXd true_inv = direct.inverse();
    CHECK((c.sigma_inv - true_inv).cwiseAbs().maxCoeff() < 1e-8);
    c.validate();
}

TEST_CASE("batch rebuild matches incremental updates") {
    CHECK((cov_rebuild({}, 5, 2.0).sigma - cov_init(5, 2.0).sigma).cwiseAbs().maxCoeff() == 0.0);

    Rng rng(103);
    const Eigen::VectorXd single = rng.dirichlet(4, 1.0);
    const CovarianceState one = cov_rebuild({single}, 4, 1.0);
    const CovarianceState inc_one = cov_update(cov_init(4, 1.0), single);
    CHECK((one.sigma - inc_one.sigma).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((one.sigma_inv - inc_one.sigma_inv).cwiseAbs().maxCoeff() < 1e-12);

    std::vector<Eigen::VectorXd> feats;
    CovarianceState inc = cov_init(6, 1.0);
    for (int i = 0; i < 500; ++i) {
        feats.push_back(rng.dirichlet(6, 0.5));
        inc = cov_update(inc, feats.back());
    }
    const CovarianceState batch = cov_rebuild(feats, 6, 1.0);
    CHECK(batch.count == 500);
    CHECK((batch.sigma - inc.sigma).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((batch.sigma_inv - inc.sigma_inv).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("bonus at the identity covariance is the clipped scaled norm") {
    const CovarianceState c = cov_init(4, 1.0);
    BonusParams p;
    p.alpha = 1.0;
    p.lambda = 1.0;
    p.mode = BonusMode::NORM_CLIPPED;
    Rng rng(107);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::VectorXd phi = rng.dirichlet(4, 1.0);
        CHECK(bonus(c, phi, p) == doctest::Approx(phi.norm()).epsilon(1e-12));
    }
    // Probability vectors have euclidean norm at most 1, so no clipping here;
    // scale alpha up to hit the cap.
    BonusParams big = p;
    big.alpha = 10.0;
    CHECK(bonus(c, basis(4, 2), big) == doctest::Approx(2.0));
}

TEST_CASE("zero feature earns zero bonus in both modes") {
    const CovarianceState c = cov_init(3, 1.0);
    BonusParams p;
    p.alpha = 5.0;
    p.lambda = 1.0;
    p.mode = BonusMode::NORM_CLIPPED;
    CHECK(bonus(c, Eigen::VectorXd::Zero(3), p) == 0.0);
    p.mode = BonusMode::QUADRATIC;
    CHECK(bonus(c, Eigen::VectorXd::Zero(3), p) == 0.0);
}

TEST_CASE("bonus agrees with a dense-solve oracle") {
    Rng rng(109);
    CovarianceState c = cov_init(4, 1.0);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(4, 4);
    for (int i = 0; i < 50; ++i) {
        const Eigen::VectorXd phi = rng.dirichlet(4, 1.0);
        c = cov_update(c, phi);
        sigma += phi * phi.transpose();
    }
    BonusParams norm_p;
    norm_p.alpha = 1.7;
    norm_p.lambda = 1.0;
    norm_p.mode = BonusMode::NORM_CLIPPED;
    norm_p.clip = 100.0;  // out of the way
    BonusParams quad_p = norm_p;
    quad_p.mode = BonusMode::QUADRATIC;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd phi = rng.dirichlet(4, 1.0);
        const double q = phi.dot(sigma.ldlt().solve(phi));
        CHECK(bonus(c, phi, norm_p) == doctest::Approx(1.7 * std::sqrt(q)).epsilon(1e-10));
        CHECK(bonus(c, phi, quad_p) == doctest::Approx(1.7 * q).epsilon(1e-10));
    }
}

TEST_CASE("clip bounds the norm bonus exhaustively") {
    const CovarianceState c = cov_init(5, 0.01);  // tiny regularizer -> huge raw norms
    BonusParams p;
    p.alpha = 50.0;
    p.lambda = 0.01;
    p.mode = BonusMode::NORM_CLIPPED;
    p.clip = 2.0;
    Rng rng(113);
    for (int trial = 0; trial < 100; ++trial) {
        const double b = bonus(c, rng.dirichlet(5, 1.0), p);
        CHECK(b <= 2.0);
        CHECK(b >= 0.0);
    }
}

TEST_CASE("repeating a direction drives its bonus down monotonically") {
    Rng rng(127);
    const Eigen::VectorXd phi = rng.dirichlet(6, 1.0);
    CovarianceState c = cov_init(6, 1.0);
    BonusParams p;
    p.alpha = 1.0;
    p.lambda = 1.0;
    p.mode = BonusMode::NORM_CLIPPED;
    double prev = bonus(c, phi, p);
    for (int i = 0; i < 100; ++i) {
        c = cov_update(c, phi);
        const double b = bonus(c, phi, p);
        CHECK(b <= prev + 1e-12);
        prev = b;
    }

    // Quadratic mode decays like 1/count: after many absorptions the
    // remaining bonus is below alpha * lambda-free envelope 1/count.
    CovarianceState heavy = cov_init(6, 1.0);
    for (int i = 0; i < 1000; ++i) heavy = cov_update(heavy, phi);
    BonusParams quad;
    quad.alpha = 3.0;
    quad.lambda = 1.0;
    quad.mode = BonusMode::QUADRATIC;
    CHECK(bonus(heavy, phi, quad) < 3.0 / 1000.0 + 1e-9);
}

TEST_CASE("summed clipped quadratics respect the log-determinant budget") {
    // For any stream phi_1..phi_N with norms <= 1, the running sum of
    // min(phi_k' Sigma_{k-1}^{-1} phi_k, 1) is at most 2 log det(Sigma_N / lambda),
    // and log det(Sigma_N / lambda) <= dim * log(1 + N / (lambda * dim)) by
    // concavity, with equality when the mass spreads uniformly over a basis.
    const int kN = 5000;
    const double lambda = 8.5;  // grows like log N to make the budget tight
    Rng rng(131);
    for (int dim : {2, 5, 10}) {
        // Adversarial stream: cycle the basis directions.
        CovarianceState c = cov_init(dim, lambda);
        double sum_clipped = 0.0;
        for (int k = 0; k < kN; ++k) {
            const Eigen::VectorXd phi = basis(dim, k % dim);
            sum_clipped += std::min(phi.dot(c.sigma_inv * phi), 1.0);
            c = cov_update(c, phi);
        }
        Eigen::LLT<Eigen::MatrixXd> llt(c.sigma / lambda);
        double logdet = 0.0;
        for (int i = 0; i < dim; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
        const double envelope = dim * std::log(1.0 + kN / (lambda * dim));
        CHECK(sum_clipped <= 2.0 * logdet + 1e-9);
        CHECK(logdet <= envelope + 1e-9);  // equality: basis cycling is the maximizer

        // Random unit-vector stream obeys the same budget.
        CovarianceState r = cov_init(dim, lambda);
        double sum_rand = 0.0;
        for (int k = 0; k < kN; ++k) {
            Eigen::VectorXd g(dim);
            for (int i = 0; i < dim; ++i) g[i] = rng.normal();
            g.normalize();
            sum_rand += std::min(g.dot(r.sigma_inv * g), 1.0);
            r = cov_update(r, g);
        }
        Eigen::LLT<Eigen::MatrixXd> llt_r(r.sigma / lambda);
        double logdet_r = 0.0;
        for (int i = 0; i < dim; ++i) logdet_r += 2.0 * std::log(llt_r.matrixL()(i, i));
        CHECK(sum_rand <= 2.0 * logdet_r + 1e-9);
        CHECK(logdet_r <= envelope + 1e-9);
    }
}

TEST_CASE("bonus scale hand value and limits") {
    // c * (gamma/(1-gamma)) * sqrt(|A| * (mcl + log(n/delta)) + lambda):
    // gamma=0.95, |A|=4, lambda=1, n=10, delta=0.1, mcl=0, c=0.1 gives
    // 1.9 * sqrt(4 log(100) + 1).
    const double expected = 1.9 * std::sqrt(4.0 * std::log(100.0) + 1.0);
    CHECK(alpha_schedule(10, 0.95, 4, 1.0, 0.0, 0.1) ==
          doctest::Approx(expected).epsilon(1e-12));

    CHECK(alpha_schedule(10, 0.0, 4, 1.0, 0.0, 0.1) == 0.0);

    double prev = 0.0;
    for (long n = 1; n <= 4096; n *= 2) {
        const double a = alpha_schedule(n, 0.9, 2, 1.0, 1.0, 0.05);
        CHECK(a >= prev);
        prev = a;
    }
}

TEST_CASE("bonus parameter validation") {
    BonusParams p;
    p.alpha = -1.0;
    CHECK_THROWS_AS(p.validate(), config_error);
    p.alpha = 1.0;
    p.lambda = 0.0;
    CHECK_THROWS_AS(p.validate(), config_error);
    p.lambda = 1.0;
    p.clip = 0.0;
    CHECK_THROWS_AS(p.validate(), config_error);

    const CovarianceState c = cov_init(3, 1.0);
    BonusParams ok;
    CHECK_THROWS_AS((void)bonus(c, Eigen::VectorXd::Zero(4), ok), config_error);
    CHECK_THROWS_AS((void)cov_update(c, Eigen::VectorXd::Zero(2)), config_error);
}

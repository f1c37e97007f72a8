#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lvrep/errors.hpp"
#include "lvrep/harness.hpp"
#include "lvrep/rng.hpp"

using namespace lvrep;

TEST_CASE("simulation identity residuals are tiny on random instances") {
    Rng rng(1);
    const CheckReport report = check_simulation_lemma(100, rng);
    CHECK(report.pass);
    CHECK(report.scalars.at("max_residual") < 1e-8);
    CHECK(report.scalars.at("n_trials") == doctest::Approx(100.0));
}

TEST_CASE("simulation check rejects nonpositive trial counts") {
    Rng rng(2);
    CHECK_THROWS_AS((void)check_simulation_lemma(0, rng), config_error);
}

TEST_CASE("finite spectrum logdet hits its closed form") {
    SyntheticSpectrum spec;
    spec.kind = SyntheticSpectrum::Kind::FINITE;
    spec.beta = 8;
    spec.dim = 8;
    Rng rng(3);
    const CheckReport report = check_logdet_potential(spec, 1e3, 50, rng);
    CHECK(report.pass);
    // Uniform mass over the 8 basis directions: log det = 8 log(1 + alpha/8).
    CHECK(report.scalars.at("finite_equality_gap") < 1e-9);

    Rng rng_small(4);
    const CheckReport vanish = check_logdet_potential(spec, 1e-9, 50, rng_small);
    CHECK(vanish.scalars.at("max_logdet") < 1e-6);
}

TEST_CASE("polynomial spectrum logdet scales with its normalizer") {
    SyntheticSpectrum spec;
    spec.kind = SyntheticSpectrum::Kind::POLYNOMIAL;
    spec.beta = 2.0;
    spec.dim = 128;
    std::vector<double> normalized;
    for (double alpha : {1e2, 1e3, 1e4}) {
        Rng rng(5);
        const CheckReport report = check_logdet_potential(spec, alpha, 200, rng);
        normalized.push_back(report.scalars.at("max_logdet") /
                             (std::pow(alpha, 0.25) * std::log(alpha)));
    }
    const double lo = *std::min_element(normalized.begin(), normalized.end());
    const double hi = *std::max_element(normalized.begin(), normalized.end());
    CHECK(hi / lo < 3.0);
}

TEST_CASE("too-coarse spectrum truncation is rejected") {
    SyntheticSpectrum spec;
    spec.kind = SyntheticSpectrum::Kind::POLYNOMIAL;
    spec.beta = 0.6;  // slow decay: squared tail mass cannot be certified
    spec.dim = 16;
    Rng rng(6);
    CHECK_THROWS_AS((void)check_logdet_potential(spec, 1e3, 10, rng), config_error);
}

TEST_CASE("spectrum eigenvalues are positive and nonincreasing") {
    SyntheticSpectrum poly;
    poly.kind = SyntheticSpectrum::Kind::POLYNOMIAL;
    poly.beta = 2.0;
    poly.dim = 32;
    const Eigen::VectorXd eig = poly.eigenvalues();
    REQUIRE(eig.size() == 32);
    for (int i = 1; i < 32; ++i) CHECK(eig[i] <= eig[i - 1]);
    CHECK(eig.minCoeff() > 0.0);

    SyntheticSpectrum fin;
    fin.kind = SyntheticSpectrum::Kind::FINITE;
    fin.beta = 4;
    fin.dim = 10;
    const Eigen::VectorXd feig = fin.eigenvalues();
    CHECK(feig[3] > 0.0);
    for (int i = 4; i < 10; ++i) CHECK(feig[i] == 0.0);

    SyntheticSpectrum bad;
    bad.beta = -1.0;
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad.beta = 1.0;
    bad.dim = 0;
    CHECK_THROWS_AS(bad.validate(), config_error);
}

TEST_CASE("empty concentration draws make both forms the regularizer") {
    Rng rng(7);
    const CheckReport report = check_bonus_concentration(6, 0, 10.0, 100, rng);
    CHECK(report.scalars.at("min_ratio") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.scalars.at("max_ratio") == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("concentration band holds and tightens with the regularizer") {
    Rng rng_a(8);
    const CheckReport base = check_bonus_concentration(8, 10000, 10.0, 1000, rng_a);
    CHECK(base.pass);
    CHECK(base.scalars.at("min_ratio") >= 0.8);
    CHECK(base.scalars.at("max_ratio") <= 1.25);

    Rng rng_b(8);
    const CheckReport tight = check_bonus_concentration(8, 10000, 100.0, 1000, rng_b);
    const double base_spread = base.scalars.at("max_ratio") / base.scalars.at("min_ratio");
    const double tight_spread = tight.scalars.at("max_ratio") / tight.scalars.at("min_ratio");
    CHECK(tight_spread < base_spread);
}

TEST_CASE("mle error scales down like one over n") {
    BlockMDPSpec spec;
    spec.n_states = 20;
    spec.n_actions = 4;
    spec.n_latent = 3;
    spec.seed = 7;
    Rng rng(9);
    const CheckReport report = check_mle_rate(spec, {500, 2000, 8000}, 5, rng);
    CHECK(report.pass);
    const double slope = report.scalars.at("slope");
    CHECK(slope >= -1.4);
    CHECK(slope <= -0.6);
    CHECK(report.scalars.at("final_mean_sq_tv") <= 0.1);
    const auto& means = report.series.at("mean_sq_tv");
    REQUIRE(means.size() == 3);
    CHECK(means[2] < means[0]);
}

TEST_CASE("mle fit is consistent on an identifiable one-latent instance") {
    BlockMDPSpec spec;
    spec.n_states = 6;
    spec.n_actions = 2;
    spec.n_latent = 1;
    spec.seed = 21;
    Rng rng(10);
    const CheckReport report = check_mle_rate(spec, {100000}, 1, rng);
    CHECK(report.series.at("mean_sq_tv").back() < 1e-3);
}

TEST_CASE("mle sample sizes must be positive and increasing") {
    BlockMDPSpec spec;
    Rng rng(11);
    CHECK_THROWS_AS((void)check_mle_rate(spec, {0, 100}, 2, rng), config_error);
    CHECK_THROWS_AS((void)check_mle_rate(spec, {100, 100}, 2, rng), config_error);
    CHECK_THROWS_AS((void)check_mle_rate(spec, {}, 2, rng), config_error);
}

TEST_CASE("gaussian kernel factorization composes on interior rows") {
    Rng rng(12);
    const CheckReport report = check_gaussian_factorization(256, 0.1, 1.0, rng);
    CHECK(report.pass);
    CHECK(report.scalars.at("max_row_tv") < 0.05);

    // Flat limit: sigma comparable to the domain width.
    Rng rng_flat(13);
    const CheckReport flat = check_gaussian_factorization(64, 0.9, 1.0, rng_flat);
    CHECK(flat.scalars.at("max_row_tv") < 0.05);

    // Refining the grid keeps the error pinned at the domain-truncation floor:
    // normalized Gaussian rows have no h-order discretization error once
    // sigma >= 3h (discrete Gaussian sums are exponentially exact), so the
    // residual is a fixed tail effect, orders of magnitude under the bound.
    for (int grid : {128, 256, 512}) {
        Rng r(14);
        CHECK(check_gaussian_factorization(grid, 0.1, 1.0, r).scalars.at("max_row_tv") < 1e-4);
    }

    Rng rng_bad(15);
    CHECK_THROWS_AS((void)check_gaussian_factorization(16, 0.1, 1.0, rng_bad), config_error);
}

TEST_CASE("reports are self-contained json") {
    Rng rng(16);
    const CheckReport report = check_bonus_concentration(6, 5000, 10.0, 500, rng);
    const nlohmann::json doc = nlohmann::json::parse(report.to_json());
    CHECK(doc.at("suite").get<std::string>() == "bonus_concentration");
    CHECK(doc.at("pass").get<bool>() == report.pass);
    // The verdict must be recomputable from the stored raw numbers alone.
    const double lo = doc.at("scalars").at("min_ratio").get<double>();
    const double hi = doc.at("scalars").at("max_ratio").get<double>();
    CHECK((lo >= 0.8 && hi <= 1.25) == report.pass);
    CHECK(doc.at("scalars").contains("dim"));
    CHECK(doc.at("scalars").contains("n"));
    CHECK(doc.at("scalars").contains("lambda"));
}

TEST_CASE("config text parses every documented key") {
    const std::string text = R"(
# experiment
env = chain
chain_n_states = 6
chain_slip = 0.2
gamma = 0.9
n_episodes = 50
n_latent = 4
fit_restarts = 5
fit_max_iters = 120
fit_tol = 1e-6
fit_mode = em
alpha_c = 0.2
bonus_mode = quadratic
bonus_clip = 3.5
refit_every = 2
tuples_per_episode = 4
seeds = 5,6,7
)";
    const ExperimentConfig cfg = parse_config_text(text, "run-online");
    CHECK(cfg.task == TaskKind::RUN_ONLINE);
    CHECK(cfg.env_kind == "chain");
    CHECK(cfg.chain_n_states == 6);
    CHECK(cfg.chain_slip == 0.2);
    CHECK(cfg.gamma == 0.9);
    CHECK(cfg.agent.n_episodes == 50);
    CHECK(cfg.agent.n_latent == 4);
    CHECK(cfg.agent.fit.restarts == 5);
    CHECK(cfg.agent.fit.max_iters == 120);
    CHECK(cfg.agent.fit.tol == 1e-6);
    CHECK(cfg.agent.alpha_c == 0.2);
    CHECK(cfg.agent.bonus.mode == BonusMode::QUADRATIC);
    CHECK(cfg.agent.bonus.clip == 3.5);
    CHECK(cfg.agent.refit_every == 2);
    CHECK(cfg.agent.tuples_per_episode == 4);
    REQUIRE(cfg.seeds.size() == 3);
    CHECK(cfg.seeds[0] == 5);
    CHECK(cfg.seeds[2] == 7);
}

TEST_CASE("config parser rejects malformed input") {
    CHECK_THROWS_AS((void)parse_config_text("no_such_key = 1\n", "run-online"), config_error);
    CHECK_THROWS_AS((void)parse_config_text("gamma = 0.9\ngamma = 0.8\n", "run-online"),
                    config_error);
    CHECK_THROWS_AS((void)parse_config_text("gamma = not_a_number\n", "run-online"), config_error);
    CHECK_THROWS_AS((void)parse_config_text("n_episodes = 3.5\n", "run-online"), config_error);
    CHECK_THROWS_AS((void)parse_config_text("task = run-offline\n", "run-online"), config_error);
    CHECK_THROWS_AS((void)parse_config_text("gamma 0.9\n", "run-online"), config_error);
    // Line numbers appear in the diagnostics.
    try {
        (void)parse_config_text("gamma = 0.9\nbad line\n", "run-online");
        CHECK(false);
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("config file errors name the missing path") {
    try {
        (void)parse_config_file("/nonexistent/path/to.conf", "run-online");
        CHECK(false);
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("/nonexistent/path/to.conf") != std::string::npos);
    }
}

TEST_CASE("experiment validation guards task-specific fields") {
    ExperimentConfig cfg;
    cfg.task = TaskKind::RUN_ONLINE;
    cfg.seeds.clear();
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg = ExperimentConfig{};
    cfg.task = TaskKind::RUN_OFFLINE;
    cfg.n_samples = 0;
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg = ExperimentConfig{};
    cfg.task = TaskKind::EVAL;
    cfg.policy_path.clear();
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg = ExperimentConfig{};
    cfg.task = TaskKind::CHECK_THEORY;
    cfg.mle_sizes = {2000, 500};
    CHECK_THROWS_AS(cfg.validate(), config_error);

    cfg = ExperimentConfig{};
    cfg.gauss_n_grid = 8;
    CHECK_THROWS_AS(cfg.validate(), config_error);

    ExperimentConfig ok;
    ok.validate();
}

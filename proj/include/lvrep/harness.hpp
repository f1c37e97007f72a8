#pragma once

// Experiment configuration, the numerical theory-check suite, and the CLI
// entry point. Checks return self-contained reports (all raw numbers needed
// to recompute the verdict) that serialize to JSON.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lvrep/agent.hpp"
#include "lvrep/latent_model.hpp"
#include "lvrep/rng.hpp"

namespace lvrep {

enum class TaskKind { RUN_ONLINE, RUN_OFFLINE, CHECK_THEORY, EVAL };

struct ExperimentConfig {
    TaskKind task = TaskKind::CHECK_THEORY;

    // Environment: "chain", "block", or "file".
    std::string env_kind = "chain";
    int chain_n_states = 10;
    double chain_slip = 0.1;
    double gamma = 0.95;
    BlockMDPSpec block{20, 4, 3, 1.0, 7, 0.95};
    std::string env_path;

    AgentConfig agent;

    // Offline task.
    std::string behavior_kind = "mix_optimal_uniform";  // or "uniform", "file"
    double behavior_mix = 0.5;  // weight on the optimal policy in the mixture
    std::string behavior_path;
    int n_samples = 50000;

    // Eval task.
    std::string policy_path;
    std::string model_path;

    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::string output_dir = ".";
    std::string suite = "all";

    // Theory-check knobs.
    int sim_trials = 100;
    std::vector<double> logdet_alphas = {1e2, 1e3, 1e4};
    int logdet_dim = 128;
    int logdet_n_dirs = 200;
    double logdet_poly_beta = 2.0;
    double logdet_exp_beta = 1.0;
    int logdet_finite_beta = 8;
    int conc_dim = 8;
    long conc_n = 10000;
    double conc_lambda = 10.0;
    int conc_n_dirs = 1000;
    std::vector<long> mle_sizes = {500, 2000, 8000};
    int mle_seeds = 5;
    int gauss_n_grid = 256;
    double gauss_sigma = 0.1;
    double gauss_f_slope = 1.0;

    void validate() const;
};

// Flat key-value config file: one `key = value` per line, `#` comments.
// Unknown keys are rejected. `task_name` is the CLI subcommand.
ExperimentConfig parse_config_text(const std::string& text, const std::string& task_name);
ExperimentConfig parse_config_file(const std::string& path, const std::string& task_name);

struct SyntheticSpectrum {
    enum class Kind { FINITE, POLYNOMIAL, EXPONENTIAL };
    Kind kind = Kind::FINITE;
    double beta = 1.0;  // integer count for FINITE, decay exponent otherwise
    double c0 = 1.0;    // scale
    double c1 = 1.0;    // exponential rate
    double c2 = 1.0;    // reserved
    int dim = 64;       // truncation length

    void validate() const;
    Eigen::VectorXd eigenvalues() const;  // nonincreasing, length dim
    // Estimated squared-eigenvalue mass beyond the truncation; +inf when it
    // cannot be certified small.
    double squared_tail_mass() const;
};

struct CheckReport {
    std::string suite;
    bool pass = false;
    std::map<std::string, double> scalars;
    std::map<std::string, std::vector<double>> series;
    std::map<std::string, std::string> notes;

    std::string to_json() const;
};

// Exact value-difference identity between two transition models, both
// occupancy-weighted forms, evaluated on random 5-state instances.
// Pass: max residual < 1e-8.
CheckReport check_simulation_lemma(int n_trials, Rng& rng);

// log det(I + alpha * E_nu[phi phi^T]) for feature distributions nu over the
// unit ball of the spectrum-weighted embedding (plus the adversarial
// uniform-over-top-m basis family), compared to the spectrum regime's growth
// normalizer. FINITE also checks its closed-form equality instance.
CheckReport check_logdet_potential(const SyntheticSpectrum& spectrum, double alpha, int n_dirs,
                                   Rng& rng);

// Ratio of empirical vs population regularized quadratic forms over random
// directions, for n draws from a fixed simplex-vector mixture.
// Pass: ratios within [0.8, 1.25].
CheckReport check_bonus_concentration(int dim, long n, double lambda, int n_dirs, Rng& rng);

// Squared-TV model error versus sample size on a fixed random low-rank MDP;
// reports per-size mean errors and the fitted log-log slope.
// Pass: slope in [-1.4, -0.6] and final mean error <= 0.1.
CheckReport check_mle_rate(const BlockMDPSpec& block_spec, const std::vector<long>& sample_sizes,
                           int n_seeds, Rng& rng);

// Gaussian transition kernel on a 1-D grid factorized through a latent grid:
// composing the two half-width factors must reproduce the directly
// discretized kernel on interior rows. Pass: max interior row TV < 0.05.
CheckReport check_gaussian_factorization(int n_grid, double sigma, double f_slope, Rng& rng);

// CLI entry: subcommands run-online, run-offline, check-theory, eval.
// Exit codes: 0 success, 1 configuration error, 2 numeric failure.
int cli_main(int argc, char** argv);

}  // namespace lvrep

// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Each criterion re-derives its verdict from library calls
// plus environment oracles; tolerances are pinned here.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lvrep/agent.hpp"
#include "lvrep/env.hpp"
#include "lvrep/explore.hpp"
#include "lvrep/features.hpp"
#include "lvrep/harness.hpp"
#include "lvrep/latent_model.hpp"
#include "lvrep/planner.hpp"
#include "lvrep/rng.hpp"

using namespace lvrep;

namespace {

int g_failures = 0;
std::vector<std::pair<int, std::string>> g_lines;

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return std::string(buf);
}

// Criteria run out of numeric order when they share expensive runs; buffer the
// verdict lines and print them sorted by criterion number at the end.
void report(int criterion, bool pass, const std::string& details) {
    g_lines.emplace_back(criterion, fmt("criterion %2d: %s (%s)", criterion,
                                        pass ? "PASS" : "FAIL", details.c_str()));
    if (!pass) ++g_failures;
}

double median3(std::array<double, 3> v) {
    std::sort(v.begin(), v.end());
    return v[1];
}

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

LatentFactorModel random_model(int n_states, int n_actions, int n_latent, Rng& rng) {
    LatentFactorModel m;
    m.n_states = n_states;
    m.n_actions = n_actions;
    m.n_latent = n_latent;
    m.phi.resize(n_states * n_actions, n_latent);
    m.mu.resize(n_latent, n_states);
    for (int i = 0; i < m.phi.rows(); ++i) m.phi.row(i) = rng.dirichlet(n_latent, 1.0).transpose();
    for (int z = 0; z < n_latent; ++z) m.mu.row(z) = rng.dirichlet(n_states, 1.0).transpose();
    m.validate();
    return m;
}

std::string drop_wall_column(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        out += line.substr(0, line.rfind(','));
        out += '\n';
    }
    return out;
}

// --- criterion 1: the linear-in-features Q identity ------------------------

void criterion_linear_q() {
    Stopwatch timer;
    double worst = 0.0;
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        BlockMDPSpec spec;
        spec.n_states = 6 + static_cast<int>(trial % 4);
        spec.n_actions = 2 + static_cast<int>(trial % 3);
        spec.n_latent = 2 + static_cast<int>(trial % 3);
        spec.seed = 9000 + trial;
        spec.gamma = 0.9;
        const BlockMDP block = build_random_block_mdp(spec);

        Rng rng(200 + trial);
        Policy pi;
        pi.probs.resize(spec.n_states, spec.n_actions);
        for (int s = 0; s < spec.n_states; ++s)
            pi.probs.row(s) = rng.dirichlet(spec.n_actions, 1.0).transpose();
        pi.validate();
        const PolicyEvaluationResult eval = exact_policy_evaluation(block.mdp, pi);

        LinearQ q;
        q.reward_weight = 1.0;
        q.latent_weights = block.generator.mu * eval.v;
        for (int s = 0; s < spec.n_states; ++s)
            for (int a = 0; a < spec.n_actions; ++a)
                worst = std::max(worst,
                                 std::abs(exact_q(block.generator, q, block.mdp.reward, s, a,
                                                  spec.gamma) -
                                          eval.q(s, a)));
    }
    report(1, worst < 1e-8 && timer.seconds() < 10.0,
           fmt("max |linear Q - policy Q| = %.2e over 20 instances, %.1f s", worst,
               timer.seconds()));
}

// --- criterion 2: variational objective exactness and EM monotonicity ------

void criterion_elbo_em() {
    Stopwatch timer;
    Rng rng(2024);
    const LatentFactorModel model = random_model(6, 2, 3, rng);
    const Eigen::MatrixXd composed = compose_transition(model);
    TransitionDataset data(6, 2);
    for (int i = 0; i < 1000; ++i) {
        const int s = static_cast<int>(rng.uniform_int(6));
        const int a = static_cast<int>(rng.uniform_int(2));
        const int sp = static_cast<int>(rng.categorical(composed.row(model.row(s, a)).transpose()));
        data.add(s, a, sp);
    }
    std::vector<Eigen::VectorXd> q;
    for (const auto& t : data.triples) q.push_back(exact_posterior(model, t[0], t[1], t[2]));
    const double gap = std::abs(elbo(model, q, data) - log_likelihood(model, data));

    double worst_drop = 0.0;
    const TabularMDP chain = build_chain_mdp(6, 0.2, 0.95);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng sr(3000 + seed);
        TransitionDataset d(6, 2);
        for (int i = 0; i < 200; ++i) {
            const int s = static_cast<int>(sr.uniform_int(6));
            const int a = static_cast<int>(sr.uniform_int(2));
            const int sp =
                static_cast<int>(sr.categorical(chain.transition.row(chain.row(s, a)).transpose()));
            d.add(s, a, sp);
        }
        LatentFactorModel m = random_model(6, 2, 3, sr);
        double ll = log_likelihood(m, d);
        for (int step = 0; step < 50; ++step) {
            m = em_step(m, d);
            const double next = log_likelihood(m, d);
            worst_drop = std::max(worst_drop, ll - next);
            ll = next;
        }
    }
    report(2, gap < 1e-10 && worst_drop < 1e-9 && timer.seconds() < 30.0,
           fmt("objective-likelihood gap %.1e on 1000 triples; worst EM step drop %.1e over "
               "50 steps x 100 seeds, %.1f s",
               gap, worst_drop, timer.seconds()));
}

// --- criterion 3: model error shrinks like one over n -----------------------

void criterion_mle_rate() {
    Stopwatch timer;
    BlockMDPSpec spec;
    spec.n_states = 20;
    spec.n_actions = 4;
    spec.n_latent = 3;
    spec.seed = 7;
    Rng rng(1);
    const CheckReport rep = check_mle_rate(spec, {500, 2000, 8000}, 5, rng);
    const double slope = rep.scalars.at("slope");
    const double final_err = rep.scalars.at("final_mean_sq_tv");
    report(3,
           slope >= -1.4 && slope <= -0.6 && final_err <= 0.1 && timer.seconds() < 300.0,
           fmt("log-log slope %.2f (need [-1.4,-0.6]), mean squared TV at n=8000 is %.4f, %.1f s",
               slope, final_err, timer.seconds()));
}

// --- criteria 4, 5, 11: online exploration on the slippery chain ------------

struct ChainRun {
    double final_value = 0.0;
    double regret_half = 0.0;
    double regret_full = 0.0;
    std::string csv;
};

ChainRun run_chain_once(std::uint64_t seed, double alpha_c) {
    const TabularMDP mdp = build_chain_mdp(10, 0.1, 0.95);
    AgentConfig cfg;
    cfg.n_episodes = 3000;
    cfg.n_latent = 10;
    cfg.alpha_c = alpha_c;
    cfg.seed = seed;
    Rng rng(seed);
    const OnlineResult out = run_online(mdp, cfg, rng);
    ChainRun run;
    run.final_value = out.log.episodes.back().value;
    run.regret_half = out.log.episodes[1499].regret;
    run.regret_full = out.log.episodes[2999].regret;
    run.csv = runlog_to_csv(out.log);
    return run;
}

void criteria_online_chain() {
    Stopwatch timer;
    const TabularMDP mdp = build_chain_mdp(10, 0.1, 0.95);
    const ValueIterationResult star = exact_value_iteration(mdp, nullptr, 1e-12);
    const double v_star = star.v.dot(mdp.init_dist);

    std::array<double, 3> bonus_values{}, ablation_values{}, regret_ratios{};
    std::string seed1_csv;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const ChainRun with_bonus = run_chain_once(seed, 0.1);
        bonus_values[seed - 1] = with_bonus.final_value;
        regret_ratios[seed - 1] = with_bonus.regret_full / with_bonus.regret_half;
        if (seed == 1) seed1_csv = with_bonus.csv;
        const ChainRun no_bonus = run_chain_once(seed, 0.0);
        ablation_values[seed - 1] = no_bonus.final_value;
    }
    const double med_bonus = median3(bonus_values);
    const double med_ablation = median3(ablation_values);
    const double med_ratio = median3(regret_ratios);

    report(4,
           med_bonus >= 0.9 * v_star && med_ablation <= 0.5 * v_star && timer.seconds() < 600.0,
           fmt("median final value %.3f with bonus vs %.3f without (V* = %.3f), %.1f s",
               med_bonus, med_ablation, v_star, timer.seconds()));
    report(5, med_ratio < 1.8,
           fmt("median regret(3000)/regret(1500) = %.3f (need < 1.8)", med_ratio));

    Stopwatch rerun_timer;
    const ChainRun again = run_chain_once(1, 0.1);
    const bool identical = drop_wall_column(again.csv) == drop_wall_column(seed1_csv);
    report(11, identical,
           fmt("seed-1 rerun CSV %s after dropping the wall-time column, %.1f s",
               identical ? "byte-identical" : "differs", rerun_timer.seconds()));
}

// --- criterion 6: offline pessimism -----------------------------------------

void criterion_offline() {
    Stopwatch timer;
    const TabularMDP mdp = build_chain_mdp(10, 0.1, 0.95);
    const ValueIterationResult star = exact_value_iteration(mdp, nullptr, 1e-12);
    const double v_star = star.v.dot(mdp.init_dist);

    // Partial coverage: a left-biased behavior policy never reaches the right
    // half of the chain, so the dataset supports only the small left reward.
    Policy left_biased;
    left_biased.probs.resize(10, 2);
    left_biased.probs.col(kChainLeft).setConstant(0.8);
    left_biased.probs.col(kChainRight).setConstant(0.2);
    left_biased.validate();

    std::array<double, 3> diffs{};
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        AgentConfig cfg;
        cfg.n_latent = 10;
        cfg.fit.restarts = 40;
        cfg.seed = seed;
        Rng rng_pess(seed);
        const OfflineResult pess = run_offline(mdp, left_biased, 1500, cfg, rng_pess);
        AgentConfig no_penalty = cfg;
        no_penalty.alpha_c = 0.0;
        Rng rng_plain(seed);
        const OfflineResult plain = run_offline(mdp, left_biased, 1500, no_penalty, rng_plain);
        const double v_pess = exact_policy_evaluation(mdp, pess.policy).init_value;
        const double v_plain = exact_policy_evaluation(mdp, plain.policy).init_value;
        diffs[seed - 1] = v_pess - v_plain;
    }
    const double med_diff = median3(diffs);

    // Full coverage: half-optimal half-uniform behavior with abundant data.
    Policy mixed = Policy::uniform(10, 2);
    mixed.probs *= 0.5;
    for (int s = 0; s < 10; ++s) {
        Eigen::Index best;
        star.greedy.probs.row(s).maxCoeff(&best);
        mixed.probs(s, best) += 0.5;
    }
    mixed.validate();

    std::array<double, 3> full_values{};
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        AgentConfig cfg;
        cfg.n_latent = 10;
        cfg.fit.restarts = 40;
        cfg.seed = seed;
        Rng rng(seed);
        const OfflineResult out = run_offline(mdp, mixed, 50000, cfg, rng);
        full_values[seed - 1] = exact_policy_evaluation(mdp, out.policy).init_value;
    }
    const double med_full = median3(full_values);

    report(6,
           med_diff >= -1e-12 && med_full >= 0.9 * v_star && timer.seconds() < 300.0,
           fmt("partial coverage: median(value gain of penalty) = %.4f; full coverage: "
               "median value %.3f vs V* = %.3f, %.1f s",
               med_diff, med_full, v_star, timer.seconds()));
}

// --- criterion 7: exact value-difference identity ---------------------------

void criterion_simulation_identity() {
    Stopwatch timer;
    Rng rng(7);
    const CheckReport rep = check_simulation_lemma(100, rng);
    const double residual = rep.scalars.at("max_residual");
    report(7, residual < 1e-8 && timer.seconds() < 5.0,
           fmt("max identity residual %.1e over 100 instances, %.2f s", residual,
               timer.seconds()));
}

// --- criterion 8: log-det growth across spectrum regimes --------------------

void criterion_logdet() {
    Stopwatch timer;

    SyntheticSpectrum finite;
    finite.kind = SyntheticSpectrum::Kind::FINITE;
    finite.beta = 8;
    finite.dim = 8;
    Rng rng_f(8);
    const double gap =
        check_logdet_potential(finite, 1e3, 50, rng_f).scalars.at("finite_equality_gap");

    auto band = [&](SyntheticSpectrum::Kind kind, double beta,
                    auto normalizer) {
        SyntheticSpectrum spec;
        spec.kind = kind;
        spec.beta = beta;
        spec.dim = 128;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (double alpha : {1e2, 1e3, 1e4}) {
            Rng rng(9);
            const double normalized =
                check_logdet_potential(spec, alpha, 200, rng).scalars.at("max_logdet") /
                normalizer(alpha);
            lo = std::min(lo, normalized);
            hi = std::max(hi, normalized);
        }
        return hi / lo;
    };
    const double poly_band = band(SyntheticSpectrum::Kind::POLYNOMIAL, 2.0, [](double a) {
        return std::pow(a, 0.25) * std::log(a);
    });
    const double exp_band = band(SyntheticSpectrum::Kind::EXPONENTIAL, 1.0, [](double a) {
        return std::pow(std::log(a), 2.0);
    });

    report(8,
           gap < 1e-9 && poly_band < 3.0 && exp_band < 3.0 && timer.seconds() < 30.0,
           fmt("flat-spectrum equality gap %.1e; normalized growth bands: polynomial %.2f, "
               "exponential %.2f (need < 3), %.1f s",
               gap, poly_band, exp_band, timer.seconds()));
}

// --- criterion 9: quadratic-form concentration band -------------------------

void criterion_concentration() {
    Stopwatch timer;
    Rng rng(10);
    const CheckReport rep = check_bonus_concentration(8, 10000, 10.0, 1000, rng);
    const double lo = rep.scalars.at("min_ratio");
    const double hi = rep.scalars.at("max_ratio");
    report(9, lo >= 0.8 && hi <= 1.25 && timer.seconds() < 10.0,
           fmt("empirical/population ratios in [%.3f, %.3f] (need within [0.8, 1.25]), %.2f s",
               lo, hi, timer.seconds()));
}

// --- criterion 10: random-feature kernel fidelity ---------------------------

void criterion_rff() {
    Stopwatch timer;
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
        e[i] = 1.0;
        pts.push_back(e);
    }
    Eigen::VectorXd mid(3);
    mid << 0.5, 0.5, 0.0;
    pts.push_back(mid);
    mid << 0.2, 0.3, 0.5;
    pts.push_back(mid);

    auto max_err = [&](const RandomFeatureMap& rff) {
        double worst = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i; j < pts.size(); ++j) {
                const double truth = std::exp(-(pts[i] - pts[j]).squaredNorm());
                worst = std::max(worst,
                                 std::abs(kernel_estimate(rff, pts[i], pts[j]) - truth));
            }
        return worst;
    };

    std::array<double, 3> e_small{}, e_mid{}, e_large{};
    for (std::uint64_t seed = 15; seed <= 17; ++seed) {
        Rng r1(seed), r2(seed), r3(seed);
        e_small[seed - 15] = max_err(build_rff(1.0, 256, 3, r1));
        e_mid[seed - 15] = max_err(build_rff(1.0, 1024, 3, r2));
        e_large[seed - 15] = max_err(build_rff(1.0, 4096, 3, r3));
    }
    const double m256 = median3(e_small), m1024 = median3(e_mid), m4096 = median3(e_large);

    Rng rng_g(12);
    const CheckReport gauss = check_gaussian_factorization(256, 0.1, 1.0, rng_g);
    const double gauss_tv = gauss.scalars.at("max_row_tv");

    report(10,
           m1024 <= 0.5 * m256 && m4096 <= 0.5 * m1024 && gauss_tv < 0.05 &&
               timer.seconds() < 30.0,
           fmt("median kernel max-error %.4f -> %.4f -> %.4f over m = 256/1024/4096; "
               "factorized-kernel row TV %.1e (need < 0.05), %.1f s",
               m256, m1024, m4096, gauss_tv, timer.seconds()));
}

}  // namespace

int main() {
    Stopwatch total;
    criterion_linear_q();
    criterion_elbo_em();
    criterion_mle_rate();
    criteria_online_chain();
    criterion_offline();
    criterion_simulation_identity();
    criterion_logdet();
    criterion_concentration();
    criterion_rff();
    std::sort(g_lines.begin(), g_lines.end());
    for (const auto& [number, line] : g_lines) std::printf("%s\n", line.c_str());
    std::printf("%d criterion(s) failed; total %.1f s\n", g_failures, total.seconds());
    return g_failures == 0 ? 0 : 1;
}

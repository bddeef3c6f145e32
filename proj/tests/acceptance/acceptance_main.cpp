// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Usage: acceptance <path-to-cli-binary>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "random_games.hpp"
#include "teamvar/chain_analysis.hpp"
#include "teamvar/microgrid.hpp"
#include "teamvar/optimizer.hpp"
#include "teamvar/oracle.hpp"
#include "teamvar/variance_metrics.hpp"

using namespace teamvar;
namespace fs = std::filesystem;

namespace {

// Pinned acceptance thresholds.
constexpr double kBenchmarkTarget = 4.3540;     // best team variance bound
constexpr double kBenchmarkInitFloor = 4.3440;  // random inits land above this
constexpr int kBenchmarkMaxIters = 10;
constexpr double kIdentityTol = 1e-10;
constexpr double kPoissonResidualTol = 1e-9;
constexpr double kDifferenceTol = 1e-8;
constexpr double kDerivativeRelTol = 1e-4;
constexpr double kDerivativeAbsTol = 1e-8;
constexpr long long kSimHorizon = 1000000;
constexpr long long kSimBurnIn = 1000;

struct Criterion {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (!pass) detail << "; ";
            pass = false;
            detail << what;
        }
    }
};

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(10);
    out << v;
    return out.str();
}

Criterion benchmark_reproduction() {
    Criterion c;
    const GameModel game = build_microgrid();
    const MultistartResult result = multistart(game, 100, 7, 100);

    c.require(result.best_start >= 0, "no start converged");
    if (result.best_start < 0) return c;

    const double best = result.best_report.team_variance;
    c.require(best <= kBenchmarkTarget,
              "best " + fmt(best) + " above target " + fmt(kBenchmarkTarget));

    const auto& best_run = *result.starts[result.best_start].outcome;
    c.require(best_run.iterations() <= kBenchmarkMaxIters,
              "best run took " + std::to_string(best_run.iterations()) + " iterations");
    c.require(best_run.certificate.violated_inequalities == 0,
              "best policy violates the necessary condition");

    int converged = 0, inits_above = 0;
    for (const auto& start : result.starts) {
        if (!start.outcome || !start.outcome->converged) continue;
        ++converged;
        const auto& trace = start.outcome->trace;
        if (trace.front().report.team_variance > kBenchmarkInitFloor) ++inits_above;
        for (std::size_t l = 1; l < trace.size(); ++l)
            c.require(trace[l].report.team_variance < trace[l - 1].report.team_variance,
                      "non-monotone trace at start " + std::to_string(start.start_index));
    }
    c.require(converged > 0, "no converged starts");
    c.require(inits_above >= (9 * converged) / 10,
              "only " + std::to_string(inits_above) + "/" + std::to_string(converged) +
                  " inits above " + fmt(kBenchmarkInitFloor));

    c.detail << "best " << fmt(best) << " <= " << fmt(kBenchmarkTarget) << ", "
             << best_run.iterations() << " iterations, " << converged << "/100 converged, "
             << inits_above << "/" << converged << " inits above " << fmt(kBenchmarkInitFloor);
    return c;
}

Criterion identity_suite() {
    Criterion c;
    std::mt19937_64 rng(42);
    double worst_decomp = 0.0, worst_lemma = 0.0, worst_residual = 0.0, worst_shift = 0.0;

    for (int trial = 0; trial < 100; ++trial) {
        const GameModel game = support::random_game(50000 + trial);
        const DeterministicPolicy policy = support::random_policy_on(game, rng);

        // Decomposition vs the direct stationary-law objective.
        const VarianceReport report = team_metrics(game, policy);
        const support::DirectTeam direct = support::direct_team_variance(game, policy);
        worst_decomp = std::max(worst_decomp,
                                std::abs(report.team_variance - direct.team_variance));

        // Pseudo-variance offset identity.
        const double y = support::uniform(rng, -3.0, 3.0);
        const double lemma_gap =
            std::abs(pseudo_team_variance(game, policy, y) -
                     (report.team_variance +
                      game.n_players() * (y - report.team_mean) * (y - report.team_mean)));
        worst_lemma = std::max(worst_lemma, lemma_gap);

        // Poisson residual of every per-player evaluation.
        const TeamAnalysis analysis = analyze_team(game, policy);
        for (int i = 0; i < game.n_players(); ++i) {
            const InducedChain chain = induced_chain(game.player(i), policy.action_map[i]);
            const Eigen::VectorXd cost =
                (chain.reward.array() - analysis.team_mean).square().matrix();
            const auto& per = analysis.per_player[i];
            const Eigen::VectorXd residual =
                per.potential +
                Eigen::VectorXd::Constant(chain.matrix.n_states(), per.avg_cost) - cost -
                chain.matrix.rows() * per.potential;
            worst_residual = std::max(worst_residual, residual.cwiseAbs().maxCoeff());
        }

        // Difference formula is invariant to constant potential shifts.
        const DeterministicPolicy next = support::random_policy_on(game, rng);
        const double base_difference = team_difference(game, policy, next, analysis);
        TeamAnalysis shifted = analysis;
        for (auto& per : shifted.per_player)
            per.potential.array() += support::uniform(rng, -50.0, 50.0);
        worst_shift = std::max(worst_shift,
                               std::abs(team_difference(game, policy, next, shifted) -
                                        base_difference));
    }

    c.require(worst_decomp <= kIdentityTol, "decomposition gap " + fmt(worst_decomp));
    c.require(worst_lemma <= kIdentityTol, "offset identity gap " + fmt(worst_lemma));
    c.require(worst_residual <= kPoissonResidualTol, "poisson residual " + fmt(worst_residual));
    c.require(worst_shift <= kIdentityTol, "potential-shift gap " + fmt(worst_shift));
    c.detail << "100 games; worst decomposition " << fmt(worst_decomp) << ", offset "
             << fmt(worst_lemma) << ", residual " << fmt(worst_residual) << ", shift "
             << fmt(worst_shift);
    return c;
}

Criterion sensitivity_exactness() {
    Criterion c;
    std::mt19937_64 rng(43);
    const double h = 1e-5;
    double worst_difference = 0.0, worst_derivative = 0.0;

    for (int trial = 0; trial < 100; ++trial) {
        const GameModel game = support::random_game(60000 + trial);
        const DeterministicPolicy u = support::random_policy_on(game, rng);
        const DeterministicPolicy v = support::random_policy_on(game, rng);

        const double direct = team_metrics(game, v).team_variance -
                              team_metrics(game, u).team_variance;
        worst_difference =
            std::max(worst_difference, std::abs(team_difference(game, u, v) - direct));

        const double d = team_derivative(game, u, v);
        const auto f = [&](double delta) {
            return team_metrics(game, PolicyMixture{u, v, delta}).team_variance;
        };
        const double fd = (-3.0 * f(0.0) + 4.0 * f(h) - f(2.0 * h)) / (2.0 * h);
        const double gap = std::abs(d - fd);
        const double allowed = std::max(kDerivativeAbsTol, kDerivativeRelTol * std::abs(d));
        if (gap > allowed)
            c.require(false, "derivative gap " + fmt(gap) + " vs " + fmt(allowed) +
                                 " at trial " + std::to_string(trial));
        worst_derivative = std::max(worst_derivative, gap);
    }

    c.require(worst_difference <= kDifferenceTol, "difference gap " + fmt(worst_difference));
    c.detail << "100 policy pairs; worst difference " << fmt(worst_difference)
             << ", worst derivative-vs-FD " << fmt(worst_derivative);
    return c;
}

Criterion oracle_dominance() {
    Criterion c;
    std::mt19937_64 rng(44);
    int games = 0, fixed_points = 0;

    for (int trial = 0; trial < 50; ++trial) {
        const GameModel game = support::random_small_game(70000 + trial);
        const EnumerationResult oracle = brute_force(game);
        ++games;

        for (int start = 0; start < 3; ++start) {
            const OptimizeResult run =
                run_algorithm1(game, support::random_policy_on(game, rng), 200);
            ++fixed_points;
            c.require(run.trace.back().report.team_variance >= oracle.global_min - 1e-12,
                      "fixed point below the exhaustive minimum at game " +
                          std::to_string(trial));
            c.require(run.certificate.violated_inequalities == 0,
                      "fixed point violates the necessary condition at game " +
                          std::to_string(trial));
        }
        for (const auto& argmin : oracle.argmin)
            c.require(check_necessary_condition(game, argmin).violated_inequalities == 0,
                      "global argmin fails the necessary condition at game " +
                          std::to_string(trial));
    }

    const MultistartResult toy = multistart(support::toy4(), 8, 3);
    c.require(toy.best_start >= 0 && toy.best_report.team_variance == 0.0,
              "multistart missed the exact global minimum of the four-policy example");

    c.detail << games << " enumerable games, " << fixed_points
             << " fixed points dominated; four-policy multistart best "
             << fmt(toy.best_report.team_variance);
    return c;
}

Criterion simulation_consistency() {
    Criterion c;
    SimulationOptions opts;
    opts.burn_in = kSimBurnIn;
    int checks = 0;

    const GameModel microgrid = build_microgrid();
    const MultistartResult best = multistart(microgrid, 20, 7, 100);
    c.require(best.best_start >= 0, "no converged microgrid start");
    if (best.best_start >= 0) {
        const SimulationEstimate est =
            simulate(microgrid, best.best_policy, kSimHorizon, 2026, opts);
        c.require(std::abs(est.team_variance - best.best_report.team_variance) <=
                      3.0 * est.team_variance_se,
                  "microgrid variance " + fmt(est.team_variance) + " vs analytic " +
                      fmt(best.best_report.team_variance) + " (3se " +
                      fmt(3.0 * est.team_variance_se) + ")");
        c.require(std::abs(est.team_mean - best.best_report.team_mean) <=
                      3.0 * est.team_mean_se,
                  "microgrid mean outside 3 standard errors");
        checks += 2;
    }

    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 10; ++trial) {
        const GameModel game = support::random_game(80000 + trial);
        const DeterministicPolicy policy = support::random_policy_on(game, rng);
        const VarianceReport analytic = team_metrics(game, policy);
        const SimulationEstimate est =
            simulate(game, policy, kSimHorizon, 3000 + trial, opts);
        c.require(std::abs(est.team_variance - analytic.team_variance) <=
                      3.0 * est.team_variance_se,
                  "variance outside 3 standard errors at game " + std::to_string(trial));
        c.require(std::abs(est.team_mean - analytic.team_mean) <= 3.0 * est.team_mean_se,
                  "mean outside 3 standard errors at game " + std::to_string(trial));
        checks += 2;
    }

    c.detail << checks << " three-standard-error checks at horizon " << kSimHorizon;
    return c;
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

int run_cli(const std::string& cli, const std::vector<std::string>& args,
            const fs::path& log_dir) {
    std::string cmd = "'" + cli + "'";
    for (const auto& a : args) cmd += " '" + a + "'";
    cmd += " > '" + (log_dir / "stdout.txt").string() + "' 2> '" +
           (log_dir / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    return (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
}

Criterion cli_determinism(const std::string& cli) {
    Criterion c;
    const fs::path dir = fs::temp_directory_path() / "teamvar_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const std::vector<std::string> base{"run", "--scenario", "microgrid",
                                        "--seed", "7", "--n-starts", "100"};
    for (const char* leaf : {"a", "b"}) {
        auto args = base;
        args.push_back("--out");
        args.push_back((dir / leaf).string());
        const int code = run_cli(cli, args, dir);
        c.require(code == 0, std::string("run into ") + leaf + " exited with " +
                                 std::to_string(code));
    }

    const std::string trace = slurp(dir / "a" / "trace.csv");
    c.require(!trace.empty(), "empty trace");
    c.require(trace == slurp(dir / "b" / "trace.csv"), "traces differ between runs");

    // Team variance column strictly decreases within every run block.
    std::istringstream lines(trace);
    std::string line;
    std::getline(lines, line);
    std::string prev_run;
    double prev_value = 0.0;
    long long rows = 0, blocks = 0;
    while (std::getline(lines, line)) {
        std::stringstream cells(line);
        std::string run_id, iteration, mean, variance;
        std::getline(cells, run_id, ',');
        std::getline(cells, iteration, ',');
        std::getline(cells, mean, ',');
        std::getline(cells, variance, ',');
        const double value = std::stod(variance);
        if (run_id == prev_run) {
            c.require(value < prev_value,
                      "non-monotone trace in run " + run_id + " at iteration " + iteration);
        } else {
            ++blocks;
        }
        prev_run = run_id;
        prev_value = value;
        ++rows;
    }
    c.require(rows > 0 && blocks > 0, "trace has no data rows");

    fs::remove_all(dir);
    c.detail << "byte-identical traces, " << rows << " rows over " << blocks
             << " monotone run blocks";
    return c;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-cli-binary>\n";
        return 2;
    }

    struct Entry {
        const char* name;
        Criterion result;
    };
    const Entry entries[] = {
        {"benchmark reproduction (100 starts, seed 7)", benchmark_reproduction()},
        {"identity suite on random games", identity_suite()},
        {"sensitivity formulas are exact", sensitivity_exactness()},
        {"exhaustive-oracle dominance", oracle_dominance()},
        {"simulation consistency within 3 standard errors", simulation_consistency()},
        {"deterministic CLI traces", cli_determinism(argv[1])},
    };

    int failures = 0;
    int index = 0;
    for (const auto& entry : entries) {
        ++index;
        const std::string detail = entry.result.detail.str();
        std::cout << (entry.result.pass ? "[PASS]" : "[FAIL]") << " criterion " << index
                  << ": " << entry.name;
        if (!detail.empty()) std::cout << " -- " << detail;
        std::cout << "\n";
        if (!entry.result.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}

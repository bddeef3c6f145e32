#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "teamvar/errors.hpp"
#include "teamvar/microgrid.hpp"
#include "teamvar/optimizer.hpp"
#include "teamvar/oracle.hpp"
#include "teamvar/scenario.hpp"
#include "teamvar/variance_metrics.hpp"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitSuccess = 0;
constexpr int kExitParse = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNoConvergence = 4;

struct RunOptions {
    std::string scenario;
    std::uint64_t seed = 0;
    int n_starts = 1;
    int max_iters = 100;
    std::string out_dir = ".";
    bool oracle = false;
    std::optional<long long> simulate_horizon;
    std::optional<double> tie_tol;
    std::optional<double> solve_tol;
};

/// Fixed 12-significant-digit rendering shared by every CSV cell, so
/// identical runs emit byte-identical traces.
std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

teamvar::GameModel resolve_scenario(const std::string& name, const teamvar::NumericSettings& num) {
    if (name == "microgrid") return teamvar::build_microgrid();
    return teamvar::load_scenario(name, num);
}

void write_trace_csv(const std::filesystem::path& path, const teamvar::GameModel& game,
                     const teamvar::MultistartResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw teamvar::Error("cannot write trace file: " + path.string());

    const int n = game.n_players();
    out << "run_id,iteration,team_mean,team_variance";
    for (int i = 1; i <= n; ++i) out << ",pseudo_variance_" << i;
    for (int i = 1; i <= n; ++i) out << ",variance_" << i;
    for (int i = 1; i <= n; ++i) out << ",mean_" << i;
    out << ",decisions_changed\n";

    for (const auto& start : result.starts) {
        if (!start.outcome) continue;
        for (const auto& rec : start.outcome->trace) {
            out << start.start_index << ',' << rec.iteration << ',' << fmt12(rec.report.team_mean)
                << ',' << fmt12(rec.report.team_variance);
            for (int i = 0; i < n; ++i) out << ',' << fmt12(rec.pseudo_variance(i));
            for (int i = 0; i < n; ++i) out << ',' << fmt12(rec.report.per_player_variance(i));
            for (int i = 0; i < n; ++i) out << ',' << fmt12(rec.report.per_player_mean(i));
            out << ',' << rec.decisions_changed << '\n';
        }
    }
    if (!out) throw teamvar::Error("failed writing trace file: " + path.string());
}

const char* classification_name(teamvar::StationarityClass c) {
    return c == teamvar::StationarityClass::StrictLocalMin ? "StrictLocalMin"
                                                           : "FirstOrderStationary";
}

Json certificate_json(const teamvar::ConvergenceCertificate& cert) {
    Json j;
    j["classification"] = classification_name(cert.classification);
    j["violated_inequalities"] = cert.violated_inequalities;
    j["min_directional_derivative"] = cert.min_directional_derivative;
    return j;
}

Json policy_labels(const teamvar::GameModel& game, const teamvar::DeterministicPolicy& policy) {
    Json per_player = Json::array();
    for (int i = 0; i < game.n_players(); ++i) {
        const auto& player = game.player(i);
        Json labels = Json::array();
        for (int s = 0; s < player.n_states(); ++s)
            labels.push_back(player.action_labels().at(policy.action_map[i][s]));
        per_player.push_back(std::move(labels));
    }
    return per_player;
}

int run_command(const RunOptions& opt) {
    teamvar::NumericSettings num;
    if (opt.tie_tol) num.tie_tol = *opt.tie_tol;
    if (opt.solve_tol) num.solve_tol = *opt.solve_tol;

    const teamvar::GameModel game = resolve_scenario(opt.scenario, num);

    const auto t0 = std::chrono::steady_clock::now();
    const teamvar::MultistartResult result =
        teamvar::multistart(game, opt.n_starts, opt.seed, opt.max_iters, num);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::filesystem::path out_dir(opt.out_dir);
    std::filesystem::create_directories(out_dir);
    write_trace_csv(out_dir / "trace.csv", game, result);

    Json summary;
    summary["scenario"] = opt.scenario;
    summary["game_name"] = game.name();
    summary["seed"] = opt.seed;
    summary["n_starts"] = opt.n_starts;
    summary["max_iters"] = opt.max_iters;
    summary["tie_tol"] = num.tie_tol;
    summary["solve_tol"] = num.solve_tol;
    summary["elapsed_seconds"] = elapsed;

    int n_converged = 0;
    Json starts = Json::array();
    for (const auto& start : result.starts) {
        Json sj;
        sj["start"] = start.start_index;
        sj["converged"] = start.outcome && start.outcome->converged;
        if (start.outcome) {
            sj["iterations"] = start.outcome->iterations();
            sj["initial_team_variance"] = start.outcome->trace.front().report.team_variance;
            sj["final_team_variance"] = start.outcome->trace.back().report.team_variance;
        }
        if (!start.error.empty()) sj["error"] = start.error;
        if (start.outcome && start.outcome->converged) ++n_converged;
        starts.push_back(std::move(sj));
    }
    summary["n_converged"] = n_converged;
    summary["starts"] = std::move(starts);

    if (result.best_start >= 0) {
        const auto& best = *result.starts[result.best_start].outcome;
        Json bj;
        bj["start"] = result.best_start;
        bj["team_variance"] = result.best_report.team_variance;
        bj["team_mean"] = result.best_report.team_mean;
        bj["iterations"] = best.iterations();
        bj["policy"] = result.best_policy.action_map;
        bj["policy_labels"] = policy_labels(game, result.best_policy);
        bj["certificate"] = certificate_json(best.certificate);
        summary["best"] = std::move(bj);
    }

    if (opt.oracle) {
        const teamvar::EnumerationResult oracle = teamvar::brute_force(game, 100000, num);
        Json oj;
        oj["global_min"] = oracle.global_min;
        oj["n_evaluated"] = oracle.n_evaluated;
        oj["n_skipped_multichain"] = oracle.n_skipped_multichain;
        oj["argmin_count"] = oracle.argmin.size();
        if (result.best_start >= 0) {
            oj["best_minus_global_min"] = result.best_report.team_variance - oracle.global_min;
            oj["best_matches_global_min"] =
                result.best_report.team_variance - oracle.global_min <= num.enumeration_tie_tol;
        }
        summary["oracle"] = std::move(oj);
    }

    if (opt.simulate_horizon) {
        Json sj;
        if (result.best_start >= 0) {
            const teamvar::SimulationEstimate est =
                teamvar::simulate(game, result.best_policy, *opt.simulate_horizon, opt.seed);
            sj["horizon"] = est.horizon;
            sj["seed"] = est.seed;
            sj["team_mean"] = est.team_mean;
            sj["team_variance"] = est.team_variance;
            sj["team_mean_se"] = est.team_mean_se;
            sj["team_variance_se"] = est.team_variance_se;
            sj["analytic_team_variance"] = result.best_report.team_variance;
            sj["within_3_se"] = std::abs(est.team_variance - result.best_report.team_variance) <=
                                3.0 * est.team_variance_se;
        } else {
            sj["skipped"] = "no converged start to simulate";
        }
        summary["simulation"] = std::move(sj);
    }

    {
        std::ofstream out(out_dir / "summary.json", std::ios::binary);
        if (!out) throw teamvar::Error("cannot write summary file");
        out << summary.dump(2) << '\n';
    }

    if (result.best_start < 0) {
        std::cerr << "no start converged within " << opt.max_iters << " iterations";
        if (!result.starts.empty() && !result.starts.front().error.empty())
            std::cerr << " (start 0: " << result.starts.front().error << ")";
        std::cerr << "\n";
        return kExitNoConvergence;
    }

    std::cout << "best start " << result.best_start << ": team variance "
              << fmt12(result.best_report.team_variance) << ", team mean "
              << fmt12(result.best_report.team_mean) << ", "
              << result.starts[result.best_start].outcome->iterations() << " iterations, "
              << classification_name(
                     result.starts[result.best_start].outcome->certificate.classification)
              << "\n"
              << n_converged << "/" << opt.n_starts << " starts converged in " << fmt12(elapsed)
              << "s\n"
              << "wrote " << (out_dir / "trace.csv").string() << " and "
              << (out_dir / "summary.json").string() << "\n";
    return kExitSuccess;
}

int export_command(const std::string& scenario, const std::string& out_file) {
    if (scenario != "microgrid")
        throw teamvar::ScenarioParseError("unknown builtin scenario '" + scenario +
                                          "' (available: microgrid)");
    teamvar::save_scenario(teamvar::build_microgrid(), out_file);
    std::cout << "wrote " << out_file << "\n";
    return kExitSuccess;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimizes the steady-state team variance of separately controlled "
                 "stochastic games by decentralized policy iteration"};
    app.require_subcommand(1);

    RunOptions opt;
    long long simulate_horizon = 0;
    double tie_tol = 0.0, solve_tol = 0.0;

    CLI::App* run = app.add_subcommand("run", "Run multistart decentralized policy iteration");
    run->add_option("--scenario", opt.scenario,
                    "Builtin scenario name ('microgrid') or scenario JSON file path")
        ->required();
    run->add_option("--seed", opt.seed, "Seed for initial-policy draws (64-bit)")
        ->capture_default_str();
    run->add_option("--n-starts", opt.n_starts, "Number of random starts")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    run->add_option("--max-iters", opt.max_iters, "Iteration cap per start")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    run->add_option("--out", opt.out_dir, "Output directory for trace.csv and summary.json")
        ->capture_default_str();
    run->add_flag("--oracle", opt.oracle,
                  "Exhaustively enumerate the joint policy space and compare");
    CLI::Option* sim_opt =
        run->add_option("--simulate", simulate_horizon,
                        "Simulate the best policy for this many steps and compare")
            ->check(CLI::PositiveNumber);
    CLI::Option* tie_opt =
        run->add_option("--tie-tol", tie_tol, "Tie tolerance of the improvement argmin");
    CLI::Option* solve_opt =
        run->add_option("--solve-tol", solve_tol, "Rank threshold of the dense linear solves");

    std::string export_scenario = "microgrid";
    std::string export_out;
    CLI::App* exp = app.add_subcommand("export", "Write a builtin scenario as a JSON file");
    exp->add_option("--scenario", export_scenario, "Builtin scenario name")
        ->capture_default_str();
    exp->add_option("--out", export_out, "Output file path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitSuccess : kExitParse;
    }

    if (sim_opt->count() > 0) opt.simulate_horizon = simulate_horizon;
    if (tie_opt->count() > 0) opt.tie_tol = tie_tol;
    if (solve_opt->count() > 0) opt.solve_tol = solve_tol;

    try {
        if (run->parsed()) return run_command(opt);
        return export_command(export_scenario, export_out);
    } catch (const teamvar::ScenarioParseError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kExitParse;
    } catch (const teamvar::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

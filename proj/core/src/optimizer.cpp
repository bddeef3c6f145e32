#include "teamvar/optimizer.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "sampling.hpp"

namespace teamvar {

namespace {

Eigen::VectorXd squared_deviation(const Eigen::VectorXd& reward, double center) {
    return (reward.array() - center).square().matrix();
}

} // namespace

std::vector<int> improve_player(const PlayerModel& player, const std::vector<int>& policy,
                                double mu_signal, const ChainAnalysis& analysis,
                                const NumericSettings& num) {
    if (analysis.potential.size() != player.n_states())
        throw AnalysisMismatchError("chain analysis covers " +
                                    std::to_string(analysis.potential.size()) +
                                    " states, player has " + std::to_string(player.n_states()));
    std::vector<int> improved(player.n_states());
    for (int s = 0; s < player.n_states(); ++s) {
        double q_min = std::numeric_limits<double>::infinity();
        for (int a : player.admissible(s)) {
            const double d = player.reward(s, a) - mu_signal;
            const double q = d * d + player.transition_row(s, a).dot(analysis.potential);
            q_min = std::min(q_min, q);
        }
        // Keep the current action when it ties the minimum, else take the
        // smallest tying action id.
        int chosen = -1;
        for (int a : player.admissible(s)) {
            const double d = player.reward(s, a) - mu_signal;
            const double q = d * d + player.transition_row(s, a).dot(analysis.potential);
            if (q <= q_min + num.tie_tol) {
                if (a == policy[s]) {
                    chosen = a;
                    break;
                }
                if (chosen == -1) chosen = a;
            }
        }
        improved[s] = chosen;
    }
    return improved;
}

std::vector<int> improve_player(const PlayerModel& player, const std::vector<int>& policy,
                                double mu_signal, const NumericSettings& num) {
    const InducedChain chain = induced_chain(player, policy, num);
    const ChainAnalysis analysis =
        solve_poisson(chain.matrix, squared_deviation(chain.reward, mu_signal), num);
    return improve_player(player, policy, mu_signal, analysis, num);
}

OptimizeResult run_algorithm1(const GameModel& game, const DeterministicPolicy& init,
                              int max_iters, const NumericSettings& num) {
    if (max_iters < 1) throw InvalidModelError("max_iters must be >= 1");
    init.validate(game);
    const int n = game.n_players();

    OptimizeResult result;
    DeterministicPolicy current = init;

    for (int l = 0; l < max_iters; ++l) {
        // Policy evaluation: one shared team mean, then each player's
        // potential for the cost (r - mu 1)^2.
        TeamAnalysis analysis;
        std::vector<PlayerMetrics> metrics(n);
        try {
            analysis = analyze_team(game, current, num);
            for (int i = 0; i < n; ++i)
                metrics[i] = player_metrics(game.player(i), current.action_map[i], num);
        } catch (const MultichainError& e) {
            throw MultichainError(std::string(e.what()) + " (iteration " + std::to_string(l) + ")",
                                  e.player(), l);
        }

        IterationRecord record;
        record.iteration = l;
        record.policy = current;
        record.report = combine_player_metrics(metrics);
        record.pseudo_variance.resize(n);
        for (int i = 0; i < n; ++i)
            record.pseudo_variance(i) = analysis.per_player[i].avg_cost;

        // Policy improvement against the shared signal.
        DeterministicPolicy next;
        next.action_map.resize(n);
        int changed = 0;
        for (int i = 0; i < n; ++i) {
            next.action_map[i] = improve_player(game.player(i), current.action_map[i],
                                                analysis.team_mean, analysis.per_player[i], num);
            for (std::size_t s = 0; s < next.action_map[i].size(); ++s)
                if (next.action_map[i][s] != current.action_map[i][s]) ++changed;
        }
        record.decisions_changed = changed;

        if (!result.trace.empty()) {
            const double prev = result.trace.back().report.team_variance;
            if (record.report.team_variance > prev - num.strict_decrease_tol)
                throw Error("team variance failed to strictly decrease at iteration " +
                            std::to_string(l) + ": " + std::to_string(prev) + " -> " +
                            std::to_string(record.report.team_variance));
        }
        result.trace.push_back(std::move(record));

        if (changed == 0) {
            result.converged = true;
            break;
        }
        current = std::move(next);
    }

    result.final_policy = result.trace.back().policy;
    result.certificate = check_necessary_condition(game, result.final_policy, num);
    if (!result.converged)
        throw MaxItersError("no fixed point within " + std::to_string(max_iters) + " iterations",
                            std::move(result));
    return result;
}

ConvergenceCertificate check_necessary_condition(const GameModel& game,
                                                 const DeterministicPolicy& policy,
                                                 const NumericSettings& num) {
    const TeamAnalysis analysis = analyze_team(game, policy, num);
    const double mu = analysis.team_mean;

    ConvergenceCertificate cert;
    cert.state_satisfied.resize(game.n_players());
    cert.min_directional_derivative = std::numeric_limits<double>::infinity();

    for (int i = 0; i < game.n_players(); ++i) {
        const auto& player = game.player(i);
        const Eigen::VectorXd& g = analysis.per_player[i].potential;
        const Eigen::RowVectorXd& pi = analysis.per_player[i].pi;
        cert.state_satisfied[i].assign(player.n_states(), true);

        for (int s = 0; s < player.n_states(); ++s) {
            const int a_cur = policy.action_map[i][s];
            const double d_cur = player.reward(s, a_cur) - mu;
            const double q_cur = d_cur * d_cur + player.transition_row(s, a_cur).dot(g);
            for (int a : player.admissible(s)) {
                if (a == a_cur) continue;
                const double d = player.reward(s, a) - mu;
                const double q_dev = d * d + player.transition_row(s, a).dot(g);
                if (q_dev < q_cur - num.tie_tol) {
                    cert.state_satisfied[i][s] = false;
                    ++cert.violated_inequalities;
                }
                // Derivative along the single-decision deviation direction;
                // identical to team_derivative since all other players' terms
                // vanish and the brackets differ only in row s.
                cert.min_directional_derivative =
                    std::min(cert.min_directional_derivative, pi(s) * (q_dev - q_cur));
            }
        }
    }
    cert.classification = cert.min_directional_derivative > num.certificate_tol
                              ? StationarityClass::StrictLocalMin
                              : StationarityClass::FirstOrderStationary;
    return cert;
}

DeterministicPolicy random_policy(const GameModel& game, std::uint64_t seed,
                                  std::uint64_t stream_index) {
    std::mt19937_64 rng = detail::stream_for(seed, stream_index);
    DeterministicPolicy policy;
    policy.action_map.resize(game.n_players());
    for (int i = 0; i < game.n_players(); ++i) {
        const auto& player = game.player(i);
        policy.action_map[i].resize(player.n_states());
        for (int s = 0; s < player.n_states(); ++s) {
            const auto& actions = player.admissible(s);
            policy.action_map[i][s] =
                actions[detail::uniform_index(rng, static_cast<int>(actions.size()))];
        }
    }
    return policy;
}

MultistartResult multistart(const GameModel& game, int n_starts, std::uint64_t seed,
                            int max_iters, const NumericSettings& num) {
    if (n_starts < 1) throw InvalidModelError("n_starts must be >= 1");

    MultistartResult result;
    result.starts.reserve(n_starts);
    double best_value = std::numeric_limits<double>::infinity();

    for (int k = 0; k < n_starts; ++k) {
        StartRecord record;
        record.start_index = k;
        record.initial_policy = random_policy(game, seed, static_cast<std::uint64_t>(k));
        try {
            record.outcome = run_algorithm1(game, record.initial_policy, max_iters, num);
        } catch (const MaxItersError& e) {
            record.outcome = e.result();
            record.error = e.what();
        } catch (const Error& e) {
            record.error = e.what();
        }
        if (record.outcome && record.outcome->converged) {
            const double value = record.outcome->trace.back().report.team_variance;
            if (value < best_value) {
                best_value = value;
                result.best_start = k;
                result.best_policy = record.outcome->final_policy;
                result.best_report = record.outcome->trace.back().report;
            }
        }
        result.starts.push_back(std::move(record));
    }
    return result;
}

} // namespace teamvar

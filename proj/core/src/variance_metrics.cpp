#include "teamvar/variance_metrics.hpp"

#include <cmath>

namespace teamvar {

namespace {

MultichainError with_player(const MultichainError& e, int player) {
    return MultichainError("player " + std::to_string(player) + ": " + e.what(), player,
                           e.iteration());
}

Eigen::VectorXd squared_deviation(const Eigen::VectorXd& reward, double center) {
    return (reward.array() - center).square().matrix();
}

} // namespace

VarianceReport combine_player_metrics(const std::vector<PlayerMetrics>& metrics) {
    const int n = static_cast<int>(metrics.size());
    VarianceReport report;
    report.per_player_mean.resize(n);
    report.per_player_variance.resize(n);
    for (int i = 0; i < n; ++i) {
        report.per_player_mean(i) = metrics[i].mean;
        report.per_player_variance(i) = metrics[i].variance;
    }
    report.team_mean = report.per_player_mean.sum() / n;
    report.within_sum = report.per_player_variance.sum();
    report.between_sum = (report.per_player_mean.array() - report.team_mean).square().sum();
    report.team_variance = report.within_sum + report.between_sum;
    return report;
}

PlayerMetrics player_metrics(const PlayerModel& player, const std::vector<int>& policy,
                             const NumericSettings& num) {
    const InducedChain chain = induced_chain(player, policy, num);
    const Eigen::RowVectorXd pi = stationary_distribution(chain.matrix, num);
    PlayerMetrics out;
    out.mean = pi.dot(chain.reward);
    out.variance = pi.dot(squared_deviation(chain.reward, out.mean));
    return out;
}

double pseudo_player_variance(const PlayerModel& player, const std::vector<int>& policy,
                              double y, const NumericSettings& num) {
    const InducedChain chain = induced_chain(player, policy, num);
    const Eigen::RowVectorXd pi = stationary_distribution(chain.matrix, num);
    return pi.dot(squared_deviation(chain.reward, y));
}

VarianceReport team_metrics(const GameModel& game, const DeterministicPolicy& policy,
                            const NumericSettings& num) {
    policy.validate(game);
    std::vector<PlayerMetrics> metrics;
    metrics.reserve(game.n_players());
    for (int i = 0; i < game.n_players(); ++i) {
        try {
            metrics.push_back(player_metrics(game.player(i), policy.action_map[i], num));
        } catch (const MultichainError& e) {
            throw with_player(e, i);
        }
    }
    return combine_player_metrics(metrics);
}

VarianceReport team_metrics(const GameModel& game, const PolicyMixture& mixture,
                            const NumericSettings& num) {
    mixture.validate(game);
    std::vector<PlayerMetrics> metrics;
    metrics.reserve(game.n_players());
    for (int i = 0; i < game.n_players(); ++i) {
        const auto& player = game.player(i);
        const InducedChain base = induced_chain(player, mixture.base.action_map[i], num);
        const InducedChain dir = induced_chain(player, mixture.direction.action_map[i], num);
        const MixedChain mixed = induced_mixed_chain(player, mixture.base.action_map[i],
                                                     mixture.direction.action_map[i],
                                                     mixture.delta, num);
        try {
            const Eigen::RowVectorXd pi = stationary_distribution(mixed.matrix, num);
            PlayerMetrics m;
            m.mean = pi.dot(mixed.cost_mix(base.reward, dir.reward));
            // Second moment over both the stationary state and the per-step
            // action coin, so the reward is random in the action too.
            m.variance = pi.dot(mixed.cost_mix(squared_deviation(base.reward, m.mean),
                                               squared_deviation(dir.reward, m.mean)));
            metrics.push_back(m);
        } catch (const MultichainError& e) {
            throw with_player(e, i);
        }
    }
    return combine_player_metrics(metrics);
}

double pseudo_team_variance(const GameModel& game, const DeterministicPolicy& policy,
                            double y, const NumericSettings& num) {
    policy.validate(game);
    double total = 0.0;
    for (int i = 0; i < game.n_players(); ++i) {
        try {
            total += pseudo_player_variance(game.player(i), policy.action_map[i], y, num);
        } catch (const MultichainError& e) {
            throw with_player(e, i);
        }
    }
    return total;
}

double player_difference(const PlayerModel& player, const std::vector<int>& policy,
                         const std::vector<int>& policy_next, double y,
                         const ChainAnalysis& analysis_at_policy, const NumericSettings& num) {
    if (analysis_at_policy.potential.size() != player.n_states() ||
        analysis_at_policy.pi.size() != player.n_states())
        throw AnalysisMismatchError("chain analysis covers " +
                                    std::to_string(analysis_at_policy.potential.size()) +
                                    " states, player has " + std::to_string(player.n_states()));
    const InducedChain current = induced_chain(player, policy, num);
    const InducedChain next = induced_chain(player, policy_next, num);
    const Eigen::RowVectorXd pi_next = stationary_distribution(next.matrix, num);
    const Eigen::VectorXd term =
        (next.matrix.rows() - current.matrix.rows()) * analysis_at_policy.potential +
        squared_deviation(next.reward, y) - squared_deviation(current.reward, y);
    return pi_next.dot(term);
}

TeamAnalysis analyze_team(const GameModel& game, const DeterministicPolicy& policy,
                          const NumericSettings& num) {
    policy.validate(game);
    const int n = game.n_players();

    std::vector<InducedChain> chains;
    std::vector<PlayerMetrics> metrics;
    chains.reserve(n);
    metrics.reserve(n);
    for (int i = 0; i < n; ++i) {
        chains.push_back(induced_chain(game.player(i), policy.action_map[i], num));
        try {
            metrics.push_back(player_metrics(game.player(i), policy.action_map[i], num));
        } catch (const MultichainError& e) {
            throw with_player(e, i);
        }
    }

    TeamAnalysis out;
    out.team_mean = combine_player_metrics(metrics).team_mean;
    out.per_player.reserve(n);
    for (int i = 0; i < n; ++i) {
        try {
            out.per_player.push_back(solve_poisson(
                chains[i].matrix, squared_deviation(chains[i].reward, out.team_mean), num));
        } catch (const MultichainError& e) {
            throw with_player(e, i);
        }
    }
    return out;
}

namespace {

// Shared evaluation of the boxed difference formula and the derivative
// formula: the two differ only in which stationary distribution weights the
// bracket and whether the -n (mu' - mu)^2 correction applies.
double sensitivity_sum(const GameModel& game, const DeterministicPolicy& policy,
                       const DeterministicPolicy& policy_next, const TeamAnalysis& at_policy,
                       bool weight_by_next, double* team_mean_next, const NumericSettings& num) {
    const int n = game.n_players();
    if (static_cast<int>(at_policy.per_player.size()) != n)
        throw AnalysisMismatchError("team analysis covers " +
                                    std::to_string(at_policy.per_player.size()) +
                                    " players, game has " + std::to_string(n));
    policy_next.validate(game);

    const double mu = at_policy.team_mean;
    double total = 0.0;
    std::vector<PlayerMetrics> next_metrics;
    next_metrics.reserve(n);
    for (int i = 0; i < n; ++i) {
        const auto& player = game.player(i);
        const InducedChain current = induced_chain(player, policy.action_map[i], num);
        const InducedChain next = induced_chain(player, policy_next.action_map[i], num);
        const Eigen::VectorXd bracket =
            (next.matrix.rows() - current.matrix.rows()) * at_policy.per_player[i].potential +
            squared_deviation(next.reward, mu) - squared_deviation(current.reward, mu);
        if (weight_by_next) {
            Eigen::RowVectorXd pi_next;
            try {
                pi_next = stationary_distribution(next.matrix, num);
            } catch (const MultichainError& e) {
                throw with_player(e, i);
            }
            total += pi_next.dot(bracket);
            next_metrics.push_back({pi_next.dot(next.reward), 0.0});
        } else {
            total += at_policy.per_player[i].pi.dot(bracket);
        }
    }
    if (team_mean_next) *team_mean_next = combine_player_metrics(next_metrics).team_mean;
    return total;
}

} // namespace

double team_difference(const GameModel& game, const DeterministicPolicy& policy,
                       const DeterministicPolicy& policy_next, const TeamAnalysis& at_policy,
                       const NumericSettings& num) {
    double mu_next = 0.0;
    const double sum =
        sensitivity_sum(game, policy, policy_next, at_policy, true, &mu_next, num);
    const double dmu = mu_next - at_policy.team_mean;
    return sum - game.n_players() * dmu * dmu;
}

double team_difference(const GameModel& game, const DeterministicPolicy& policy,
                       const DeterministicPolicy& policy_next, const NumericSettings& num) {
    return team_difference(game, policy, policy_next, analyze_team(game, policy, num), num);
}

double team_derivative(const GameModel& game, const DeterministicPolicy& policy,
                       const DeterministicPolicy& direction, const TeamAnalysis& at_policy,
                       const NumericSettings& num) {
    return sensitivity_sum(game, policy, direction, at_policy, false, nullptr, num);
}

double team_derivative(const GameModel& game, const DeterministicPolicy& policy,
                       const DeterministicPolicy& direction, const NumericSettings& num) {
    return team_derivative(game, policy, direction, analyze_team(game, policy, num), num);
}

} // namespace teamvar

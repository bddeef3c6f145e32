#include "teamvar/oracle.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "sampling.hpp"
#include "teamvar/errors.hpp"
#include "teamvar/variance_metrics.hpp"

namespace teamvar {

namespace {

/// All deterministic action maps of one player with memoized metrics;
/// multichain-inducing maps memoize to nullopt.
struct PlayerSpace {
    std::vector<std::vector<int>> policies;
    std::vector<std::optional<PlayerMetrics>> metrics;
};

PlayerSpace enumerate_player(const PlayerModel& player, const NumericSettings& num) {
    PlayerSpace space;
    std::vector<int> pick(player.n_states(), 0);
    while (true) {
        std::vector<int> map(player.n_states());
        for (int s = 0; s < player.n_states(); ++s) map[s] = player.admissible(s)[pick[s]];
        try {
            space.metrics.push_back(player_metrics(player, map, num));
        } catch (const MultichainError&) {
            space.metrics.push_back(std::nullopt);
        }
        space.policies.push_back(std::move(map));

        int s = player.n_states() - 1;
        while (s >= 0 && ++pick[s] == static_cast<int>(player.admissible(s).size())) {
            pick[s] = 0;
            --s;
        }
        if (s < 0) break;
    }
    return space;
}

} // namespace

EnumerationResult brute_force(const GameModel& game, long long cap, const NumericSettings& num) {
    if (cap < 1) throw BadParamsError("enumeration cap must be >= 1");

    long long total = 1;
    for (int i = 0; i < game.n_players(); ++i) {
        const auto& player = game.player(i);
        for (int s = 0; s < player.n_states(); ++s) {
            const long long k = static_cast<long long>(player.admissible(s).size());
            if (total > cap / k)
                throw TooLargeError("joint policy count exceeds cap " + std::to_string(cap));
            total *= k;
        }
    }

    const int n = game.n_players();
    std::vector<PlayerSpace> spaces;
    spaces.reserve(n);
    for (int i = 0; i < n; ++i) spaces.push_back(enumerate_player(game.player(i), num));

    EnumerationResult result;
    result.table.reserve(total);
    std::vector<PlayerMetrics> metrics(n);
    std::vector<int> idx(n, 0);
    while (true) {
        bool evaluable = true;
        for (int i = 0; i < n; ++i)
            if (!spaces[i].metrics[idx[i]]) {
                evaluable = false;
                break;
            }
        if (evaluable) {
            for (int i = 0; i < n; ++i) metrics[i] = *spaces[i].metrics[idx[i]];
            DeterministicPolicy policy;
            policy.action_map.resize(n);
            for (int i = 0; i < n; ++i) policy.action_map[i] = spaces[i].policies[idx[i]];
            result.table.emplace_back(std::move(policy),
                                      combine_player_metrics(metrics).team_variance);
        } else {
            ++result.n_skipped_multichain;
        }

        int p = n - 1;
        while (p >= 0 && ++idx[p] == static_cast<int>(spaces[p].policies.size())) {
            idx[p] = 0;
            --p;
        }
        if (p < 0) break;
    }

    result.n_evaluated = static_cast<long long>(result.table.size());
    result.global_min = std::numeric_limits<double>::infinity();
    for (const auto& [policy, value] : result.table) result.global_min = std::min(result.global_min, value);
    for (const auto& [policy, value] : result.table)
        if (value <= result.global_min + num.enumeration_tie_tol) result.argmin.push_back(policy);
    return result;
}

SimulationEstimate simulate(const GameModel& game, const PolicyMixture& mix, long long horizon,
                            std::uint64_t seed, const SimulationOptions& opts) {
    mix.validate(game);
    if (horizon < 1) throw BadParamsError("simulation horizon must be >= 1");
    if (opts.burn_in < 0) throw BadParamsError("burn_in must be >= 0");
    if (opts.batches < 1) throw BadParamsError("batches must be >= 1");

    const int n = game.n_players();
    const long long batches = std::min<long long>(opts.batches, horizon);
    const long long batch_len = horizon / batches;
    // Batch-means statistics use this prefix; the up-to-(batches-1) trailing
    // samples still enter the point estimates.
    const long long used = batches * batch_len;

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd batch_sum = Eigen::MatrixXd::Zero(batches, n);
    Eigen::MatrixXd batch_sum_sq = Eigen::MatrixXd::Zero(batches, n);

    for (int i = 0; i < n; ++i) {
        const auto& player = game.player(i);
        std::mt19937_64 rng = detail::stream_for(seed, static_cast<std::uint64_t>(i));
        int s = detail::uniform_index(rng, player.n_states());
        for (long long t = 0; t < opts.burn_in + horizon; ++t) {
            const bool deviate = detail::uniform01(rng) < mix.delta;
            const int a =
                deviate ? mix.direction.action_map[i][s] : mix.base.action_map[i][s];
            const double r = player.reward(s, a);
            if (t >= opts.burn_in) {
                const long long k = t - opts.burn_in;
                sum(i) += r;
                sum_sq(i) += r * r;
                if (k < used) {
                    batch_sum(k / batch_len, i) += r;
                    batch_sum_sq(k / batch_len, i) += r * r;
                }
            }
            const double u = detail::uniform01(rng);
            const auto row = player.transition_row(s, a);
            double cdf = 0.0;
            int next = player.n_states() - 1;
            for (int j = 0; j < player.n_states(); ++j) {
                cdf += row(j);
                if (u < cdf) {
                    next = j;
                    break;
                }
            }
            s = next;
        }
    }

    SimulationEstimate est;
    est.horizon = horizon;
    est.seed = seed;
    const double T = static_cast<double>(horizon);
    est.team_mean = sum.sum() / (n * T);
    est.team_variance =
        (sum_sq.sum() - 2.0 * est.team_mean * sum.sum() + n * T * est.team_mean * est.team_mean) /
        T;

    if (batches > 1) {
        const double L = static_cast<double>(batch_len);
        Eigen::VectorXd mean_b(batches), var_b(batches);
        for (long long b = 0; b < batches; ++b) {
            const double mb = batch_sum.row(b).sum() / (n * L);
            mean_b(b) = mb;
            var_b(b) = (batch_sum_sq.row(b).sum() - 2.0 * mb * batch_sum.row(b).sum() +
                        n * L * mb * mb) /
                       L;
        }
        const auto se = [batches](const Eigen::VectorXd& v) {
            const double m = v.mean();
            const double var = (v.array() - m).square().sum() / static_cast<double>(batches - 1);
            return std::sqrt(var / static_cast<double>(batches));
        };
        est.team_mean_se = se(mean_b);
        est.team_variance_se = se(var_b);
    }
    return est;
}

SimulationEstimate simulate(const GameModel& game, const DeterministicPolicy& policy,
                            long long horizon, std::uint64_t seed, const SimulationOptions& opts) {
    PolicyMixture mix;
    mix.base = policy;
    mix.direction = policy;
    mix.delta = 0.0;
    return simulate(game, mix, horizon, seed, opts);
}

} // namespace teamvar

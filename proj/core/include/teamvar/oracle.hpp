#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "teamvar/game_model.hpp"
#include "teamvar/numeric.hpp"

namespace teamvar {

/// Exhaustive evaluation of the joint stationary deterministic policy space.
/// Policies whose induced chain is multichain for some player are skipped and
/// counted, not errored: the oracle maps the evaluable landscape.
struct EnumerationResult {
    /// Minimum team variance over evaluated policies; +infinity when every
    /// policy was skipped.
    double global_min = 0.0;
    /// Every evaluated policy within 1e-12 of global_min, enumeration order.
    std::vector<DeterministicPolicy> argmin;
    /// All evaluated (policy, team variance) pairs, enumeration order: the
    /// last player's last state varies fastest, action ids ascending.
    std::vector<std::pair<DeterministicPolicy, double>> table;
    long long n_evaluated = 0;
    long long n_skipped_multichain = 0;
};

/// Evaluates team_metrics for every joint policy. Values are bit-identical to
/// team_metrics (same per-player evaluation and combination path). Raises
/// TooLargeError when the joint policy count exceeds cap.
EnumerationResult brute_force(const GameModel& game, long long cap = 100000,
                              const NumericSettings& num = {});

struct SimulationOptions {
    /// Steps discarded before averaging starts.
    long long burn_in = 1000;
    /// Batch count for batch-means standard errors.
    int batches = 100;
};

struct SimulationEstimate {
    long long horizon = 0;
    std::uint64_t seed = 0;
    double team_mean = 0.0;
    double team_variance = 0.0;
    /// Batch-means standard errors of the two estimates above.
    double team_mean_se = 0.0;
    double team_variance_se = 0.0;
};

/// Seeded Monte-Carlo estimate of team mean and team variance from per-player
/// trajectories of length horizon (after burn-in). Each player owns the
/// generator stream derived from (seed, player index); estimates are
/// reproducible given the seed. The deterministic-policy overload runs the
/// mixture engine at delta = 0, so both overloads produce identical
/// trajectories under identical seeds.
SimulationEstimate simulate(const GameModel& game, const PolicyMixture& mix, long long horizon,
                            std::uint64_t seed, const SimulationOptions& opts = {});
SimulationEstimate simulate(const GameModel& game, const DeterministicPolicy& policy,
                            long long horizon, std::uint64_t seed,
                            const SimulationOptions& opts = {});

} // namespace teamvar

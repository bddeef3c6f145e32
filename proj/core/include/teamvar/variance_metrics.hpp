#pragma once

#include <vector>

#include <Eigen/Dense>

#include "teamvar/chain_analysis.hpp"
#include "teamvar/game_model.hpp"
#include "teamvar/numeric.hpp"

namespace teamvar {

/// Steady-state mean and variance of one player's reward stream.
struct PlayerMetrics {
    double mean = 0.0;
    double variance = 0.0;
};

/// Team-level variance report: per-player means mu_i and variances
/// J_{sigma,i}, the team mean mu = (1/n) sum mu_i, and the team variance
/// J_sigma = sum_i J_{sigma,i} + sum_i (mu_i - mu)^2 (within-player plus
/// between-player decomposition).
struct VarianceReport {
    Eigen::VectorXd per_player_mean;
    Eigen::VectorXd per_player_variance;
    double team_mean = 0.0;
    double team_variance = 0.0;
    double within_sum = 0.0;
    double between_sum = 0.0;
};

/// Combines per-player steady-state metrics into a VarianceReport. Shared by
/// team_metrics and the brute-force oracle so the two report bitwise-equal
/// values.
VarianceReport combine_player_metrics(const std::vector<PlayerMetrics>& metrics);

/// mu_i = pi . r and J_{sigma,i} = pi . (r - mu_i 1)^2 for the chain the
/// policy induces. Throws MultichainError when the chain is not unichain.
PlayerMetrics player_metrics(const PlayerModel& player, const std::vector<int>& policy,
                             const NumericSettings& num = {});

/// Pseudo variance pi . (r - y 1)^2: the player's squared deviation from a
/// fixed pseudo mean y instead of its own mean. Equals variance + (y - mu_i)^2.
double pseudo_player_variance(const PlayerModel& player, const std::vector<int>& policy,
                              double y, const NumericSettings& num = {});

VarianceReport team_metrics(const GameModel& game, const DeterministicPolicy& policy,
                            const NumericSettings& num = {});

/// Exact steady-state evaluation of a delta-mixture: per player, the blended
/// chain's stationary distribution with first and second reward moments taken
/// over the per-step action randomization as well.
VarianceReport team_metrics(const GameModel& game, const PolicyMixture& mixture,
                            const NumericSettings& num = {});

/// Pseudo team variance J_sigma(y) = sum_i pseudo_player_variance(i, y).
/// Satisfies J_sigma(y) = J_sigma + n (y - mu)^2.
double pseudo_team_variance(const GameModel& game, const DeterministicPolicy& policy,
                            double y, const NumericSettings& num = {});

/// Per-player difference formula: the exact change of the pseudo variance
/// when player i switches from `policy` to `policy_next`,
///   pi' [ (P' - P) g + (r' - y 1)^2 - (r - y 1)^2 ],
/// where `analysis_at_policy` must hold the potential of the current chain
/// for the cost (r - y 1)^2.
double player_difference(const PlayerModel& player, const std::vector<int>& policy,
                         const std::vector<int>& policy_next, double y,
                         const ChainAnalysis& analysis_at_policy,
                         const NumericSettings& num = {});

/// Per-player analyses at a joint policy: each entry is the Poisson solution
/// of player i's induced chain for the cost (r_i - team_mean 1)^2.
struct TeamAnalysis {
    double team_mean = 0.0;
    std::vector<ChainAnalysis> per_player;
};

TeamAnalysis analyze_team(const GameModel& game, const DeterministicPolicy& policy,
                          const NumericSettings& num = {});

/// Team variance difference formula:
///   J'_sigma - J_sigma = sum_i pi'_i [ (P'_i - P_i) g_i
///                                      + (r'_i - mu 1)^2 - (r_i - mu 1)^2 ]
///                        - n (mu' - mu)^2
/// with mu the team mean at `policy`. Exact, not a bound.
double team_difference(const GameModel& game, const DeterministicPolicy& policy,
                       const DeterministicPolicy& policy_next, const NumericSettings& num = {});

/// Same, reusing a precomputed TeamAnalysis at `policy`. The value is
/// invariant to shifting any potential by a constant.
double team_difference(const GameModel& game, const DeterministicPolicy& policy,
                       const DeterministicPolicy& policy_next, const TeamAnalysis& at_policy,
                       const NumericSettings& num = {});

/// Derivative of the team variance along the delta-mixture toward
/// `direction`, evaluated at delta = 0:
///   sum_i pi_i [ (P'_i - P_i) g_i + (r'_i - mu 1)^2 - (r_i - mu 1)^2 ].
double team_derivative(const GameModel& game, const DeterministicPolicy& policy,
                       const DeterministicPolicy& direction, const NumericSettings& num = {});

double team_derivative(const GameModel& game, const DeterministicPolicy& policy,
                       const DeterministicPolicy& direction, const TeamAnalysis& at_policy,
                       const NumericSettings& num = {});

} // namespace teamvar

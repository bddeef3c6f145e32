#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "teamvar/errors.hpp"
#include "teamvar/game_model.hpp"
#include "teamvar/numeric.hpp"
#include "teamvar/variance_metrics.hpp"

namespace teamvar {

/// One iteration of the decentralized policy iteration: the evaluated policy,
/// its variance report, the per-player pseudo variances J_{sigma,i}(mu) at
/// this iteration's coordination signal, and how many (player, state)
/// decisions the improvement step changed.
struct IterationRecord {
    int iteration = 0;
    DeterministicPolicy policy;
    VarianceReport report;
    /// J_{sigma,i}(mu^{(l)}): each player's average of (r - mu 1)^2 under its
    /// current chain, with mu this iteration's team mean.
    Eigen::VectorXd pseudo_variance;
    int decisions_changed = 0;
};

enum class StationarityClass { StrictLocalMin, FirstOrderStationary };

/// Necessary-condition certificate at a policy: per-(player, state) status of
/// the elementwise optimality inequality over all admissible single-state
/// deviations, and the minimum directional derivative over all
/// single-decision deviation directions. An empty direction set yields
/// min_directional_derivative = +infinity and StrictLocalMin.
struct ConvergenceCertificate {
    std::vector<std::vector<bool>> state_satisfied;
    int violated_inequalities = 0;
    double min_directional_derivative = 0.0;
    StationarityClass classification = StationarityClass::StrictLocalMin;
};

/// Policy improvement for one player against the coordination signal:
/// per state, the admissible action minimizing
///   (r(s,a) - mu)^2 + sum_{s'} p(s'|s,a) g(s'),
/// where g is the player's potential for the cost (r - mu 1)^2 under the
/// current policy. Among minimizers within the tie band the current action is
/// kept if present, otherwise the smallest action id wins.
std::vector<int> improve_player(const PlayerModel& player, const std::vector<int>& policy,
                                double mu_signal, const NumericSettings& num = {});

/// Same, reusing a precomputed Poisson solution for the cost (r - mu 1)^2.
std::vector<int> improve_player(const PlayerModel& player, const std::vector<int>& policy,
                                double mu_signal, const ChainAnalysis& analysis,
                                const NumericSettings& num = {});

struct OptimizeResult {
    DeterministicPolicy final_policy;
    std::vector<IterationRecord> trace;
    ConvergenceCertificate certificate;
    /// True when the stopping rule (exact policy equality) fired; false when
    /// the run hit max_iters first. The trace is complete either way.
    bool converged = false;
    /// Index l of the last record; the paper counts convergence "after l
    /// iterations" with this index.
    int iterations() const { return trace.empty() ? 0 : trace.back().iteration; }
};

/// Raised when no fixed point is reached within max_iters; carries the full
/// result (trace, certificate at the last policy, converged = false).
class MaxItersError : public Error {
  public:
    MaxItersError(const std::string& what, OptimizeResult result)
        : Error(what), result_(std::move(result)) {}
    const OptimizeResult& result() const { return result_; }

  private:
    OptimizeResult result_;
};

/// Decentralized policy iteration on pseudo-variance costs coordinated by the
/// team-mean signal. Each iteration evaluates mu and every player's potential
/// exactly (linear solves), improves all players against the shared signal,
/// and stops at exact policy equality. The team variance strictly decreases
/// across records; a non-decreasing step raises Error. A policy that induces
/// a multichain raises MultichainError tagged with player and iteration.
/// Hitting max_iters without a fixed point raises MaxItersError with the
/// trace attached.
OptimizeResult run_algorithm1(const GameModel& game, const DeterministicPolicy& init,
                              int max_iters, const NumericSettings& num = {});

/// Verifies the elementwise necessary condition of optimality at `policy`
/// over every admissible single-state deviation of every player, and
/// classifies the point by the sign of the minimum directional derivative.
ConvergenceCertificate check_necessary_condition(const GameModel& game,
                                                 const DeterministicPolicy& policy,
                                                 const NumericSettings& num = {});

/// Outcome of one multistart run. `outcome` is empty when the run aborted
/// with an error (captured in `error`); non-converged runs still carry their
/// trace.
struct StartRecord {
    int start_index = 0;
    DeterministicPolicy initial_policy;
    std::optional<OptimizeResult> outcome;
    std::string error;
};

struct MultistartResult {
    std::vector<StartRecord> starts;
    /// Index of the converged start with minimal final team variance, or -1
    /// when no start converged.
    int best_start = -1;
    DeterministicPolicy best_policy;
    VarianceReport best_report;
};

/// Draws n_starts uniform random admissible initial policies from streams
/// derived from (seed, start index), runs Algorithm 1 on each, and returns
/// the best converged run. Per-start errors are recorded, not propagated.
/// Fully reproducible given the seed.
MultistartResult multistart(const GameModel& game, int n_starts, std::uint64_t seed,
                            int max_iters = 100, const NumericSettings& num = {});

/// Uniform random admissible deterministic policy from the stream derived
/// from (seed, stream_index); the draw multistart uses.
DeterministicPolicy random_policy(const GameModel& game, std::uint64_t seed,
                                  std::uint64_t stream_index);

} // namespace teamvar

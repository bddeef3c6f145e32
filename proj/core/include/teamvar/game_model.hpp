#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "teamvar/chain_analysis.hpp"
#include "teamvar/errors.hpp"
#include "teamvar/numeric.hpp"

namespace teamvar {

/// One player's finite controlled chain: states, per-state admissible
/// actions, transition kernel p_i(.|s,a) and reward r_i(s,a). Action ids are
/// dense integers 0..n_actions-1 with a per-player label table, so e.g. the
/// microgrid actions -2..+2 display with physical signs while indices stay
/// dense.
class PlayerModel {
public:
    PlayerModel(int n_states, int n_actions);

    void set_name(std::string name) { name_ = std::move(name); }
    void set_state_labels(std::vector<std::string> labels);
    void set_action_labels(std::vector<std::string> labels);

    /// Registers action `a` as admissible in state `s` with the given
    /// transition row and reward. Rows are validated when the model is
    /// validated (or when a TransitionMatrix is induced from it).
    void add_choice(int s, int a, Eigen::RowVectorXd row, double reward);

    /// Checks the structural invariants: every row a probability vector,
    /// rewards finite, admissible sets nonempty. Throws InvalidModelError.
    void validate(const NumericSettings& num = {}) const;

    int n_states() const { return n_states_; }
    int n_actions() const { return n_actions_; }
    const std::string& name() const { return name_; }
    const std::vector<std::string>& state_labels() const { return state_labels_; }
    const std::vector<std::string>& action_labels() const { return action_labels_; }

    /// Ascending list of admissible action ids in state s.
    const std::vector<int>& admissible(int s) const { return admissible_[s]; }
    bool is_admissible(int s, int a) const;

    /// Transition row for an admissible (s, a); throws InadmissibleActionError.
    Eigen::MatrixXd::ConstRowXpr transition_row(int s, int a) const;
    double reward(int s, int a) const;

    bool operator==(const PlayerModel& other) const;

private:
    void check_state(int s) const;
    void require_admissible(int s, int a) const;

    int n_states_;
    int n_actions_;
    std::string name_;
    std::vector<std::string> state_labels_;
    std::vector<std::string> action_labels_;
    std::vector<std::vector<int>> admissible_;
    std::vector<Eigen::MatrixXd> rows_;   // [s] is n_actions x n_states, NaN where inadmissible
    Eigen::MatrixXd rewards_;             // n_states x n_actions, NaN where inadmissible
};

/// A separately-controlled stochastic game: an ordered list of players whose
/// chains never read each other's state or action.
class GameModel {
public:
    explicit GameModel(std::vector<PlayerModel> players, std::string name = "",
                       const NumericSettings& num = {});

    int n_players() const { return static_cast<int>(players_.size()); }
    const PlayerModel& player(int i) const { return players_.at(i); }
    const std::vector<PlayerModel>& players() const { return players_; }
    const std::string& name() const { return name_; }

    bool operator==(const GameModel& other) const;

private:
    std::vector<PlayerModel> players_;
    std::string name_;
};

/// Stationary deterministic joint policy: action_map[i][s] is the action id
/// player i takes in its state s.
struct DeterministicPolicy {
    std::vector<std::vector<int>> action_map;

    /// Throws InadmissibleActionError if any entry is outside the admissible
    /// set, or InvalidModelError on shape mismatch.
    void validate(const GameModel& game) const;

    bool operator==(const DeterministicPolicy& other) const { return action_map == other.action_map; }
    bool operator!=(const DeterministicPolicy& other) const { return !(*this == other); }
};

/// Per-step randomization between two deterministic policies: at every epoch
/// each player plays direction's action with probability delta, base's
/// otherwise. Under this convention the blended chain and any blended cost
/// vector are affine in delta, which is what makes the derivative formula
/// exact.
struct PolicyMixture {
    DeterministicPolicy base;
    DeterministicPolicy direction;
    double delta = 0.0;

    void validate(const GameModel& game) const;
};

/// The chain one player's policy induces: row s of the matrix is
/// p(.|s, u(s)), entry s of the reward vector is r(s, u(s)).
struct InducedChain {
    TransitionMatrix matrix;
    Eigen::VectorXd reward;
};

InducedChain induced_chain(const PlayerModel& player, const std::vector<int>& policy,
                           const NumericSettings& num = {});

/// Blends two per-policy cost vectors with the mixture weights of the chain
/// they accompany.
struct CostMixer {
    double delta = 0.0;
    Eigen::VectorXd operator()(const Eigen::VectorXd& base_cost,
                               const Eigen::VectorXd& direction_cost) const {
        return (1.0 - delta) * base_cost + delta * direction_cost;
    }
};

struct MixedChain {
    TransitionMatrix matrix;
    CostMixer cost_mix;
};

/// Chain induced by the delta-mixture of two policies for one player:
/// (1-delta) P^base + delta P^direction, plus a descriptor that blends
/// per-policy cost vectors with the same weights.
MixedChain induced_mixed_chain(const PlayerModel& player, const std::vector<int>& base,
                               const std::vector<int>& direction, double delta,
                               const NumericSettings& num = {});

} // namespace teamvar

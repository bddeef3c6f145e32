#include "teamvar/game_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace teamvar {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

PlayerModel::PlayerModel(int n_states, int n_actions)
    : n_states_(n_states), n_actions_(n_actions) {
    if (n_states <= 0) throw InvalidModelError("player needs at least one state");
    if (n_actions <= 0) throw InvalidModelError("player needs at least one action");
    state_labels_.reserve(n_states);
    for (int s = 0; s < n_states; ++s) state_labels_.push_back("s" + std::to_string(s));
    action_labels_.reserve(n_actions);
    for (int a = 0; a < n_actions; ++a) action_labels_.push_back("a" + std::to_string(a));
    admissible_.resize(n_states);
    rows_.assign(n_states, Eigen::MatrixXd::Constant(n_actions, n_states, kNaN));
    rewards_ = Eigen::MatrixXd::Constant(n_states, n_actions, kNaN);
}

void PlayerModel::set_state_labels(std::vector<std::string> labels) {
    if (static_cast<int>(labels.size()) != n_states_)
        throw InvalidModelError("expected " + std::to_string(n_states_) + " state labels, got " +
                                std::to_string(labels.size()));
    state_labels_ = std::move(labels);
}

void PlayerModel::set_action_labels(std::vector<std::string> labels) {
    if (static_cast<int>(labels.size()) != n_actions_)
        throw InvalidModelError("expected " + std::to_string(n_actions_) + " action labels, got " +
                                std::to_string(labels.size()));
    action_labels_ = std::move(labels);
}

void PlayerModel::check_state(int s) const {
    if (s < 0 || s >= n_states_)
        throw InvalidModelError("state index " + std::to_string(s) + " out of range");
}

void PlayerModel::add_choice(int s, int a, Eigen::RowVectorXd row, double reward) {
    check_state(s);
    if (a < 0 || a >= n_actions_)
        throw InvalidModelError("action index " + std::to_string(a) + " out of range");
    if (row.size() != n_states_)
        throw InvalidModelError("transition row for (" + std::to_string(s) + "," +
                                std::to_string(a) + ") has length " + std::to_string(row.size()) +
                                ", expected " + std::to_string(n_states_));
    if (!is_admissible(s, a)) {
        admissible_[s].push_back(a);
        std::sort(admissible_[s].begin(), admissible_[s].end());
    }
    rows_[s].row(a) = row;
    rewards_(s, a) = reward;
}

void PlayerModel::validate(const NumericSettings& num) const {
    for (int s = 0; s < n_states_; ++s) {
        if (admissible_[s].empty())
            throw InvalidModelError("player '" + name_ + "': state " + std::to_string(s) +
                                    " has no admissible action");
        for (int a : admissible_[s]) {
            double sum = 0.0;
            for (int j = 0; j < n_states_; ++j) {
                const double p = rows_[s](a, j);
                if (!std::isfinite(p) || p < -num.row_sum_tol || p > 1.0 + num.row_sum_tol)
                    throw InvalidModelError("player '" + name_ + "': probability out of [0,1] at state " +
                                            std::to_string(s) + ", action " + std::to_string(a));
                sum += p;
            }
            if (std::abs(sum - 1.0) > num.row_sum_tol)
                throw InvalidModelError("player '" + name_ + "': transition row at state " +
                                        std::to_string(s) + ", action " + std::to_string(a) +
                                        " sums to " + std::to_string(sum));
            if (!std::isfinite(rewards_(s, a)))
                throw InvalidModelError("player '" + name_ + "': non-finite reward at state " +
                                        std::to_string(s) + ", action " + std::to_string(a));
        }
    }
}

bool PlayerModel::is_admissible(int s, int a) const {
    check_state(s);
    const auto& set = admissible_[s];
    return std::binary_search(set.begin(), set.end(), a);
}

void PlayerModel::require_admissible(int s, int a) const {
    if (!is_admissible(s, a))
        throw InadmissibleActionError("player '" + name_ + "': action " + std::to_string(a) +
                                      " is not admissible in state " + std::to_string(s));
}

Eigen::MatrixXd::ConstRowXpr PlayerModel::transition_row(int s, int a) const {
    require_admissible(s, a);
    return rows_[s].row(a);
}

double PlayerModel::reward(int s, int a) const {
    require_admissible(s, a);
    return rewards_(s, a);
}

bool PlayerModel::operator==(const PlayerModel& other) const {
    if (n_states_ != other.n_states_ || n_actions_ != other.n_actions_ ||
        name_ != other.name_ || state_labels_ != other.state_labels_ ||
        action_labels_ != other.action_labels_ || admissible_ != other.admissible_)
        return false;
    for (int s = 0; s < n_states_; ++s)
        for (int a : admissible_[s]) {
            if (rewards_(s, a) != other.rewards_(s, a)) return false;
            if (rows_[s].row(a) != other.rows_[s].row(a)) return false;
        }
    return true;
}

GameModel::GameModel(std::vector<PlayerModel> players, std::string name,
                     const NumericSettings& num)
    : players_(std::move(players)), name_(std::move(name)) {
    if (players_.empty()) throw InvalidModelError("a game needs at least one player");
    for (const auto& p : players_) p.validate(num);
}

bool GameModel::operator==(const GameModel& other) const {
    return name_ == other.name_ && players_ == other.players_;
}

void DeterministicPolicy::validate(const GameModel& game) const {
    if (static_cast<int>(action_map.size()) != game.n_players())
        throw InvalidModelError("policy covers " + std::to_string(action_map.size()) +
                                " players, game has " + std::to_string(game.n_players()));
    for (int i = 0; i < game.n_players(); ++i) {
        const auto& player = game.player(i);
        if (static_cast<int>(action_map[i].size()) != player.n_states())
            throw InvalidModelError("policy for player " + std::to_string(i) + " covers " +
                                    std::to_string(action_map[i].size()) + " states, expected " +
                                    std::to_string(player.n_states()));
        for (int s = 0; s < player.n_states(); ++s)
            if (!player.is_admissible(s, action_map[i][s]))
                throw InadmissibleActionError("policy for player " + std::to_string(i) +
                                              " takes inadmissible action " +
                                              std::to_string(action_map[i][s]) + " in state " +
                                              std::to_string(s));
    }
}

void PolicyMixture::validate(const GameModel& game) const {
    base.validate(game);
    direction.validate(game);
    if (!(delta >= 0.0 && delta <= 1.0))
        throw InvalidModelError("mixture delta " + std::to_string(delta) + " outside [0,1]");
}

InducedChain induced_chain(const PlayerModel& player, const std::vector<int>& policy,
                           const NumericSettings& num) {
    if (static_cast<int>(policy.size()) != player.n_states())
        throw InvalidModelError("policy covers " + std::to_string(policy.size()) +
                                " states, player has " + std::to_string(player.n_states()));
    const int n = player.n_states();
    Eigen::MatrixXd rows(n, n);
    Eigen::VectorXd reward(n);
    for (int s = 0; s < n; ++s) {
        rows.row(s) = player.transition_row(s, policy[s]);
        reward(s) = player.reward(s, policy[s]);
    }
    return InducedChain{TransitionMatrix(std::move(rows), num), std::move(reward)};
}

MixedChain induced_mixed_chain(const PlayerModel& player, const std::vector<int>& base,
                               const std::vector<int>& direction, double delta,
                               const NumericSettings& num) {
    if (!(delta >= 0.0 && delta <= 1.0))
        throw InvalidModelError("mixture delta " + std::to_string(delta) + " outside [0,1]");
    const InducedChain base_chain = induced_chain(player, base, num);
    const InducedChain dir_chain = induced_chain(player, direction, num);
    Eigen::MatrixXd blended =
        (1.0 - delta) * base_chain.matrix.rows() + delta * dir_chain.matrix.rows();
    return MixedChain{TransitionMatrix(std::move(blended), num), CostMixer{delta}};
}

} // namespace teamvar

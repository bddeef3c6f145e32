#include "teamvar/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "teamvar/errors.hpp"

namespace teamvar {

namespace {

using Json = nlohmann::ordered_json;

std::string number_to_string(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw ScenarioParseError(where + ": expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ScenarioParseError(where + ": missing field '" + key + "'");
    return *it;
}

std::vector<std::string> string_array(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ScenarioParseError(where + ": expected an array of strings");
    std::vector<std::string> out;
    out.reserve(j.size());
    for (const auto& item : j) {
        if (!item.is_string()) throw ScenarioParseError(where + ": expected an array of strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

double finite_number(const Json& j, const std::string& where) {
    if (!j.is_number()) throw ScenarioParseError(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ScenarioParseError(where + ": expected a finite number");
    return v;
}

PlayerModel parse_player(const Json& j, std::size_t index, const NumericSettings& num) {
    std::string where = "players[" + std::to_string(index) + "]";
    if (!j.is_object()) throw ScenarioParseError(where + ": expected an object");
    std::string name;
    if (j.contains("name")) {
        if (!j.at("name").is_string()) throw ScenarioParseError(where + ".name: expected a string");
        name = j.at("name").get<std::string>();
        where += " ('" + name + "')";
    }

    const auto action_labels = string_array(field(j, "action_labels", where), where + ".action_labels");
    if (action_labels.empty()) throw ScenarioParseError(where + ".action_labels: must be nonempty");
    const auto state_labels = string_array(field(j, "state_labels", where), where + ".state_labels");
    const Json& states = field(j, "states", where);
    if (!states.is_array() || states.empty())
        throw ScenarioParseError(where + ".states: expected a nonempty array");
    if (state_labels.size() != states.size())
        throw ScenarioParseError(where + ": " + std::to_string(state_labels.size()) +
                                 " state labels for " + std::to_string(states.size()) + " states");

    const int n_states = static_cast<int>(states.size());
    const int n_actions = static_cast<int>(action_labels.size());
    PlayerModel player(n_states, n_actions);
    player.set_name(name);
    player.set_state_labels(state_labels);
    player.set_action_labels(action_labels);

    for (int s = 0; s < n_states; ++s) {
        const std::string where_s = where + ".states[" + std::to_string(s) + "]";
        const Json& state = states[s];
        const Json& admissible = field(state, "admissible", where_s);
        const Json& transitions = field(state, "transitions", where_s);
        const Json& rewards = field(state, "rewards", where_s);
        if (!admissible.is_array() || admissible.empty())
            throw ScenarioParseError(where_s + ".admissible: expected a nonempty array");
        if (!transitions.is_array() || transitions.size() != admissible.size())
            throw ScenarioParseError(where_s + ".transitions: expected one row per admissible action");
        if (!rewards.is_array() || rewards.size() != admissible.size())
            throw ScenarioParseError(where_s + ".rewards: expected one value per admissible action");

        for (std::size_t k = 0; k < admissible.size(); ++k) {
            if (!admissible[k].is_number_integer())
                throw ScenarioParseError(where_s + ".admissible[" + std::to_string(k) +
                                         "]: expected an integer action id");
            const int a = admissible[k].get<int>();
            if (a < 0 || a >= n_actions)
                throw ScenarioParseError(where_s + ": action id " + std::to_string(a) +
                                         " outside [0, " + std::to_string(n_actions) + ")");
            if (player.is_admissible(s, a))
                throw ScenarioParseError(where_s + ": duplicate action id " + std::to_string(a));

            const std::string where_row =
                where_s + ".transitions[" + std::to_string(k) + "] (action " + std::to_string(a) + ")";
            const Json& row_j = transitions[k];
            if (!row_j.is_array() || static_cast<int>(row_j.size()) != n_states)
                throw ScenarioParseError(where_row + ": expected " + std::to_string(n_states) +
                                         " probabilities");
            Eigen::RowVectorXd row(n_states);
            for (int c = 0; c < n_states; ++c) {
                row(c) = finite_number(row_j[c], where_row + "[" + std::to_string(c) + "]");
                if (row(c) < -num.row_sum_tol || row(c) > 1.0 + num.row_sum_tol)
                    throw ScenarioParseError(where_row + "[" + std::to_string(c) +
                                             "]: probability " + number_to_string(row(c)) +
                                             " outside [0, 1]");
            }
            const double sum = row.sum();
            if (std::abs(sum - 1.0) > num.scenario_row_sum_tol)
                throw ScenarioParseError(where_row + ": row sums to " + number_to_string(sum));
            // Rows inside the load tolerance but outside the model tolerance
            // are renormalized; rows already within the model tolerance pass
            // through untouched so round-trips stay bit-identical.
            if (std::abs(sum - 1.0) > num.row_sum_tol) row /= sum;

            player.add_choice(s, a, std::move(row),
                              finite_number(rewards[k], where_s + ".rewards[" + std::to_string(k) + "]"));
        }
    }
    return player;
}

} // namespace

GameModel parse_scenario(const std::string& text, const NumericSettings& num) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ScenarioParseError("scenario: top level must be an object");
    std::string name;
    if (doc.contains("name")) {
        if (!doc.at("name").is_string()) throw ScenarioParseError("scenario.name: expected a string");
        name = doc.at("name").get<std::string>();
    }
    const Json& players_j = field(doc, "players", "scenario");
    if (!players_j.is_array() || players_j.empty())
        throw ScenarioParseError("scenario.players: expected a nonempty array");

    std::vector<PlayerModel> players;
    players.reserve(players_j.size());
    for (std::size_t i = 0; i < players_j.size(); ++i)
        players.push_back(parse_player(players_j[i], i, num));

    try {
        return GameModel(std::move(players), std::move(name), num);
    } catch (const Error& e) {
        throw ScenarioParseError(e.what());
    }
}

GameModel load_scenario(const std::filesystem::path& file, const NumericSettings& num) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ScenarioParseError("cannot open scenario file: " + file.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_scenario(buffer.str(), num);
    } catch (const ScenarioParseError& e) {
        throw ScenarioParseError(file.string() + ": " + e.what());
    }
}

std::string scenario_to_string(const GameModel& game) {
    Json doc;
    doc["name"] = game.name();
    Json players = Json::array();
    for (const auto& player : game.players()) {
        Json pj;
        pj["name"] = player.name();
        pj["state_labels"] = player.state_labels();
        pj["action_labels"] = player.action_labels();
        Json states = Json::array();
        for (int s = 0; s < player.n_states(); ++s) {
            Json sj;
            sj["admissible"] = player.admissible(s);
            Json rows = Json::array();
            Json rewards = Json::array();
            for (int a : player.admissible(s)) {
                Json row = Json::array();
                const auto p_row = player.transition_row(s, a);
                for (int c = 0; c < player.n_states(); ++c) row.push_back(p_row(c));
                rows.push_back(std::move(row));
                rewards.push_back(player.reward(s, a));
            }
            sj["transitions"] = std::move(rows);
            sj["rewards"] = std::move(rewards);
            states.push_back(std::move(sj));
        }
        pj["states"] = std::move(states);
        players.push_back(std::move(pj));
    }
    doc["players"] = std::move(players);
    return doc.dump(2) + "\n";
}

void save_scenario(const GameModel& game, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write scenario file: " + file.string());
    out << scenario_to_string(game);
    if (!out) throw Error("failed writing scenario file: " + file.string());
}

} // namespace teamvar

#pragma once

#include <filesystem>
#include <string>

#include "teamvar/game_model.hpp"
#include "teamvar/numeric.hpp"

namespace teamvar {

/// Scenario file format: one JSON object
///
///   {
///     "name": "toy",                       // optional game name
///     "players": [
///       {
///         "name": "p1",                    // optional player name
///         "state_labels": ["s0", "s1"],    // one per state
///         "action_labels": ["a0", "a1"],   // defines the action id space
///         "states": [                      // one entry per state
///           {
///             "admissible": [0, 1],        // admissible action ids
///             "transitions": [[0.9, 0.1],  // one probability row per
///                              [0.5, 0.5]],//   admissible action, aligned
///             "rewards": [0.0, 6.0]        // aligned with admissible
///           },
///           ...
///         ]
///       },
///       ...
///     ]
///   }
///
/// On load every transition row must sum to 1 within 1e-9; rows off by more
/// than the model tolerance 1e-12 but within 1e-9 are renormalized, rows
/// already within 1e-12 are taken verbatim so save/load round-trips are
/// bit-identical. All load failures raise ScenarioParseError naming the
/// offending player, state and field.

GameModel parse_scenario(const std::string& text, const NumericSettings& num = {});
GameModel load_scenario(const std::filesystem::path& file, const NumericSettings& num = {});

/// Serializes with shortest round-trip number rendering: parsing the output
/// reproduces the model bit for bit.
std::string scenario_to_string(const GameModel& game);
void save_scenario(const GameModel& game, const std::filesystem::path& file);

} // namespace teamvar

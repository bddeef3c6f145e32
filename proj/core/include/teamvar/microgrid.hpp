#pragma once

#include <vector>

#include <Eigen/Dense>

#include "teamvar/game_model.hpp"

namespace teamvar {

/// The three wind-level transition matrices of the builtin benchmark, one per
/// microgrid, over wind levels 0..5.
std::vector<Eigen::MatrixXd> default_wind_matrices();

/// Parameters of the microgrid energy-management benchmark. Defaults build
/// the 3-microgrid instance: battery capacity 5 MWh, (dis)charge power in
/// [-2, 2] MW (negative = charging), wind levels {0..5} MW, demands
/// (2, 2.5, 2) MW, and at most 2 MW sold to the main grid.
struct MicrogridParams {
    int n = 3;
    /// B_max; battery levels are the integers 0..battery_capacity, so
    /// B' = B - a stays on-grid exactly.
    int battery_capacity = 5;
    int charge_min = -2;
    int charge_max = 2;
    /// Wind power value (MW) of each level; level index selects the row of
    /// the wind matrix.
    std::vector<double> wind_values = {0, 1, 2, 3, 4, 5};
    std::vector<Eigen::MatrixXd> wind_matrices = default_wind_matrices();
    std::vector<double> demand = {2.0, 2.5, 2.0};
    double sell_cap = 2.0;
};

/// Builds the benchmark GameModel. Per microgrid i, a state is a (wind level
/// G, battery level B) pair with index G * (battery_capacity + 1) + B and
/// label "G{g}B{b}". Admissible actions at (G, B) are the integers a with
/// max(charge_min, B - battery_capacity) <= a <= min(charge_max, B), id
/// a - charge_min, label the signed value. Transitions: B' = B - a
/// deterministically, G' drawn from row G of the microgrid's wind matrix.
/// Reward: min(G + a - demand[i], sell_cap). Raises BadParamsError on
/// inconsistent parameters.
GameModel build_microgrid(const MicrogridParams& params = {});

} // namespace teamvar

#include "teamvar/microgrid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "teamvar/errors.hpp"

namespace teamvar {

std::vector<Eigen::MatrixXd> default_wind_matrices() {
    std::vector<Eigen::MatrixXd> mats(3, Eigen::MatrixXd(6, 6));
    mats[0] << 0.53, 0.18, 0.19, 0.04, 0.01, 0.05,  //
        0.51, 0.08, 0.20, 0.08, 0.02, 0.11,         //
        0.35, 0.11, 0.19, 0.11, 0.03, 0.21,         //
        0.27, 0.15, 0.15, 0.14, 0.03, 0.26,         //
        0.14, 0.11, 0.13, 0.15, 0.05, 0.42,         //
        0.09, 0.03, 0.06, 0.06, 0.03, 0.73;
    mats[1] << 0.33, 0.18, 0.19, 0.04, 0.01, 0.25,  //
        0.31, 0.08, 0.20, 0.08, 0.02, 0.31,         //
        0.15, 0.11, 0.19, 0.11, 0.03, 0.41,         //
        0.17, 0.15, 0.15, 0.14, 0.03, 0.36,         //
        0.04, 0.11, 0.13, 0.15, 0.05, 0.52,         //
        0.07, 0.03, 0.06, 0.06, 0.03, 0.75;
    mats[2] << 0.53, 0.18, 0.19, 0.04, 0.01, 0.05,  //
        0.51, 0.08, 0.20, 0.08, 0.02, 0.11,         //
        0.45, 0.11, 0.19, 0.11, 0.03, 0.11,         //
        0.37, 0.15, 0.15, 0.14, 0.03, 0.16,         //
        0.34, 0.11, 0.13, 0.15, 0.05, 0.22,         //
        0.49, 0.03, 0.06, 0.06, 0.03, 0.33;
    return mats;
}

namespace {

void validate_params(const MicrogridParams& p, const NumericSettings& num) {
    if (p.n < 1) throw BadParamsError("microgrid count must be >= 1");
    if (p.battery_capacity < 1) throw BadParamsError("battery capacity must be >= 1");
    if (p.charge_min > 0 || p.charge_max < 0)
        throw BadParamsError("charge bounds must satisfy charge_min <= 0 <= charge_max");
    if (p.wind_values.empty()) throw BadParamsError("wind level set is empty");
    if (static_cast<int>(p.wind_matrices.size()) != p.n)
        throw BadParamsError("expected " + std::to_string(p.n) + " wind matrices, got " +
                             std::to_string(p.wind_matrices.size()));
    if (static_cast<int>(p.demand.size()) != p.n)
        throw BadParamsError("expected " + std::to_string(p.n) + " demand values, got " +
                             std::to_string(p.demand.size()));
    for (double d : p.demand)
        if (!std::isfinite(d)) throw BadParamsError("demand must be finite");
    if (!std::isfinite(p.sell_cap)) throw BadParamsError("sell cap must be finite");
    for (double g : p.wind_values)
        if (!std::isfinite(g)) throw BadParamsError("wind values must be finite");

    const int levels = static_cast<int>(p.wind_values.size());
    for (int i = 0; i < p.n; ++i) {
        const auto& m = p.wind_matrices[i];
        if (m.rows() != levels || m.cols() != levels)
            throw BadParamsError("wind matrix " + std::to_string(i + 1) + " is " +
                                 std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                 ", expected " + std::to_string(levels) + "x" +
                                 std::to_string(levels));
        for (int r = 0; r < levels; ++r) {
            if (m.row(r).minCoeff() < -num.row_sum_tol)
                throw BadParamsError("wind matrix " + std::to_string(i + 1) + " row " +
                                     std::to_string(r) + " has a negative entry");
            if (std::abs(m.row(r).sum() - 1.0) > num.row_sum_tol)
                throw BadParamsError("wind matrix " + std::to_string(i + 1) + " row " +
                                     std::to_string(r) + " sums to " +
                                     std::to_string(m.row(r).sum()));
        }
    }
}

} // namespace

GameModel build_microgrid(const MicrogridParams& params) {
    const NumericSettings num;
    validate_params(params, num);

    const int levels = static_cast<int>(params.wind_values.size());
    const int batteries = params.battery_capacity + 1;
    const int n_states = levels * batteries;
    const int n_actions = params.charge_max - params.charge_min + 1;

    std::vector<std::string> state_labels(n_states);
    for (int g = 0; g < levels; ++g)
        for (int b = 0; b < batteries; ++b)
            state_labels[g * batteries + b] = "G" + std::to_string(g) + "B" + std::to_string(b);
    std::vector<std::string> action_labels(n_actions);
    for (int a = 0; a < n_actions; ++a) action_labels[a] = std::to_string(params.charge_min + a);

    std::vector<PlayerModel> players;
    players.reserve(params.n);
    for (int i = 0; i < params.n; ++i) {
        PlayerModel player(n_states, n_actions);
        player.set_name("microgrid" + std::to_string(i + 1));
        player.set_state_labels(state_labels);
        player.set_action_labels(action_labels);
        for (int g = 0; g < levels; ++g) {
            for (int b = 0; b < batteries; ++b) {
                const int s = g * batteries + b;
                const int a_lo = std::max(params.charge_min, b - params.battery_capacity);
                const int a_hi = std::min(params.charge_max, b);
                for (int a = a_lo; a <= a_hi; ++a) {
                    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n_states);
                    const int b_next = b - a;
                    for (int g_next = 0; g_next < levels; ++g_next)
                        row(g_next * batteries + b_next) = params.wind_matrices[i](g, g_next);
                    const double reward =
                        std::min(params.wind_values[g] + a - params.demand[i], params.sell_cap);
                    player.add_choice(s, a - params.charge_min, std::move(row), reward);
                }
            }
        }
        players.push_back(std::move(player));
    }
    return GameModel(std::move(players), "microgrid", num);
}

} // namespace teamvar

#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "teamvar/errors.hpp"
#include "teamvar/microgrid.hpp"
#include "teamvar/scenario.hpp"

using namespace teamvar;

namespace {

const GameModel& benchmark() {
    static const GameModel game = build_microgrid();
    return game;
}

int state_of(int g, int b) { return g * 6 + b; }
int id_of(int action) { return action + 2; }

} // namespace

TEST_CASE("benchmark shape and labels") {
    const GameModel& game = benchmark();
    CHECK(game.name() == "microgrid");
    REQUIRE(game.n_players() == 3);
    for (int i = 0; i < 3; ++i) {
        const PlayerModel& p = game.player(i);
        CHECK(p.name() == "microgrid" + std::to_string(i + 1));
        CHECK(p.n_states() == 36);
        CHECK(p.n_actions() == 5);
        CHECK(p.state_labels()[state_of(2, 3)] == "G2B3");
        CHECK(p.state_labels()[state_of(5, 0)] == "G5B0");
        CHECK(p.action_labels() ==
              std::vector<std::string>{"-2", "-1", "0", "1", "2"});
    }
}

TEST_CASE("admissible charge decisions track the battery bounds") {
    const PlayerModel& p = benchmark().player(0);

    for (int g = 0; g < 6; ++g) {
        // Full battery cannot charge further, empty cannot discharge.
        CHECK(p.admissible(state_of(g, 0)) ==
              std::vector<int>{id_of(-2), id_of(-1), id_of(0)});
        CHECK(p.admissible(state_of(g, 5)) ==
              std::vector<int>{id_of(0), id_of(1), id_of(2)});
        CHECK(p.admissible(state_of(g, 2)).size() == 5);
        CHECK(p.admissible(state_of(g, 3)).size() == 5);
        CHECK(p.admissible(state_of(g, 1)) ==
              std::vector<int>{id_of(-2), id_of(-1), id_of(0), id_of(1)});
        CHECK(p.admissible(state_of(g, 4)) ==
              std::vector<int>{id_of(-1), id_of(0), id_of(1), id_of(2)});
    }

    int pairs = 0;
    for (int s = 0; s < p.n_states(); ++s) {
        pairs += static_cast<int>(p.admissible(s).size());
        CHECK(p.is_admissible(s, id_of(0)));
    }
    CHECK(pairs == 144);
}

TEST_CASE("rewards are sold power capped at the exchange limit") {
    const GameModel& game = benchmark();

    // Wind 2 MW, discharge 1 MW, demand 2 MW: one spare MW sold.
    CHECK(game.player(0).reward(state_of(2, 3), id_of(1)) == 1.0);
    // The middle microgrid demands 2.5 MW.
    CHECK(game.player(1).reward(state_of(2, 3), id_of(1)) == 0.5);
    // Wind 5 MW alone exceeds demand; surplus hits the 2 MW cap.
    CHECK(game.player(0).reward(state_of(5, 5), id_of(0)) == 2.0);
    // Nothing blowing, full charge, high demand: the worst admissible draw.
    CHECK(game.player(1).reward(state_of(0, 0), id_of(-2)) == -4.5);

    for (int i = 0; i < 3; ++i) {
        const PlayerModel& p = game.player(i);
        for (int s = 0; s < p.n_states(); ++s)
            for (int a : p.admissible(s)) {
                CHECK(p.reward(s, a) <= 2.0);
                CHECK(p.reward(s, a) >= -4.5);
            }
    }
}

TEST_CASE("transitions move the battery deterministically and the wind by its matrix") {
    const std::vector<Eigen::MatrixXd> winds = default_wind_matrices();
    REQUIRE(winds.size() == 3);

    for (int i = 0; i < 3; ++i) {
        const PlayerModel& p = benchmark().player(i);
        // Discharging 1 MW from (G=2, B=3) lands in battery level 2.
        const auto row = p.transition_row(state_of(2, 3), id_of(1));
        for (int g_next = 0; g_next < 6; ++g_next) {
            for (int b_next = 0; b_next < 6; ++b_next) {
                const double entry = row(state_of(g_next, b_next));
                if (b_next == 2) {
                    CHECK(entry == winds[i](2, g_next));
                } else {
                    CHECK(entry == 0.0);
                }
            }
        }
    }
}

TEST_CASE("wind matrices are stochastic with the published entries") {
    const std::vector<Eigen::MatrixXd> winds = default_wind_matrices();
    REQUIRE(winds.size() == 3);
    for (const auto& w : winds) {
        REQUIRE(w.rows() == 6);
        REQUIRE(w.cols() == 6);
        for (int g = 0; g < 6; ++g) {
            CHECK(std::abs(w.row(g).sum() - 1.0) <= 1e-12);
            CHECK(w.row(g).minCoeff() > 0.0);
        }
    }

    CHECK(winds[0](0, 0) == 0.53);
    CHECK(winds[0](5, 5) == 0.73);
    CHECK(winds[1](0, 5) == 0.25);
    CHECK(winds[1](5, 5) == 0.75);
    CHECK(winds[2](2, 0) == 0.45);
    CHECK(winds[2](5, 0) == 0.49);
    CHECK(winds[2](5, 5) == 0.33);

    // The first and third sites share their two calmest rows but diverge in
    // windier regimes; the second is uniformly stormier.
    CHECK(winds[0].row(0) == winds[2].row(0));
    CHECK(winds[0].row(1) == winds[2].row(1));
    CHECK(winds[0].row(2) != winds[2].row(2));
    CHECK(winds[0].row(0) != winds[1].row(0));
}

TEST_CASE("parameter validation") {
    MicrogridParams p;
    p.n = 0;
    CHECK_THROWS_AS(build_microgrid(p), BadParamsError);

    p = MicrogridParams{};
    p.demand = {1.0, 2.0};
    CHECK_THROWS_AS(build_microgrid(p), BadParamsError);

    p = MicrogridParams{};
    p.wind_matrices.pop_back();
    CHECK_THROWS_AS(build_microgrid(p), BadParamsError);

    p = MicrogridParams{};
    p.wind_matrices[1](0, 0) += 0.1;
    CHECK_THROWS_AS(build_microgrid(p), BadParamsError);

    p = MicrogridParams{};
    p.wind_values = {0.0, 1.0};
    CHECK_THROWS_AS(build_microgrid(p), BadParamsError);

    p = MicrogridParams{};
    p.charge_min = 1;
    CHECK_THROWS_AS(build_microgrid(p), BadParamsError);

    p = MicrogridParams{};
    p.battery_capacity = 0;
    CHECK_THROWS_AS(build_microgrid(p), BadParamsError);
}

TEST_CASE("smaller instances follow the same construction rules") {
    MicrogridParams p;
    p.n = 1;
    p.battery_capacity = 2;
    p.charge_min = -1;
    p.charge_max = 1;
    p.wind_values = {0.0, 3.0};
    Eigen::MatrixXd w(2, 2);
    w << 0.7, 0.3, 0.4, 0.6;
    p.wind_matrices = {w};
    p.demand = {1.0};

    const GameModel game = build_microgrid(p);
    const PlayerModel& player = game.player(0);
    CHECK(player.n_states() == 6);
    CHECK(player.n_actions() == 3);
    CHECK(player.admissible(0) == std::vector<int>{0, 1});       // B=0: charge or idle
    CHECK(player.admissible(1) == std::vector<int>{0, 1, 2});    // B=1: all
    CHECK(player.admissible(2) == std::vector<int>{1, 2});       // B=2: no charging
    // Wind value 3 (level 1) plus 1 MW discharged, demand 1: cap binds at 2.
    CHECK(player.reward(1 * 3 + 1, 2) == 2.0);
    CHECK(player.reward(0 * 3 + 1, 0) == -2.0);  // charging with no wind
}

TEST_CASE("construction is deterministic and round-trips through the scenario format") {
    const GameModel a = build_microgrid();
    const GameModel b = build_microgrid();
    CHECK(a == b);

    const std::string text = scenario_to_string(a);
    const GameModel parsed = parse_scenario(text);
    CHECK(parsed == a);
}

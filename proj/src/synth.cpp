#include "courtcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "courtcast/csv.hpp"
#include "courtcast/dataset.hpp"
#include "courtcast/rng.hpp"

namespace courtcast::synth {

namespace {

// Column order matches data::kStatNames:
//  PTS  AST  REB  TO   STL  BLK  PM   TCHS PASS DIST PACE USG  TS
constexpr double kBase[13] = {18.0, 4.5, 6.0, 2.2, 1.1, 0.8, 0.0,
                              55.0, 40.0, 2.4, 99.0, 0.2, 0.55};
constexpr double kOffenseScale[13] = {3.0, 1.5, 2.0, 0.7, 0.0, 0.0, 1.0,
                                      8.0, 6.0, 0.3, 2.0, 0.05, 0.05};
// Defensive skill is deliberately loud in the steal and block columns: those
// two are the signal an attention head has to read off a player's opponents
// to anticipate the matchup dip.
constexpr double kDefenseScale[13] = {0.0, 0.0, 0.0, 0.0, 0.7, 0.6, 1.0,
                                      0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
// Interaction weight: how hard a strong opposing defense suppresses the stat.
// PTS is exactly 1.0 so the regression oracle reads the raw beta. Turnovers
// rise against good defenses, hence the negative entry. Steals and blocks are
// a player's own defensive output and stay matchup-free, which keeps them a
// clean read of the opposing roster's skill.
constexpr double kInteraction[13] = {1.0, 0.9, 0.8, -0.5, 0.0, 0.0, 0.8,
                                     1.5, 1.0, 0.05, 0.4, 0.005, 0.005};
constexpr double kNoiseScale[13] = {1.2, 0.6, 0.7, 0.35, 0.2, 0.18, 1.5,
                                    2.5, 2.0, 0.12, 1.0, 0.012, 0.015};

// Days since 1970-01-01 -> (y, m, d), civil Gregorian calendar.
void civil_from_days(long z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long yr = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y = static_cast<int>(yr + (m <= 2));
}

long days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

std::string format_date(long serial) {
    int y;
    unsigned m, d;
    civil_from_days(serial, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
    return buf;
}

// Reported values respect the schema: counts are non-negative, the two
// percentage columns live in [0,1], plus-minus is signed. The AR state keeps
// the unclamped value so the recurrence stays exactly linear.
double clamp_stat(int stat, double value) {
    if (stat == 6) return value;                          // PLUS_MINUS
    if (stat >= 11) return std::clamp(value, 0.0, 1.0);   // USG_PCT, TS_PCT
    return std::max(value, 0.0);
}

}  // namespace

SynthLeague generate(const SynthConfig& config) {
    if (config.teams < 2 || config.teams % 2 != 0)
        throw ConfigError("teams must be even and at least 2");
    if (config.players_per_team < 1) throw ConfigError("players_per_team must be positive");
    if (config.days < 1) throw ConfigError("days must be positive");
    if (config.games_per_day < 1 || config.games_per_day > config.teams / 2)
        throw ConfigError("games_per_day must lie in [1, teams/2]");
    if (config.alpha < 0.0 || config.alpha >= 1.0)
        throw ConfigError("alpha must lie in [0, 1)");
    if (config.beta < 0.0) throw ConfigError("beta must be non-negative");
    if (config.noise < 0.0) throw ConfigError("noise must be non-negative");

    SynthLeague league;
    league.config = config;
    Rng rng(config.seed);

    const int team_count = config.teams;
    const int roster = config.players_per_team;
    const int n = team_count * roster;

    // 1. Skills, in player order.
    league.offense.reserve(static_cast<size_t>(n));
    league.defense.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        league.offense.push_back(rng.normal());
        league.defense.push_back(rng.normal());
    }

    std::vector<double> team_def_mean(static_cast<size_t>(team_count), 0.0);
    for (int t = 0; t < team_count; ++t) {
        double sum = 0.0;
        for (int k = 0; k < roster; ++k) sum += league.defense[static_cast<size_t>(t * roster + k)];
        team_def_mean[static_cast<size_t>(t)] = sum / roster;
    }

    // 2. Calendar: day 0 fixed, later days advance 1 or 2 dates.
    std::vector<long> date_serial(static_cast<size_t>(config.days));
    date_serial[0] = days_from_civil(2023, 11, 1);
    for (int d = 1; d < config.days; ++d)
        date_serial[static_cast<size_t>(d)] =
            date_serial[static_cast<size_t>(d - 1)] + 1 + (rng.uniform() < 0.25 ? 1 : 0);

    // players.csv
    {
        std::string out = "player_id,name,team_id,team_name,position\n";
        for (int i = 0; i < n; ++i) {
            const int team = i / roster;
            const long pid = 1000 + i;
            out += std::to_string(pid) + ",Player_" + std::to_string(pid) + "," +
                   std::to_string(team + 1) + ",Team_" + std::to_string(team + 1) + "," +
                   data::kPositionNames[static_cast<size_t>(i % 5)] + "\n";
        }
        league.players_csv = std::move(out);
    }

    // 3. Schedule: circle-method round-robin played as two-game series, so
    // each pairing holds for two consecutive days the way real league
    // calendars stack back-to-back meetings. A model that reads the
    // interaction graph therefore knows tonight's opponent on every second
    // night; a model that sees one player's history in isolation never does.
    // Team 0 is fixed, the rest rotate; every fourth day the last pairing
    // rests so some teams idle (forward-fill needs real gaps to chew on).
    std::string games_csv = "game_id,date,home_team_id,away_team_id\n";
    std::string box_csv = "game_id,player_id,minutes";
    for (const char* stat : data::kStatNames) box_csv += std::string(",") + stat;
    box_csv += "\n";

    std::vector<std::vector<double>> state(static_cast<size_t>(n),
                                           std::vector<double>(13, 0.0));
    std::vector<std::vector<double>> mu(static_cast<size_t>(n), std::vector<double>(13, 0.0));
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < 13; ++s) {
            mu[static_cast<size_t>(i)][static_cast<size_t>(s)] =
                kBase[s] + kOffenseScale[s] * league.offense[static_cast<size_t>(i)] +
                kDefenseScale[s] * league.defense[static_cast<size_t>(i)];
            state[static_cast<size_t>(i)][static_cast<size_t>(s)] =
                mu[static_cast<size_t>(i)][static_cast<size_t>(s)];
        }

    long game_id = 0;
    const int rounds = team_count - 1;
    for (int day = 0; day < config.days; ++day) {
        // Pairings for this round: slot 0 is fixed, slots 1..teams-1 rotate.
        const int r = (day / 2) % rounds;
        std::vector<std::pair<int, int>> pairings;
        auto rotated = [&](int k) { return 1 + (r + k) % rounds; };
        pairings.emplace_back(0, rotated(0));
        for (int k = 1; k < team_count / 2; ++k)
            pairings.emplace_back(rotated(k), rotated(rounds - k));

        int today = std::min<int>(config.games_per_day, static_cast<int>(pairings.size()));
        if (day % 4 == 3 && today > 1) --today;  // rest day for the last pairing

        for (int g = 0; g < today; ++g) {
            const auto [home, away] = pairings[static_cast<size_t>(g)];
            ++game_id;
            games_csv += std::to_string(game_id) + "," +
                         format_date(date_serial[static_cast<size_t>(day)]) + "," +
                         std::to_string(home + 1) + "," + std::to_string(away + 1) + "\n";

            for (int side = 0; side < 2; ++side) {
                const int team = side == 0 ? home : away;
                const int opponent = side == 0 ? away : home;
                const double opp_def = team_def_mean[static_cast<size_t>(opponent)];
                for (int k = 0; k < roster; ++k) {
                    const int player = team * roster + k;
                    const double minutes = rng.uniform(6.0, 46.0);

                    auto& s_player = state[static_cast<size_t>(player)];
                    const auto& mu_player = mu[static_cast<size_t>(player)];
                    const double prev_pts = s_player[0];

                    box_csv += std::to_string(game_id) + "," + std::to_string(1000 + player) +
                               "," + csv::format_double(minutes);
                    double reported_pts = 0.0;
                    for (int s = 0; s < 13; ++s) {
                        const double eps = rng.normal();
                        const double next = mu_player[static_cast<size_t>(s)] +
                                            config.alpha * (s_player[static_cast<size_t>(s)] -
                                                            mu_player[static_cast<size_t>(s)]) +
                                            config.noise * kNoiseScale[s] * eps;
                        s_player[static_cast<size_t>(s)] = next;
                        const double reported =
                            next - config.beta * kInteraction[s] * opp_def;
                        if (s == 0) reported_pts = reported;
                        box_csv += "," + csv::format_double(clamp_stat(s, reported));
                    }
                    box_csv += "\n";

                    league.observations.push_back({day, player, prev_pts, mu_player[0],
                                                   opp_def, s_player[0], reported_pts});
                }
            }
        }
    }

    league.games_csv = std::move(games_csv);
    league.boxscores_csv = std::move(box_csv);
    return league;
}

void SynthLeague::write(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    const auto dump = [&](const char* name, const std::string& contents) {
        const auto path = std::filesystem::path(dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path.string());
        out << contents;
    };
    dump("players.csv", players_csv);
    dump("games.csv", games_csv);
    dump("boxscores.csv", boxscores_csv);
}

}  // namespace courtcast::synth

#include "courtcast/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "courtcast/csv.hpp"

namespace courtcast::data {

namespace {

bool valid_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9') return false;
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

}  // namespace

int stat_index(const std::string& name) {
    for (int i = 0; i < kStatCount; ++i)
        if (name == kStatNames[static_cast<size_t>(i)]) return i;
    throw ConfigError("unknown statistic '" + name + "'");
}

int position_index(const std::string& name) {
    for (size_t i = 0; i < kPositionNames.size(); ++i)
        if (name == kPositionNames[i]) return static_cast<int>(i);
    throw ConfigError("unknown position '" + name + "'");
}

std::vector<int> stat_indices(const std::vector<std::string>& names) {
    std::vector<int> out;
    out.reserve(names.size());
    for (const auto& name : names) out.push_back(stat_index(name));
    return out;
}

int SeasonDataset::player_index(long player_id) const {
    for (size_t i = 0; i < player_ids.size(); ++i)
        if (player_ids[i] == player_id) return static_cast<int>(i);
    return -1;
}

SeasonDataset ingest(const std::string& players_path, const std::string& games_path,
                     const std::string& boxscores_path, double minutes_threshold) {
    SeasonDataset ds;
    ds.minutes_threshold = minutes_threshold;

    // --- players.csv ---------------------------------------------------
    std::map<long, int> player_of_id;
    std::map<long, int> team_of_id;
    {
        csv::Reader reader(players_path, {"player_id", "name", "team_id", "team_name",
                                          "position"});
        std::vector<std::string> row;
        while (reader.next(row)) {
            const long pid = csv::parse_long(row[0], players_path, reader.line());
            const long tid = csv::parse_long(row[2], players_path, reader.line());
            if (player_of_id.count(pid))
                throw ParseError(players_path, reader.line(),
                                 "duplicate player id " + std::to_string(pid));

            auto team_it = team_of_id.find(tid);
            if (team_it == team_of_id.end()) {
                team_it = team_of_id.emplace(tid, ds.team_count()).first;
                ds.team_ids.push_back(tid);
                ds.team_names.push_back(row[3]);
            } else if (ds.team_names[static_cast<size_t>(team_it->second)] != row[3]) {
                throw ParseError(players_path, reader.line(),
                                 "team " + std::to_string(tid) + " renamed to '" + row[3] + "'");
            }

            int position = -1;
            try {
                position = position_index(row[4]);
            } catch (const ConfigError& e) {
                throw ParseError(players_path, reader.line(), e.what());
            }

            player_of_id.emplace(pid, ds.player_count());
            ds.player_ids.push_back(pid);
            ds.player_names.push_back(row[1]);
            ds.player_team.push_back(team_it->second);
            ds.player_position.push_back(position);
        }
    }
    if (ds.player_count() == 0) throw Error(players_path + ": no players");

    // --- games.csv ------------------------------------------------------
    struct GameRow {
        long game_id;
        std::string date;
        int home_team;
        int away_team;
    };
    std::map<long, size_t> game_of_id;
    std::vector<GameRow> games;
    {
        csv::Reader reader(games_path, {"game_id", "date", "home_team_id", "away_team_id"});
        std::vector<std::string> row;
        std::string last_date;
        while (reader.next(row)) {
            const long gid = csv::parse_long(row[0], games_path, reader.line());
            if (game_of_id.count(gid))
                throw ParseError(games_path, reader.line(),
                                 "duplicate game id " + std::to_string(gid));
            if (!valid_date(row[1]))
                throw ParseError(games_path, reader.line(), "bad date '" + row[1] + "'");
            if (!last_date.empty() && row[1] < last_date)
                throw ParseError(games_path, reader.line(),
                                 "dates out of chronological order: '" + row[1] + "' after '" +
                                     last_date + "'");
            last_date = row[1];

            const long home = csv::parse_long(row[2], games_path, reader.line());
            const long away = csv::parse_long(row[3], games_path, reader.line());
            const auto home_it = team_of_id.find(home);
            const auto away_it = team_of_id.find(away);
            if (home_it == team_of_id.end())
                throw ParseError(games_path, reader.line(),
                                 "unknown team id " + std::to_string(home));
            if (away_it == team_of_id.end())
                throw ParseError(games_path, reader.line(),
                                 "unknown team id " + std::to_string(away));
            if (home == away)
                throw ParseError(games_path, reader.line(),
                                 "team " + std::to_string(home) + " plays itself");

            game_of_id.emplace(gid, games.size());
            games.push_back({gid, row[1], home_it->second, away_it->second});
        }
    }

    // Calendar: one day per distinct date, in order.
    std::map<std::string, int> day_of_date;
    for (const auto& g : games) {
        if (!day_of_date.count(g.date)) {
            day_of_date.emplace(g.date, ds.day_count());
            ds.dates.push_back(g.date);
        }
    }
    ds.game_count = static_cast<int>(games.size());

    // --- boxscores.csv ---------------------------------------------------
    const int n = ds.player_count();
    const int T = ds.day_count();
    ds.features.assign(static_cast<size_t>(T), Tensor({n, kStatCount}));
    ds.observed.assign(static_cast<size_t>(T),
                       std::vector<std::uint8_t>(static_cast<size_t>(n), 0));
    ds.minutes.assign(static_cast<size_t>(T), std::vector<double>(static_cast<size_t>(n), 0.0));

    // Participants per game, split by roster side, for snapshot building.
    std::vector<graph::PlayerMinutes> home_side(games.size()), away_side(games.size());
    std::set<std::pair<long, long>> seen_rows;  // (game_id, player_id)
    {
        std::vector<std::string> header = {"game_id", "player_id", "minutes"};
        for (const char* stat : kStatNames) header.emplace_back(stat);
        csv::Reader reader(boxscores_path, header);
        std::vector<std::string> row;
        while (reader.next(row)) {
            const long gid = csv::parse_long(row[0], boxscores_path, reader.line());
            const long pid = csv::parse_long(row[1], boxscores_path, reader.line());
            const auto game_it = game_of_id.find(gid);
            if (game_it == game_of_id.end())
                throw ParseError(boxscores_path, reader.line(),
                                 "unknown game id " + std::to_string(gid));
            const auto player_it = player_of_id.find(pid);
            if (player_it == player_of_id.end())
                throw ParseError(boxscores_path, reader.line(),
                                 "unknown player id " + std::to_string(pid));
            if (!seen_rows.emplace(gid, pid).second)
                throw ParseError(boxscores_path, reader.line(),
                                 "duplicate box score for player " + std::to_string(pid) +
                                     " in game " + std::to_string(gid));

            const double mins = csv::parse_double(row[2], boxscores_path, reader.line());
            if (mins < 0.0)
                throw ParseError(boxscores_path, reader.line(), "negative minutes");

            const GameRow& game = games[game_it->second];
            const int player = player_it->second;
            const int team = ds.player_team[static_cast<size_t>(player)];
            if (team != game.home_team && team != game.away_team)
                throw ParseError(boxscores_path, reader.line(),
                                 "player " + std::to_string(pid) + " is not on either team of game " +
                                     std::to_string(gid));

            double stats[kStatCount];
            for (int s = 0; s < kStatCount; ++s)
                stats[s] = csv::parse_double(row[static_cast<size_t>(3 + s)], boxscores_path,
                                             reader.line());
            const int usg = stat_index("USG_PCT"), ts = stat_index("TS_PCT"),
                      dist = stat_index("DIST");
            if (stats[usg] < 0.0 || stats[usg] > 1.0 || stats[ts] < 0.0 || stats[ts] > 1.0)
                throw ParseError(boxscores_path, reader.line(),
                                 "percentage outside [0,1]");
            if (stats[dist] < 0.0)
                throw ParseError(boxscores_path, reader.line(), "negative distance");

            const int day = day_of_date.at(game.date);
            (team == game.home_team ? home_side : away_side)[game_it->second].emplace_back(
                player, mins);
            ds.minutes[static_cast<size_t>(day)][static_cast<size_t>(player)] = mins;
            if (mins >= minutes_threshold) {
                ds.observed[static_cast<size_t>(day)][static_cast<size_t>(player)] = 1;
                for (int s = 0; s < kStatCount; ++s)
                    ds.features[static_cast<size_t>(day)](player, s) = stats[s];
            }
        }
    }

    // --- snapshots --------------------------------------------------------
    std::vector<std::vector<graph::Game>> games_by_day(static_cast<size_t>(T));
    for (size_t g = 0; g < games.size(); ++g) {
        graph::Game game;
        game.game_id = static_cast<int>(games[g].game_id);
        game.team_a = std::move(home_side[g]);
        game.team_b = std::move(away_side[g]);
        games_by_day[static_cast<size_t>(day_of_date.at(games[g].date))].push_back(
            std::move(game));
    }
    ds.snapshots.reserve(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t)
        ds.snapshots.push_back(
            graph::build_snapshot(games_by_day[static_cast<size_t>(t)], minutes_threshold, t));

    return ds;
}

FilledFeatures forward_fill(const std::vector<Tensor>& raw,
                            const std::vector<std::vector<std::uint8_t>>& observed) {
    if (raw.size() != observed.size()) throw ShapeError("forward_fill: day counts disagree");
    FilledFeatures out;
    out.features = raw;
    if (raw.empty()) return out;

    const int T = static_cast<int>(raw.size());
    const int n = raw[0].dim(0);
    const int k = raw[0].dim(1);

    for (int i = 0; i < n; ++i) {
        int first_seen = -1;
        for (int t = 0; t < T; ++t) {
            if (observed[static_cast<size_t>(t)][static_cast<size_t>(i)]) {
                first_seen = t;
                break;
            }
        }
        if (first_seen == -1) {
            out.never_observed.push_back(i);
            for (int t = 0; t < T; ++t)
                for (int s = 0; s < k; ++s) out.features[static_cast<size_t>(t)](i, s) = 0.0;
            continue;
        }
        // Leading gap: backfill from the first observation.
        for (int t = 0; t < first_seen; ++t)
            for (int s = 0; s < k; ++s)
                out.features[static_cast<size_t>(t)](i, s) =
                    raw[static_cast<size_t>(first_seen)](i, s);
        // Interior gaps: carry the last observation forward.
        int last_seen = first_seen;
        for (int t = first_seen + 1; t < T; ++t) {
            if (observed[static_cast<size_t>(t)][static_cast<size_t>(i)]) {
                last_seen = t;
                continue;
            }
            for (int s = 0; s < k; ++s)
                out.features[static_cast<size_t>(t)](i, s) =
                    raw[static_cast<size_t>(last_seen)](i, s);
        }
    }
    return out;
}

NormStats normalize(std::vector<Tensor>& features, int train_day_count) {
    if (features.empty()) throw Error("normalize: no features");
    if (train_day_count < 1 || train_day_count > static_cast<int>(features.size()))
        throw Error("normalize: train day count " + std::to_string(train_day_count) +
                    " outside [1, " + std::to_string(features.size()) + "]");
    const int n = features[0].dim(0);
    const int k = features[0].dim(1);

    NormStats stats;
    stats.mean = Tensor({k});
    stats.std = Tensor({k});

    const double count = static_cast<double>(train_day_count) * n;
    for (int s = 0; s < k; ++s) {
        double sum = 0.0;
        for (int t = 0; t < train_day_count; ++t)
            for (int i = 0; i < n; ++i) sum += features[static_cast<size_t>(t)](i, s);
        const double mean = sum / count;
        double sq = 0.0;
        for (int t = 0; t < train_day_count; ++t)
            for (int i = 0; i < n; ++i) {
                const double d = features[static_cast<size_t>(t)](i, s) - mean;
                sq += d * d;
            }
        stats.mean(s) = mean;
        stats.std(s) = std::max(std::sqrt(sq / count), 1e-8);
    }

    for (auto& day : features)
        for (int i = 0; i < n; ++i)
            for (int s = 0; s < k; ++s) day(i, s) = (day(i, s) - stats.mean(s)) / stats.std(s);
    return stats;
}

void denormalize_columns(Tensor& values, const NormStats& stats,
                         const std::vector<int>& stat_ids) {
    if (values.rank() != 2 || values.dim(1) != static_cast<int>(stat_ids.size()))
        throw ShapeError("denormalize_columns: column count does not match stat ids");
    for (int i = 0; i < values.dim(0); ++i)
        for (size_t c = 0; c < stat_ids.size(); ++c)
            values(i, static_cast<int>(c)) =
                values(i, static_cast<int>(c)) * stats.std(stat_ids[c]) + stats.mean(stat_ids[c]);
}

std::vector<WindowSample> make_windows(int day_count, int t0, int horizon) {
    if (t0 < 1) throw ConfigError("window length must be at least 1");
    if (horizon != 1) throw ConfigError("only a one-day horizon is supported");
    if (day_count <= t0)
        throw ConfigError("need more than " + std::to_string(t0) + " days, have " +
                          std::to_string(day_count));
    std::vector<WindowSample> out;
    out.reserve(static_cast<size_t>(day_count - t0));
    for (int target = t0; target < day_count; ++target) out.push_back({target - t0, target});
    return out;
}

SplitIndices chrono_split(int sample_count, double train_ratio, double val_ratio,
                          double test_ratio) {
    if (std::abs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9)
        throw ConfigError("split ratios must sum to 1");
    if (train_ratio < 0 || val_ratio < 0 || test_ratio < 0)
        throw ConfigError("split ratios must be non-negative");

    SplitIndices split;
    split.total = sample_count;
    split.train_end = static_cast<int>(std::floor(sample_count * train_ratio));
    split.val_end = static_cast<int>(std::floor(sample_count * (train_ratio + val_ratio)));
    if (split.train_count() < 1 || split.val_count() < 1 || split.test_count() < 1)
        throw ConfigError("chronological split leaves an empty subset (" +
                          std::to_string(split.train_count()) + "/" +
                          std::to_string(split.val_count()) + "/" +
                          std::to_string(split.test_count()) + ")");
    return split;
}

}  // namespace courtcast::data

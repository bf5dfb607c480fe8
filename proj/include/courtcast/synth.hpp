#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "courtcast/error.hpp"

namespace courtcast::synth {

// Controls for the synthetic league. Each player statistic carries a latent
// AR(1) form trace around a skill-derived mean, and every appearance reports
// that trace pushed down by the opposing roster's average defensive skill:
//
//   state_{i,s}    <- mu_{i,s} + alpha * (state_prev - mu_{i,s})
//                     + noise * m_s * N(0,1)
//   reported_{i,s} =  state_{i,s} - beta * w_s * mean(opponent defense)
//
// with per-statistic interaction weights w_s and noise multipliers m_s.
// The matchup dip is transient: it never feeds back into the trace, so each
// box score is a corrupted view of the underlying form. The correction is
// readable only off the interaction graph (defensive skill shows up in
// opponents' steal/block columns) and is invisible to a model that sees one
// player's history in isolation, so `beta` dials the graph advantage.
struct SynthConfig {
    std::uint64_t seed = 7;
    int teams = 8;
    int players_per_team = 5;  // one player per listed position
    int days = 60;
    int games_per_day = 4;
    double alpha = 0.5;   // AR coefficient, in [0, 1)
    double beta = 1.0;    // interaction strength, >= 0
    double noise = 0.3;   // innovation scale, >= 0
};

// In-memory generated league: ground-truth skills for oracle tests plus the
// exact bytes of the three pipeline CSV files.
struct SynthLeague {
    SynthConfig config;
    std::vector<double> offense;  // per player, N(0,1)
    std::vector<double> defense;  // per player, N(0,1)

    std::string players_csv;
    std::string games_csv;
    std::string boxscores_csv;

    // One record per player appearance, carrying the unclamped values so the
    // interaction coefficient is exactly recoverable by least squares:
    // reported = (1-alpha)*mu + alpha*prev_state - beta*opp_def_mean + noise.
    struct Observation {
        int day;
        int player;
        double prev_state_pts;  // latent PTS trace before this game's update
        double mu_pts;          // player's long-run mean for PTS
        double opp_def_mean;    // opposing roster's average defensive skill
        double state_pts;       // latent PTS trace after the update
        double reported_pts;    // state_pts minus the matchup dip, pre-clamp
    };
    std::vector<Observation> observations;

    // Writes players.csv, games.csv, boxscores.csv into `dir` (created if
    // missing).
    void write(const std::string& dir) const;
};

// Deterministic in the seed: identical configs produce byte-identical files.
// `beta` scales a term without consuming random draws, so leagues generated
// with different beta share skills, schedule, minutes, and noise.
SynthLeague generate(const SynthConfig& config);

}  // namespace courtcast::synth

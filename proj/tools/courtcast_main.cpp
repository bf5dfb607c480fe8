// courtcast: one binary tying the pipeline together — synthetic league
// generation, ingest checks, interaction-graph statistics, distribution
// fitting, training, evaluation, next-day forecasting, Higher-Lower betting
// evaluation, and plot-ready artifact exports.
//
// Every subcommand is deterministic given its inputs and seed, exits 0 on
// success, and reports failures as a single `error: ...` line on stderr.
// Config precedence: CLI flag > --config file > built-in default; each run
// writes its fully resolved configuration next to its outputs.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "courtcast/config.hpp"
#include "courtcast/csv.hpp"
#include "courtcast/dataset.hpp"
#include "courtcast/distfit.hpp"
#include "courtcast/error.hpp"
#include "courtcast/graph.hpp"
#include "courtcast/metrics.hpp"
#include "courtcast/model.hpp"
#include "courtcast/synth.hpp"
#include "courtcast/tape.hpp"
#include "courtcast/training.hpp"

namespace fs = std::filesystem;
using namespace courtcast;

namespace {

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

struct DataPaths {
    std::string players;
    std::string games;
    std::string boxscores;
};

DataPaths data_paths(const std::string& dir) {
    const fs::path base(dir);
    return {(base / "players.csv").string(), (base / "games.csv").string(),
            (base / "boxscores.csv").string()};
}

data::SeasonDataset ingest_dir(const std::string& dir, double minutes_threshold) {
    const DataPaths p = data_paths(dir);
    return data::ingest(p.players, p.games, p.boxscores, minutes_threshold);
}

const std::map<std::string, std::string>& flag_help() {
    static const std::map<std::string, std::string> help = {
        {"model", "architecture: gat_tcn (default) or tcn (graph-free baseline)"},
        {"seed", "RNG seed for initialization and training (default 7)"},
        {"t0", "input window length in game days (default 10)"},
        {"epochs", "maximum training epochs (default 200)"},
        {"patience", "early-stopping patience in epochs (default 20)"},
        {"lr", "Adam learning rate (default 0.001)"},
        {"weight_decay", "L2 weight decay folded into the gradient (default 0.001)"},
        {"heads", "attention heads (default 4)"},
        {"gat_dim", "attention output width, all heads concatenated (default 32)"},
        {"tcn_dim", "temporal convolution channels (default 64)"},
        {"kernel", "temporal convolution kernel size (default 3)"},
        {"dropout", "attention dropout probability (default 0)"},
        {"targets", "comma-separated statistics to forecast (default PTS,REB,AST,STL,BLK,TO)"},
        {"mape_eps", "denominator floor for MAPE, original units (default 1)"},
        {"bins", "histogram bins for distribution fitting (default 40)"},
        {"minutes_threshold", "minutes required to count an appearance (default 10)"},
    };
    return help;
}

// Declares --<key> flags (underscores become dashes) whose values run through
// the config key table, plus an optional --config file underneath them.
class ConfigFlags {
  public:
    ConfigFlags(CLI::App* cmd, const std::vector<std::string>& keys, bool with_config_file) {
        if (with_config_file) {
            config_opt_ = cmd->add_option("--config", config_path_,
                                          "key=value config file layered under the flags")
                              ->check(CLI::ExistingFile);
        }
        for (const std::string& key : keys) {
            std::string flag = "--" + key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            auto slot = std::make_shared<std::string>();
            Entry entry{cmd->add_option(flag, *slot, flag_help().at(key)), key, slot};
            entries_.push_back(std::move(entry));
        }
    }

    config::RunConfig resolve(config::RunConfig base = {}) const {
        if (config_opt_ != nullptr && config_opt_->count() > 0) {
            base = config::load_config_file(config_path_, base);
        }
        for (const Entry& e : entries_) {
            if (e.opt->count() > 0) config::apply_key(base, e.key, *e.value);
        }
        return base;
    }

  private:
    struct Entry {
        CLI::Option* opt;
        std::string key;
        std::shared_ptr<std::string> value;
    };
    std::string config_path_;
    CLI::Option* config_opt_ = nullptr;
    std::vector<Entry> entries_;
};

std::vector<std::string> all_config_keys() {
    std::vector<std::string> keys;
    for (const auto& [key, text] : flag_help()) keys.push_back(key);
    return keys;
}

config::RunConfig load_run_config(const std::string& run_dir) {
    const fs::path path = fs::path(run_dir) / "run_config.txt";
    if (!fs::exists(path)) {
        throw Error("no resolved config at " + path.string() + " (is this a train output dir?)");
    }
    return config::load_config_file(path.string());
}

std::string resolve_data_dir(const std::string& run_dir, const std::string& data_flag) {
    if (!data_flag.empty()) return data_flag;
    const fs::path path = fs::path(run_dir) / "data_dir.txt";
    std::ifstream in(path);
    std::string line;
    if (!in || !std::getline(in, line) || line.empty()) {
        throw Error("no --data given and " + path.string() + " is missing");
    }
    return line;
}

// Z-scores every day slice with archived statistics (the exact transform the
// model was trained under, regardless of what data it now sees).
std::vector<Tensor> apply_stats(const std::vector<Tensor>& filled, const data::NormStats& stats) {
    const Eigen::ArrayXd mean = stats.mean.array();
    const Eigen::ArrayXd stddev = stats.std.array();
    std::vector<Tensor> out = filled;
    for (Tensor& day : out) {
        auto m = day.matrix();
        m = ((m.array().rowwise() - mean.transpose()).rowwise() / stddev.transpose()).matrix();
    }
    return out;
}

// Everything the run-based subcommands (eval/predict/bet-eval/export-*) share:
// the run's resolved config, its archived model, and the dataset prepared the
// way that model expects to see it.
struct RunContext {
    config::RunConfig run;
    data::SeasonDataset ds;
    model::ModelConfig mc;
    training::LoadedModel loaded;
    std::vector<int> target_cols;
    std::vector<std::string> target_names;
    std::vector<Tensor> filled;  // original units, gaps forward-filled
    std::vector<Tensor> norm;    // z-scored with the archived statistics
    std::vector<graph::DirectedEdges> edges;
};

RunContext load_run_context(const std::string& run_dir, const std::string& data_flag,
                            const ConfigFlags& flags) {
    RunContext ctx;
    ctx.run = flags.resolve(load_run_config(run_dir));
    ctx.ds = ingest_dir(resolve_data_dir(run_dir, data_flag), ctx.run.minutes_threshold);
    ctx.mc = ctx.run.model_config(ctx.ds.team_count(),
                                  static_cast<int>(data::kPositionNames.size()));
    ctx.loaded = training::load_model((fs::path(run_dir) / "model.bin").string(), ctx.mc,
                                      ctx.run.arch());
    ctx.target_names = ctx.run.target_list();
    ctx.target_cols = data::stat_indices(ctx.target_names);
    ctx.filled = data::forward_fill(ctx.ds.features, ctx.ds.observed).features;
    ctx.norm = apply_stats(ctx.filled, ctx.loaded.stats);
    for (int t = 0; t < ctx.ds.day_count(); ++t) {
        ctx.edges.push_back(graph::directed_edges(ctx.ds.snapshots[static_cast<size_t>(t)],
                                                  ctx.ds.player_count()));
    }
    return ctx;
}

// Forecast for `target_day` (== day_count() means the day after the data
// ends) from the t0 days before it, in original units, one row per player.
Tensor forecast_day(const RunContext& ctx, int target_day) {
    const int t0 = ctx.run.t0;
    if (target_day < t0 || target_day > ctx.ds.day_count()) {
        throw Error("cannot forecast day " + std::to_string(target_day) + ": need the " +
                    std::to_string(t0) + " game days before it (data covers 0.." +
                    std::to_string(ctx.ds.day_count() - 1) + ")");
    }
    std::vector<Tensor> window(ctx.norm.begin() + (target_day - t0),
                               ctx.norm.begin() + target_day);
    std::vector<const graph::DirectedEdges*> edge_ptrs;
    for (int t = target_day - t0; t < target_day; ++t) {
        edge_ptrs.push_back(&ctx.edges[static_cast<size_t>(t)]);
    }
    ad::Tape tape;
    const model::BoundParams bound = model::bind(tape, ctx.loaded.params);
    Rng unused(0);
    const ad::Var out = model::forward_window(tape, window, edge_ptrs, ctx.ds.player_team,
                                              ctx.ds.player_position, bound, ctx.mc,
                                              ctx.run.arch(), false, unused);
    Tensor pred = tape.value(out);
    data::denormalize_columns(pred, ctx.loaded.stats, ctx.target_cols);
    return pred;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
    if (!out) throw Error("failed writing " + path);
}

// The resolved-config sidecar for single-file outputs.
void write_sidecar(const std::string& out_file, const config::RunConfig& run) {
    config::write_resolved(out_file + ".config", run);
}

std::string format_fixed(double value, int digits) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << value;
    return out.str();
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string out;
    synth::SynthConfig config;
};

void run_synth(const SynthArgs& args) {
    const synth::SynthLeague league = synth::generate(args.config);
    fs::create_directories(args.out);
    league.write(args.out);

    std::string resolved;
    resolved += "alpha=" + csv::format_double(args.config.alpha) + "\n";
    resolved += "beta=" + csv::format_double(args.config.beta) + "\n";
    resolved += "days=" + std::to_string(args.config.days) + "\n";
    resolved += "games_per_day=" + std::to_string(args.config.games_per_day) + "\n";
    resolved += "noise=" + csv::format_double(args.config.noise) + "\n";
    resolved += "players_per_team=" + std::to_string(args.config.players_per_team) + "\n";
    resolved += "seed=" + std::to_string(args.config.seed) + "\n";
    resolved += "teams=" + std::to_string(args.config.teams) + "\n";
    write_text_file((fs::path(args.out) / "synth_config.txt").string(), resolved);

    std::cout << "wrote players.csv games.csv boxscores.csv synth_config.txt to " << args.out
              << "\n";
}

// ---------------------------------------------------------------------------
// ingest-check
// ---------------------------------------------------------------------------

struct IngestArgs {
    std::string data;
    std::shared_ptr<ConfigFlags> flags;
};

void run_ingest_check(const IngestArgs& args) {
    const config::RunConfig run = args.flags->resolve();
    const data::SeasonDataset ds = ingest_dir(args.data, run.minutes_threshold);
    long observed = 0;
    long sub_threshold = 0;
    for (int t = 0; t < ds.day_count(); ++t) {
        for (int i = 0; i < ds.player_count(); ++i) {
            if (ds.observed[static_cast<size_t>(t)][static_cast<size_t>(i)]) {
                ++observed;
            } else if (ds.minutes[static_cast<size_t>(t)][static_cast<size_t>(i)] > 0.0) {
                ++sub_threshold;
            }
        }
    }
    std::cout << "ok players=" << ds.player_count() << " teams=" << ds.team_count()
              << " game_days=" << ds.day_count() << " games=" << ds.game_count
              << " observed_rows=" << observed << " sub_threshold_rows=" << sub_threshold
              << "\n";
}

// ---------------------------------------------------------------------------
// graph-stats
// ---------------------------------------------------------------------------

struct GraphStatsArgs {
    std::string data;
    std::string out;
    std::shared_ptr<ConfigFlags> flags;
};

void run_graph_stats(const GraphStatsArgs& args) {
    const config::RunConfig run = args.flags->resolve();
    const data::SeasonDataset ds = ingest_dir(args.data, run.minutes_threshold);
    const int n = ds.player_count();

    std::string table = "day,date,cliques,sizes,spectrum_deviation\n";
    double max_dev = 0.0;
    for (int t = 0; t < ds.day_count(); ++t) {
        const Eigen::MatrixXi adj = graph::adjacency(ds.snapshots[static_cast<size_t>(t)], n);
        const std::vector<int> sizes = graph::verify_cluster_structure(adj);
        const std::vector<double> analytic =
            graph::analytic_spectrum(sizes, n).sorted_eigenvalues();
        const Eigen::MatrixXd lap = graph::laplacian(adj).cast<double>();
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
        double dev = 0.0;
        for (int i = 0; i < n; ++i) {
            dev = std::max(dev,
                           std::abs(solver.eigenvalues()(i) - analytic[static_cast<size_t>(i)]));
        }
        max_dev = std::max(max_dev, dev);

        std::string joined;
        for (size_t c = 0; c < sizes.size(); ++c) {
            if (c > 0) joined += '|';
            joined += std::to_string(sizes[c]);
        }
        table += std::to_string(t) + "," + ds.dates[static_cast<size_t>(t)] + "," +
                 std::to_string(sizes.size()) + "," + joined + "," + csv::format_double(dev) +
                 "\n";
    }
    std::cout << table;
    if (!args.out.empty()) {
        write_text_file(args.out, table);
        write_sidecar(args.out, run);
    }
    const bool ok = max_dev < 1e-8;
    std::cout << "spectrum check: max deviation " << csv::format_double(max_dev) << " over "
              << ds.day_count() << " days (tolerance 1e-8): " << (ok ? "OK" : "FAIL") << "\n";
    if (!ok) throw Error("spectrum deviation " + csv::format_double(max_dev) + " exceeds 1e-8");
}

// ---------------------------------------------------------------------------
// distfit
// ---------------------------------------------------------------------------

struct DistfitArgs {
    std::string data;
    std::string out;
    bool all_families = false;
    std::shared_ptr<ConfigFlags> flags;
};

std::string fit_row(const std::string& stat, const dist::FitResult& fit) {
    std::string row = stat + "," + fit.family + "," + csv::format_double(fit.loc) + "," +
                      csv::format_double(fit.scale) + ",";
    row += fit.shape.empty() ? "" : csv::format_double(fit.shape[0]);
    row += ",";
    row += fit.shape.size() < 2 ? "" : csv::format_double(fit.shape[1]);
    row += "," + csv::format_double(fit.rss) + "\n";
    return row;
}

void run_distfit(const DistfitArgs& args) {
    const config::RunConfig run = args.flags->resolve();
    const data::SeasonDataset ds = ingest_dir(args.data, run.minutes_threshold);

    std::string table = "statistic,family,loc,scale,shape1,shape2,rss\n";
    for (int s = 0; s < data::kStatCount; ++s) {
        const std::string stat = data::kStatNames[static_cast<size_t>(s)];
        std::vector<double> samples;
        for (int t = 0; t < ds.day_count(); ++t) {
            for (int i = 0; i < ds.player_count(); ++i) {
                if (ds.observed[static_cast<size_t>(t)][static_cast<size_t>(i)]) {
                    samples.push_back(ds.features[static_cast<size_t>(t)](i, s));
                }
            }
        }
        std::vector<std::string> warnings;
        const dist::FitResult best = dist::best_fit(samples, run.bins, &warnings);
        for (const std::string& w : warnings) std::cerr << "warning: " << stat << ": " << w << "\n";
        table += fit_row(stat, best);
        if (args.all_families) {
            for (const std::string& family : dist::family_names()) {
                try {
                    table += fit_row(stat, dist::fit_family(samples, family, run.bins));
                } catch (const Error&) {
                    // already reported via best_fit warnings
                }
            }
        }
    }
    std::cout << table;
    if (!args.out.empty()) {
        write_text_file(args.out, table);
        write_sidecar(args.out, run);
        std::cout << "wrote " << args.out << "\n";
    }
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string data;
    std::string out;
    std::shared_ptr<ConfigFlags> flags;
};

void run_train(const TrainArgs& args) {
    const config::RunConfig run = args.flags->resolve();
    const data::SeasonDataset ds = ingest_dir(args.data, run.minutes_threshold);
    const training::TrainConfig tc = run.train_config();
    const training::PreparedData prepared = training::prepare(ds, tc);
    const model::ModelConfig mc =
        run.model_config(ds.team_count(), static_cast<int>(data::kPositionNames.size()));

    std::cout << "training " << run.model << " on " << ds.day_count() << " days, "
              << ds.player_count() << " players; windows train/val/test = "
              << prepared.split.train_count() << "/" << prepared.split.val_count() << "/"
              << prepared.split.test_count() << "\n";

    const training::TrainResult result = training::train(prepared, mc, tc, run.arch());

    fs::create_directories(args.out);
    const fs::path out(args.out);
    config::write_resolved((out / "run_config.txt").string(), run);
    write_text_file((out / "data_dir.txt").string(), args.data + "\n");
    training::save_model((out / "model.bin").string(), result.params, prepared.stats, run.seed);
    // Wall-clock timings vary run to run, so the persisted log drops them and
    // stays byte-identical across same-seed runs.
    write_text_file((out / "train_log.csv").string(), result.log.to_csv(false));

    double seconds = 0.0;
    for (const auto& e : result.log.epochs) seconds += e.seconds;
    std::cout << "best epoch " << result.log.best_epoch << "/" << result.log.epochs.size()
              << ", validation RMSE " << format_fixed(result.log.best_val_rmse, 4) << " ("
              << format_fixed(seconds, 1) << "s)\n";
    std::cout << "wrote run_config.txt model.bin train_log.csv data_dir.txt to " << args.out
              << "\n";
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string run_dir;
    std::string data;
    std::string split = "test";
    std::shared_ptr<ConfigFlags> flags;
};

training::Split parse_split(const std::string& name) {
    if (name == "train") return training::Split::train;
    if (name == "val") return training::Split::val;
    if (name == "test") return training::Split::test;
    throw ConfigError("unknown split '" + name + "' (expected train, val, or test)");
}

void run_eval(const EvalArgs& args) {
    const RunContext ctx = load_run_context(args.run_dir, args.data, *args.flags);
    const training::Split split = parse_split(args.split);
    const training::TrainConfig tc = ctx.run.train_config();
    const training::PreparedData prepared = training::prepare(ctx.ds, tc);

    const training::SplitPrediction sp =
        training::predict_split(prepared, ctx.loaded.params, ctx.mc, split);
    const metrics::EvalReport report =
        metrics::evaluate(sp.pred, sp.actual, sp.row_mask, ctx.target_names, ctx.run.mape_eps);

    const training::SplitPrediction base = training::persistence_split(prepared, split);
    const metrics::EvalReport base_report =
        metrics::evaluate(base.pred, base.actual, base.row_mask, ctx.target_names,
                          ctx.run.mape_eps);

    std::cout << args.split << " split, model " << ctx.run.model << ":\n"
              << report.to_table() << "persistence baseline: rmse="
              << format_fixed(base_report.rmse, 4) << " mae=" << format_fixed(base_report.mae, 4)
              << " corr=" << format_fixed(base_report.corr, 4) << "\n";

    const fs::path out = fs::path(args.run_dir) / ("eval_" + args.split + ".csv");
    write_text_file(out.string(), report.to_csv());
    const fs::path base_out = fs::path(args.run_dir) / ("eval_" + args.split + "_persistence.csv");
    write_text_file(base_out.string(), base_report.to_csv());
    write_sidecar(out.string(), ctx.run);
    std::cout << "wrote " << out.string() << " and " << base_out.string() << "\n";
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

struct PredictArgs {
    std::string run_dir;
    std::string data;
    std::string out;
    std::shared_ptr<ConfigFlags> flags;
};

void run_predict(const PredictArgs& args) {
    const RunContext ctx = load_run_context(args.run_dir, args.data, *args.flags);
    const Tensor pred = forecast_day(ctx, ctx.ds.day_count());

    std::string table = "player_id,name";
    for (const std::string& t : ctx.target_names) table += "," + t;
    table += "\n";
    for (int i = 0; i < ctx.ds.player_count(); ++i) {
        table += std::to_string(ctx.ds.player_ids[static_cast<size_t>(i)]) + "," +
                 ctx.ds.player_names[static_cast<size_t>(i)];
        for (int j = 0; j < pred.dim(1); ++j) table += "," + csv::format_double(pred(i, j));
        table += "\n";
    }
    const std::string out = args.out.empty()
                                ? (fs::path(args.run_dir) / "predictions.csv").string()
                                : args.out;
    write_text_file(out, table);
    write_sidecar(out, ctx.run);
    std::cout << "wrote " << ctx.ds.player_count() << " player forecasts for the day after "
              << ctx.ds.dates.back() << " to " << out << "\n";
}

// ---------------------------------------------------------------------------
// bet-eval
// ---------------------------------------------------------------------------

struct BetArgs {
    std::string run_dir;
    std::string data;
    std::string lines;
    std::string out;
    std::shared_ptr<ConfigFlags> flags;
};

// A stat expression is one target name or a '+'-joined sum of target names.
std::vector<int> expr_columns(const std::string& expr,
                              const std::vector<std::string>& target_names) {
    std::vector<int> cols;
    std::string token;
    std::istringstream in(expr);
    while (std::getline(in, token, '+')) {
        const auto it = std::find(target_names.begin(), target_names.end(), token);
        if (it == target_names.end()) {
            throw Error("stat expression '" + expr + "' references '" + token +
                        "', which this run does not forecast (targets: " +
                        csv::join_fields(target_names) + ")");
        }
        cols.push_back(static_cast<int>(it - target_names.begin()));
    }
    if (cols.empty()) throw Error("empty stat expression");
    return cols;
}

void run_bet_eval(const BetArgs& args) {
    const RunContext ctx = load_run_context(args.run_dir, args.data, *args.flags);

    std::map<std::string, int> day_of_date;
    for (int t = 0; t < ctx.ds.day_count(); ++t) day_of_date[ctx.ds.dates[static_cast<size_t>(t)]] = t;

    csv::Reader reader(args.lines, {"date", "player_id", "stat_expr", "threshold", "actual"});
    std::vector<metrics::BetLine> lines;
    std::vector<std::string> fields;
    std::map<int, Tensor> forecasts;  // target day -> [n x targets]
    while (reader.next(fields)) {
        metrics::BetLine line;
        line.date = fields[0];
        line.player_id = csv::parse_long(fields[1], args.lines, reader.line());
        line.stat_expr = fields[2];
        line.threshold = csv::parse_double(fields[3], args.lines, reader.line());
        line.actual = csv::parse_double(fields[4], args.lines, reader.line());

        const auto day_it = day_of_date.find(line.date);
        if (day_it == day_of_date.end()) {
            throw Error(args.lines + ":" + std::to_string(reader.line()) + ": date " +
                        line.date + " is not a game day in the dataset");
        }
        const int player = ctx.ds.player_index(line.player_id);
        if (player < 0) {
            throw Error(args.lines + ":" + std::to_string(reader.line()) +
                        ": unknown player id " + fields[1]);
        }
        auto forecast_it = forecasts.find(day_it->second);
        if (forecast_it == forecasts.end()) {
            forecast_it = forecasts.emplace(day_it->second,
                                            forecast_day(ctx, day_it->second)).first;
        }
        double predicted = 0.0;
        for (int col : expr_columns(line.stat_expr, ctx.target_names)) {
            predicted += forecast_it->second(player, col);
        }
        line.predicted = predicted;
        lines.push_back(std::move(line));
    }
    if (lines.empty()) throw Error(args.lines + ": no betting lines found");

    const metrics::BetSummary summary = metrics::bet_eval(lines);

    std::string table = "date,player_id,stat_expr,threshold,actual,predicted,result\n";
    for (const metrics::BetLine& line : lines) {
        std::string result = "incorrect";
        if (line.actual == line.threshold) {
            result = "push";
        } else if (line.predicted != line.threshold &&
                   (line.predicted > line.threshold) == (line.actual > line.threshold)) {
            result = "correct";
        }
        table += line.date + "," + std::to_string(line.player_id) + "," + line.stat_expr + "," +
                 csv::format_double(line.threshold) + "," + csv::format_double(line.actual) +
                 "," + csv::format_double(line.predicted) + "," + result + "\n";
    }
    const std::string out = args.out.empty()
                                ? (fs::path(args.run_dir) / "bet_eval.csv").string()
                                : args.out;
    write_text_file(out, table);
    write_sidecar(out, ctx.run);

    std::cout << "accuracy: " << summary.correct << "/" << summary.total
              << " (pushes excluded) = " << format_fixed(summary.accuracy, 4)
              << ", pushes: " << summary.pushes << "\n";
    std::cout << "wrote " << out << "\n";
}

// ---------------------------------------------------------------------------
// export-attention
// ---------------------------------------------------------------------------

struct AttentionArgs {
    std::string run_dir;
    std::string data;
    std::string out;
    int day = -1;  // -1 means the last day
    std::shared_ptr<ConfigFlags> flags;
};

void run_export_attention(const AttentionArgs& args) {
    const RunContext ctx = load_run_context(args.run_dir, args.data, *args.flags);
    const int day = args.day < 0 ? ctx.ds.day_count() - 1 : args.day;
    if (day >= ctx.ds.day_count()) {
        throw Error("day " + std::to_string(day) + " outside 0.." +
                    std::to_string(ctx.ds.day_count() - 1));
    }
    const Eigen::MatrixXd attn = model::attention_matrix(
        ctx.norm[static_cast<size_t>(day)], ctx.edges[static_cast<size_t>(day)],
        ctx.ds.player_team, ctx.ds.player_position, ctx.loaded.params, ctx.mc);

    // Max-over-heads edge weights; the self-loop diagonal is dropped.
    std::string table = "from_player_id,to_player_id,weight\n";
    long rows = 0;
    for (int i = 0; i < attn.rows(); ++i) {
        for (int j = 0; j < attn.cols(); ++j) {
            if (i == j || attn(i, j) == 0.0) continue;
            table += std::to_string(ctx.ds.player_ids[static_cast<size_t>(i)]) + "," +
                     std::to_string(ctx.ds.player_ids[static_cast<size_t>(j)]) + "," +
                     csv::format_double(attn(i, j)) + "\n";
            ++rows;
        }
    }
    const std::string out = args.out.empty()
                                ? (fs::path(args.run_dir) / "attention.csv").string()
                                : args.out;
    write_text_file(out, table);
    write_sidecar(out, ctx.run);
    std::cout << "wrote " << rows << " attention edges for "
              << ctx.ds.dates[static_cast<size_t>(day)] << " to " << out << "\n";
}

// ---------------------------------------------------------------------------
// export-embeddings
// ---------------------------------------------------------------------------

struct EmbeddingsArgs {
    std::string run_dir;
    std::string data;
    std::string out;
    std::shared_ptr<ConfigFlags> flags;
};

void run_export_embeddings(const EmbeddingsArgs& args) {
    const RunContext ctx = load_run_context(args.run_dir, args.data, *args.flags);
    if (ctx.mc.team_emb_dim != 2 || ctx.mc.pos_emb_dim != 2) {
        throw Error("embedding export needs 2-D embeddings, run has team_emb_dim=" +
                    std::to_string(ctx.mc.team_emb_dim) + " pos_emb_dim=" +
                    std::to_string(ctx.mc.pos_emb_dim));
    }
    const Tensor& team = ctx.loaded.params.find("emb.team").value;
    const Tensor& pos = ctx.loaded.params.find("emb.pos").value;

    std::string table = "kind,id,label,x,y\n";
    for (int k = 0; k < ctx.ds.team_count(); ++k) {
        table += "team," + std::to_string(ctx.ds.team_ids[static_cast<size_t>(k)]) + "," +
                 ctx.ds.team_names[static_cast<size_t>(k)] + "," +
                 csv::format_double(team(k, 0)) + "," + csv::format_double(team(k, 1)) + "\n";
    }
    for (size_t j = 0; j < data::kPositionNames.size(); ++j) {
        table += "position," + std::to_string(j) + "," + std::string(data::kPositionNames[j]) +
                 "," + csv::format_double(pos(static_cast<int>(j), 0)) + "," +
                 csv::format_double(pos(static_cast<int>(j), 1)) + "\n";
    }
    const std::string out = args.out.empty()
                                ? (fs::path(args.run_dir) / "embeddings.csv").string()
                                : args.out;
    write_text_file(out, table);
    write_sidecar(out, ctx.run);
    std::cout << "wrote " << ctx.ds.team_count() << " team and "
              << data::kPositionNames.size() << " position embeddings to " << out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"player performance forecasting over daily interaction graphs"};
    app.require_subcommand(1);
    app.failure_message([](const CLI::App*, const CLI::Error& e) {
        return "error: " + std::string(e.what()) + "\n";
    });

    // synth
    auto synth_args = std::make_shared<SynthArgs>();
    {
        CLI::App* cmd = app.add_subcommand("synth", "generate a synthetic league as CSV files");
        cmd->add_option("--out", synth_args->out, "output directory")->required();
        cmd->add_option("--seed", synth_args->config.seed, "RNG seed (default 7)");
        cmd->add_option("--teams", synth_args->config.teams, "team count, even (default 8)");
        cmd->add_option("--players-per-team", synth_args->config.players_per_team,
                        "roster size (default 8)");
        cmd->add_option("--days", synth_args->config.days, "game days (default 60)");
        cmd->add_option("--games-per-day", synth_args->config.games_per_day,
                        "games per day, at most teams/2 (default 4)");
        cmd->add_option("--alpha", synth_args->config.alpha, "AR coefficient in [0,1) (default 0.7)");
        cmd->add_option("--beta", synth_args->config.beta,
                        "opponent interaction strength >= 0 (default 1)");
        cmd->add_option("--noise", synth_args->config.noise, "innovation scale (default 0.3)");
        cmd->callback([synth_args] { run_synth(*synth_args); });
    }

    // ingest-check
    auto ingest_args = std::make_shared<IngestArgs>();
    {
        CLI::App* cmd = app.add_subcommand("ingest-check",
                                           "validate a data directory and print its shape");
        cmd->add_option("--data", ingest_args->data,
                        "directory holding players.csv, games.csv, boxscores.csv")
            ->required();
        ingest_args->flags =
            std::make_shared<ConfigFlags>(cmd, std::vector<std::string>{"minutes_threshold"},
                                          true);
        cmd->callback([ingest_args] { run_ingest_check(*ingest_args); });
    }

    // graph-stats
    auto graph_args = std::make_shared<GraphStatsArgs>();
    {
        CLI::App* cmd = app.add_subcommand(
            "graph-stats", "per-day clique sizes and the analytic-vs-numeric spectrum check");
        cmd->add_option("--data", graph_args->data, "data directory")->required();
        cmd->add_option("--out", graph_args->out, "also write the table to this CSV file");
        graph_args->flags =
            std::make_shared<ConfigFlags>(cmd, std::vector<std::string>{"minutes_threshold"},
                                          true);
        cmd->callback([graph_args] { run_graph_stats(*graph_args); });
    }

    // distfit
    auto distfit_args = std::make_shared<DistfitArgs>();
    {
        CLI::App* cmd = app.add_subcommand(
            "distfit", "fit six distribution families to every statistic, pick by RSS");
        cmd->add_option("--data", distfit_args->data, "data directory")->required();
        cmd->add_option("--out", distfit_args->out, "write the report to this CSV file");
        cmd->add_flag("--all-families", distfit_args->all_families,
                      "append one row per family after the winners");
        distfit_args->flags = std::make_shared<ConfigFlags>(
            cmd, std::vector<std::string>{"bins", "minutes_threshold"}, true);
        cmd->callback([distfit_args] { run_distfit(*distfit_args); });
    }

    // train
    auto train_args = std::make_shared<TrainArgs>();
    {
        CLI::App* cmd = app.add_subcommand("train", "train a forecaster and archive the run");
        cmd->add_option("--data", train_args->data, "data directory")->required();
        cmd->add_option("--out", train_args->out, "run output directory")->required();
        train_args->flags = std::make_shared<ConfigFlags>(cmd, all_config_keys(), true);
        cmd->callback([train_args] { run_train(*train_args); });
    }

    // eval
    auto eval_args = std::make_shared<EvalArgs>();
    {
        CLI::App* cmd = app.add_subcommand("eval", "score an archived run on one split");
        cmd->add_option("--run", eval_args->run_dir, "train output directory")->required();
        cmd->add_option("--data", eval_args->data,
                        "data directory (default: the one recorded by train)");
        cmd->add_option("--split", eval_args->split, "train, val, or test (default test)");
        eval_args->flags = std::make_shared<ConfigFlags>(
            cmd, std::vector<std::string>{"mape_eps"}, false);
        cmd->callback([eval_args] { run_eval(*eval_args); });
    }

    // predict
    auto predict_args = std::make_shared<PredictArgs>();
    {
        CLI::App* cmd = app.add_subcommand(
            "predict", "forecast the day after the data ends for every rostered player");
        cmd->add_option("--run", predict_args->run_dir, "train output directory")->required();
        cmd->add_option("--data", predict_args->data,
                        "data directory (default: the one recorded by train)");
        cmd->add_option("--out", predict_args->out,
                        "output CSV (default <run>/predictions.csv)");
        predict_args->flags =
            std::make_shared<ConfigFlags>(cmd, std::vector<std::string>{}, false);
        cmd->callback([predict_args] { run_predict(*predict_args); });
    }

    // bet-eval
    auto bet_args = std::make_shared<BetArgs>();
    {
        CLI::App* cmd = app.add_subcommand(
            "bet-eval", "score Higher-Lower lines against day-ahead forecasts");
        cmd->add_option("--run", bet_args->run_dir, "train output directory")->required();
        cmd->add_option("--lines", bet_args->lines,
                        "lines CSV: date,player_id,stat_expr,threshold,actual")
            ->required();
        cmd->add_option("--data", bet_args->data,
                        "data directory (default: the one recorded by train)");
        cmd->add_option("--out", bet_args->out, "output CSV (default <run>/bet_eval.csv)");
        bet_args->flags = std::make_shared<ConfigFlags>(cmd, std::vector<std::string>{}, false);
        cmd->callback([bet_args] { run_bet_eval(*bet_args); });
    }

    // export-attention
    auto attention_args = std::make_shared<AttentionArgs>();
    {
        CLI::App* cmd = app.add_subcommand(
            "export-attention", "write one day's attention weights as from,to,weight edges");
        cmd->add_option("--run", attention_args->run_dir, "train output directory")->required();
        cmd->add_option("--data", attention_args->data,
                        "data directory (default: the one recorded by train)");
        cmd->add_option("--out", attention_args->out,
                        "output CSV (default <run>/attention.csv)");
        cmd->add_option("--day", attention_args->day,
                        "day index to export (default: the last day)");
        attention_args->flags =
            std::make_shared<ConfigFlags>(cmd, std::vector<std::string>{}, false);
        cmd->callback([attention_args] { run_export_attention(*attention_args); });
    }

    // export-embeddings
    auto embeddings_args = std::make_shared<EmbeddingsArgs>();
    {
        CLI::App* cmd = app.add_subcommand(
            "export-embeddings", "write the learned 2-D team and position embeddings");
        cmd->add_option("--run", embeddings_args->run_dir, "train output directory")->required();
        cmd->add_option("--data", embeddings_args->data,
                        "data directory (default: the one recorded by train)");
        cmd->add_option("--out", embeddings_args->out,
                        "output CSV (default <run>/embeddings.csv)");
        embeddings_args->flags =
            std::make_shared<ConfigFlags>(cmd, std::vector<std::string>{}, false);
        cmd->callback([embeddings_args] { run_export_embeddings(*embeddings_args); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

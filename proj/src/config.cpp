#include "courtcast/config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "courtcast/csv.hpp"
#include "courtcast/dataset.hpp"
#include "courtcast/error.hpp"

namespace courtcast::config {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

long to_long(const std::string& key, const std::string& value) {
    try {
        return csv::parse_long(value, "config", 0);
    } catch (const Error&) {
        throw ConfigError("key '" + key + "' needs an integer, got '" + value + "'");
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        return csv::parse_double(value, "config", 0);
    } catch (const Error&) {
        throw ConfigError("key '" + key + "' needs a number, got '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("key '" + key + "' needs true/false, got '" + value + "'");
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

// "tcn" is the user-facing name of the graph-free baseline.
model::Arch parse_model_name(const std::string& name) {
    if (name == "gat_tcn") return model::Arch::gat_tcn;
    if (name == "tcn" || name == "per_node_tcn") return model::Arch::per_node_tcn;
    throw ConfigError("unknown model '" + name + "' (expected gat_tcn or tcn)");
}

// One table drives apply_key, to_text, and the unknown-key error message.
struct KeyHandler {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, KeyHandler>& key_table() {
    static const std::map<std::string, KeyHandler> table = {
        {"model",
         {[](RunConfig& c, const std::string& v) {
              parse_model_name(v);  // validates
              c.model = v;
          },
          [](const RunConfig& c) { return c.model; }}},
        {"seed",
         {[](RunConfig& c, const std::string& v) {
              const long s = to_long("seed", v);
              if (s < 0) throw ConfigError("key 'seed' must be non-negative, got '" + v + "'");
              c.seed = static_cast<std::uint64_t>(s);
          },
          [](const RunConfig& c) { return std::to_string(c.seed); }}},
        {"t0",
         {[](RunConfig& c, const std::string& v) { c.t0 = static_cast<int>(to_long("t0", v)); },
          [](const RunConfig& c) { return std::to_string(c.t0); }}},
        {"epochs",
         {[](RunConfig& c, const std::string& v) {
              c.epochs = static_cast<int>(to_long("epochs", v));
          },
          [](const RunConfig& c) { return std::to_string(c.epochs); }}},
        {"patience",
         {[](RunConfig& c, const std::string& v) {
              c.patience = static_cast<int>(to_long("patience", v));
          },
          [](const RunConfig& c) { return std::to_string(c.patience); }}},
        {"lr",
         {[](RunConfig& c, const std::string& v) { c.lr = to_double("lr", v); },
          [](const RunConfig& c) { return csv::format_double(c.lr); }}},
        {"weight_decay",
         {[](RunConfig& c, const std::string& v) { c.weight_decay = to_double("weight_decay", v); },
          [](const RunConfig& c) { return csv::format_double(c.weight_decay); }}},
        {"heads",
         {[](RunConfig& c, const std::string& v) {
              c.heads = static_cast<int>(to_long("heads", v));
          },
          [](const RunConfig& c) { return std::to_string(c.heads); }}},
        {"gat_dim",
         {[](RunConfig& c, const std::string& v) {
              c.gat_dim = static_cast<int>(to_long("gat_dim", v));
          },
          [](const RunConfig& c) { return std::to_string(c.gat_dim); }}},
        {"tcn_dim",
         {[](RunConfig& c, const std::string& v) {
              c.tcn_dim = static_cast<int>(to_long("tcn_dim", v));
          },
          [](const RunConfig& c) { return std::to_string(c.tcn_dim); }}},
        {"kernel",
         {[](RunConfig& c, const std::string& v) {
              c.kernel = static_cast<int>(to_long("kernel", v));
          },
          [](const RunConfig& c) { return std::to_string(c.kernel); }}},
        {"team_emb_dim",
         {[](RunConfig& c, const std::string& v) {
              c.team_emb_dim = static_cast<int>(to_long("team_emb_dim", v));
          },
          [](const RunConfig& c) { return std::to_string(c.team_emb_dim); }}},
        {"pos_emb_dim",
         {[](RunConfig& c, const std::string& v) {
              c.pos_emb_dim = static_cast<int>(to_long("pos_emb_dim", v));
          },
          [](const RunConfig& c) { return std::to_string(c.pos_emb_dim); }}},
        {"dropout",
         {[](RunConfig& c, const std::string& v) { c.dropout = to_double("dropout", v); },
          [](const RunConfig& c) { return csv::format_double(c.dropout); }}},
        {"leaky_slope",
         {[](RunConfig& c, const std::string& v) { c.leaky_slope = to_double("leaky_slope", v); },
          [](const RunConfig& c) { return csv::format_double(c.leaky_slope); }}},
        {"targets",
         {[](RunConfig& c, const std::string& v) {
              if (v.empty()) throw ConfigError("key 'targets' needs at least one statistic");
              c.targets = v;
          },
          [](const RunConfig& c) { return c.targets; }}},
        {"mape_eps",
         {[](RunConfig& c, const std::string& v) { c.mape_eps = to_double("mape_eps", v); },
          [](const RunConfig& c) { return csv::format_double(c.mape_eps); }}},
        {"bins",
         {[](RunConfig& c, const std::string& v) {
              c.bins = static_cast<int>(to_long("bins", v));
          },
          [](const RunConfig& c) { return std::to_string(c.bins); }}},
        {"minutes_threshold",
         {[](RunConfig& c, const std::string& v) {
              c.minutes_threshold = to_double("minutes_threshold", v);
          },
          [](const RunConfig& c) { return csv::format_double(c.minutes_threshold); }}},
        {"mask_loss",
         {[](RunConfig& c, const std::string& v) { c.mask_loss = to_bool("mask_loss", v); },
          [](const RunConfig& c) { return bool_text(c.mask_loss); }}},
        {"train_ratio",
         {[](RunConfig& c, const std::string& v) { c.train_ratio = to_double("train_ratio", v); },
          [](const RunConfig& c) { return csv::format_double(c.train_ratio); }}},
        {"val_ratio",
         {[](RunConfig& c, const std::string& v) { c.val_ratio = to_double("val_ratio", v); },
          [](const RunConfig& c) { return csv::format_double(c.val_ratio); }}},
        {"test_ratio",
         {[](RunConfig& c, const std::string& v) { c.test_ratio = to_double("test_ratio", v); },
          [](const RunConfig& c) { return csv::format_double(c.test_ratio); }}},
    };
    return table;
}

}  // namespace

std::vector<std::string> RunConfig::target_list() const {
    std::vector<std::string> out;
    for (const std::string& field : csv::split_line(targets)) {
        const std::string name = trim(field);
        if (name.empty()) {
            throw ConfigError("targets has an empty entry in '" + targets + "'");
        }
        data::stat_index(name);  // validates
        out.push_back(name);
    }
    return out;
}

model::Arch RunConfig::arch() const { return parse_model_name(model); }

model::ModelConfig RunConfig::model_config(int team_count, int position_count) const {
    model::ModelConfig mc;
    mc.team_emb_dim = team_emb_dim;
    mc.pos_emb_dim = pos_emb_dim;
    mc.gat_out = gat_dim;
    mc.heads = heads;
    mc.leaky_slope = leaky_slope;
    mc.window = t0;
    mc.tcn_out = tcn_dim;
    mc.tcn_kernel = kernel;
    mc.out_features = static_cast<int>(target_list().size());
    mc.dropout = dropout;
    mc.team_count = team_count;
    mc.position_count = position_count;
    mc.validate();
    return mc;
}

training::TrainConfig RunConfig::train_config() const {
    training::TrainConfig tc;
    tc.lr = lr;
    tc.weight_decay = weight_decay;
    tc.max_epochs = epochs;
    tc.patience = patience;
    tc.seed = seed;
    tc.t0 = t0;
    tc.mask_loss = mask_loss;
    tc.mape_eps = mape_eps;
    tc.targets = target_list();
    tc.train_ratio = train_ratio;
    tc.val_ratio = val_ratio;
    tc.test_ratio = test_ratio;
    tc.validate();
    return tc;
}

std::string RunConfig::to_text() const {
    std::string out;
    for (const auto& [key, handler] : key_table()) {
        out += key;
        out += '=';
        out += handler.get(*this);
        out += '\n';
    }
    return out;
}

void apply_key(RunConfig& config, const std::string& key, const std::string& value) {
    const auto it = key_table().find(key);
    if (it == key_table().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second.set(config, value);
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected key=value, got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            apply_key(base, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

void write_resolved(const std::string& path, const RunConfig& config) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write config file " + path);
    out << config.to_text();
    if (!out) throw Error("failed writing config file " + path);
}

}  // namespace courtcast::config

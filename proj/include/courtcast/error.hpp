#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace courtcast {

// Base class for every error the library raises. Subtypes carry the
// structured fields callers may need programmatically.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// A player listed in two games on the same day.
class DuplicatePlayerError : public Error {
public:
    DuplicatePlayerError(int player_index, int first_game, int second_game)
        : Error("player " + std::to_string(player_index) + " appears in game " +
                std::to_string(first_game) + " and game " + std::to_string(second_game) +
                " on the same day"),
          player(player_index),
          first_game_id(first_game),
          second_game_id(second_game) {}

    int player;
    int first_game_id;
    int second_game_id;
};

// A connected component of an adjacency matrix that is not a complete subgraph.
class NotCompleteError : public Error {
public:
    explicit NotCompleteError(std::vector<int> nodes)
        : Error(describe(nodes)), component(std::move(nodes)) {}

    std::vector<int> component;

private:
    static std::string describe(const std::vector<int>& nodes) {
        std::string msg = "connected component {";
        for (size_t i = 0; i < nodes.size(); ++i) {
            if (i) msg += ",";
            msg += std::to_string(nodes[i]);
        }
        msg += "} is not a complete subgraph";
        return msg;
    }
};

// Malformed or inconsistent content in an input file.
class ParseError : public Error {
public:
    ParseError(std::string file_name, long line_number, const std::string& message)
        : Error(file_name + ":" + std::to_string(line_number) + ": " + message),
          file(std::move(file_name)),
          line(line_number) {}

    std::string file;
    long line;
};

}  // namespace courtcast

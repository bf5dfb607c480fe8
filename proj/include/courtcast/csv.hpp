#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "courtcast/error.hpp"

namespace courtcast::csv {

// Shortest decimal string that parses back to exactly the same double
// (std::to_chars round-trip guarantee), so export -> ingest never drifts.
std::string format_double(double value);

double parse_double(const std::string& text, const std::string& file, long line);
long parse_long(const std::string& text, const std::string& file, long line);

// Minimal comma-separated reader: UTF-8, one header row, no quoting (the
// schemas never embed commas). Tracks line numbers for error reporting and
// tolerates trailing \r from CRLF files.
class Reader {
public:
    Reader(const std::string& path, const std::vector<std::string>& expected_header);

    // Reads the next data row into `fields`; false at end of file. Throws
    // ParseError when the column count does not match the header.
    bool next(std::vector<std::string>& fields);

    long line() const { return line_; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ifstream in_;
    long line_ = 0;
    size_t columns_ = 0;
};

std::vector<std::string> split_line(const std::string& line);
std::string join_fields(const std::vector<std::string>& fields);

}  // namespace courtcast::csv

#include "courtcast/csv.hpp"

#include <array>
#include <charconv>
#include <system_error>

namespace courtcast::csv {

std::string format_double(double value) {
    std::array<char, 64> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& text, const std::string& file, long line) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end)
        throw ParseError(file, line, "expected a number, got '" + text + "'");
    return value;
}

long parse_long(const std::string& text, const std::string& file, long line) {
    long value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end)
        throw ParseError(file, line, "expected an integer, got '" + text + "'");
    return value;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string join_fields(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    return out;
}

Reader::Reader(const std::string& path, const std::vector<std::string>& expected_header)
    : path_(path), in_(path) {
    if (!in_) throw Error("cannot open " + path);
    std::string header;
    if (!std::getline(in_, header)) throw ParseError(path_, 1, "missing header row");
    ++line_;
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const auto fields = split_line(header);
    if (fields != expected_header)
        throw ParseError(path_, 1,
                         "unexpected header '" + header + "', expected '" +
                             join_fields(expected_header) + "'");
    columns_ = expected_header.size();
}

bool Reader::next(std::vector<std::string>& fields) {
    std::string row;
    while (std::getline(in_, row)) {
        ++line_;
        if (!row.empty() && row.back() == '\r') row.pop_back();
        if (row.empty()) continue;
        fields = split_line(row);
        if (fields.size() != columns_)
            throw ParseError(path_, line_,
                             "expected " + std::to_string(columns_) + " fields, got " +
                                 std::to_string(fields.size()));
        return true;
    }
    return false;
}

}  // namespace courtcast::csv

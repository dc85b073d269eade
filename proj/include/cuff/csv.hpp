#pragma once

#include "cuff/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace cuff::csv {

/// Format a double so that round-trips are lossless and output is stable.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Writer {
public:
    Writer(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw Error("cannot open for writing: " + path);
        columns_ = header.size();
        write_row_(header);
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_)
            throw ValidationError("csv row width mismatch");
        write_row_(cells);
    }

private:
    void write_row_(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }
    std::ofstream out_;
    size_t columns_;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // all with header.size() cells

    size_t column(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ParseError("missing column: " + name, 1);
    }
};

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

inline Table read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);
    Table t;
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty file: " + path, 0);
    ++lineno;
    t.header = split_line(line);
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != t.header.size())
            throw ParseError("wrong number of fields in " + path, lineno);
        t.rows.push_back(std::move(cells));
    }
    return t;
}

inline double to_double(const std::string& s, long lineno, const std::string& what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad numeric value for " + what + ": '" + s + "'", lineno);
    }
}

}  // namespace cuff::csv

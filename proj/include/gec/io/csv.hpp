#pragma once

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <string>
#include <vector>

#include "gec/error.hpp"

namespace gec::io {

/// 17 significant digits; "inf" / "-inf" / "nan" spelled out.
inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// One CSV cell: numbers go through format_real, text is quoted only when needed.
class Cell {
public:
    Cell(double v) : text_(format_real(v)) {}                           // NOLINT(google-explicit-constructor)
    Cell(int v) : text_(std::to_string(v)) {}                           // NOLINT
    Cell(long v) : text_(std::to_string(v)) {}                          // NOLINT
    Cell(long long v) : text_(std::to_string(v)) {}                     // NOLINT
    Cell(unsigned v) : text_(std::to_string(v)) {}                      // NOLINT
    Cell(unsigned long v) : text_(std::to_string(v)) {}                 // NOLINT
    Cell(unsigned long long v) : text_(std::to_string(v)) {}            // NOLINT
    Cell(const char* s) : Cell(std::string(s)) {}                       // NOLINT
    Cell(const std::string& s) : text_(quote(s)) {}                     // NOLINT

    [[nodiscard]] const std::string& text() const { return text_; }

private:
    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + '"';
    }

    std::string text_;
};

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(std::initializer_list<Cell> cells) {
        if (cells.size() != header_.size()) throw Error("CsvTable: row width differs from header");
        std::string line;
        bool first = true;
        for (const auto& c : cells) {
            if (!first) line += ',';
            line += c.text();
            first = false;
        }
        rows_.push_back(std::move(line));
    }

    [[nodiscard]] std::size_t size() const { return rows_.size(); }

    [[nodiscard]] std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
        out += '\n';
        for (const auto& r : rows_) out += r + '\n';
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
};

}  // namespace gec::io

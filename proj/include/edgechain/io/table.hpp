#pragma once

#include <fmt/format.h>

#include <concepts>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace edgechain::io {

/// Shortest representation that reads back to the same double.
inline std::string format_number(double x) { return fmt::format("{}", x); }

template <std::integral T>
std::string format_number(T x) {
    return fmt::format("{}", x);
}

/// A named CSV table with a fixed column order.
struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    template <class... Cells>
    void add(Cells&&... cells) {
        rows.push_back({cell(std::forward<Cells>(cells))...});
    }

    std::string to_csv() const {
        std::string out = join(header);
        out += '\n';
        for (const auto& r : rows) {
            out += join(r);
            out += '\n';
        }
        return out;
    }

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(std::string_view s) { return std::string(s); }
    static std::string cell(const char* s) { return s; }
    static std::string cell(bool b) { return b ? "true" : "false"; }
    template <class T>
        requires std::is_arithmetic_v<std::remove_cvref_t<T>>
    static std::string cell(T x) {
        return format_number(x);
    }

    static std::string join(const std::vector<std::string>& cells) {
        std::string out;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        return out;
    }
};

/// Tables written to one stream, each preceded by a `# name` line.
inline void write_tables(std::ostream& os, const std::vector<Table>& tables) {
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (i) os << '\n';
        os << "# " << tables[i].name << '\n' << tables[i].to_csv();
    }
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

}  // namespace edgechain::io

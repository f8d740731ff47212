#pragma once

// Internal string helpers shared by the text-based readers (voxel headers,
// run configuration). Not installed.

#include <string>
#include <string_view>
#include <vector>

namespace voxfrac::detail {

inline std::string trim(std::string_view s) {
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

/// Splits on `sep`, trimming each piece; empty pieces are kept.
inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(s.substr(start)));
            break;
        }
        out.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

/// Strips a trailing comment starting with '#' (not inside brackets we care
/// about; values in these files never contain '#').
inline std::string strip_comment(std::string_view line) {
    const auto pos = line.find('#');
    if (pos == std::string_view::npos) return std::string(line);
    return std::string(line.substr(0, pos));
}

/// Parses "[a, b, c]" into its comma-separated items; throws nothing, returns
/// empty on malformed bracketing (caller reports context).
inline bool parse_bracket_list(std::string_view value, std::vector<std::string>& items) {
    const std::string v = trim(value);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') return false;
    const std::string inner = v.substr(1, v.size() - 2);
    if (trim(inner).empty()) {
        items.clear();
        return true;
    }
    items = split(inner, ',');
    return true;
}

}  // namespace voxfrac::detail

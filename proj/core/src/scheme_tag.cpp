#include <cctype>

#include "voxfrac/decomposition.hpp"

namespace voxfrac {

namespace {

[[noreturn]] void bad(const std::string& tag, const std::string& why) {
    throw InputError("scheme tag '" + tag + "': " + why);
}

bool parse_stage(const std::string& s, SchemeTag::Stage& out) {
    if (s == "OD") {
        out = SchemeTag::Stage::OD;
        return true;
    }
    if (s == "M") {
        out = SchemeTag::Stage::M;
        return true;
    }
    if (s == "MT") {
        out = SchemeTag::Stage::MT;
        return true;
    }
    return false;
}

/// Parses a non-negative integer at s[pos...], advancing pos.
bool parse_int(const std::string& s, std::size_t& pos, int& out) {
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) return false;
    out = std::stoi(s.substr(start, pos - start));
    return true;
}

}  // namespace

SchemeTag parse_scheme(const std::string& tag) {
    SchemeTag t;
    t.text = tag;
    if (tag.empty()) bad(tag, "empty");

    // Bare stage schemes: M, OD, MT.
    SchemeTag::Stage stage;
    if (parse_stage(tag, stage)) {
        t.tail = {stage};
        return t;
    }

    if (tag[0] != 'T') bad(tag, "must start with T or be one of M, OD, MT");
    std::size_t pos = 1;
    if (!parse_int(tag, pos, t.levels)) bad(tag, "expected octree depth after 'T'");
    if (t.levels < 1) bad(tag, "octree depth must be >= 1");

    if (pos + 2 < tag.size() && tag.compare(pos, 3, "min") == 0) {
        pos += 3;
        if (!parse_int(tag, pos, t.min_levels)) bad(tag, "expected number after 'min'");
        if (t.min_levels < 0 || t.min_levels > t.levels)
            bad(tag, "min level must lie in [0, depth]");
        // The min form requires a tail per the grammar.
        if (pos >= tag.size() || tag[pos] != '-')
            bad(tag, "T<k>min<m> requires a '-<tail>'");
    }

    if (pos == tag.size()) {
        if (t.min_levels > 0) bad(tag, "T<k>min<m> requires a '-<tail>'");
        return t;  // pure T<k>
    }
    if (tag[pos] != '-') bad(tag, "unexpected characters after octree depth");
    ++pos;

    // Tail: OD | M | MT | OD-M
    const std::string rest = tag.substr(pos);
    if (rest == "OD-M") {
        t.tail = {SchemeTag::Stage::OD, SchemeTag::Stage::M};
        return t;
    }
    if (!parse_stage(rest, stage))
        bad(tag, "tail must be one of OD, M, MT, OD-M");
    t.tail = {stage};
    return t;
}

}  // namespace voxfrac

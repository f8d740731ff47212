#include <algorithm>
#include <fstream>
#include <sstream>

#include "text_util.hpp"
#include "voxfrac/config.hpp"

namespace voxfrac {

namespace {

using detail::split;
using detail::strip_comment;
using detail::trim;

struct Section {
    std::string name;
    std::map<std::string, std::string> kv;
    std::map<std::string, bool> used;
};

[[noreturn]] void fail(const std::string& source, const std::string& why) {
    throw InputError("config " + source + ": " + why);
}

double to_double(const std::string& source, const std::string& key,
                 const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        fail(source, "key '" + key + "': not a number: '" + v + "'");
    }
}

int to_int(const std::string& source, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int i = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        fail(source, "key '" + key + "': not an integer: '" + v + "'");
    }
}

bool to_bool(const std::string& source, const std::string& key,
             const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(source, "key '" + key + "': not a boolean: '" + v + "'");
}

class Reader {
public:
    Reader(Section* s, std::string source) : s_(s), source_(std::move(source)) {}

    bool has(const std::string& key) const { return s_ && s_->kv.count(key); }

    std::optional<std::string> get(const std::string& key) {
        if (!has(key)) return std::nullopt;
        s_->used[key] = true;
        return s_->kv.at(key);
    }
    std::string get_or(const std::string& key, const std::string& def) {
        auto v = get(key);
        return v ? *v : def;
    }
    double num_or(const std::string& key, double def) {
        auto v = get(key);
        return v ? to_double(source_, key, *v) : def;
    }
    int int_or(const std::string& key, int def) {
        auto v = get(key);
        return v ? to_int(source_, key, *v) : def;
    }
    bool bool_or(const std::string& key, bool def) {
        auto v = get(key);
        return v ? to_bool(source_, key, *v) : def;
    }
    double num_req(const std::string& key) {
        auto v = get(key);
        if (!v) fail(source_, "missing required key '" + key + "'");
        return to_double(source_, key, *v);
    }
    int int_req(const std::string& key) {
        auto v = get(key);
        if (!v) fail(source_, "missing required key '" + key + "'");
        return to_int(source_, key, *v);
    }

private:
    Section* s_;
    std::string source_;
};

int axis_of(const std::string& source, const std::string& s) {
    if (s == "x") return 0;
    if (s == "y") return 1;
    if (s == "z") return 2;
    fail(source, "unknown axis '" + s + "'");
}

BcClause parse_clause(const std::string& source, const std::string& text) {
    const auto tok = split(text, ' ');
    std::vector<std::string> t;
    for (const auto& w : tok)
        if (!w.empty()) t.push_back(w);
    if (t.size() < 3) fail(source, "bc clause '" + text +
                                    "' needs: <face> <component> <kind> [value]");
    BcClause c;
    const std::string& face = t[0];
    if (face.size() != 2 || (face[1] != '-' && face[1] != '+'))
        fail(source, "bc face must be one of x-,x+,y-,y+,z-,z+: '" + face + "'");
    c.face_axis = axis_of(source, face.substr(0, 1));
    c.face_positive = face[1] == '+';
    c.comp = axis_of(source, t[1]);
    const std::string& kind = t[2];
    if (kind == "fix") {
        if (t.size() != 3) fail(source, "bc 'fix' takes no value: '" + text + "'");
    } else if (kind == "velocity") {
        if (t.size() != 4) fail(source, "bc 'velocity' needs one value (mm/s)");
        c.velocity = to_double(source, "bc velocity", t[3]);
        c.moved = true;
    } else if (kind == "strain_rate") {
        if (t.size() != 4) fail(source, "bc 'strain_rate' needs one value (1/min)");
        c.use_strain_rate = true;
        c.strain_rate_per_min = to_double(source, "bc strain_rate", t[3]);
        c.moved = true;
    } else {
        fail(source, "bc kind must be fix, velocity or strain_rate: '" + kind + "'");
    }
    return c;
}

MaterialParams parse_material(Reader& r, int phase) {
    MaterialParams m;
    if (auto preset = r.get("preset")) m = material_preset(*preset);
    if (auto name = r.get("name")) m.name = *name;
    if (m.name.empty()) m.name = "phase" + std::to_string(phase);
    m.kappa_gpa = r.num_or("kappa_gpa", m.kappa_gpa);
    m.mu_gpa = r.num_or("mu_gpa", m.mu_gpa);
    m.brittle = r.bool_or("brittle", m.brittle);
    m.y0_mpa = r.num_or("y0_mpa", m.y0_mpa);
    m.yinf_mpa = r.num_or("yinf_mpa", m.yinf_mpa);
    m.h_exp = r.num_or("h_exp", m.h_exp);
    m.h_lin_mpa = r.num_or("h_lin_mpa", m.h_lin_mpa);
    m.eta_gpa_s = r.num_or("eta_gpa_s", m.eta_gpa_s);
    m.gc_n_per_mm = r.num_or("gc_n_per_mm", m.gc_n_per_mm);
    m.rho_kg_m3 = r.num_or("rho_kg_m3", m.rho_kg_m3);
    return m;
}

}  // namespace

void RunConfig::validate() const {
    const std::string src = source_path.empty() ? "<inline>" : source_path;
    const bool has_file = !voxel_header.empty();
    if (has_file == sphere.has_value())
        fail(src, "[voxel] needs exactly one of 'header' or 'generate = sphere'");
    for (int a = 0; a < 3; ++a)
        if (cells_per_axis[a] < 1) fail(src, "[mesh] cells_per_axis must be >= 1");
    if (materials.empty()) fail(src, "no [material.N] sections");
    for (const auto& m : materials) m.validate();
    if (cell_order != 1 && cell_order != 2) fail(src, "[mesh] cell_order must be 1 or 2");
    if (switch_order != 1 && switch_order != 2)
        fail(src, "[mesh] switch_order must be 1 or 2");
    if (threshold < 0.0 || threshold >= 0.5)
        fail(src, "[mesh] threshold must lie in [0, 0.5)");
    if (erosion_enabled && !(erosion_c > 0.0))
        fail(src, "[erosion] c must be positive");
    if (erosion_tie_rel < 0.0) fail(src, "[erosion] tie_rel must be >= 0");
    if (initial_crack && !erosion_enabled)
        fail(src, "[erosion] initial_crack requires enabled = true");
    if (snapshot_every < 1) fail(src, "[output] snapshot_every must be >= 1");
    if (abort_below_peak_fraction < 0.0 || abort_below_peak_fraction >= 1.0)
        fail(src, "[output] abort_below_peak_fraction must lie in [0, 1)");
    parse_scheme(scheme_text);  // throws on bad tags
}

RunConfig parse_run_config(const std::string& text, const std::string& source) {
    std::map<std::string, Section> sections;
    std::istringstream in(text);
    std::string line, current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                fail(source, "line " + std::to_string(lineno) + ": malformed section");
            current = trim(body.substr(1, body.size() - 2));
            if (current.empty())
                fail(source, "line " + std::to_string(lineno) + ": empty section name");
            sections[current].name = current;
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            fail(source, "line " + std::to_string(lineno) + ": expected key = value");
        if (current.empty())
            fail(source, "line " + std::to_string(lineno) + ": key before any section");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty())
            fail(source, "line " + std::to_string(lineno) + ": empty key");
        if (!sections[current].kv.emplace(key, value).second)
            fail(source, "line " + std::to_string(lineno) + ": duplicate key '" + key +
                             "' in [" + current + "]");
    }

    RunConfig cfg;
    cfg.source_path = source;
    auto section = [&](const std::string& name) -> Section* {
        auto it = sections.find(name);
        return it == sections.end() ? nullptr : &it->second;
    };

    {
        Reader r(section("voxel"), source);
        cfg.voxel_header = r.get_or("header", "");
        if (auto gen = r.get("generate")) {
            if (*gen != "sphere")
                fail(source, "[voxel] generate supports only 'sphere'");
            SphereSpec s;
            s.edge_voxels = r.int_req("edge_voxels");
            s.edge_um = r.num_req("edge_um");
            s.diameter_um = r.num_req("diameter_um");
            s.layer_um = r.num_req("layer_um");
            cfg.sphere = s;
        }
    }
    {
        Reader r(section("mesh"), source);
        if (auto v = r.get("cells_per_axis")) {
            const auto parts = split(*v, ',');
            if (parts.size() == 1) {
                const int n = to_int(source, "cells_per_axis", parts[0]);
                cfg.cells_per_axis = {n, n, n};
            } else if (parts.size() == 3) {
                for (int a = 0; a < 3; ++a)
                    cfg.cells_per_axis[a] =
                        to_int(source, "cells_per_axis", parts[static_cast<std::size_t>(a)]);
            } else {
                fail(source, "[mesh] cells_per_axis must be one or three integers");
            }
        }
        cfg.scheme_text = r.get_or("scheme", cfg.scheme_text);
        cfg.threshold = r.num_or("threshold", cfg.threshold);
        cfg.cell_order = r.int_or("cell_order", cfg.cell_order);
        cfg.switch_order = r.int_or("switch_order", cfg.switch_order);
    }
    for (auto& [name, sec] : sections) {
        if (name.rfind("material.", 0) != 0) continue;
        const std::string idx = name.substr(9);
        int phase = -1;
        try {
            phase = std::stoi(idx);
        } catch (const std::exception&) {
        }
        if (phase < 0 || std::to_string(phase) != idx)
            fail(source, "bad material section name [" + name + "]");
        if (static_cast<std::size_t>(phase) >= cfg.materials.size())
            cfg.materials.resize(static_cast<std::size_t>(phase) + 1);
        Reader r(&sec, source);
        cfg.materials[static_cast<std::size_t>(phase)] = parse_material(r, phase);
    }
    {
        Reader r(section("bc"), source);
        if (auto v = r.get("prescribe")) {
            for (const auto& clause : split(*v, ';'))
                if (!trim(clause).empty())
                    cfg.bcs.push_back(parse_clause(source, trim(clause)));
        }
    }
    {
        Reader r(section("time"), source);
        cfg.dt = r.num_or("dt", 0.0);
        cfg.steps = r.int_or("steps", 0);
    }
    {
        Reader r(section("erosion"), source);
        cfg.erosion_enabled = r.bool_or("enabled", cfg.erosion_enabled);
        cfg.erosion_c = r.num_or("c", cfg.erosion_c);
        cfg.erosion_tie_rel = r.num_or("tie_rel", cfg.erosion_tie_rel);
        if (auto v = r.get("initial_crack")) {
            const auto parts = split(*v, ',');
            if (parts.size() != 6)
                fail(source, "[erosion] initial_crack needs 6 numbers (mm): "
                             "x0,y0,z0,x1,y1,z1");
            Box3d b;
            for (int a = 0; a < 3; ++a) {
                b.lo[a] = to_double(source, "initial_crack", parts[static_cast<std::size_t>(a)]);
                b.hi[a] =
                    to_double(source, "initial_crack", parts[static_cast<std::size_t>(a + 3)]);
            }
            cfg.initial_crack = b;
        }
    }
    {
        Reader r(section("solver"), source);
        cfg.solver.tol_rel = r.num_or("tol_rel", cfg.solver.tol_rel);
        cfg.solver.c_norm = r.num_or("c_norm", cfg.solver.c_norm);
        cfg.solver.max_iter = r.int_or("max_iter", cfg.solver.max_iter);
        cfg.solver.dynamics = r.bool_or("dynamics", cfg.solver.dynamics);
    }
    {
        Reader r(section("newmark"), source);
        cfg.solver.beta = r.num_or("beta", cfg.solver.beta);
        cfg.solver.gamma = r.num_or("gamma", cfg.solver.gamma);
    }
    {
        Reader r(section("output"), source);
        cfg.output_dir = r.get_or("dir", cfg.output_dir);
        cfg.snapshot_every = r.int_or("snapshot_every", cfg.snapshot_every);
        cfg.write_vtk = r.bool_or("write_vtk", cfg.write_vtk);
        cfg.abort_below_peak_fraction =
            r.num_or("abort_below_peak_fraction", cfg.abort_below_peak_fraction);
    }

    static const std::map<std::string, std::vector<std::string>> known = {
        {"voxel", {"header", "generate", "edge_voxels", "edge_um", "diameter_um", "layer_um"}},
        {"mesh", {"cells_per_axis", "scheme", "threshold", "cell_order", "switch_order"}},
        {"bc", {"prescribe"}},
        {"time", {"dt", "steps"}},
        {"erosion", {"enabled", "c", "tie_rel", "initial_crack"}},
        {"solver", {"tol_rel", "c_norm", "max_iter", "dynamics"}},
        {"newmark", {"beta", "gamma"}},
        {"output",
         {"dir", "snapshot_every", "write_vtk", "abort_below_peak_fraction"}},
    };
    static const std::vector<std::string> material_keys = {
        "preset",   "name",      "kappa_gpa", "mu_gpa",      "brittle",
        "y0_mpa",   "yinf_mpa",  "h_exp",     "h_lin_mpa",   "eta_gpa_s",
        "gc_n_per_mm", "rho_kg_m3"};
    for (const auto& [name, sec] : sections) {
        const std::vector<std::string>* keys = nullptr;
        if (name.rfind("material.", 0) == 0) {
            keys = &material_keys;
        } else {
            const auto it = known.find(name);
            if (it == known.end()) fail(source, "unknown section [" + name + "]");
            keys = &it->second;
        }
        for (const auto& [key, value] : sec.kv) {
            (void)value;
            if (std::find(keys->begin(), keys->end(), key) == keys->end())
                fail(source, "unknown key '" + key + "' in [" + name + "]");
        }
    }

    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), path);
}

VoxelGrid make_input_grid(const RunConfig& cfg) {
    VoxelGrid grid;
    if (cfg.sphere) {
        const SphereSpec& s = *cfg.sphere;
        grid = generate_sphere_specimen(s.edge_voxels, s.edge_um, s.diameter_um,
                                        s.layer_um, {0, 1, 2});
    } else {
        grid = load_voxels(cfg.voxel_header);
    }
    grid.validate();
    return grid;
}

}  // namespace voxfrac

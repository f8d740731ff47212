#include <fstream>
#include <sstream>

#include "text_util.hpp"
#include "voxfrac/voxel_grid.hpp"

namespace voxfrac {

namespace {

using detail::parse_bracket_list;
using detail::strip_comment;
using detail::trim;

[[noreturn]] void fail(const std::filesystem::path& p, const std::string& msg) {
    throw InputError("voxel header '" + p.string() + "': " + msg);
}

}  // namespace

VoxelGrid load_voxels(const std::filesystem::path& header_path) {
    std::ifstream in(header_path);
    if (!in) fail(header_path, "cannot open header file");

    VoxelGrid g;
    std::string payload_rel;
    bool have_dims = false, have_payload = false;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(strip_comment(line));
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            fail(header_path, "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        std::vector<std::string> items;
        if (key == "dims") {
            if (!parse_bracket_list(value, items) || items.size() != 3)
                fail(header_path, "dims must be a list of three integers");
            for (int a = 0; a < 3; ++a) g.dims[a] = std::stoi(items[a]);
            have_dims = true;
        } else if (key == "spacing") {
            if (!parse_bracket_list(value, items) || items.size() != 3)
                fail(header_path, "spacing must be a list of three numbers");
            for (int a = 0; a < 3; ++a) g.spacing_um[a] = std::stod(items[a]);
        } else if (key == "payload") {
            payload_rel = value;
            have_payload = true;
        } else if (key == "phase_names") {
            if (!parse_bracket_list(value, items))
                fail(header_path, "phase_names must be a bracketed list");
            g.phase_names = items;
        } else {
            fail(header_path, "unknown key '" + key + "'");
        }
    }
    if (!have_dims) fail(header_path, "missing 'dims'");
    if (!have_payload) fail(header_path, "missing 'payload'");

    const std::filesystem::path payload_path =
        header_path.parent_path() / payload_rel;
    std::ifstream raw(payload_path, std::ios::binary);
    if (!raw) fail(header_path, "missing payload file '" + payload_path.string() + "'");

    raw.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(raw.tellg());
    raw.seekg(0, std::ios::beg);

    const std::size_t expected = static_cast<std::size_t>(g.dims[0]) *
                                 static_cast<std::size_t>(g.dims[1]) *
                                 static_cast<std::size_t>(g.dims[2]);
    if (size != expected) {
        std::ostringstream os;
        os << "payload size " << size << " bytes does not match dims "
           << g.dims[0] << "x" << g.dims[1] << "x" << g.dims[2] << " = " << expected;
        fail(header_path, os.str());
    }
    g.phases.resize(size);
    raw.read(reinterpret_cast<char*>(g.phases.data()),
             static_cast<std::streamsize>(size));
    if (!raw) fail(header_path, "short read on payload");

    g.validate();
    return g;
}

void write_voxels(const VoxelGrid& grid, const std::filesystem::path& header_path,
                  const std::string& payload_relpath) {
    grid.validate();
    if (header_path.has_parent_path())
        std::filesystem::create_directories(header_path.parent_path());

    std::ofstream h(header_path);
    if (!h) throw InputError("cannot write voxel header '" + header_path.string() + "'");
    h << "dims = [" << grid.dims[0] << ", " << grid.dims[1] << ", " << grid.dims[2]
      << "]\n";
    h.precision(17);
    h << "spacing = [" << grid.spacing_um[0] << ", " << grid.spacing_um[1] << ", "
      << grid.spacing_um[2] << "]\n";
    h << "payload = " << payload_relpath << "\n";
    if (!grid.phase_names.empty()) {
        h << "phase_names = [";
        for (std::size_t i = 0; i < grid.phase_names.size(); ++i) {
            if (i) h << ", ";
            h << grid.phase_names[i];
        }
        h << "]\n";
    }

    const std::filesystem::path payload_path =
        header_path.parent_path() / payload_relpath;
    std::ofstream raw(payload_path, std::ios::binary);
    if (!raw)
        throw InputError("cannot write voxel payload '" + payload_path.string() + "'");
    raw.write(reinterpret_cast<const char*>(grid.phases.data()),
              static_cast<std::streamsize>(grid.phases.size()));
}

}  // namespace voxfrac

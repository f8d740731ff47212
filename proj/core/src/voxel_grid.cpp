#include "voxfrac/voxel_grid.hpp"

#include <cmath>
#include <sstream>

namespace voxfrac {

std::map<int, std::size_t> VoxelGrid::histogram() const {
    std::map<int, std::size_t> h;
    for (std::uint8_t p : phases) ++h[p];
    return h;
}

void VoxelGrid::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (dims[a] <= 0)
            throw InputError("voxel grid: dims must be positive");
        if (!(spacing_um[a] > 0.0))
            throw InputError("voxel grid: spacing must be positive");
    }
    if (phases.size() != voxel_count()) {
        std::ostringstream os;
        os << "voxel grid: payload size " << phases.size()
           << " does not match dims product " << voxel_count();
        throw InputError(os.str());
    }
    if (!phase_names.empty()) {
        for (std::uint8_t p : phases) {
            if (p >= phase_names.size()) {
                std::ostringstream os;
                os << "voxel grid: phase id " << int(p)
                   << " outside declared phase_names (count "
                   << phase_names.size() << ")";
                throw InputError(os.str());
            }
        }
    }
}

CellGrid make_cell_grid(const VoxelGrid& grid, const Index3& cells_per_axis) {
    CellGrid cg;
    cg.cells_per_axis = cells_per_axis;
    for (int a = 0; a < 3; ++a) {
        if (cells_per_axis[a] <= 0)
            throw InputError("cell grid: cells_per_axis must be positive");
        if (grid.dims[a] % cells_per_axis[a] != 0) {
            std::ostringstream os;
            os << "cell grid: axis " << a << " has " << grid.dims[a]
               << " voxels, not divisible by " << cells_per_axis[a] << " cells";
            throw InputError(os.str());
        }
        cg.voxels_per_cell[a] = grid.dims[a] / cells_per_axis[a];
    }
    return cg;
}

VoxelGrid generate_sphere_specimen(int edge_voxels, double edge_um,
                                   double diameter_um, double layer_um,
                                   const std::array<std::uint8_t, 3>& phase_ids) {
    if (edge_voxels < 4)
        throw InputError("sphere specimen: edge_voxels must be >= 4");
    if (!(edge_um > 0.0))
        throw InputError("sphere specimen: edge length must be positive");
    if (diameter_um < 0.0 || layer_um < 0.0)
        throw InputError("sphere specimen: negative geometry");
    if (diameter_um + 2.0 * layer_um > edge_um)
        throw InputError("sphere specimen: inclusion plus layer exceeds the cube");

    VoxelGrid g;
    g.dims = {edge_voxels, edge_voxels, edge_voxels};
    const double sp = edge_um / edge_voxels;
    g.spacing_um = {sp, sp, sp};
    g.phases.resize(g.voxel_count());
    g.phase_names = {"matrix", "layer", "inclusion"};

    const double r_inc = 0.5 * diameter_um;
    const double r_layer = r_inc + layer_um;
    const double c = 0.5 * edge_um;
    for (int z = 0; z < edge_voxels; ++z)
        for (int y = 0; y < edge_voxels; ++y)
            for (int x = 0; x < edge_voxels; ++x) {
                const double dx = (x + 0.5) * sp - c;
                const double dy = (y + 0.5) * sp - c;
                const double dz = (z + 0.5) * sp - c;
                const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
                std::uint8_t p = phase_ids[0];
                if (r < r_inc)
                    p = phase_ids[2];
                else if (r < r_layer)
                    p = phase_ids[1];
                g.phases[g.index(x, y, z)] = p;
            }
    // Names are only meaningful for the default ids 0/1/2; drop them otherwise.
    if (!(phase_ids[0] == 0 && phase_ids[1] == 1 && phase_ids[2] == 2))
        g.phase_names.clear();
    return g;
}

}  // namespace voxfrac

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "voxfrac/types.hpp"

namespace voxfrac {

/// Dense 3D block of phase identifiers with physical voxel spacing.
///
/// Storage is x-fastest: index = x + nx*(y + ny*z). Spacing is given in
/// micrometers to match typical microstructure data; physical positions used
/// by the solver are derived in millimeters.
struct VoxelGrid {
    Index3 dims{0, 0, 0};
    std::array<double, 3> spacing_um{1.0, 1.0, 1.0};
    std::vector<std::uint8_t> phases;
    std::vector<std::string> phase_names;  ///< optional, indexed by phase id

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
    }
    std::uint8_t at(int x, int y, int z) const { return phases[index(x, y, z)]; }
    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }

    /// Voxel edge lengths in millimeters.
    std::array<double, 3> spacing_mm() const {
        return {spacing_um[0] * 1e-3, spacing_um[1] * 1e-3, spacing_um[2] * 1e-3};
    }

    /// Count of voxels per phase id.
    std::map<int, std::size_t> histogram() const;

    /// Throws InputError on violated invariants (empty dims, size mismatch,
    /// non-positive spacing, phase id outside phase_names when names given).
    void validate() const;
};

/// Regular partition of a voxel grid into identical axis-aligned cells.
struct CellGrid {
    Index3 cells_per_axis{0, 0, 0};
    Index3 voxels_per_cell{0, 0, 0};

    int cell_count() const {
        return cells_per_axis[0] * cells_per_axis[1] * cells_per_axis[2];
    }
    int cell_index(int cx, int cy, int cz) const {
        return cx + cells_per_axis[0] * (cy + cells_per_axis[1] * cz);
    }
};

/// Builds the cell grid for `cells_per_axis` cells; every axis must divide
/// the voxel dimensions exactly, otherwise InputError is thrown.
CellGrid make_cell_grid(const VoxelGrid& grid, const Index3& cells_per_axis);

/// Generates the spherical-inclusion cube specimen: a cube of
/// `edge_voxels`^3 voxels with physical edge `edge_um`, a centered spherical
/// inclusion of diameter `diameter_um`, and a concentric shell of thickness
/// `layer_um` around it. Phase of a voxel is decided by its center distance
/// to the specimen center. phase_ids = {matrix, layer, inclusion}.
VoxelGrid generate_sphere_specimen(int edge_voxels, double edge_um,
                                   double diameter_um, double layer_um,
                                   const std::array<std::uint8_t, 3>& phase_ids);

/// Loads a voxel grid from a structured-text header file referencing a raw
/// unsigned-8-bit payload (x-fastest). Header fields:
///   dims = [nx, ny, nz]
///   spacing = [sx, sy, sz]        (micrometers)
///   payload = <path relative to the header>
///   phase_names = [name0, name1, ...]   (optional)
/// Throws InputError on missing payload, size mismatch, or phase ids not
/// covered by phase_names (when given).
VoxelGrid load_voxels(const std::filesystem::path& header_path);

/// Writes the header + raw payload pair. `payload_relpath` is stored in the
/// header and resolved relative to the header's directory.
void write_voxels(const VoxelGrid& grid, const std::filesystem::path& header_path,
                  const std::string& payload_relpath);

}  // namespace voxfrac

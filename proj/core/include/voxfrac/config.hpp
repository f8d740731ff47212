#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "voxfrac/decomposition.hpp"
#include "voxfrac/material.hpp"
#include "voxfrac/system.hpp"

namespace voxfrac {

/// One boundary-condition clause on a domain face.
struct BcClause {
    int face_axis = 0;        ///< 0..2
    bool face_positive = false;
    int comp = 0;             ///< prescribed displacement component
    double velocity = 0.0;    ///< mm/s (fix = 0)
    bool moved = false;       ///< true for velocity/strain-rate clauses
    bool use_strain_rate = false;    ///< velocity derived from rate at setup
    double strain_rate_per_min = 0.0;
};

struct SphereSpec {
    int edge_voxels = 0;
    double edge_um = 0.0;
    double diameter_um = 0.0;
    double layer_um = 0.0;
};

struct RunConfig {
    // voxel source: exactly one of the two
    std::string voxel_header;           ///< path to a voxel header file
    std::optional<SphereSpec> sphere;   ///< generated specimen

    Index3 cells_per_axis{1, 1, 1};
    std::string scheme_text = "M";
    double threshold = 0.0;
    int cell_order = 1;
    int switch_order = 1;

    std::vector<MaterialParams> materials;  ///< indexed by phase id

    std::vector<BcClause> bcs;

    double dt = 0.0;
    int steps = 0;

    bool erosion_enabled = true;
    double erosion_c = 0.5;
    double erosion_tie_rel = 1e-3;
    std::optional<Box3d> initial_crack;  ///< mm

    SolverOptions solver;

    std::string output_dir = "out";
    int snapshot_every = 10;
    bool write_vtk = true;
    double abort_below_peak_fraction = 0.0;  ///< 0 disables the early stop

    std::string source_path;  ///< config file this was loaded from

    void validate() const;  ///< throws InputError on contradictions
};

/// Parses the structured-text run configuration (sections in brackets,
/// key = value lines, '#' comments).
RunConfig load_run_config(const std::string& path);

/// Parses config text directly (for tests); `source` names the origin in
/// error messages.
RunConfig parse_run_config(const std::string& text, const std::string& source);

/// Loads or generates the configured voxel grid (validated).
VoxelGrid make_input_grid(const RunConfig& cfg);

}  // namespace voxfrac

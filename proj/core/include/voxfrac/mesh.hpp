#pragma once

#include <map>
#include <vector>

#include "voxfrac/decomposition.hpp"
#include "voxfrac/element.hpp"
#include "voxfrac/material.hpp"
#include "voxfrac/voxel_grid.hpp"

namespace voxfrac {

/// Node key on the half-voxel lattice: voxel coordinates times two, so the
/// mid-edge/face/volume nodes of quadratic entities have exact integer keys.
using NodeKey = Index3;

/// Integration cell carrying a composite subcell quadrature. Inactive once
/// split into elements.
struct MeshCell {
    int index = 0;
    Box3i vox;   ///< global voxel range
    Box3d box;   ///< physical extent (mm)
    int order = 1;
    std::vector<int> nodes;
    bool active = true;
    std::vector<Box3i> sub_vox;
    std::vector<Box3d> sub_boxes;
    std::vector<std::uint8_t> sub_phase;
    std::vector<int> sub_gid;      ///< global subcell ids (cell-major)
    std::vector<int> sub_element;  ///< element id per subcell once split, else -1
    ElementQuadrature quad;        ///< subcell-major composite rule
    int gp_per_subcell = 0;
    std::vector<MaterialState> gp_state;  ///< committed history
    std::vector<double> gp_psi_e, gp_psi_p, gp_vm;
    std::vector<Vec3d> gp_pos;  ///< reference positions (mm)
};

/// Element created by splitting a cell: one per subcell, same quadrature
/// point locations as the parent's composite rule.
struct MeshElement {
    int index = 0;
    int parent_cell = 0;
    int subcell_gid = 0;
    std::uint8_t phase = 0;
    Box3i vox;
    Box3d box;
    int order = 1;
    std::vector<int> nodes;
    bool eroded = false;
    ElementQuadrature quad;
    std::vector<MaterialState> gp_state;
    std::vector<double> gp_psi_e, gp_psi_p, gp_vm;
    std::vector<Vec3d> gp_pos;
    Eigen::VectorXd lumped_mass;  ///< captured at erosion (3n), else empty
};

/// Hanging-node interpolation constraint; rows are flattened so that every
/// master is a regular (non-hanging) node.
struct NodeConstraint {
    int node = 0;
    std::vector<std::pair<int, double>> masters;
};

struct FcmMesh {
    Vec3d spacing = Vec3d::Zero();  ///< mm per voxel
    Index3 total_voxels{};
    CellGrid grid;
    int switch_order = 1;

    std::vector<Vec3d> node_pos;
    std::vector<NodeKey> node_key;
    std::map<NodeKey, int> node_index;
    std::vector<char> node_active;

    std::vector<MeshCell> cells;
    std::vector<MeshElement> elements;

    std::vector<MaterialParams> materials;  ///< indexed by phase id
    std::vector<NodeConstraint> constraints;

    int n_nodes() const { return static_cast<int>(node_pos.size()); }
    int n_active_nodes() const;
    const MaterialParams& phase_material(std::uint8_t phase) const;

    /// Global subcell count (candidate ids run over [0, n_subcells)).
    int n_subcells() const { return n_subcells_; }
    /// Locates a subcell id: (cell index, local subcell index).
    std::pair<int, int> subcell_of(int gid) const;

    /// Splits an active cell into one element per subcell. Nodal fields
    /// (3 dofs per node) listed in `fields` are extended with values
    /// interpolated from the cell's shape functions. Returns new element ids.
    std::vector<int> switch_cell(int ci, const std::vector<Eigen::VectorXd*>& fields);

    /// Removes an element's stiffness permanently, keeping its (row-sum
    /// lumped) mass captured at this moment.
    void erode_element(int ei);

    /// Recomputes node activity and hanging-node constraints from the current
    /// topology; call after a batch of switches/erosions.
    void rebuild_topology();

    /// Total mass (tonnes), including eroded debris.
    double total_mass() const;

    /// Stores converged history and diagnostic fields.
    void commit_cell(int ci, const ElementArrays& a);
    void commit_element(int ei, const ElementArrays& a);

    // build internals
    int add_node(const NodeKey& key);
    int n_subcells_ = 0;
    std::vector<int> gid_cell_;  ///< gid -> owning cell
    std::vector<int> gid_sub_;   ///< gid -> local subcell index
};

/// Builds the integration mesh for a decomposed specimen. `materials` is
/// indexed by phase id and must cover every phase present.
FcmMesh build_mesh(const VoxelGrid& grid, const SubcellLayout& layout,
                   const std::vector<MaterialParams>& materials, int cell_order,
                   int switch_order);

}  // namespace voxfrac

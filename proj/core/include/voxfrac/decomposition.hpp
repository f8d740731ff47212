#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voxfrac/types.hpp"
#include "voxfrac/voxel_grid.hpp"

namespace voxfrac {

/// Axis-aligned homogeneous voxel box inside one cell.
/// lo/hi are cell-local voxel indices, [lo, hi) per axis.
struct Subcell {
    Index3 lo{0, 0, 0};
    Index3 hi{0, 0, 0};
    std::uint8_t phase = 0;
    /// True when the box was assigned a dominant phase instead of being
    /// exactly homogeneous (threshold override or level cap).
    bool threshold_assigned = false;

    int extent(int axis) const { return hi[axis] - lo[axis]; }
    long voxel_volume() const {
        return static_cast<long>(extent(0)) * extent(1) * extent(2);
    }
};

/// Small dense phase block (one cell's voxels, or a sub-block of it).
struct PhaseBlock {
    Index3 extent{0, 0, 0};
    std::vector<std::uint8_t> v;  ///< x-fastest

    std::uint8_t at(int x, int y, int z) const {
        return v[static_cast<std::size_t>(x) +
                 static_cast<std::size_t>(extent[0]) *
                     (static_cast<std::size_t>(y) +
                      static_cast<std::size_t>(extent[1]) * static_cast<std::size_t>(z))];
    }
    long volume() const {
        return static_cast<long>(extent[0]) * extent[1] * extent[2];
    }
};

/// Extracts the voxel block of cell (cx,cy,cz) from the grid.
PhaseBlock extract_cell_block(const VoxelGrid& grid, const CellGrid& cells,
                              int cx, int cy, int cz);

/// Parsed decomposition scheme tag.
///
/// Grammar: T<k> | M | OD | MT | T<k>min<m>-<tail> | T<k>-<tail>
/// with tail one of OD, M, MT, OD-M. A leading T<k> runs k octree levels
/// (min<m> forces at least m splits even in homogeneous blocks); the tail
/// stages are applied independently inside every octree leaf. The bare
/// schemes M/OD/MT act on the whole cell block.
struct SchemeTag {
    enum class Stage { OD, M, MT };

    int levels = 0;      ///< octree depth k (0 = no octree prefix)
    int min_levels = 0;  ///< forced minimum splits m
    std::vector<Stage> tail;
    std::string text;    ///< original tag

    bool pure_octree() const { return levels > 0 && tail.empty(); }
};

/// Parses a scheme tag; throws InputError on anything outside the grammar.
SchemeTag parse_scheme(const std::string& tag);

/// Octree decomposition of one block. Splits heterogeneous blocks into 8
/// children until homogeneous, threshold-dominant (minority volume fraction
/// < threshold: the block is assigned the dominant phase and flagged), or
/// `max_level` is reached (remaining heterogeneous blocks are assigned the
/// dominant phase and flagged). `min_level` forces splits of the first
/// `min_level` levels even for homogeneous blocks. Throws InputError when a
/// required split meets an odd extent.
std::vector<Subcell> octree_decompose(const PhaseBlock& block, int max_level,
                                      double threshold, int min_level = 0);

/// Greedy pairwise merging of face-adjacent, cross-extent-matching,
/// same-phase boxes; deterministic axis-ordered sweeps (x, then y, then z)
/// repeated to a fixed point. Input must be a disjoint cover of the block.
std::vector<Subcell> merge_subcells(std::vector<Subcell> subcells);

/// Run-length decomposition along the axis permutation `perm` (e.g. {0,1,2}):
/// maximal same-phase runs along perm[0], then extent-matched merging of the
/// runs along perm[1], then along perm[2].
std::vector<Subcell> run_length_decompose(const PhaseBlock& block,
                                          const Index3& perm);

/// Optimal decomposition: the run-length result over all six axis
/// permutations with the lowest subcell count; ties break to the
/// lexicographically first permutation (x,y,z) < (x,z,y) < ... < (z,y,x).
std::vector<Subcell> optimal_decompose(const PhaseBlock& block);

/// Blockwise 2x2x2 merge decomposition: octree descent while the block is
/// heterogeneous, all extents are even, and the maximum extent exceeds 2;
/// inside every leaf, voxels are merged hierarchically into pairs along x,
/// then dominoes along y, then plates along z. All boxes have extents 1 or 2
/// per axis with even-aligned pairs, which keeps touching faces either
/// matching or contained.
std::vector<Subcell> mt_decompose(const PhaseBlock& block, double threshold = 0.0);

/// Applies a full scheme tag to one cell block.
std::vector<Subcell> combined_decompose(const PhaseBlock& block,
                                        const SchemeTag& scheme,
                                        double threshold = 0.0);

/// Per-grid decomposition result; subcells are stored cell-major in the
/// cell order of CellGrid::cell_index.
struct SubcellLayout {
    CellGrid grid;
    SchemeTag scheme;
    std::vector<std::vector<Subcell>> cells;

    std::size_t total_subcells() const {
        std::size_t n = 0;
        for (const auto& c : cells) n += c.size();
        return n;
    }
};

/// Decomposes every cell of the grid with the given scheme.
SubcellLayout decompose_grid(const VoxelGrid& grid, const CellGrid& cells,
                             const SchemeTag& scheme, double threshold = 0.0);

/// A face pair that neither matches exactly nor nests (partial overlap).
struct FacePairViolation {
    int cell_a = -1, sub_a = -1;  ///< minus-side subcell
    int cell_b = -1, sub_b = -1;  ///< plus-side subcell
    int axis = -1;                ///< face normal axis
    int plane = -1;               ///< global voxel plane coordinate
};

struct ConsistencyReport {
    bool consistent = true;
    std::vector<FacePairViolation> partial_overlaps;
    /// Number of hanging nodes participating in cyclic constraint
    /// dependencies on the fully-switched mesh (must be zero).
    int n_cycle_nodes = 0;
    /// Hanging nodes whose interpolation masters are themselves hanging;
    /// these chains are resolved by substitution and are not violations.
    int n_chained_nodes = 0;
    int n_hanging_nodes = 0;
};

/// Checks mesh consistency of a layout: every pair of touching subcell faces
/// (within cells and across cell boundaries) must either match exactly or
/// nest, and the hanging-node dependency graph of the fully-switched mesh
/// must be cycle-free.
ConsistencyReport check_consistency(const SubcellLayout& layout);

struct DecompositionStats {
    std::size_t n_subcells = 0;
    /// Constraint equations (3 per hanging node) of the hypothetical
    /// fully-switched trilinear mesh.
    std::size_t n_constraints = 0;
    double max_aspect = 1.0;        ///< max per-subcell edge ratio (physical)
    double global_edge_ratio = 1.0; ///< max edge / min edge over all subcells
    bool consistent = true;
};

DecompositionStats decomposition_stats(const SubcellLayout& layout,
                                       const VoxelGrid& grid);

/// Re-rasterizes a cell's subcells back to voxels; used to verify exact
/// phase reproduction and cover validity. Throws NumericsError if the
/// subcells are not a disjoint cover of the block.
PhaseBlock rasterize(const std::vector<Subcell>& subcells, const Index3& extent);

}  // namespace voxfrac

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "voxfrac/decomposition.hpp"

namespace voxfrac {

namespace {

/// View of a PhaseBlock restricted to [lo, lo+extent).
struct SubBlock {
    const PhaseBlock* block;
    Index3 lo;
    Index3 extent;

    std::uint8_t at(int x, int y, int z) const {
        return block->at(lo[0] + x, lo[1] + y, lo[2] + z);
    }
    long volume() const {
        return static_cast<long>(extent[0]) * extent[1] * extent[2];
    }
};

struct PhaseCount {
    bool homogeneous = true;
    std::uint8_t dominant = 0;
    double minority_fraction = 0.0;
};

PhaseCount count_phases(const SubBlock& b) {
    std::array<long, 256> counts{};
    std::uint8_t first = b.at(0, 0, 0);
    bool homog = true;
    for (int z = 0; z < b.extent[2]; ++z)
        for (int y = 0; y < b.extent[1]; ++y)
            for (int x = 0; x < b.extent[0]; ++x) {
                const std::uint8_t p = b.at(x, y, z);
                ++counts[p];
                homog = homog && (p == first);
            }
    PhaseCount pc;
    pc.homogeneous = homog;
    long best = -1;
    for (int p = 0; p < 256; ++p) {
        if (counts[p] > best) {  // ties resolve to the smallest phase id
            best = counts[p];
            pc.dominant = static_cast<std::uint8_t>(p);
        }
    }
    pc.minority_fraction = 1.0 - double(best) / double(b.volume());
    return pc;
}

Subcell box_subcell(const Index3& lo, const Index3& extent, std::uint8_t phase,
                    bool flagged) {
    Subcell s;
    s.lo = lo;
    for (int a = 0; a < 3; ++a) s.hi[a] = lo[a] + extent[a];
    s.phase = phase;
    s.threshold_assigned = flagged;
    return s;
}

/// One octree leaf region.
struct OctreeLeaf {
    Index3 lo;
    Index3 extent;
    bool resolved;        ///< homogeneous or threshold-assigned
    std::uint8_t phase;   ///< valid when resolved
    bool flagged;         ///< threshold/level-cap assignment
};

[[noreturn]] void odd_split_error(const Index3& extent) {
    std::ostringstream os;
    os << "octree: odd extents (" << extent[0] << "," << extent[1] << ","
       << extent[2] << ") at a required split level";
    throw InputError(os.str());
}

/// Recursive octree descent shared by the pure and combined schemes.
/// `cap_heterogeneous`: at max_level, emit unresolved heterogeneous leaves
/// (combined schemes hand them to a tail stage; the pure scheme assigns the
/// dominant phase afterwards).
void octree_recurse(const SubBlock& b, int level, int max_level, int min_level,
                    double threshold, std::vector<OctreeLeaf>& out) {
    const PhaseCount pc = count_phases(b);
    const bool need_force = level < min_level;

    if (!need_force) {
        if (pc.homogeneous) {
            out.push_back({b.lo, b.extent, true, pc.dominant, false});
            return;
        }
        if (threshold > 0.0 && pc.minority_fraction < threshold) {
            out.push_back({b.lo, b.extent, true, pc.dominant, true});
            return;
        }
        if (level >= max_level) {
            out.push_back({b.lo, b.extent, false, pc.dominant, true});
            return;
        }
    }

    // A split is required here (heterogeneous below the cap, or forced).
    for (int a = 0; a < 3; ++a)
        if (b.extent[a] % 2 != 0) odd_split_error(b.extent);

    const Index3 h{b.extent[0] / 2, b.extent[1] / 2, b.extent[2] / 2};
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
                SubBlock child;
                child.block = b.block;
                child.lo = {b.lo[0] + dx * h[0], b.lo[1] + dy * h[1],
                            b.lo[2] + dz * h[2]};
                child.extent = h;
                octree_recurse(child, level + 1, max_level, min_level, threshold,
                               out);
            }
}

std::vector<OctreeLeaf> octree_leaves(const PhaseBlock& block, int max_level,
                                      double threshold, int min_level) {
    if (threshold < 0.0 || threshold >= 0.5)
        throw InputError("octree: threshold must lie in [0, 0.5)");
    SubBlock root{&block, {0, 0, 0}, block.extent};
    std::vector<OctreeLeaf> leaves;
    octree_recurse(root, 0, max_level, min_level, threshold, leaves);
    return leaves;
}

/// Extent-matched merging of maximal adjacent chains along `ax`:
/// groups boxes by phase and by their ranges on the other two axes and
/// concatenates abutting runs. Deterministic (groups sorted by key).
std::vector<Subcell> merge_along(const std::vector<Subcell>& boxes, int ax) {
    struct Key {
        std::array<int, 4> other;  // lo/hi of the two cross axes
        std::uint8_t phase;
        auto operator<=>(const Key&) const = default;
    };
    std::map<Key, std::vector<Subcell>> groups;
    for (const Subcell& s : boxes) {
        Key k{};
        int i = 0;
        for (int a = 0; a < 3; ++a) {
            if (a == ax) continue;
            k.other[i++] = s.lo[a];
            k.other[i++] = s.hi[a];
        }
        k.phase = s.phase;
        groups[k].push_back(s);
    }
    std::vector<Subcell> out;
    out.reserve(boxes.size());
    for (auto& [key, runs] : groups) {
        std::sort(runs.begin(), runs.end(),
                  [&](const Subcell& a, const Subcell& b) { return a.lo[ax] < b.lo[ax]; });
        Subcell cur = runs.front();
        for (std::size_t i = 1; i < runs.size(); ++i) {
            if (runs[i].lo[ax] == cur.hi[ax]) {
                cur.hi[ax] = runs[i].hi[ax];
                cur.threshold_assigned |= runs[i].threshold_assigned;
            } else {
                out.push_back(cur);
                cur = runs[i];
            }
        }
        out.push_back(cur);
    }
    return out;
}

/// Pairwise (at most once per box) merging along `ax` used by the blockwise
/// 2x2x2 scheme; `eligible` gates which boxes may pair.
template <class Eligible>
std::vector<Subcell> pair_along(const std::vector<Subcell>& boxes, int ax,
                                Eligible eligible) {
    std::vector<Subcell> out;
    std::vector<char> used(boxes.size(), 0);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (used[i]) continue;
        const Subcell& b = boxes[i];
        bool merged = false;
        if (eligible(b)) {
            for (std::size_t j = i + 1; j < boxes.size(); ++j) {
                if (used[j]) continue;
                const Subcell& c = boxes[j];
                if (c.phase != b.phase || !eligible(c)) continue;
                bool ok = true;
                for (int a = 0; a < 3; ++a) {
                    if (a == ax) continue;
                    ok = ok && c.lo[a] == b.lo[a] && c.hi[a] == b.hi[a];
                }
                if (ok && c.lo[ax] == b.hi[ax]) {
                    Subcell m = b;
                    m.hi[ax] = c.hi[ax];
                    m.threshold_assigned = b.threshold_assigned || c.threshold_assigned;
                    out.push_back(m);
                    used[i] = used[j] = 1;
                    merged = true;
                    break;
                }
            }
        }
        if (!merged) {
            out.push_back(b);
            used[i] = 1;
        }
    }
    return out;
}

/// Hierarchical pairing of a (typically <= 2x2x2) heterogeneous block:
/// voxel pairs along x, dominoes along y (requiring complete x extent),
/// plates along z (requiring complete x and y extents). The produced boxes
/// have extents 1 or 2 per axis with consistent orientation, which keeps
/// touching faces either matching or nested.
std::vector<Subcell> mt_pair_block(const SubBlock& b) {
    std::vector<Subcell> boxes;
    for (int k = 0; k < b.extent[2]; ++k)
        for (int j = 0; j < b.extent[1]; ++j) {
            int i = 0;
            while (i < b.extent[0]) {
                const std::uint8_t p = b.at(i, j, k);
                if (i + 1 < b.extent[0] && b.at(i + 1, j, k) == p) {
                    boxes.push_back(box_subcell({b.lo[0] + i, b.lo[1] + j, b.lo[2] + k},
                                                {2, 1, 1}, p, false));
                    i += 2;
                } else {
                    boxes.push_back(box_subcell({b.lo[0] + i, b.lo[1] + j, b.lo[2] + k},
                                                {1, 1, 1}, p, false));
                    i += 1;
                }
            }
        }
    const int nx = b.extent[0];
    boxes = pair_along(boxes, 1, [nx](const Subcell& s) {
        const int ex = s.extent(0);
        return ex == 2 || ex == nx;
    });
    boxes = pair_along(boxes, 2, [](const Subcell& s) {
        return s.extent(0) >= 2 && s.extent(1) >= 2;
    });
    return boxes;
}

/// Octree descent for the blockwise 2x2x2 scheme: split while the block is
/// heterogeneous (and not threshold-dominant), all extents are even, and the
/// max extent exceeds 2; remaining heterogeneous leaves are resolved by
/// hierarchical pairing.
void mt_recurse(const SubBlock& b, double threshold, std::vector<Subcell>& out) {
    const PhaseCount pc = count_phases(b);
    if (pc.homogeneous) {
        out.push_back(box_subcell(b.lo, b.extent, pc.dominant, false));
        return;
    }
    if (threshold > 0.0 && pc.minority_fraction < threshold) {
        out.push_back(box_subcell(b.lo, b.extent, pc.dominant, true));
        return;
    }
    const bool splittable = b.extent[0] % 2 == 0 && b.extent[1] % 2 == 0 &&
                            b.extent[2] % 2 == 0 &&
                            std::max({b.extent[0], b.extent[1], b.extent[2]}) > 2;
    if (!splittable) {
        auto leaf = mt_pair_block(b);
        out.insert(out.end(), leaf.begin(), leaf.end());
        return;
    }
    const Index3 h{b.extent[0] / 2, b.extent[1] / 2, b.extent[2] / 2};
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
                SubBlock child;
                child.block = b.block;
                child.lo = {b.lo[0] + dx * h[0], b.lo[1] + dy * h[1],
                            b.lo[2] + dz * h[2]};
                child.extent = h;
                mt_recurse(child, threshold, out);
            }
}

/// Per-voxel boxes of a sub-block (seed for the plain merge scheme).
std::vector<Subcell> voxel_boxes(const SubBlock& b) {
    std::vector<Subcell> out;
    out.reserve(static_cast<std::size_t>(b.volume()));
    for (int z = 0; z < b.extent[2]; ++z)
        for (int y = 0; y < b.extent[1]; ++y)
            for (int x = 0; x < b.extent[0]; ++x)
                out.push_back(box_subcell({b.lo[0] + x, b.lo[1] + y, b.lo[2] + z},
                                          {1, 1, 1}, b.at(x, y, z), false));
    return out;
}

/// Copies a sub-block region into a standalone PhaseBlock.
PhaseBlock copy_block(const SubBlock& b) {
    PhaseBlock out;
    out.extent = b.extent;
    out.v.resize(static_cast<std::size_t>(b.volume()));
    std::size_t i = 0;
    for (int z = 0; z < b.extent[2]; ++z)
        for (int y = 0; y < b.extent[1]; ++y)
            for (int x = 0; x < b.extent[0]; ++x) out.v[i++] = b.at(x, y, z);
    return out;
}

std::vector<Subcell> apply_stage(SchemeTag::Stage stage, const SubBlock& region,
                                 double threshold);

/// Runs the tail pipeline inside one leaf region; stages after the first run
/// on the previous stage's boxes (only OD-M occurs per the grammar, where M
/// merges the OD output).
std::vector<Subcell> apply_tail(const std::vector<SchemeTag::Stage>& tail,
                                const SubBlock& region, double threshold) {
    std::vector<Subcell> boxes = apply_stage(tail.front(), region, threshold);
    for (std::size_t i = 1; i < tail.size(); ++i) {
        if (tail[i] != SchemeTag::Stage::M)
            throw InputError("scheme: only M may follow another tail stage");
        boxes = merge_subcells(std::move(boxes));
    }
    return boxes;
}

std::vector<Subcell> apply_stage(SchemeTag::Stage stage, const SubBlock& region,
                                 double threshold) {
    switch (stage) {
        case SchemeTag::Stage::OD: {
            const PhaseBlock local = copy_block(region);
            auto boxes = optimal_decompose(local);
            for (auto& s : boxes)
                for (int a = 0; a < 3; ++a) {
                    s.lo[a] += region.lo[a];
                    s.hi[a] += region.lo[a];
                }
            return boxes;
        }
        case SchemeTag::Stage::M:
            return merge_subcells(voxel_boxes(region));
        case SchemeTag::Stage::MT: {
            std::vector<Subcell> out;
            mt_recurse(region, threshold, out);
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace

PhaseBlock extract_cell_block(const VoxelGrid& grid, const CellGrid& cells,
                              int cx, int cy, int cz) {
    PhaseBlock b;
    b.extent = cells.voxels_per_cell;
    b.v.resize(static_cast<std::size_t>(b.volume()));
    const int ox = cx * cells.voxels_per_cell[0];
    const int oy = cy * cells.voxels_per_cell[1];
    const int oz = cz * cells.voxels_per_cell[2];
    std::size_t i = 0;
    for (int z = 0; z < b.extent[2]; ++z)
        for (int y = 0; y < b.extent[1]; ++y)
            for (int x = 0; x < b.extent[0]; ++x)
                b.v[i++] = grid.at(ox + x, oy + y, oz + z);
    return b;
}

std::vector<Subcell> octree_decompose(const PhaseBlock& block, int max_level,
                                      double threshold, int min_level) {
    auto leaves = octree_leaves(block, max_level, threshold, min_level);
    std::vector<Subcell> out;
    out.reserve(leaves.size());
    for (const auto& leaf : leaves)
        out.push_back(box_subcell(leaf.lo, leaf.extent, leaf.phase,
                                  leaf.flagged || !leaf.resolved));
    return out;
}

std::vector<Subcell> merge_subcells(std::vector<Subcell> subcells) {
    if (subcells.empty()) return subcells;
    std::size_t count = subcells.size();
    while (true) {
        for (int ax = 0; ax < 3; ++ax) subcells = merge_along(subcells, ax);
        if (subcells.size() == count) break;
        count = subcells.size();
    }
    // Canonical deterministic order.
    std::sort(subcells.begin(), subcells.end(), [](const Subcell& a, const Subcell& b) {
        return std::tie(a.lo[2], a.lo[1], a.lo[0]) < std::tie(b.lo[2], b.lo[1], b.lo[0]);
    });
    return subcells;
}

std::vector<Subcell> run_length_decompose(const PhaseBlock& block,
                                          const Index3& perm) {
    const int a0 = perm[0], a1 = perm[1], a2 = perm[2];
    const Index3 n = block.extent;
    std::vector<Subcell> boxes;
    Index3 idx{};
    for (int k = 0; k < n[a2]; ++k)
        for (int j = 0; j < n[a1]; ++j) {
            int i = 0;
            while (i < n[a0]) {
                idx[a0] = i;
                idx[a1] = j;
                idx[a2] = k;
                const std::uint8_t p = block.at(idx[0], idx[1], idx[2]);
                int i2 = i + 1;
                while (i2 < n[a0]) {
                    idx[a0] = i2;
                    if (block.at(idx[0], idx[1], idx[2]) != p) break;
                    ++i2;
                }
                Subcell s;
                s.lo[a0] = i;
                s.hi[a0] = i2;
                s.lo[a1] = j;
                s.hi[a1] = j + 1;
                s.lo[a2] = k;
                s.hi[a2] = k + 1;
                s.phase = p;
                boxes.push_back(s);
                i = i2;
            }
        }
    boxes = merge_along(boxes, a1);
    boxes = merge_along(boxes, a2);
    return boxes;
}

std::vector<Subcell> optimal_decompose(const PhaseBlock& block) {
    static constexpr std::array<Index3, 6> perms{{{0, 1, 2},
                                                  {0, 2, 1},
                                                  {1, 0, 2},
                                                  {1, 2, 0},
                                                  {2, 0, 1},
                                                  {2, 1, 0}}};
    std::vector<Subcell> best;
    bool first = true;
    for (const auto& perm : perms) {
        auto boxes = run_length_decompose(block, perm);
        if (first || boxes.size() < best.size()) {
            best = std::move(boxes);
            first = false;
        }
    }
    return best;
}

std::vector<Subcell> mt_decompose(const PhaseBlock& block, double threshold) {
    SubBlock root{&block, {0, 0, 0}, block.extent};
    std::vector<Subcell> out;
    mt_recurse(root, threshold, out);
    return out;
}

std::vector<Subcell> combined_decompose(const PhaseBlock& block,
                                        const SchemeTag& scheme,
                                        double threshold) {
    SubBlock root{&block, {0, 0, 0}, block.extent};

    if (scheme.levels == 0) {
        // Bare M / OD / MT on the whole block.
        return apply_tail(scheme.tail, root, threshold);
    }

    auto leaves =
        octree_leaves(block, scheme.levels, threshold, scheme.min_levels);
    std::vector<Subcell> out;
    for (const auto& leaf : leaves) {
        if (leaf.resolved) {
            out.push_back(box_subcell(leaf.lo, leaf.extent, leaf.phase, leaf.flagged));
            continue;
        }
        if (scheme.tail.empty()) {
            // Pure T<k>: unresolved leaves get the dominant phase.
            out.push_back(box_subcell(leaf.lo, leaf.extent, leaf.phase, true));
            continue;
        }
        SubBlock region{&block, leaf.lo, leaf.extent};
        auto boxes = apply_tail(scheme.tail, region, threshold);
        out.insert(out.end(), boxes.begin(), boxes.end());
    }
    return out;
}

SubcellLayout decompose_grid(const VoxelGrid& grid, const CellGrid& cells,
                             const SchemeTag& scheme, double threshold) {
    SubcellLayout layout;
    layout.grid = cells;
    layout.scheme = scheme;
    layout.cells.resize(static_cast<std::size_t>(cells.cell_count()));
    for (int cz = 0; cz < cells.cells_per_axis[2]; ++cz)
        for (int cy = 0; cy < cells.cells_per_axis[1]; ++cy)
            for (int cx = 0; cx < cells.cells_per_axis[0]; ++cx) {
                const PhaseBlock block = extract_cell_block(grid, cells, cx, cy, cz);
                layout.cells[cells.cell_index(cx, cy, cz)] =
                    combined_decompose(block, scheme, threshold);
            }
    return layout;
}

PhaseBlock rasterize(const std::vector<Subcell>& subcells, const Index3& extent) {
    PhaseBlock out;
    out.extent = extent;
    const std::size_t n = static_cast<std::size_t>(out.volume());
    out.v.assign(n, 0);
    std::vector<char> painted(n, 0);
    for (const Subcell& s : subcells) {
        for (int a = 0; a < 3; ++a) {
            if (s.lo[a] < 0 || s.hi[a] > extent[a] || s.lo[a] >= s.hi[a])
                throw NumericsError("rasterize: subcell outside block or empty");
        }
        for (int z = s.lo[2]; z < s.hi[2]; ++z)
            for (int y = s.lo[1]; y < s.hi[1]; ++y)
                for (int x = s.lo[0]; x < s.hi[0]; ++x) {
                    const std::size_t i =
                        static_cast<std::size_t>(x) +
                        static_cast<std::size_t>(extent[0]) *
                            (static_cast<std::size_t>(y) +
                             static_cast<std::size_t>(extent[1]) *
                                 static_cast<std::size_t>(z));
                    if (painted[i])
                        throw NumericsError("rasterize: overlapping subcells");
                    painted[i] = 1;
                    out.v[i] = s.phase;
                }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!painted[i]) throw NumericsError("rasterize: uncovered voxel");
    return out;
}

}  // namespace voxfrac

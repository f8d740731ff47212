#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "voxfrac/decomposition.hpp"
#include "voxfrac/voxel_grid.hpp"

namespace voxfrac {

namespace {

struct GlobalBox {
    Index3 lo;
    Index3 hi;
    int cell;
    int sub;
};

std::vector<GlobalBox> global_boxes(const SubcellLayout& layout) {
    std::vector<GlobalBox> boxes;
    boxes.reserve(layout.total_subcells());
    const Index3 vpc = layout.grid.voxels_per_cell;
    for (int cz = 0; cz < layout.grid.cells_per_axis[2]; ++cz)
        for (int cy = 0; cy < layout.grid.cells_per_axis[1]; ++cy)
            for (int cx = 0; cx < layout.grid.cells_per_axis[0]; ++cx) {
                const int ci = layout.grid.cell_index(cx, cy, cz);
                const Index3 origin{cx * vpc[0], cy * vpc[1], cz * vpc[2]};
                const auto& subs = layout.cells[ci];
                for (std::size_t si = 0; si < subs.size(); ++si) {
                    GlobalBox g;
                    for (int a = 0; a < 3; ++a) {
                        g.lo[a] = origin[a] + subs[si].lo[a];
                        g.hi[a] = origin[a] + subs[si].hi[a];
                    }
                    g.cell = ci;
                    g.sub = static_cast<int>(si);
                    boxes.push_back(g);
                }
            }
    return boxes;
}

/// Detects partially overlapping face pairs: for every interior plane normal
/// to each axis, faces ending on the minus side are compared against faces
/// starting on the plus side; a nonempty overlap that equals neither face
/// rectangle is a violation (matching and nested faces are fine).
void find_partial_overlaps(const std::vector<GlobalBox>& boxes,
                           std::vector<FacePairViolation>& out) {
    struct Face {
        int lo0, hi0, lo1, hi1;  // rectangle on the two cross axes
        int box;
    };
    for (int ax = 0; ax < 3; ++ax) {
        const int b0 = (ax + 1) % 3, b1 = (ax + 2) % 3;
        std::map<int, std::pair<std::vector<Face>, std::vector<Face>>> planes;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            const GlobalBox& g = boxes[i];
            const Face f{g.lo[b0], g.hi[b0], g.lo[b1], g.hi[b1],
                         static_cast<int>(i)};
            planes[g.hi[ax]].first.push_back(f);   // minus side of plane hi
            planes[g.lo[ax]].second.push_back(f);  // plus side of plane lo
        }
        for (const auto& [plane, sides] : planes) {
            for (const Face& fa : sides.first)
                for (const Face& fb : sides.second) {
                    const int lo0 = std::max(fa.lo0, fb.lo0);
                    const int hi0 = std::min(fa.hi0, fb.hi0);
                    const int lo1 = std::max(fa.lo1, fb.lo1);
                    const int hi1 = std::min(fa.hi1, fb.hi1);
                    if (lo0 >= hi0 || lo1 >= hi1) continue;  // no overlap
                    const bool equals_a = lo0 == fa.lo0 && hi0 == fa.hi0 &&
                                          lo1 == fa.lo1 && hi1 == fa.hi1;
                    const bool equals_b = lo0 == fb.lo0 && hi0 == fb.hi0 &&
                                          lo1 == fb.lo1 && hi1 == fb.hi1;
                    if (equals_a || equals_b) continue;  // matching or nested
                    FacePairViolation v;
                    v.cell_a = boxes[fa.box].cell;
                    v.sub_a = boxes[fa.box].sub;
                    v.cell_b = boxes[fb.box].cell;
                    v.sub_b = boxes[fb.box].sub;
                    v.axis = ax;
                    v.plane = plane;
                    out.push_back(v);
                }
        }
    }
}

struct HangingAnalysis {
    int n_hanging = 0;
    int n_chained = 0;
    int n_cycle = 0;
};

/// Analyses the corner lattice of the fully resolved trilinear mesh (one
/// element per subcell): a node is hanging when some box contains it in its
/// closure without listing it as a corner; its donor is the lowest-id such
/// box. Chains are hanging nodes whose donor interpolation involves other
/// hanging nodes; cycles in that dependency graph are inconsistencies.
HangingAnalysis analyse_hanging(const std::vector<GlobalBox>& boxes) {
    std::map<Index3, int> node_id;
    auto corner_of = [](const GlobalBox& g, const Index3& q) {
        for (int a = 0; a < 3; ++a)
            if (q[a] != g.lo[a] && q[a] != g.hi[a]) return false;
        return true;
    };
    for (const GlobalBox& g : boxes)
        for (int dz = 0; dz < 2; ++dz)
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) {
                    const Index3 q{dx ? g.hi[0] : g.lo[0], dy ? g.hi[1] : g.lo[1],
                                   dz ? g.hi[2] : g.lo[2]};
                    node_id.emplace(q, 0);
                }
    int next = 0;
    for (auto& [key, id] : node_id) id = next++;

    // donor[n] = index of the first box whose closure contains node n as a
    // non-corner point; -1 for regular nodes.
    std::vector<int> donor(node_id.size(), -1);
    for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
        const GlobalBox& g = boxes[bi];
        Index3 q;
        for (q[2] = g.lo[2]; q[2] <= g.hi[2]; ++q[2])
            for (q[1] = g.lo[1]; q[1] <= g.hi[1]; ++q[1])
                for (q[0] = g.lo[0]; q[0] <= g.hi[0]; ++q[0]) {
                    if (corner_of(g, q)) continue;
                    auto it = node_id.find(q);
                    if (it == node_id.end()) continue;
                    if (donor[it->second] < 0)
                        donor[it->second] = static_cast<int>(bi);
                }
    }

    HangingAnalysis res;
    std::vector<std::vector<int>> deps(node_id.size());  // hanging -> hanging masters
    std::vector<Index3> node_key(node_id.size());
    for (const auto& [key, id] : node_id) node_key[id] = key;
    for (std::size_t n = 0; n < donor.size(); ++n) {
        if (donor[n] < 0) continue;
        ++res.n_hanging;
        const GlobalBox& g = boxes[static_cast<std::size_t>(donor[n])];
        const Index3& q = node_key[n];
        for (int dz = 0; dz < 2; ++dz)
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx) {
                    const Index3 c{dx ? g.hi[0] : g.lo[0], dy ? g.hi[1] : g.lo[1],
                                   dz ? g.hi[2] : g.lo[2]};
                    double w = 1.0;
                    for (int a = 0; a < 3; ++a) {
                        const double t = double(q[a] - g.lo[a]) / double(g.hi[a] - g.lo[a]);
                        const int d = a == 0 ? dx : (a == 1 ? dy : dz);
                        w *= d ? t : (1.0 - t);
                    }
                    if (std::abs(w) < 1e-12) continue;
                    const int m = node_id.at(c);
                    if (donor[static_cast<std::size_t>(m)] >= 0)
                        deps[n].push_back(m);
                }
        if (!deps[n].empty()) ++res.n_chained;
    }

    // Tarjan strongly connected components over the dependency graph;
    // components with more than one node are cycles.
    const int N = static_cast<int>(node_id.size());
    std::vector<int> index(N, -1), low(N, 0), on_stack(N, 0), comp(N, -1);
    std::vector<int> stack;
    int counter = 0, n_comp = 0;
    std::vector<int> comp_size;
    struct Frame {
        int v;
        std::size_t child;
    };
    for (int start = 0; start < N; ++start) {
        if (index[start] != -1 || donor[static_cast<std::size_t>(start)] < 0)
            continue;
        std::vector<Frame> frames{{start, 0}};
        index[start] = low[start] = counter++;
        stack.push_back(start);
        on_stack[start] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.child < deps[static_cast<std::size_t>(f.v)].size()) {
                const int w = deps[static_cast<std::size_t>(f.v)][f.child++];
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    int size = 0;
                    while (true) {
                        const int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp[w] = n_comp;
                        ++size;
                        if (w == f.v) break;
                    }
                    comp_size.push_back(size);
                    ++n_comp;
                }
                const int v = f.v;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    for (int n = 0; n < N; ++n)
        if (comp[n] >= 0 && comp_size[static_cast<std::size_t>(comp[n])] > 1)
            ++res.n_cycle;
    return res;
}

}  // namespace

ConsistencyReport check_consistency(const SubcellLayout& layout) {
    ConsistencyReport rep;
    const auto boxes = global_boxes(layout);
    find_partial_overlaps(boxes, rep.partial_overlaps);
    const HangingAnalysis h = analyse_hanging(boxes);
    rep.n_hanging_nodes = h.n_hanging;
    rep.n_chained_nodes = h.n_chained;
    rep.n_cycle_nodes = h.n_cycle;
    rep.consistent = rep.partial_overlaps.empty() && h.n_cycle == 0;
    return rep;
}

DecompositionStats decomposition_stats(const SubcellLayout& layout,
                                       const VoxelGrid& grid) {
    DecompositionStats st;
    st.n_subcells = layout.total_subcells();
    const auto sp = grid.spacing_mm();
    double emax = 0.0, emin = std::numeric_limits<double>::max();
    double aspect = 0.0;
    for (const auto& cell : layout.cells)
        for (const Subcell& s : cell) {
            double bmax = 0.0, bmin = std::numeric_limits<double>::max();
            for (int a = 0; a < 3; ++a) {
                const double e = s.extent(a) * sp[a];
                bmax = std::max(bmax, e);
                bmin = std::min(bmin, e);
            }
            aspect = std::max(aspect, bmax / bmin);
            emax = std::max(emax, bmax);
            emin = std::min(emin, bmin);
        }
    st.max_aspect = aspect;
    st.global_edge_ratio = st.n_subcells > 0 ? emax / emin : 1.0;
    const ConsistencyReport rep = check_consistency(layout);
    st.n_constraints = 3 * rep.n_hanging_nodes;
    st.consistent = rep.consistent;
    return st;
}

}  // namespace voxfrac

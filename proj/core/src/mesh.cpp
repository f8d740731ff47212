#include <algorithm>
#include <limits>
#include <sstream>

#include "voxfrac/mesh.hpp"
#include "voxfrac/quadrature.hpp"
#include "voxfrac/shape.hpp"

namespace voxfrac {

namespace {

Box3d physical_box(const Box3i& vox, const Vec3d& sp) {
    Box3d b;
    for (int a = 0; a < 3; ++a) {
        b.lo[a] = vox.lo[a] * sp[a];
        b.hi[a] = vox.hi[a] * sp[a];
    }
    return b;
}

/// Node keys of a Lagrange lattice over a voxel box (doubled coordinates).
std::vector<NodeKey> lattice_keys(const Box3i& vox, int order) {
    std::vector<NodeKey> keys;
    keys.reserve(static_cast<std::size_t>(nodes_per_element(order)));
    Index3 step;
    for (int a = 0; a < 3; ++a) step[a] = 2 * (vox.hi[a] - vox.lo[a]) / order;
    for (int k = 0; k <= order; ++k)
        for (int j = 0; j <= order; ++j)
            for (int i = 0; i <= order; ++i)
                keys.push_back(NodeKey{2 * vox.lo[0] + i * step[0],
                                       2 * vox.lo[1] + j * step[1],
                                       2 * vox.lo[2] + k * step[2]});
    return keys;
}

Vec3d ref_coords_in(const Box3i& vox, const NodeKey& key) {
    Vec3d xi;
    for (int a = 0; a < 3; ++a) {
        const double t =
            double(key[a] - 2 * vox.lo[a]) / double(2 * (vox.hi[a] - vox.lo[a]));
        xi[a] = 2.0 * t - 1.0;
    }
    return xi;
}

bool key_in_closure(const Box3i& vox, const NodeKey& key) {
    for (int a = 0; a < 3; ++a)
        if (key[a] < 2 * vox.lo[a] || key[a] > 2 * vox.hi[a]) return false;
    return true;
}

}  // namespace

int FcmMesh::n_active_nodes() const {
    return static_cast<int>(std::count(node_active.begin(), node_active.end(), 1));
}

const MaterialParams& FcmMesh::phase_material(std::uint8_t phase) const {
    if (phase >= materials.size())
        throw InputError("mesh: no material bound to phase " + std::to_string(phase));
    return materials[phase];
}

std::pair<int, int> FcmMesh::subcell_of(int gid) const {
    if (gid < 0 || gid >= n_subcells_)
        throw InputError("mesh: subcell id out of range");
    return {gid_cell_[static_cast<std::size_t>(gid)],
            gid_sub_[static_cast<std::size_t>(gid)]};
}

int FcmMesh::add_node(const NodeKey& key) {
    auto [it, inserted] = node_index.emplace(key, n_nodes());
    if (inserted) {
        node_key.push_back(key);
        node_pos.push_back(Vec3d(0.5 * key[0] * spacing[0], 0.5 * key[1] * spacing[1],
                                 0.5 * key[2] * spacing[2]));
        node_active.push_back(1);
    }
    return it->second;
}

FcmMesh build_mesh(const VoxelGrid& grid, const SubcellLayout& layout,
                   const std::vector<MaterialParams>& materials, int cell_order,
                   int switch_order) {
    if (cell_order != 1 && cell_order != 2)
        throw InputError("mesh: cell order must be 1 or 2");
    if (switch_order != 1 && switch_order != 2)
        throw InputError("mesh: switch order must be 1 or 2");
    if (layout.cells.size() != static_cast<std::size_t>(layout.grid.cell_count()))
        throw InputError("mesh: layout does not match its cell grid");

    FcmMesh mesh;
    const Vec3d sp(grid.spacing_mm()[0], grid.spacing_mm()[1], grid.spacing_mm()[2]);
    mesh.spacing = sp;
    mesh.total_voxels = grid.dims;
    mesh.grid = layout.grid;
    mesh.switch_order = switch_order;
    mesh.materials = materials;

    const Index3 vpc = layout.grid.voxels_per_cell;
    const int rule = rule_for_order(switch_order);
    const int gpps = rule * rule * rule;

    mesh.cells.reserve(layout.cells.size());
    for (int cz = 0; cz < layout.grid.cells_per_axis[2]; ++cz)
        for (int cy = 0; cy < layout.grid.cells_per_axis[1]; ++cy)
            for (int cx = 0; cx < layout.grid.cells_per_axis[0]; ++cx) {
                const int ci = layout.grid.cell_index(cx, cy, cz);
                MeshCell cell;
                cell.index = ci;
                cell.vox.lo = {cx * vpc[0], cy * vpc[1], cz * vpc[2]};
                cell.vox.hi = {(cx + 1) * vpc[0], (cy + 1) * vpc[1], (cz + 1) * vpc[2]};
                cell.box = physical_box(cell.vox, sp);
                cell.order = cell_order;
                for (const NodeKey& key : lattice_keys(cell.vox, cell_order))
                    cell.nodes.push_back(mesh.add_node(key));

                const auto& subs = layout.cells[static_cast<std::size_t>(ci)];
                if (subs.empty()) throw InputError("mesh: cell without subcells");
                for (const Subcell& s : subs) {
                    Box3i sv;
                    for (int a = 0; a < 3; ++a) {
                        sv.lo[a] = cell.vox.lo[a] + s.lo[a];
                        sv.hi[a] = cell.vox.lo[a] + s.hi[a];
                    }
                    cell.sub_vox.push_back(sv);
                    cell.sub_boxes.push_back(physical_box(sv, sp));
                    if (s.phase >= materials.size())
                        throw InputError("mesh: phase " + std::to_string(s.phase) +
                                         " has no material");
                    cell.sub_phase.push_back(s.phase);
                    cell.sub_gid.push_back(mesh.n_subcells_);
                    cell.sub_element.push_back(-1);
                    mesh.gid_cell_.push_back(ci);
                    mesh.gid_sub_.push_back(static_cast<int>(cell.sub_vox.size()) - 1);
                    ++mesh.n_subcells_;
                }
                cell.quad = composite_quadrature(rule, cell.box, cell.sub_boxes);
                cell.gp_per_subcell = gpps;
                cell.gp_state.resize(cell.quad.size());
                cell.gp_psi_e.assign(cell.quad.size(), 0.0);
                cell.gp_psi_p.assign(cell.quad.size(), 0.0);
                cell.gp_vm.assign(cell.quad.size(), 0.0);
                const Vec3d c = cell.box.center();
                const Vec3d h = 0.5 * cell.box.extent();
                for (const Vec3d& xi : cell.quad.xi)
                    cell.gp_pos.push_back(c + xi.cwiseProduct(h));
                mesh.cells.push_back(std::move(cell));
            }

    mesh.rebuild_topology();
    return mesh;
}

std::vector<int> FcmMesh::switch_cell(int ci,
                                      const std::vector<Eigen::VectorXd*>& fields) {
    MeshCell& cell = cells.at(static_cast<std::size_t>(ci));
    if (!cell.active)
        throw InputError("mesh: cell " + std::to_string(ci) + " is already split");
    const int old_n = n_nodes();
    for (const Eigen::VectorXd* f : fields)
        if (f->size() != 3 * old_n)
            throw InputError("mesh: nodal field size mismatch on split");

    struct NewNode {
        int id;
        Vec3d xi;  // in the parent cell
    };
    std::vector<NewNode> created;
    std::vector<int> new_elements;
    const int rule = rule_for_order(switch_order);

    for (std::size_t s = 0; s < cell.sub_vox.size(); ++s) {
        MeshElement el;
        el.index = static_cast<int>(elements.size());
        el.parent_cell = ci;
        el.subcell_gid = cell.sub_gid[s];
        el.phase = cell.sub_phase[s];
        el.vox = cell.sub_vox[s];
        el.box = cell.sub_boxes[s];
        el.order = switch_order;
        for (const NodeKey& key : lattice_keys(el.vox, switch_order)) {
            const int before = n_nodes();
            const int id = add_node(key);
            if (id >= before) created.push_back({id, ref_coords_in(cell.vox, key)});
            el.nodes.push_back(id);
        }
        el.quad = box_quadrature(rule, el.box);
        const int gpps = cell.gp_per_subcell;
        const auto base = static_cast<std::size_t>(static_cast<int>(s) * gpps);
        el.gp_state.assign(cell.gp_state.begin() + base,
                           cell.gp_state.begin() + base + gpps);
        el.gp_psi_e.assign(cell.gp_psi_e.begin() + base,
                           cell.gp_psi_e.begin() + base + gpps);
        el.gp_psi_p.assign(cell.gp_psi_p.begin() + base,
                           cell.gp_psi_p.begin() + base + gpps);
        el.gp_vm.assign(cell.gp_vm.begin() + base, cell.gp_vm.begin() + base + gpps);
        el.gp_pos.assign(cell.gp_pos.begin() + base, cell.gp_pos.begin() + base + gpps);
        cell.sub_element[s] = el.index;
        new_elements.push_back(el.index);
        elements.push_back(std::move(el));
    }

    // Extend nodal fields with values interpolated by the parent cell.
    if (!created.empty()) {
        for (Eigen::VectorXd* f : fields) {
            f->conservativeResize(3 * n_nodes());
            for (const NewNode& nn : created) {
                const Eigen::VectorXd N = shape_values(cell.order, nn.xi);
                for (int c = 0; c < 3; ++c) {
                    double v = 0.0;
                    for (std::size_t a = 0; a < cell.nodes.size(); ++a)
                        v += N(static_cast<Eigen::Index>(a)) *
                             (*f)(3 * cell.nodes[a] + c);
                    (*f)(3 * nn.id + c) = v;
                }
            }
        }
    }

    cell.active = false;
    return new_elements;
}

void FcmMesh::erode_element(int ei) {
    MeshElement& el = elements.at(static_cast<std::size_t>(ei));
    if (el.eroded)
        throw InputError("mesh: element " + std::to_string(ei) + " already eroded");
    std::vector<double> rho(el.quad.size(), phase_material(el.phase).rho());
    el.lumped_mass = lump_mass(consistent_mass(el.box, el.order, el.quad, rho));
    el.eroded = true;
}

void FcmMesh::rebuild_topology() {
    node_active.assign(static_cast<std::size_t>(n_nodes()), 0);
    for (const MeshCell& cell : cells)
        if (cell.active)
            for (int n : cell.nodes) node_active[static_cast<std::size_t>(n)] = 1;
    for (const MeshElement& el : elements)
        for (int n : el.nodes) node_active[static_cast<std::size_t>(n)] = 1;

    // Raw hanging-node rows: donor = lowest-id active entity (cells first,
    // then elements) whose closed box contains the node without listing it.
    struct RawRow {
        std::vector<std::pair<int, double>> masters;
    };
    std::map<int, RawRow> raw;
    const int n_cells = static_cast<int>(cells.size());
    const Index3 vpc = grid.voxels_per_cell;

    for (int n = 0; n < n_nodes(); ++n) {
        if (!node_active[static_cast<std::size_t>(n)]) continue;
        const NodeKey& key = node_key[static_cast<std::size_t>(n)];

        // Candidate cells: those whose closed voxel box contains the key.
        std::array<std::array<int, 2>, 3> cand{};
        std::array<int, 3> n_cand{};
        for (int a = 0; a < 3; ++a) {
            const int span = 2 * vpc[a];
            const int hi = key[a] / span;
            n_cand[a] = 0;
            if (key[a] % span == 0 && hi - 1 >= 0) cand[a][n_cand[a]++] = hi - 1;
            if (hi < grid.cells_per_axis[a]) cand[a][n_cand[a]++] = hi;
        }

        int best_id = std::numeric_limits<int>::max();
        int best_cell = -1, best_elem = -1;
        for (int ia = 0; ia < n_cand[0]; ++ia)
            for (int ib = 0; ib < n_cand[1]; ++ib)
                for (int ic = 0; ic < n_cand[2]; ++ic) {
                    const int ci = grid.cell_index(cand[0][ia], cand[1][ib], cand[2][ic]);
                    const MeshCell& cell = cells[static_cast<std::size_t>(ci)];
                    if (cell.active) {
                        if (ci < best_id &&
                            std::find(cell.nodes.begin(), cell.nodes.end(), n) ==
                                cell.nodes.end()) {
                            best_id = ci;
                            best_cell = ci;
                            best_elem = -1;
                        }
                    } else {
                        for (int ei : cell.sub_element) {
                            if (ei < 0) continue;
                            const MeshElement& el = elements[static_cast<std::size_t>(ei)];
                            if (el.eroded) continue;
                            const int id = n_cells + ei;
                            if (id >= best_id) continue;
                            if (!key_in_closure(el.vox, key)) continue;
                            if (std::find(el.nodes.begin(), el.nodes.end(), n) !=
                                el.nodes.end())
                                continue;
                            best_id = id;
                            best_cell = -1;
                            best_elem = ei;
                        }
                    }
                }
        if (best_id == std::numeric_limits<int>::max()) continue;

        const Box3i& box = best_cell >= 0 ? cells[static_cast<std::size_t>(best_cell)].vox
                                          : elements[static_cast<std::size_t>(best_elem)].vox;
        const int order = best_cell >= 0 ? cells[static_cast<std::size_t>(best_cell)].order
                                         : elements[static_cast<std::size_t>(best_elem)].order;
        const auto& entity_nodes = best_cell >= 0
                                       ? cells[static_cast<std::size_t>(best_cell)].nodes
                                       : elements[static_cast<std::size_t>(best_elem)].nodes;
        const Eigen::VectorXd N = shape_values(order, ref_coords_in(box, key));
        RawRow row;
        for (std::size_t a = 0; a < entity_nodes.size(); ++a) {
            const double w = N(static_cast<Eigen::Index>(a));
            if (std::abs(w) >= 1e-12) row.masters.emplace_back(entity_nodes[a], w);
        }
        raw.emplace(n, std::move(row));
    }

    // Flatten chains: substitute hanging masters until all masters are
    // regular nodes; a dependency cycle is a topology error.
    constraints.clear();
    std::map<int, std::vector<std::pair<int, double>>> resolved;
    std::map<int, int> visiting;  // 0/absent = new, 1 = in progress, 2 = done

    auto resolve = [&](auto&& self, int node) -> const std::vector<std::pair<int, double>>& {
        auto done = resolved.find(node);
        if (done != resolved.end()) return done->second;
        auto& flag = visiting[node];
        if (flag == 1)
            throw NumericsError("mesh: hanging-node constraints form a cycle");
        flag = 1;
        std::map<int, double> acc;
        for (const auto& [m, w] : raw.at(node).masters) {
            if (raw.count(m)) {
                for (const auto& [mm, ww] : self(self, m)) acc[mm] += w * ww;
            } else {
                acc[m] += w;
            }
        }
        std::vector<std::pair<int, double>> flat;
        for (const auto& [m, w] : acc)
            if (std::abs(w) >= 1e-12) flat.emplace_back(m, w);
        flag = 2;
        return resolved.emplace(node, std::move(flat)).first->second;
    };

    for (const auto& [node, row] : raw) {
        NodeConstraint c;
        c.node = node;
        c.masters = resolve(resolve, node);
        constraints.push_back(std::move(c));
    }
}

double FcmMesh::total_mass() const {
    double m = 0.0;
    for (const MeshCell& cell : cells) {
        if (!cell.active) continue;
        for (std::size_t g = 0; g < cell.quad.size(); ++g) {
            const int s = static_cast<int>(g) / cell.gp_per_subcell;
            m += cell.quad.w[g] *
                 phase_material(cell.sub_phase[static_cast<std::size_t>(s)]).rho();
        }
    }
    for (const MeshElement& el : elements) {
        if (el.eroded) {
            m += el.lumped_mass.sum() / 3.0;
        } else {
            const double rho = phase_material(el.phase).rho();
            for (double w : el.quad.w) m += w * rho;
        }
    }
    return m;
}

void FcmMesh::commit_cell(int ci, const ElementArrays& a) {
    MeshCell& cell = cells.at(static_cast<std::size_t>(ci));
    cell.gp_state = a.new_states;
    cell.gp_psi_e = a.gp_psi_e;
    cell.gp_psi_p = a.gp_psi_p;
    cell.gp_vm = a.gp_vm;
}

void FcmMesh::commit_element(int ei, const ElementArrays& a) {
    MeshElement& el = elements.at(static_cast<std::size_t>(ei));
    el.gp_state = a.new_states;
    el.gp_psi_e = a.gp_psi_e;
    el.gp_psi_p = a.gp_psi_p;
    el.gp_vm = a.gp_vm;
}

}  // namespace voxfrac

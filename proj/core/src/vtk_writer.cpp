#include <cstdint>
#include <fstream>
#include <vector>

#include "voxfrac/shape.hpp"
#include "voxfrac/vtk_writer.hpp"

namespace voxfrac {

namespace {

// VTK_HEXAHEDRON corner order, as (x,y,z) selectors into {lo, hi}.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

struct Hex {
    Box3d box;
    const Box3d* owner_box;            // entity whose nodes interpolate here
    const std::vector<int>* nodes;
    int order;
    int phase, eroded, switched;
    double vm, alpha;
};

double gp_average(const std::vector<double>& v, std::size_t base, int n) {
    if (v.empty() || n == 0) return 0.0;
    double s = 0.0;
    for (int g = 0; g < n; ++g) s += v[base + static_cast<std::size_t>(g)];
    return s / n;
}

double alpha_average(const std::vector<MaterialState>& st, std::size_t base, int n) {
    if (st.empty() || n == 0) return 0.0;
    double s = 0.0;
    for (int g = 0; g < n; ++g) s += st[base + static_cast<std::size_t>(g)].alpha;
    return s / n;
}

}  // namespace

void write_vtk_snapshot(const std::string& path, const FcmMesh& mesh,
                        const Eigen::VectorXd& d) {
    std::vector<Hex> hexes;
    for (const MeshCell& cell : mesh.cells) {
        if (!cell.active) continue;
        for (std::size_t s = 0; s < cell.sub_boxes.size(); ++s) {
            Hex h;
            h.box = cell.sub_boxes[s];
            h.owner_box = &cell.box;
            h.nodes = &cell.nodes;
            h.order = cell.order;
            h.phase = cell.sub_phase[s];
            h.eroded = 0;
            h.switched = 0;
            const std::size_t base = s * static_cast<std::size_t>(cell.gp_per_subcell);
            h.vm = gp_average(cell.gp_vm, base, cell.gp_per_subcell);
            h.alpha = alpha_average(cell.gp_state, base, cell.gp_per_subcell);
            hexes.push_back(h);
        }
    }
    for (const MeshElement& el : mesh.elements) {
        Hex h;
        h.box = el.box;
        h.owner_box = &el.box;
        h.nodes = &el.nodes;
        h.order = el.order;
        h.phase = el.phase;
        h.eroded = el.eroded ? 1 : 0;
        h.switched = 1;
        const int n = static_cast<int>(el.quad.size());
        h.vm = gp_average(el.gp_vm, 0, n);
        h.alpha = alpha_average(el.gp_state, 0, n);
        hexes.push_back(h);
    }

    std::ofstream out(path);
    if (!out) throw InputError("vtk: cannot open '" + path + "' for writing");
    out.precision(9);

    const std::size_t nh = hexes.size();
    out << "# vtk DataFile Version 3.0\n";
    out << "voxfrac snapshot\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << 8 * nh << " double\n";
    for (const Hex& h : hexes)
        for (const auto& c : kCorner) {
            for (int a = 0; a < 3; ++a) {
                const double x = c[a] ? h.box.hi[a] : h.box.lo[a];
                out << x << (a == 2 ? '\n' : ' ');
            }
        }
    out << "CELLS " << nh << ' ' << 9 * nh << '\n';
    for (std::size_t i = 0; i < nh; ++i) {
        out << 8;
        for (int c = 0; c < 8; ++c) out << ' ' << 8 * i + static_cast<std::size_t>(c);
        out << '\n';
    }
    out << "CELL_TYPES " << nh << '\n';
    for (std::size_t i = 0; i < nh; ++i) out << "12\n";

    out << "CELL_DATA " << nh << '\n';
    out << "SCALARS phase int 1\nLOOKUP_TABLE default\n";
    for (const Hex& h : hexes) out << h.phase << '\n';
    out << "SCALARS eroded int 1\nLOOKUP_TABLE default\n";
    for (const Hex& h : hexes) out << h.eroded << '\n';
    out << "SCALARS switched int 1\nLOOKUP_TABLE default\n";
    for (const Hex& h : hexes) out << h.switched << '\n';
    out << "SCALARS von_mises double 1\nLOOKUP_TABLE default\n";
    for (const Hex& h : hexes) out << h.vm << '\n';
    out << "SCALARS hardening double 1\nLOOKUP_TABLE default\n";
    for (const Hex& h : hexes) out << h.alpha << '\n';

    out << "POINT_DATA " << 8 * nh << '\n';
    out << "VECTORS displacement double\n";
    for (const Hex& h : hexes) {
        const Vec3d center = h.owner_box->center();
        const Vec3d half = 0.5 * h.owner_box->extent();
        for (const auto& c : kCorner) {
            Vec3d x;
            for (int a = 0; a < 3; ++a) x[a] = c[a] ? h.box.hi[a] : h.box.lo[a];
            const Vec3d xi = (x - center).cwiseQuotient(half);
            const Eigen::VectorXd N = shape_values(h.order, xi);
            Vec3d u = Vec3d::Zero();
            for (int a = 0; a < N.size(); ++a) {
                const int node = (*h.nodes)[static_cast<std::size_t>(a)];
                u += N[a] * d.segment<3>(3 * node);
            }
            out << u[0] << ' ' << u[1] << ' ' << u[2] << '\n';
        }
    }
    if (!out) throw InputError("vtk: write failed for '" + path + "'");
}

}  // namespace voxfrac

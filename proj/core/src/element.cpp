#include <sstream>

#include "voxfrac/element.hpp"
#include "voxfrac/quadrature.hpp"
#include "voxfrac/shape.hpp"

namespace voxfrac {

ElementQuadrature box_quadrature(int points_per_axis, const Box3d& box) {
    const QuadratureRule& rule = gauss_rule(points_per_axis);
    ElementQuadrature q;
    const double dv = box.volume() / 8.0;
    q.xi = rule.points;
    q.w.reserve(rule.weights.size());
    for (double w : rule.weights) q.w.push_back(w * dv);
    return q;
}

ElementQuadrature composite_quadrature(int points_per_axis, const Box3d& parent,
                                       const std::vector<Box3d>& children) {
    const QuadratureRule& rule = gauss_rule(points_per_axis);
    ElementQuadrature q;
    q.xi.reserve(rule.points.size() * children.size());
    q.w.reserve(q.xi.capacity());
    const Vec3d pc = parent.center();
    const Vec3d ph = 0.5 * parent.extent();
    for (const Box3d& child : children) {
        const Vec3d cc = child.center();
        const Vec3d ch = 0.5 * child.extent();
        const double dv = child.volume() / 8.0;
        for (std::size_t g = 0; g < rule.points.size(); ++g) {
            const Vec3d x = cc + rule.points[g].cwiseProduct(ch);
            q.xi.push_back((x - pc).cwiseQuotient(ph));
            q.w.push_back(rule.weights[g] * dv);
        }
    }
    return q;
}

ElementArrays element_arrays(const Box3d& box, int order,
                             const ElementQuadrature& quad,
                             const std::vector<const MaterialParams*>& gp_mat,
                             const std::vector<MaterialState>& gp_state,
                             const Eigen::VectorXd& d, double dt,
                             bool with_stiffness) {
    const int nn = nodes_per_element(order);
    const int ndof = 3 * nn;
    if (d.size() != ndof)
        throw InputError("element: displacement vector size mismatch");
    if (gp_mat.size() != quad.size() || gp_state.size() != quad.size())
        throw InputError("element: per-point material/history size mismatch");

    ElementArrays out;
    out.f_int = Eigen::VectorXd::Zero(ndof);
    if (with_stiffness) out.k = Eigen::MatrixXd::Zero(ndof, ndof);
    out.new_states.resize(quad.size());
    out.gp_psi_e.resize(quad.size());
    out.gp_psi_p.resize(quad.size());
    out.gp_delta_dvis.resize(quad.size());
    out.gp_vm.resize(quad.size());
    out.gp_dlambda.resize(quad.size());

    const Vec3d h = box.extent();
    Eigen::MatrixXd G(9, ndof);
    Eigen::Matrix<double, Eigen::Dynamic, 3> dNdX(nn, 3), dNdx(nn, 3);

    for (std::size_t g = 0; g < quad.size(); ++g) {
        const ShapeValues sv = shape_functions(order, quad.xi[g]);
        for (int a = 0; a < nn; ++a)
            for (int ax = 0; ax < 3; ++ax)
                dNdX(a, ax) = sv.dN(a, ax) * 2.0 / h[ax];

        Mat3 H = Mat3::Zero();
        for (int a = 0; a < nn; ++a)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) H(i, j) += d(3 * a + i) * dNdX(a, j);
        const Mat3 F = Mat3::Identity() + H;

        const MaterialResult mr = evaluate_material(*gp_mat[g], F, gp_state[g], dt);
        out.new_states[g] = mr.state;
        out.gp_psi_e[g] = mr.psi_e;
        out.gp_psi_p[g] = mr.psi_p;
        out.gp_delta_dvis[g] = mr.delta_dvis;
        out.gp_vm[g] = mr.tau_vm;
        out.gp_dlambda[g] = mr.dlambda;
        const double w = quad.w[g];
        out.energy_elastic += w * mr.psi_e;
        out.energy_plastic += w * mr.psi_p;
        out.dissipation_inc += w * mr.delta_dvis;

        const Mat3 Finv = F.inverse();
        dNdx.noalias() = dNdX * Finv;

        G.setZero();
        for (int a = 0; a < nn; ++a)
            for (int i = 0; i < 3; ++i)
                for (int m = 0; m < 3; ++m) G(3 * i + m, 3 * a + i) = dNdx(a, m);

        const Vec9 tau_v = to_vec9(mr.tau);
        out.f_int.noalias() += w * (G.transpose() * tau_v);

        if (with_stiffness) {
            Mat9 a_total = mr.a_spatial;
            // geometric part: -delta_jc tau_im on the (i,j),(c,m) pairs
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int m = 0; m < 3; ++m)
                        a_total(3 * i + j, 3 * j + m) -= mr.tau(i, m);
            out.k.noalias() += w * (G.transpose() * a_total * G);
        }
    }
    return out;
}

Eigen::MatrixXd consistent_mass(const Box3d& box, int order,
                                const ElementQuadrature& quad,
                                const std::vector<double>& gp_rho) {
    (void)box;
    const int nn = nodes_per_element(order);
    if (gp_rho.size() != quad.size())
        throw InputError("element: per-point density size mismatch");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3 * nn, 3 * nn);
    for (std::size_t g = 0; g < quad.size(); ++g) {
        const Eigen::VectorXd N = shape_values(order, quad.xi[g]);
        const double c = quad.w[g] * gp_rho[g];
        for (int a = 0; a < nn; ++a)
            for (int b = 0; b < nn; ++b) {
                const double mab = c * N(a) * N(b);
                for (int i = 0; i < 3; ++i) m(3 * a + i, 3 * b + i) += mab;
            }
    }
    return m;
}

Eigen::VectorXd lump_mass(const Eigen::MatrixXd& m) {
    return m.rowwise().sum();
}

}  // namespace voxfrac

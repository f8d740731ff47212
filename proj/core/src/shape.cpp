#include "voxfrac/shape.hpp"

namespace voxfrac {

namespace {

int checked_order(int order) {
    if (order != 1 && order != 2)
        throw InputError("shape functions support orders 1 and 2 only");
    return order;
}

/// 1D Lagrange basis over nodes at -1,(0,)1.
void basis_1d(int order, double x, double* n, double* d) {
    if (order == 1) {
        n[0] = 0.5 * (1.0 - x);
        n[1] = 0.5 * (1.0 + x);
        d[0] = -0.5;
        d[1] = 0.5;
    } else {
        n[0] = 0.5 * x * (x - 1.0);
        n[1] = 1.0 - x * x;
        n[2] = 0.5 * x * (x + 1.0);
        d[0] = x - 0.5;
        d[1] = -2.0 * x;
        d[2] = x + 0.5;
    }
}

}  // namespace

int nodes_per_element(int order) {
    const int n = checked_order(order) + 1;
    return n * n * n;
}

Index3 node_lattice(int order, int a) {
    const int n = checked_order(order) + 1;
    return {a % n, (a / n) % n, a / (n * n)};
}

ShapeValues shape_functions(int order, const Vec3d& xi) {
    checked_order(order);
    const int n1 = order + 1;
    double nx[3], dx[3], ny[3], dy[3], nz[3], dz[3];
    basis_1d(order, xi[0], nx, dx);
    basis_1d(order, xi[1], ny, dy);
    basis_1d(order, xi[2], nz, dz);
    ShapeValues sv;
    const int n = n1 * n1 * n1;
    sv.N.resize(n);
    sv.dN.resize(n, 3);
    int a = 0;
    for (int k = 0; k < n1; ++k)
        for (int j = 0; j < n1; ++j)
            for (int i = 0; i < n1; ++i, ++a) {
                sv.N(a) = nx[i] * ny[j] * nz[k];
                sv.dN(a, 0) = dx[i] * ny[j] * nz[k];
                sv.dN(a, 1) = nx[i] * dy[j] * nz[k];
                sv.dN(a, 2) = nx[i] * ny[j] * dz[k];
            }
    return sv;
}

Eigen::VectorXd shape_values(int order, const Vec3d& xi) {
    return shape_functions(order, xi).N;
}

}  // namespace voxfrac

#pragma once

#include <Eigen/Dense>

#include "voxfrac/types.hpp"

namespace voxfrac {

/// Shape function values and reference-coordinate gradients at one point of
/// [-1,1]^3 for a Lagrange hexahedron of order 1 (8 nodes) or 2 (27 nodes).
/// Node ordering is x-fastest over the (order+1)^3 lattice.
struct ShapeValues {
    Eigen::VectorXd N;
    Eigen::Matrix<double, Eigen::Dynamic, 3> dN;  // dN(a, axis) = dN_a/dxi_axis
};

int nodes_per_element(int order);

/// Lattice coordinates (0..order per axis) of node `a` in the x-fastest order.
Index3 node_lattice(int order, int a);

ShapeValues shape_functions(int order, const Vec3d& xi);

/// Shape values only (no gradients), cheaper for interpolation.
Eigen::VectorXd shape_values(int order, const Vec3d& xi);

}  // namespace voxfrac

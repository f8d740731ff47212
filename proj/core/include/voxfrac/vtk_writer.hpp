#pragma once

#include <string>

#include <Eigen/Dense>

#include "voxfrac/mesh.hpp"

namespace voxfrac {

/// Writes a legacy-ASCII unstructured-grid snapshot of the mesh: one
/// hexahedron per subcell (of active cells) and per element, including eroded
/// elements. Cell data: phase, eroded, switched, von Mises stress and
/// hardening variable (committed quadrature-point averages). Point data:
/// displacement interpolated at the hexahedron corners from `d`.
void write_vtk_snapshot(const std::string& path, const FcmMesh& mesh,
                        const Eigen::VectorXd& d);

}  // namespace voxfrac

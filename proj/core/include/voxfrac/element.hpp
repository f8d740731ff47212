#pragma once

#include <vector>

#include <Eigen/Dense>

#include "voxfrac/material.hpp"
#include "voxfrac/types.hpp"

namespace voxfrac {

/// Integration points of one entity (element or composite cell) in that
/// entity's reference coordinates, with weights that already carry the
/// reference-volume Jacobian (so sums of w are volumes in mm^3).
struct ElementQuadrature {
    std::vector<Vec3d> xi;
    std::vector<double> w;
    std::size_t size() const { return xi.size(); }
};

/// Plain tensor-product rule over an axis-aligned box.
ElementQuadrature box_quadrature(int points_per_axis, const Box3d& box);

/// Composite rule for `parent` built from per-child tensor-product rules
/// (child-major point order). Children must tile the parent; points are
/// expressed in the parent's reference coordinates.
ElementQuadrature composite_quadrature(int points_per_axis, const Box3d& parent,
                                       const std::vector<Box3d>& children);

/// Internal force, tangent stiffness and updated history of one entity.
struct ElementArrays {
    Eigen::VectorXd f_int;
    Eigen::MatrixXd k;
    std::vector<MaterialState> new_states;
    std::vector<double> gp_psi_e;
    std::vector<double> gp_psi_p;
    std::vector<double> gp_delta_dvis;
    std::vector<double> gp_vm;
    std::vector<double> gp_dlambda;
    double energy_elastic = 0.0;    ///< integral of psi_e (N*mm)
    double energy_plastic = 0.0;    ///< integral of psi_p
    double dissipation_inc = 0.0;   ///< integral of the viscous increment
};

/// Evaluates internal force (and optionally the consistent tangent) of a
/// Lagrange hexahedron over an axis-aligned box at the nodal displacements
/// `d` (3 dofs per node, x-fastest node order). Materials and history are
/// per quadrature point; `dt` is passed to rate-dependent updates.
ElementArrays element_arrays(const Box3d& box, int order,
                             const ElementQuadrature& quad,
                             const std::vector<const MaterialParams*>& gp_mat,
                             const std::vector<MaterialState>& gp_state,
                             const Eigen::VectorXd& d, double dt,
                             bool with_stiffness);

/// Consistent mass matrix (reference density, reference volume).
Eigen::MatrixXd consistent_mass(const Box3d& box, int order,
                                const ElementQuadrature& quad,
                                const std::vector<double>& gp_rho);

/// Row-sum lumping of a consistent mass matrix.
Eigen::VectorXd lump_mass(const Eigen::MatrixXd& m);

}  // namespace voxfrac

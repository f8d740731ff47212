#pragma once

#include <string>
#include <vector>

#include "voxfrac/types.hpp"

namespace voxfrac {

/// Phase parameters as configured (bulk/shear moduli in GPa, strengths in
/// MPa, viscosity in GPa*s, fracture energy in N/mm, density in kg/m^3).
/// Accessors convert to the internal mm-MPa-s-tonne unit system.
struct MaterialParams {
    std::string name;
    double kappa_gpa = 0.0;
    double mu_gpa = 0.0;
    bool brittle = true;       ///< no plastic flow at all
    double y0_mpa = 0.0;       ///< initial yield stress
    double yinf_mpa = 0.0;     ///< saturation yield stress
    double h_exp = 0.0;        ///< exponential hardening rate (dimensionless)
    double h_lin_mpa = 0.0;    ///< linear hardening modulus
    double eta_gpa_s = 0.0;    ///< viscoplastic relaxation parameter (0 = rate-independent)
    double gc_n_per_mm = 0.0;  ///< specific fracture energy
    double rho_kg_m3 = 0.0;    ///< mass density

    double kappa() const { return kappa_gpa * 1e3; }  // MPa
    double mu() const { return mu_gpa * 1e3; }        // MPa
    double y0() const { return y0_mpa; }
    double yinf() const { return yinf_mpa; }
    double h_lin() const { return h_lin_mpa; }
    double eta() const { return eta_gpa_s * 1e3; }    // MPa*s
    double gc() const { return gc_n_per_mm; }         // MPa*mm
    double rho() const { return rho_kg_m3 * 1e-12; }  // t/mm^3

    /// Throws InputError on unusable parameters.
    void validate() const;

    /// Ductile parameters expressed as an (effectively) non-yielding ductile
    /// material; useful for verifying that the brittle short-circuit matches
    /// the general path.
    MaterialParams as_rigid_plastic_variant() const;
};

/// History carried per quadrature point.
struct MaterialState {
    Mat3 eps_p = Mat3::Zero();  ///< plastic logarithmic strain (traceless)
    double alpha = 0.0;         ///< accumulated plastic strain
    double d_vis = 0.0;         ///< accumulated viscous dissipation density
};

/// Result of a stress update in logarithmic-strain space.
struct StressUpdate {
    Mat3 tau = Mat3::Zero();          ///< Kirchhoff stress
    Mat9 dtau_deps = Mat9::Zero();    ///< algorithmic tangent d tau / d eps
    double psi_e = 0.0;               ///< elastic stored energy density
    double psi_p = 0.0;               ///< plastic stored work density
    double delta_dvis = 0.0;          ///< viscous dissipation increment
    double tau_vm = 0.0;              ///< von Mises equivalent stress
    double dlambda = 0.0;             ///< plastic multiplier increment
    MaterialState state;              ///< updated history
};

/// Result of a finite-strain evaluation at deformation gradient F.
struct MaterialResult {
    Mat3 tau = Mat3::Zero();       ///< Kirchhoff stress
    Mat9 a_spatial = Mat9::Zero(); ///< d tau = a : l (spatial velocity gradient)
    double psi_e = 0.0;
    double psi_p = 0.0;
    double delta_dvis = 0.0;
    double tau_vm = 0.0;
    double dlambda = 0.0;
    MaterialState state;
};

/// Hardening function and its derivative.
double hardening_stress(const MaterialParams& p, double alpha);
double hardening_slope(const MaterialParams& p, double alpha);
/// Stored plastic work integral of the hardening function.
double plastic_stored_energy(const MaterialParams& p, double alpha);

/// Radial-return update in logarithmic-strain space. `dt` is the time step
/// (required positive when eta > 0).
StressUpdate update_stress(const MaterialParams& p, const Mat3& eps,
                           const MaterialState& old, double dt);

/// Full finite-strain evaluation: logarithmic strain from F, stress update,
/// and the spatial tangent that maps the velocity-gradient increment to the
/// Kirchhoff stress increment.
MaterialResult evaluate_material(const MaterialParams& p, const Mat3& F,
                                 const MaterialState& old, double dt);

/// Logarithmic strain eps = 1/2 ln(F F^T) via spectral decomposition.
Mat3 log_strain(const Mat3& F);

/// Row-major 9-vector view of a 3x3 tensor (index 3*i + j).
Vec9 to_vec9(const Mat3& m);
Mat3 from_vec9(const Vec9& v);

/// Named parameter sets for the bundled phases.
const std::vector<MaterialParams>& material_presets();
const MaterialParams& material_preset(const std::string& name);

}  // namespace voxfrac

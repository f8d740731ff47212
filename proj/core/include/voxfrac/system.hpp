#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "voxfrac/mesh.hpp"

namespace voxfrac {

struct SolverOptions {
    double tol_rel = 1e-8;   ///< relative drop of the combined residual
    double c_norm = 1.0;     ///< weight of the constraint residual in the norm
    int max_iter = 25;
    bool dynamics = true;    ///< include inertia (implicit Newmark)
    double beta = 0.25;
    double gamma = 0.5;
};

/// One prescribed displacement component with value(t) = offset + velocity*t.
struct PrescribedDof {
    int node = 0;
    int comp = 0;
    double velocity = 0.0;
    double offset = 0.0;
};

/// Uniform motion of a whole domain face: component `comp` of every active
/// node on the face is prescribed with value(t) = velocity * t. The node set
/// is re-expanded on every refresh(), so nodes created by later cell
/// switches on a boundary face stay prescribed.
struct FacePrescription {
    int axis = 0;
    bool positive = false;
    int comp = 0;
    double velocity = 0.0;
};

struct StepReport {
    bool converged = false;
    int iterations = 0;       ///< linear solves performed
    double e_first = 0.0;
    double e_final = 0.0;
    std::vector<double> residual_history;  ///< e per iteration, diagnostics
};

/// Assembled equilibrium of the switched/eroded mesh: Dirichlet components
/// are eliminated with their values substituted, hanging-node rows are
/// enforced by Lagrange multipliers in a saddle-point system.
class StructuralSystem {
public:
    StructuralSystem(FcmMesh& mesh, SolverOptions opt);

    void set_prescribed(std::vector<PrescribedDof> dofs);
    void set_face_prescriptions(std::vector<FacePrescription> faces);

    /// Renumbers equations, rebuilds constraint rows and the mass matrix.
    /// Call after construction and after every topology change.
    void refresh();

    /// Newton-solves the step ending at time t_new (step start = snapshot).
    /// Starts from the current trial fields (warm start across erosion
    /// sweeps). Does not commit anything.
    StepReport solve(double t_new, double dt);

    /// Accepts the last converged solve: commits material history into the
    /// mesh, applies the velocity/acceleration update, moves the snapshot.
    void advance_time(double dt);

    /// Discards the trial fields, restoring the step-start snapshot.
    void reset_to_snapshot();

    // trial fields and step-start snapshot (3 dofs per node)
    Eigen::VectorXd D, V, A;
    Eigen::VectorXd D0, V0, A0;
    Eigen::VectorXd lambda;  ///< constraint multipliers

    int n_equations() const { return n_free_ + n_multipliers_; }
    int n_free() const { return n_free_; }
    int n_multipliers() const { return n_multipliers_; }

    /// Nodal force vector f_int + M*a + C^T*lambda - f_ext of the last
    /// converged solve; summing its prescribed components over a face gives
    /// the reaction (tension positive on a face pulled outward).
    const Eigen::VectorXd& nodal_force() const { return force_; }
    double reaction(const std::function<bool(int node, int comp)>& pred) const;

    /// Last converged per-entity arrays (empty for inactive/eroded entries).
    const std::vector<ElementArrays>& cell_trial() const { return cell_trial_; }
    const std::vector<ElementArrays>& elem_trial() const { return elem_trial_; }

    double energy_elastic() const { return energy_elastic_; }
    double energy_plastic() const { return energy_plastic_; }
    double dissipation_increment() const { return dissipation_inc_; }

    FcmMesh& mesh() { return mesh_; }
    const FcmMesh& mesh() const { return mesh_; }
    const SolverOptions& options() const { return opt_; }

private:
    void assemble(double dt, bool with_stiffness);
    void assemble_mass();
    Eigen::VectorXd newmark_accel(double dt) const;

    FcmMesh& mesh_;
    SolverOptions opt_;
    std::vector<PrescribedDof> prescribed_;
    std::vector<FacePrescription> faces_;
    std::vector<PrescribedDof> effective_prescribed_;  ///< explicit + faces

    std::vector<int> dof_map_;  ///< 3N -> free index, -1 prescribed, -2 inactive
    std::vector<std::pair<int, int>> prescribed_active_;  ///< (dof, prescribed idx)
    int n_free_ = 0;
    int n_multipliers_ = 0;
    Eigen::SparseMatrix<double> C_;  ///< n_multipliers x 3N
    Eigen::SparseMatrix<double> M_;  ///< 3N x 3N
    bool pattern_valid_ = false;

    // assembly results
    Eigen::VectorXd f_int_;
    std::vector<Eigen::Triplet<double>> k_triplets_;
    std::vector<ElementArrays> cell_trial_;
    std::vector<ElementArrays> elem_trial_;
    double energy_elastic_ = 0.0;
    double energy_plastic_ = 0.0;
    double dissipation_inc_ = 0.0;

    Eigen::VectorXd force_;  ///< converged f_int + M a + C^T lambda
    bool have_converged_ = false;

    struct SolverImpl;
    std::shared_ptr<SolverImpl> solver_;
};

/// Active node ids on a domain face (axis 0..2; positive = max side).
std::vector<int> nodes_on_face(const FcmMesh& mesh, int axis, bool positive);

}  // namespace voxfrac

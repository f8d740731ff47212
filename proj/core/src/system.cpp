#include <cmath>
#include <limits>
#include <map>

#include "voxfrac/system.hpp"

#ifdef VOXFRAC_HAVE_KLU
#include <Eigen/KLUSupport>
#else
#include <Eigen/SparseLU>
#endif

namespace voxfrac {

struct StructuralSystem::SolverImpl {
#ifdef VOXFRAC_HAVE_KLU
    Eigen::KLU<Eigen::SparseMatrix<double>> lu;
#else
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
#endif
};

StructuralSystem::StructuralSystem(FcmMesh& mesh, SolverOptions opt)
    : mesh_(mesh), opt_(opt), solver_(std::make_shared<SolverImpl>()) {
    refresh();
}

void StructuralSystem::set_prescribed(std::vector<PrescribedDof> dofs) {
    prescribed_ = std::move(dofs);
    refresh();
}

void StructuralSystem::set_face_prescriptions(std::vector<FacePrescription> faces) {
    faces_ = std::move(faces);
    refresh();
}

void StructuralSystem::refresh() {
    const int N = mesh_.n_nodes();
    auto ensure = [N](Eigen::VectorXd& v) {
        if (v.size() == 0)
            v = Eigen::VectorXd::Zero(3 * N);
        else if (v.size() != 3 * N)
            throw InputError(
                "system: nodal field was not extended before refresh()");
    };
    ensure(D);
    ensure(V);
    ensure(A);
    ensure(D0);
    ensure(V0);
    ensure(A0);

    effective_prescribed_ = prescribed_;
    for (const FacePrescription& f : faces_) {
        if (f.axis < 0 || f.axis > 2 || f.comp < 0 || f.comp > 2)
            throw InputError("system: face prescription out of range");
        for (int n : nodes_on_face(mesh_, f.axis, f.positive))
            effective_prescribed_.push_back({n, f.comp, f.velocity, 0.0});
    }

    std::map<int, int> prescribed_of_dof;
    for (std::size_t i = 0; i < effective_prescribed_.size(); ++i) {
        const PrescribedDof& p = effective_prescribed_[i];
        if (p.node < 0 || p.node >= N || p.comp < 0 || p.comp > 2)
            throw InputError("system: prescribed dof out of range");
        const auto [it, inserted] =
            prescribed_of_dof.emplace(3 * p.node + p.comp, static_cast<int>(i));
        if (!inserted) {
            const PrescribedDof& q =
                effective_prescribed_[static_cast<std::size_t>(it->second)];
            if (q.velocity != p.velocity || q.offset != p.offset)
                throw InputError("system: conflicting prescriptions for one dof");
        }
    }

    dof_map_.assign(static_cast<std::size_t>(3 * N), -2);
    prescribed_active_.clear();
    n_free_ = 0;
    for (int n = 0; n < N; ++n) {
        if (!mesh_.node_active[static_cast<std::size_t>(n)]) continue;
        for (int c = 0; c < 3; ++c) {
            const int dof = 3 * n + c;
            const auto it = prescribed_of_dof.find(dof);
            if (it != prescribed_of_dof.end()) {
                dof_map_[static_cast<std::size_t>(dof)] = -1;
                prescribed_active_.emplace_back(dof, it->second);
            } else {
                dof_map_[static_cast<std::size_t>(dof)] = n_free_++;
            }
        }
    }

    // Constraint rows, one per unprescribed component of each hanging node.
    std::vector<Eigen::Triplet<double>> ct;
    n_multipliers_ = 0;
    for (const NodeConstraint& row : mesh_.constraints) {
        for (int c = 0; c < 3; ++c) {
            const int dof = 3 * row.node + c;
            if (dof_map_[static_cast<std::size_t>(dof)] == -1) continue;  // prescribed wins
            if (dof_map_[static_cast<std::size_t>(dof)] == -2) continue;
            ct.emplace_back(n_multipliers_, dof, 1.0);
            for (const auto& [m, w] : row.masters)
                ct.emplace_back(n_multipliers_, 3 * m + c, -w);
            ++n_multipliers_;
        }
    }
    C_.resize(n_multipliers_, 3 * N);
    C_.setFromTriplets(ct.begin(), ct.end());
    lambda = Eigen::VectorXd::Zero(n_multipliers_);

    assemble_mass();
    pattern_valid_ = false;
    have_converged_ = false;
}

void StructuralSystem::assemble_mass() {
    const int N = mesh_.n_nodes();
    std::vector<Eigen::Triplet<double>> mt;
    for (const MeshCell& cell : mesh_.cells) {
        if (!cell.active) continue;
        std::vector<double> rho(cell.quad.size());
        for (std::size_t g = 0; g < cell.quad.size(); ++g) {
            const int s = static_cast<int>(g) / cell.gp_per_subcell;
            rho[g] = mesh_.phase_material(cell.sub_phase[static_cast<std::size_t>(s)]).rho();
        }
        const Eigen::MatrixXd m = consistent_mass(cell.box, cell.order, cell.quad, rho);
        const int nn = static_cast<int>(cell.nodes.size());
        for (int a = 0; a < nn; ++a)
            for (int b = 0; b < nn; ++b)
                for (int i = 0; i < 3; ++i)
                    mt.emplace_back(3 * cell.nodes[a] + i, 3 * cell.nodes[b] + i,
                                    m(3 * a + i, 3 * b + i));
    }
    for (const MeshElement& el : mesh_.elements) {
        if (el.eroded) {
            for (std::size_t a = 0; a < el.nodes.size(); ++a)
                for (int i = 0; i < 3; ++i)
                    mt.emplace_back(3 * el.nodes[a] + i, 3 * el.nodes[a] + i,
                                    el.lumped_mass(3 * static_cast<int>(a) + i));
            continue;
        }
        std::vector<double> rho(el.quad.size(), mesh_.phase_material(el.phase).rho());
        const Eigen::MatrixXd m = consistent_mass(el.box, el.order, el.quad, rho);
        const int nn = static_cast<int>(el.nodes.size());
        for (int a = 0; a < nn; ++a)
            for (int b = 0; b < nn; ++b)
                for (int i = 0; i < 3; ++i)
                    mt.emplace_back(3 * el.nodes[a] + i, 3 * el.nodes[b] + i,
                                    m(3 * a + i, 3 * b + i));
    }
    M_.resize(3 * N, 3 * N);
    M_.setFromTriplets(mt.begin(), mt.end());
}

void StructuralSystem::assemble(double dt, bool with_stiffness) {
    const int N = mesh_.n_nodes();
    f_int_ = Eigen::VectorXd::Zero(3 * N);
    k_triplets_.clear();
    cell_trial_.assign(mesh_.cells.size(), {});
    elem_trial_.assign(mesh_.elements.size(), {});
    energy_elastic_ = energy_plastic_ = dissipation_inc_ = 0.0;

    auto process = [&](const Box3d& box, int order, const ElementQuadrature& quad,
                       const std::vector<const MaterialParams*>& mats,
                       const std::vector<MaterialState>& states,
                       const std::vector<int>& nodes, ElementArrays& out) {
        const int nn = static_cast<int>(nodes.size());
        Eigen::VectorXd d(3 * nn);
        for (int a = 0; a < nn; ++a)
            for (int c = 0; c < 3; ++c) d(3 * a + c) = D(3 * nodes[a] + c);
        out = element_arrays(box, order, quad, mats, states, d, dt, with_stiffness);
        for (int a = 0; a < nn; ++a)
            for (int c = 0; c < 3; ++c) f_int_(3 * nodes[a] + c) += out.f_int(3 * a + c);
        if (with_stiffness) {
            for (int a = 0; a < nn; ++a)
                for (int b = 0; b < nn; ++b)
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j)
                            k_triplets_.emplace_back(3 * nodes[a] + i, 3 * nodes[b] + j,
                                                     out.k(3 * a + i, 3 * b + j));
        }
        energy_elastic_ += out.energy_elastic;
        energy_plastic_ += out.energy_plastic;
        dissipation_inc_ += out.dissipation_inc;
    };

    for (std::size_t ci = 0; ci < mesh_.cells.size(); ++ci) {
        const MeshCell& cell = mesh_.cells[ci];
        if (!cell.active) continue;
        std::vector<const MaterialParams*> mats(cell.quad.size());
        for (std::size_t g = 0; g < cell.quad.size(); ++g) {
            const int s = static_cast<int>(g) / cell.gp_per_subcell;
            mats[g] = &mesh_.phase_material(cell.sub_phase[static_cast<std::size_t>(s)]);
        }
        process(cell.box, cell.order, cell.quad, mats, cell.gp_state, cell.nodes,
                cell_trial_[ci]);
    }
    for (std::size_t ei = 0; ei < mesh_.elements.size(); ++ei) {
        const MeshElement& el = mesh_.elements[ei];
        if (el.eroded) continue;
        std::vector<const MaterialParams*> mats(el.quad.size(),
                                                &mesh_.phase_material(el.phase));
        process(el.box, el.order, el.quad, mats, el.gp_state, el.nodes,
                elem_trial_[ei]);
    }
}

Eigen::VectorXd StructuralSystem::newmark_accel(double dt) const {
    const double b = opt_.beta;
    return (D - D0) / (b * dt * dt) - V0 / (b * dt) - (0.5 / b - 1.0) * A0;
}

StepReport StructuralSystem::solve(double t_new, double dt) {
    if (opt_.dynamics && !(dt > 0.0))
        throw InputError("system: dynamic solve requires a positive time step");

    for (const auto& [dof, pi] : prescribed_active_) {
        const PrescribedDof& p = effective_prescribed_[static_cast<std::size_t>(pi)];
        D(dof) = p.offset + p.velocity * t_new;
    }

    StepReport rep;
    have_converged_ = false;
    const int N3 = 3 * mesh_.n_nodes();
    Eigen::VectorXd inertial = Eigen::VectorXd::Zero(N3);
    Eigen::VectorXd r_lambda;

    // Assembles at the current (D, lambda) and returns the residual norm.
    // Leaves force_, r_lambda, and (with stiffness) k_triplets_ describing
    // that point.
    auto eval_point = [&](bool with_stiffness) {
        assemble(dt, with_stiffness);
        if (opt_.dynamics) {
            A = newmark_accel(dt);
            inertial.noalias() = M_ * A;
        } else {
            A.setZero();
            inertial.setZero();
        }
        force_ = f_int_ + inertial + C_.transpose() * lambda;
        r_lambda = -(C_ * D);
        double e_u2 = 0.0;
        for (int dof = 0; dof < N3; ++dof)
            if (dof_map_[static_cast<std::size_t>(dof)] >= 0)
                e_u2 += force_(dof) * force_(dof);
        return std::sqrt(e_u2) + opt_.c_norm * r_lambda.norm();
    };

    for (int it = 0;; ++it) {
        const double e = eval_point(true);

        if (it == 0) rep.e_first = e;
        rep.e_final = e;
        rep.residual_history.push_back(e);
        if (e <= opt_.tol_rel * rep.e_first || rep.e_first < 1e-14) {
            rep.converged = true;
            break;
        }
        if (it >= opt_.max_iter) break;

        // saddle system [[K_eff, C^T], [C, 0]] [dD; dLam] = [r_u; r_lambda]
        std::vector<Eigen::Triplet<double>> st;
        st.reserve(k_triplets_.size() + 2 * static_cast<std::size_t>(C_.nonZeros()));
        for (const auto& t : k_triplets_) {
            const int i = dof_map_[static_cast<std::size_t>(t.row())];
            const int j = dof_map_[static_cast<std::size_t>(t.col())];
            if (i >= 0 && j >= 0) st.emplace_back(i, j, t.value());
        }
        if (opt_.dynamics) {
            const double s = 1.0 / (opt_.beta * dt * dt);
            for (int k = 0; k < M_.outerSize(); ++k)
                for (Eigen::SparseMatrix<double>::InnerIterator mit(M_, k); mit; ++mit) {
                    const int i = dof_map_[static_cast<std::size_t>(mit.row())];
                    const int j = dof_map_[static_cast<std::size_t>(mit.col())];
                    if (i >= 0 && j >= 0) st.emplace_back(i, j, s * mit.value());
                }
        }
        for (int k = 0; k < C_.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator cit(C_, k); cit; ++cit) {
                const int j = dof_map_[static_cast<std::size_t>(cit.col())];
                if (j < 0) continue;
                const int m = static_cast<int>(cit.row());
                st.emplace_back(n_free_ + m, j, cit.value());
                st.emplace_back(j, n_free_ + m, cit.value());
            }
        Eigen::SparseMatrix<double> S(n_free_ + n_multipliers_, n_free_ + n_multipliers_);
        S.setFromTriplets(st.begin(), st.end());

        Eigen::VectorXd rhs(n_free_ + n_multipliers_);
        for (int dof = 0; dof < N3; ++dof) {
            const int i = dof_map_[static_cast<std::size_t>(dof)];
            if (i >= 0) rhs(i) = -force_(dof);
        }
        rhs.tail(n_multipliers_) = r_lambda;

        if (!pattern_valid_) {
            solver_->lu.analyzePattern(S);
            pattern_valid_ = true;
        }
        solver_->lu.factorize(S);
        if (solver_->lu.info() != Eigen::Success)
            throw NumericsError("system: linear solver failed to factorize");
        const Eigen::VectorXd delta = solver_->lu.solve(rhs);
        if (solver_->lu.info() != Eigen::Success)
            throw NumericsError("system: linear solve failed");

        // Backtracking line search on the residual norm. Elastic-plastic
        // switching makes the residual piecewise smooth; a full update can
        // cycle across branch boundaries, while a damped one still descends
        // along the Newton direction. The full step is tried first, so the
        // quadratic rate is untouched once the active branches settle.
        const Eigen::VectorXd d_base = D;
        const Eigen::VectorXd lam_base = lambda;
        auto apply_step = [&](double alpha) {
            D = d_base;
            for (int dof = 0; dof < N3; ++dof) {
                const int i = dof_map_[static_cast<std::size_t>(dof)];
                if (i >= 0) D(dof) += alpha * delta(i);
            }
            lambda = lam_base + alpha * delta.tail(n_multipliers_);
        };
        double alpha = 1.0;
        double best_alpha = 1.0;
        double best_e = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 8; ++ls) {
            apply_step(alpha);
            const double e_try = eval_point(false);
            if (e_try < best_e) {
                best_e = e_try;
                best_alpha = alpha;
            }
            if (e_try <= (1.0 - 1e-4 * alpha) * e) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) apply_step(best_alpha);
        ++rep.iterations;
    }

    have_converged_ = rep.converged;
    return rep;
}

void StructuralSystem::advance_time(double dt) {
    if (!have_converged_)
        throw NumericsError("system: advance_time without a converged solve");
    for (std::size_t ci = 0; ci < mesh_.cells.size(); ++ci)
        if (mesh_.cells[ci].active)
            mesh_.commit_cell(static_cast<int>(ci), cell_trial_[ci]);
    for (std::size_t ei = 0; ei < mesh_.elements.size(); ++ei)
        if (!mesh_.elements[ei].eroded)
            mesh_.commit_element(static_cast<int>(ei), elem_trial_[ei]);
    if (opt_.dynamics) {
        V = V0 + dt * ((1.0 - opt_.gamma) * A0 + opt_.gamma * A);
    }
    D0 = D;
    V0 = V;
    A0 = A;
    have_converged_ = false;
}

void StructuralSystem::reset_to_snapshot() {
    D = D0;
    V = V0;
    A = A0;
    lambda.setZero();
    have_converged_ = false;
}

double StructuralSystem::reaction(
    const std::function<bool(int, int)>& pred) const {
    double q = 0.0;
    for (const auto& [dof, pi] : prescribed_active_) {
        (void)pi;
        if (pred(dof / 3, dof % 3)) q += force_(dof);
    }
    return q;
}

std::vector<int> nodes_on_face(const FcmMesh& mesh, int axis, bool positive) {
    const int target = positive ? 2 * mesh.total_voxels[axis] : 0;
    std::vector<int> out;
    for (int n = 0; n < mesh.n_nodes(); ++n)
        if (mesh.node_active[static_cast<std::size_t>(n)] &&
            mesh.node_key[static_cast<std::size_t>(n)][axis] == target)
            out.push_back(n);
    return out;
}

}  // namespace voxfrac

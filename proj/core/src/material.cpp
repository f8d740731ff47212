#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "voxfrac/material.hpp"

namespace voxfrac {

namespace {

constexpr double kSqrt32 = 1.2247448713915890;  // sqrt(3/2)
constexpr double kSqrt23 = 0.8164965809277260;  // sqrt(2/3)
constexpr double kSqrt6 = 2.4494897427831781;   // sqrt(6)

Mat9 symmetric_identity() {
    Mat9 p = Mat9::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    p(3 * i + j, 3 * k + l) =
                        0.5 * ((i == k && j == l ? 1.0 : 0.0) +
                               (i == l && j == k ? 1.0 : 0.0));
    return p;
}

const Mat9& p_sym() {
    static const Mat9 p = symmetric_identity();
    return p;
}

const Mat9& i_dyad_i() {
    static const Mat9 p = [] {
        const Vec9 vi = to_vec9(Mat3::Identity());
        return Mat9(vi * vi.transpose());
    }();
    return p;
}

Mat9 elastic_tangent(double kappa, double mu) {
    return kappa * i_dyad_i() + 2.0 * mu * (p_sym() - i_dyad_i() / 3.0);
}

/// Derivative coefficient of ln on the eigenvalue pair (la, lb); stable for
/// nearly coincident eigenvalues.
double log_divided_difference(double la, double lb) {
    const double d = la - lb;
    if (std::abs(d) <= 1e-12 * std::max(la, lb)) return 2.0 / (la + lb);
    return std::log1p(d / lb) / d;
}

}  // namespace

Vec9 to_vec9(const Mat3& m) {
    Vec9 v;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v(3 * i + j) = m(i, j);
    return v;
}

Mat3 from_vec9(const Vec9& v) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = v(3 * i + j);
    return m;
}

void MaterialParams::validate() const {
    auto fail = [&](const std::string& why) {
        throw InputError("material '" + name + "': " + why);
    };
    if (!(kappa_gpa > 0.0)) fail("bulk modulus must be positive");
    if (!(mu_gpa > 0.0)) fail("shear modulus must be positive");
    if (rho_kg_m3 < 0.0) fail("density must be non-negative");
    if (gc_n_per_mm < 0.0) fail("fracture energy must be non-negative");
    if (!brittle) {
        if (!(y0_mpa > 0.0)) fail("initial yield stress must be positive");
        if (yinf_mpa < y0_mpa) fail("saturation stress must be >= initial yield stress");
        if (h_exp < 0.0) fail("exponential hardening rate must be non-negative");
        if (h_lin_mpa < 0.0) fail("linear hardening modulus must be non-negative");
        if (eta_gpa_s < 0.0) fail("viscosity must be non-negative");
    }
}

MaterialParams MaterialParams::as_rigid_plastic_variant() const {
    MaterialParams p = *this;
    p.brittle = false;
    p.y0_mpa = 1e12;
    p.yinf_mpa = 1e12;
    p.h_exp = 0.0;
    p.h_lin_mpa = 0.0;
    p.eta_gpa_s = 0.0;
    return p;
}

double hardening_stress(const MaterialParams& p, double alpha) {
    return p.y0() + (p.yinf() - p.y0()) * (1.0 - std::exp(-p.h_exp * alpha)) +
           p.h_lin() * alpha;
}

double hardening_slope(const MaterialParams& p, double alpha) {
    return (p.yinf() - p.y0()) * p.h_exp * std::exp(-p.h_exp * alpha) + p.h_lin();
}

double plastic_stored_energy(const MaterialParams& p, double alpha) {
    const double dy = p.yinf() - p.y0();
    double saturating = 0.0;
    if (p.h_exp >= 1e-12)
        saturating = dy * (alpha + (std::exp(-p.h_exp * alpha) - 1.0) / p.h_exp);
    return p.y0() * alpha + saturating + 0.5 * p.h_lin() * alpha * alpha;
}

StressUpdate update_stress(const MaterialParams& p, const Mat3& eps,
                           const MaterialState& old, double dt) {
    const double kappa = p.kappa();
    const double mu = p.mu();

    const Mat3 eps_e_tr = eps - old.eps_p;
    const double tr_e = eps_e_tr.trace();
    const Mat3 dev_e = eps_e_tr - (tr_e / 3.0) * Mat3::Identity();
    const Mat3 s_tr = 2.0 * mu * dev_e;
    const double s_norm = s_tr.norm();
    const double q_tr = kSqrt32 * s_norm;

    StressUpdate r;
    r.state = old;

    const double phi_tr = p.brittle ? -1.0 : q_tr - hardening_stress(p, old.alpha);
    if (p.brittle || phi_tr <= 0.0) {
        r.tau = kappa * tr_e * Mat3::Identity() + s_tr;
        r.dtau_deps = elastic_tangent(kappa, mu);
        r.psi_e = 0.5 * kappa * tr_e * tr_e + mu * dev_e.squaredNorm();
        r.psi_p = p.brittle ? 0.0 : plastic_stored_energy(p, old.alpha);
        r.tau_vm = q_tr;
        return r;
    }

    if (p.eta() > 0.0 && !(dt > 0.0))
        throw InputError("material '" + p.name +
                         "': rate-dependent update requires a positive time step");
    const double eta_dt = p.eta() > 0.0 ? p.eta() / dt : 0.0;

    // Newton iteration on g(lam) = eta*lam/dt - <phi(lam)>+ with
    // phi(lam) = q_tr - sqrt(6)*mu*lam - beta(alpha_old + sqrt(2/3)*lam).
    // g is increasing and concave for saturating hardening, so iterates from
    // lam = 0 converge monotonically from below and never overshoot the root.
    double lam = 0.0;
    const double tol = 1e-10 * mu;
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
        const double alpha = old.alpha + kSqrt23 * lam;
        const double phi = q_tr - kSqrt6 * mu * lam - hardening_stress(p, alpha);
        const double g = eta_dt * lam - std::max(phi, 0.0);
        const double gp = eta_dt + kSqrt6 * mu + kSqrt23 * hardening_slope(p, alpha);
        lam -= g / gp;
        if (std::abs(g) < tol) {
            // one extra correction after the stopping criterion fires
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NumericsError("material '" + p.name +
                            "': radial return did not converge in 50 iterations");

    const double alpha_new = old.alpha + kSqrt23 * lam;
    const Mat3 m_hat = s_tr / s_norm;
    const Mat3 s_new = s_tr - 2.0 * mu * lam * m_hat;
    const double q_new = q_tr - kSqrt6 * mu * lam;
    const double phi_final = q_new - hardening_stress(p, alpha_new);

    r.state.eps_p = old.eps_p + lam * m_hat;
    r.state.alpha = alpha_new;
    r.dlambda = lam;
    r.delta_dvis = std::max(phi_final, 0.0) * lam;
    r.state.d_vis = old.d_vis + r.delta_dvis;
    r.tau = kappa * tr_e * Mat3::Identity() + s_new;
    r.tau_vm = q_new;

    const Mat3 dev_e_new = dev_e - lam * m_hat;
    r.psi_e = 0.5 * kappa * tr_e * tr_e + mu * dev_e_new.squaredNorm();
    r.psi_p = plastic_stored_energy(p, alpha_new);

    const double gp_final =
        eta_dt + kSqrt6 * mu + kSqrt23 * hardening_slope(p, alpha_new);
    const double c = 1.0 - 2.0 * mu * lam / s_norm;
    const double gamma_m = 2.0 * kSqrt6 * mu * mu / gp_final - 4.0 * mu * mu * lam / s_norm;
    const Vec9 vm = to_vec9(m_hat);
    r.dtau_deps = kappa * i_dyad_i() +
                  2.0 * mu * c * (p_sym() - i_dyad_i() / 3.0) -
                  gamma_m * (vm * vm.transpose());
    return r;
}

Mat3 log_strain(const Mat3& F) {
    const Mat3 b = F * F.transpose();
    Eigen::SelfAdjointEigenSolver<Mat3> es(b);
    if (es.eigenvalues().minCoeff() <= 0.0 || !es.eigenvalues().allFinite())
        throw NumericsError("deformation gradient is singular or invalid");
    Mat3 eps = Mat3::Zero();
    for (int a = 0; a < 3; ++a) {
        const Vec3d n = es.eigenvectors().col(a);
        eps += 0.5 * std::log(es.eigenvalues()(a)) * (n * n.transpose());
    }
    return eps;
}

MaterialResult evaluate_material(const MaterialParams& p, const Mat3& F,
                                 const MaterialState& old, double dt) {
    const Mat3 b = F * F.transpose();
    Eigen::SelfAdjointEigenSolver<Mat3> es(b);
    if (es.eigenvalues().minCoeff() <= 0.0 || !es.eigenvalues().allFinite())
        throw NumericsError("deformation gradient is singular or invalid");

    Mat3 eps = Mat3::Zero();
    for (int a = 0; a < 3; ++a) {
        const Vec3d n = es.eigenvectors().col(a);
        eps += 0.5 * std::log(es.eigenvalues()(a)) * (n * n.transpose());
    }

    const StressUpdate upd = update_stress(p, eps, old, dt);

    // L = d(ln b)/db from the eigenprojections of b.
    Mat9 L = Mat9::Zero();
    std::array<Mat3, 3> proj;
    for (int a = 0; a < 3; ++a) {
        const Vec3d n = es.eigenvectors().col(a);
        proj[a] = n * n.transpose();
    }
    for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) {
            const double la = es.eigenvalues()(a);
            const double lc = es.eigenvalues()(c);
            const double g = a == c ? 1.0 / la : log_divided_difference(la, lc);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k)
                        for (int l = 0; l < 3; ++l)
                            L(3 * i + j, 3 * k + l) +=
                                g * 0.5 *
                                (proj[a](i, k) * proj[c](j, l) +
                                 proj[a](i, l) * proj[c](j, k));
        }

    // Spatial tangent a : l -> d tau, with M = D : (1/2 L) and the final
    // contraction of M's last index with b (kron structure in row-major
    // pair indexing).
    const Mat9 M = upd.dtau_deps * (0.5 * L);
    Mat9 kron_ib = Mat9::Zero();
    for (int k = 0; k < 3; ++k)
        for (int q = 0; q < 3; ++q)
            for (int m = 0; m < 3; ++m) kron_ib(3 * k + q, 3 * k + m) = b(q, m);

    MaterialResult res;
    res.tau = upd.tau;
    res.a_spatial = 2.0 * M * kron_ib;
    res.psi_e = upd.psi_e;
    res.psi_p = upd.psi_p;
    res.delta_dvis = upd.delta_dvis;
    res.tau_vm = upd.tau_vm;
    res.dlambda = upd.dlambda;
    res.state = upd.state;
    return res;
}

const std::vector<MaterialParams>& material_presets() {
    static const std::vector<MaterialParams> presets = [] {
        std::vector<MaterialParams> v;
        {
            MaterialParams m;
            m.name = "WC";
            m.kappa_gpa = 308.12;
            m.mu_gpa = 288.71;
            m.brittle = true;
            m.gc_n_per_mm = 0.0371;
            m.rho_kg_m3 = 15630.0;
            v.push_back(m);
        }
        {
            MaterialParams m;
            m.name = "eta-carbide";
            m.kappa_gpa = 394.38;
            m.mu_gpa = 228.72;
            m.brittle = true;
            m.gc_n_per_mm = 0.0065;
            m.rho_kg_m3 = 15630.0;
            v.push_back(m);
        }
        {
            MaterialParams m;
            m.name = "Ni";
            m.kappa_gpa = 225.6;
            m.mu_gpa = 75.19;
            m.brittle = false;
            m.y0_mpa = 260.0;
            m.yinf_mpa = 580.0;
            m.h_exp = 9.0;
            m.h_lin_mpa = 70.0;
            m.eta_gpa_s = 0.0;
            m.gc_n_per_mm = 1.73;
            m.rho_kg_m3 = 8908.0;
            v.push_back(m);
        }
        {
            MaterialParams m;
            m.name = "TiC";
            m.kappa_gpa = 235.42;
            m.mu_gpa = 191.53;
            m.brittle = true;
            m.gc_n_per_mm = 0.114;
            m.rho_kg_m3 = 4930.0;
            v.push_back(m);
        }
        {
            MaterialParams m;
            m.name = "NiBSi";
            m.kappa_gpa = 167.84;
            m.mu_gpa = 77.47;
            m.brittle = false;
            m.y0_mpa = 1.3;
            m.yinf_mpa = 1.5;
            m.h_exp = 300.0;
            m.h_lin_mpa = 5.0;
            m.eta_gpa_s = 1.0;
            m.gc_n_per_mm = 0.022;
            m.rho_kg_m3 = 8000.0;
            v.push_back(m);
        }
        return v;
    }();
    return presets;
}

const MaterialParams& material_preset(const std::string& name) {
    for (const auto& m : material_presets())
        if (m.name == name) return m;
    throw InputError("unknown material preset '" + name + "'");
}

}  // namespace voxfrac

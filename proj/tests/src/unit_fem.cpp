// Element-level checks: quadrature exactness, Lagrange shape functions,
// internal force / consistent tangent agreement (finite differences), and
// mass matrices. The finite-difference stiffness comparison is the reference
// oracle for the assembled tangent, covering elastic, plastic and
// rate-dependent states on homogeneous and mixed-phase point sets.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "voxfrac/element.hpp"
#include "voxfrac/material.hpp"
#include "voxfrac/shape.hpp"

using namespace voxfrac;

namespace {

// Monomial integral of x^p over [a, b].
double mono(double a, double b, int p) {
    return (std::pow(b, p + 1) - std::pow(a, p + 1)) / (p + 1);
}

double integrate(const ElementQuadrature& q, const Box3d& box,
                 int px, int py, int pz) {
    // quadrature points live in [-1,1]^3 of `box`
    const Vec3d c = box.center();
    const Vec3d h = 0.5 * box.extent();
    double s = 0.0;
    for (std::size_t g = 0; g < q.size(); ++g) {
        const Vec3d x = c + q.xi[g].cwiseProduct(h);
        s += q.w[g] * std::pow(x.x(), px) * std::pow(x.y(), py) *
             std::pow(x.z(), pz);
    }
    return s;
}

std::vector<Box3d> octants(const Box3d& box) {
    const Vec3d c = box.center();
    std::vector<Box3d> out;
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i) {
                Box3d b;
                b.lo = Vec3d(i ? c.x() : box.lo.x(), j ? c.y() : box.lo.y(),
                             k ? c.z() : box.lo.z());
                b.hi = Vec3d(i ? box.hi.x() : c.x(), j ? box.hi.y() : c.y(),
                             k ? box.hi.z() : c.z());
                out.push_back(b);
            }
    return out;
}

// Physical coordinates of node `a` of an element over `box`.
Vec3d node_position(const Box3d& box, int order, int a) {
    const Index3 key = node_lattice(order, a);
    Vec3d x;
    for (int ax = 0; ax < 3; ++ax)
        x[ax] = box.lo[ax] +
                box.extent()[ax] * static_cast<double>(key[ax]) / order;
    return x;
}

// Nodal displacement vector for the affine field u = A x.
Eigen::VectorXd affine_displacement(const Box3d& box, int order,
                                    const Mat3& A) {
    const int nn = nodes_per_element(order);
    Eigen::VectorXd d(3 * nn);
    for (int a = 0; a < nn; ++a) {
        const Vec3d u = A * node_position(box, order, a);
        for (int i = 0; i < 3; ++i) d(3 * a + i) = u(i);
    }
    return d;
}

// Central finite-difference approximation of k = d f_int / d d.
Eigen::MatrixXd fd_stiffness(const Box3d& box, int order,
                             const ElementQuadrature& quad,
                             const std::vector<const MaterialParams*>& gp_mat,
                             const std::vector<MaterialState>& gp_state,
                             const Eigen::VectorXd& d, double dt, double h) {
    const int n = static_cast<int>(d.size());
    Eigen::MatrixXd k(n, n);
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd dp = d, dm = d;
        dp(j) += h;
        dm(j) -= h;
        const ElementArrays ap =
            element_arrays(box, order, quad, gp_mat, gp_state, dp, dt, false);
        const ElementArrays am =
            element_arrays(box, order, quad, gp_mat, gp_state, dm, dt, false);
        k.col(j) = (ap.f_int - am.f_int) / (2.0 * h);
    }
    return k;
}

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).norm() / b.norm();
}

}  // namespace

TEST_CASE("tensor-product quadrature integrates monomials exactly") {
    Box3d box;
    box.lo = Vec3d(-0.3, 0.1, -1.2);
    box.hi = Vec3d(0.9, 0.7, 0.4);

    for (int npt = 1; npt <= 3; ++npt) {
        const ElementQuadrature q = box_quadrature(npt, box);
        CHECK(q.size() == static_cast<std::size_t>(npt * npt * npt));
        // total weight equals the box volume
        double wsum = 0.0;
        for (double w : q.w) wsum += w;
        CHECK(wsum == doctest::Approx(box.volume()).epsilon(1e-13));
        // exact for all monomials of per-axis degree <= 2*npt - 1
        const int dmax = 2 * npt - 1;
        for (int px = 0; px <= dmax; ++px)
            for (int py = 0; py <= dmax; ++py)
                for (int pz = 0; pz <= dmax; ++pz) {
                    const double exact = mono(box.lo.x(), box.hi.x(), px) *
                                         mono(box.lo.y(), box.hi.y(), py) *
                                         mono(box.lo.z(), box.hi.z(), pz);
                    const double got = integrate(q, box, px, py, pz);
                    CHECK(got ==
                          doctest::Approx(exact).epsilon(1e-12).scale(1.0));
                }
    }
}

TEST_CASE("three-point rule on a symmetric box: odd power kills the integral") {
    Box3d box;
    box.lo = Vec3d(-0.5, -0.25, -1.0);
    box.hi = Vec3d(0.5, 0.25, 1.0);
    const ElementQuadrature q = box_quadrature(3, box);

    // x^5 y^4 z^2 is odd in x -> zero
    CHECK(std::abs(integrate(q, box, 5, 4, 2)) < 1e-15);

    // x^4 y^4 z^2 on [-a,a]x[-b,b]x[-c,c] = (2a^5/5)(2b^5/5)(2c^3/3)
    const double a = 0.5, b = 0.25, c = 1.0;
    const double exact = (2.0 * std::pow(a, 5) / 5.0) *
                         (2.0 * std::pow(b, 5) / 5.0) *
                         (2.0 * std::pow(c, 3) / 3.0);
    CHECK(integrate(q, box, 4, 4, 2) == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("composite rule over tiling children matches the plain rule") {
    Box3d box;
    box.lo = Vec3d(0.2, -0.1, 0.0);
    box.hi = Vec3d(1.0, 0.5, 0.8);
    const std::vector<Box3d> kids = octants(box);

    for (int npt = 1; npt <= 3; ++npt) {
        const ElementQuadrature plain = box_quadrature(npt, box);
        const ElementQuadrature comp = composite_quadrature(npt, box, kids);
        CHECK(comp.size() == 8 * plain.size());

        double wsum = 0.0;
        for (double w : comp.w) wsum += w;
        CHECK(wsum == doctest::Approx(box.volume()).epsilon(1e-13));

        const int dmax = 2 * npt - 1;
        for (int px = 0; px <= dmax; ++px)
            for (int py = 0; py <= dmax; ++py)
                for (int pz = 0; pz <= dmax; ++pz)
                    CHECK(integrate(comp, box, px, py, pz) ==
                          doctest::Approx(integrate(plain, box, px, py, pz))
                              .epsilon(1e-12)
                              .scale(1.0));
    }
}

TEST_CASE("shape functions: partition of unity and interpolation property") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    for (int order = 1; order <= 2; ++order) {
        const int nn = nodes_per_element(order);
        CHECK(nn == (order == 1 ? 8 : 27));

        for (int trial = 0; trial < 50; ++trial) {
            const Vec3d xi(unif(rng), unif(rng), unif(rng));
            const ShapeValues sv = shape_functions(order, xi);
            CHECK(sv.N.sum() == doctest::Approx(1.0).epsilon(1e-13));
            for (int ax = 0; ax < 3; ++ax)
                CHECK(sv.dN.col(ax).sum() ==
                      doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
            // cheap evaluation agrees with the full one
            const Eigen::VectorXd n2 = shape_values(order, xi);
            CHECK((n2 - sv.N).lpNorm<Eigen::Infinity>() < 1e-15);
        }

        // Kronecker property at the node lattice
        for (int a = 0; a < nn; ++a) {
            const Index3 key = node_lattice(order, a);
            Vec3d xi;
            for (int ax = 0; ax < 3; ++ax)
                xi[ax] = -1.0 + 2.0 * static_cast<double>(key[ax]) / order;
            const Eigen::VectorXd N = shape_values(order, xi);
            for (int b = 0; b < nn; ++b)
                CHECK(N(b) == doctest::Approx(a == b ? 1.0 : 0.0)
                                  .epsilon(1e-12)
                                  .scale(1.0));
        }
    }
}

TEST_CASE("linear fields are reproduced exactly by both orders") {
    Box3d box;
    box.lo = Vec3d(0.1, 0.2, 0.3);
    box.hi = Vec3d(1.3, 0.9, 1.1);
    Mat3 A;
    A << 1e-3, 2e-4, -3e-4, 5e-4, -1e-3, 2e-4, 1e-4, 4e-4, 8e-4;

    for (int order = 1; order <= 2; ++order) {
        const Eigen::VectorXd d = affine_displacement(box, order, A);
        const ElementQuadrature quad = box_quadrature(order + 1, box);
        const int nn = nodes_per_element(order);
        std::vector<const MaterialParams*> mats(quad.size(),
                                                &material_preset("WC"));
        std::vector<MaterialState> states(quad.size());
        const ElementArrays out =
            element_arrays(box, order, quad, mats, states, d, 1.0, false);
        // uniform deformation gradient -> all points see the same von Mises
        for (std::size_t g = 1; g < quad.size(); ++g)
            CHECK(out.gp_vm[g] == doctest::Approx(out.gp_vm[0]).epsilon(1e-10));
        CHECK(out.f_int.size() == 3 * nn);
    }
}

TEST_CASE("elastic element stiffness: symmetric with six rigid modes") {
    Box3d box;
    box.lo = Vec3d::Zero();
    box.hi = Vec3d::Ones();
    const int order = 1;
    const ElementQuadrature quad = box_quadrature(2, box);
    std::vector<const MaterialParams*> mats(quad.size(),
                                            &material_preset("WC"));
    std::vector<MaterialState> states(quad.size());
    const Eigen::VectorXd d = Eigen::VectorXd::Zero(24);
    const ElementArrays out =
        element_arrays(box, order, quad, mats, states, d, 1.0, true);

    CHECK((out.k - out.k.transpose()).norm() / out.k.norm() < 1e-13);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.k);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    int n_zero = 0;
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) < 1e-10 * scale) ++n_zero;
    CHECK(n_zero == 6);
    // the rest must be strictly positive
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) >= 1e-10 * scale) CHECK(ev(i) > 0.0);
}

TEST_CASE("consistent tangent matches finite differences of internal force") {
    std::mt19937 rng(91);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    auto run_case = [&](const Box3d& box, int order, const char* mat_name,
                        double strain_amp, double dt, bool expect_plastic,
                        double tol) {
        const ElementQuadrature quad = box_quadrature(order + 1, box);
        std::vector<const MaterialParams*> mats(quad.size(),
                                                &material_preset(mat_name));
        std::vector<MaterialState> states(quad.size());

        // affine base deformation plus a rough nodal perturbation
        Mat3 A;
        A << 1.0, 0.1, -0.05, 0.08, -0.45, 0.03, -0.02, 0.06, -0.4;
        A *= strain_amp;
        Eigen::VectorXd d = affine_displacement(box, order, A);
        const double L = box.extent().minCoeff();
        for (int i = 0; i < d.size(); ++i)
            d(i) += 0.15 * strain_amp * L * unif(rng);

        const ElementArrays out =
            element_arrays(box, order, quad, mats, states, d, dt, true);
        int n_plastic = 0;
        for (double dl : out.gp_dlambda)
            if (dl > 0.0) ++n_plastic;
        if (expect_plastic) {
            CHECK(n_plastic > 0);
        } else {
            CHECK(n_plastic == 0);
        }

        const double h = 1e-6 * strain_amp * L;
        const Eigen::MatrixXd k_fd =
            fd_stiffness(box, order, quad, mats, states, d, dt, h);
        CHECK(rel_err(out.k, k_fd) < tol);
        return n_plastic;
    };

    Box3d unit;
    unit.lo = Vec3d::Zero();
    unit.hi = Vec3d::Ones();
    Box3d skew;
    skew.lo = Vec3d(0.4, -0.3, 0.1);
    skew.hi = Vec3d(1.6, 0.5, 1.4);

    SUBCASE("elastic, order 1 and 2") {
        run_case(unit, 1, "WC", 2e-3, 1.0, false, 2e-5);
        run_case(skew, 2, "WC", 2e-3, 1.0, false, 2e-5);
    }
    SUBCASE("rate-independent plastic, order 1 and 2") {
        run_case(unit, 1, "Ni", 8e-3, 1.0, true, 2e-4);
        run_case(skew, 1, "Ni", 8e-3, 1.0, true, 2e-4);
        run_case(unit, 2, "Ni", 8e-3, 1.0, true, 2e-4);
    }
    SUBCASE("viscoplastic") {
        run_case(unit, 1, "NiBSi", 8e-3, 1e-3, true, 2e-4);
    }
    SUBCASE("plastic restart from a hardened committed state") {
        // march one update, commit, test the tangent of the second one
        Box3d box = unit;
        const int order = 1;
        const ElementQuadrature quad = box_quadrature(2, box);
        std::vector<const MaterialParams*> mats(quad.size(),
                                                &material_preset("Ni"));
        std::vector<MaterialState> states(quad.size());
        Mat3 A;
        A << 1.0, 0.05, 0.0, 0.05, -0.4, 0.0, 0.0, 0.0, -0.45;
        const Eigen::VectorXd d1 = affine_displacement(box, order, 6e-3 * A);
        const ElementArrays first =
            element_arrays(box, order, quad, mats, states, d1, 1.0, false);
        states = first.new_states;
        double max_alpha = 0.0;
        for (const MaterialState& s : states)
            max_alpha = std::max(max_alpha, s.alpha);
        CHECK(max_alpha > 0.0);

        Eigen::VectorXd d2 = affine_displacement(box, order, 9e-3 * A);
        for (int i = 0; i < d2.size(); ++i) d2(i) += 1e-4 * unif(rng);
        const ElementArrays second =
            element_arrays(box, order, quad, mats, states, d2, 1.0, true);
        const Eigen::MatrixXd k_fd =
            fd_stiffness(box, order, quad, mats, states, d2, 1.0, 1e-8);
        CHECK(rel_err(second.k, k_fd) < 2e-4);
    }
    SUBCASE("mixed phases over the point set") {
        const ElementQuadrature quad = box_quadrature(2, unit);
        std::vector<const MaterialParams*> mats;
        const char* names[3] = {"Ni", "WC", "TiC"};
        for (std::size_t g = 0; g < quad.size(); ++g)
            mats.push_back(&material_preset(names[g % 3]));
        std::vector<MaterialState> states(quad.size());
        Mat3 A;
        A << 1.0, 0.1, -0.05, 0.08, -0.45, 0.03, -0.02, 0.06, -0.4;
        Eigen::VectorXd d = affine_displacement(unit, 1, 8e-3 * A);
        for (int i = 0; i < d.size(); ++i) d(i) += 1e-4 * unif(rng);
        const ElementArrays out =
            element_arrays(unit, 1, quad, mats, states, d, 1.0, true);
        const Eigen::MatrixXd k_fd =
            fd_stiffness(unit, 1, quad, mats, states, d, 1.0, 1e-8);
        CHECK(rel_err(out.k, k_fd) < 2e-4);
    }
    SUBCASE("micrometre-scale box") {
        Box3d tiny;
        tiny.lo = Vec3d::Zero();
        tiny.hi = Vec3d::Constant(1e-3);
        run_case(tiny, 1, "Ni", 8e-3, 1.0, true, 2e-4);
    }
}

TEST_CASE("composite and plain quadrature produce identical element arrays") {
    Box3d box;
    box.lo = Vec3d(0.0, 0.0, 0.0);
    box.hi = Vec3d(1.0, 0.8, 1.2);
    const int order = 1;
    const ElementQuadrature plain = box_quadrature(2, box);
    const ElementQuadrature comp = composite_quadrature(2, box, octants(box));

    Mat3 A;
    A << 1.0, 0.1, -0.05, 0.08, -0.45, 0.03, -0.02, 0.06, -0.4;
    const Eigen::VectorXd d = affine_displacement(box, order, 5e-3 * A);

    std::vector<const MaterialParams*> m1(plain.size(),
                                          &material_preset("Ni"));
    std::vector<const MaterialParams*> m2(comp.size(), &material_preset("Ni"));
    std::vector<MaterialState> s1(plain.size());
    std::vector<MaterialState> s2(comp.size());

    const ElementArrays a1 =
        element_arrays(box, order, plain, m1, s1, d, 1.0, true);
    const ElementArrays a2 =
        element_arrays(box, order, comp, m2, s2, d, 1.0, true);

    CHECK((a1.f_int - a2.f_int).norm() / a1.f_int.norm() < 1e-12);
    CHECK((a1.k - a2.k).norm() / a1.k.norm() < 1e-12);
    CHECK(a1.energy_elastic ==
          doctest::Approx(a2.energy_elastic).epsilon(1e-12));
}

TEST_CASE("consistent mass: symmetric, conserves total mass, lumping agrees") {
    Box3d box;
    box.lo = Vec3d(0.2, 0.0, -0.4);
    box.hi = Vec3d(1.0, 0.6, 0.2);

    for (int order = 1; order <= 2; ++order) {
        const ElementQuadrature quad = box_quadrature(order + 1, box);
        std::vector<double> rho(quad.size());
        double mass = 0.0;
        for (std::size_t g = 0; g < quad.size(); ++g) {
            rho[g] = 1e-12 * (8000.0 + 100.0 * static_cast<double>(g));
            mass += quad.w[g] * rho[g];
        }
        const Eigen::MatrixXd m = consistent_mass(box, order, quad, rho);
        CHECK((m - m.transpose()).norm() / m.norm() < 1e-13);
        // each coordinate direction carries the full mass
        CHECK(m.sum() == doctest::Approx(3.0 * mass).epsilon(1e-12));

        const Eigen::VectorXd l = lump_mass(m);
        CHECK(l.sum() == doctest::Approx(3.0 * mass).epsilon(1e-12));
        CHECK(l.minCoeff() > 0.0);
    }
}

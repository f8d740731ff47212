#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "voxfrac/material.hpp"

using namespace voxfrac;

namespace {

// ---------------------------------------------------------------------------
// Independent scalar reference: the same one-equation radial return solved by
// bisection, with the hardening law re-written from the raw parameters. Used
// as the oracle for the production Newton update.
// ---------------------------------------------------------------------------

double oracle_beta(const MaterialParams& p, double a) {
    return p.y0_mpa + (p.yinf_mpa - p.y0_mpa) * (1.0 - std::exp(-p.h_exp * a)) +
           p.h_lin_mpa * a;
}

double oracle_dlambda(const MaterialParams& p, double q_tr, double alpha_old,
                      double dt) {
    if (p.brittle) return 0.0;
    const double mu = p.mu();
    if (q_tr - oracle_beta(p, alpha_old) <= 0.0) return 0.0;
    auto phi = [&](double lam) {
        return q_tr - std::sqrt(6.0) * mu * lam -
               oracle_beta(p, alpha_old + std::sqrt(2.0 / 3.0) * lam);
    };
    double lo = 0.0, hi = q_tr / (std::sqrt(6.0) * mu);
    if (p.eta() > 0.0) {
        const double ed = p.eta() / dt;
        auto h = [&](double lam) { return ed * lam - std::max(phi(lam), 0.0); };
        REQUIRE(h(lo) < 0.0);
        REQUIRE(h(hi) >= 0.0);
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (h(mid) < 0.0 ? lo : hi) = mid;
        }
    } else {
        REQUIRE(phi(lo) > 0.0);
        REQUIRE(phi(hi) < 0.0);
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (phi(mid) > 0.0 ? lo : hi) = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct OracleResult {
    Mat3 tau;
    MaterialState state;
    double dlambda = 0.0;
};

OracleResult oracle_update(const MaterialParams& p, const Mat3& eps,
                           const MaterialState& old, double dt) {
    OracleResult r;
    r.state = old;
    const Mat3 ee = eps - old.eps_p;
    const double tr = ee.trace();
    const Mat3 dev = ee - tr / 3.0 * Mat3::Identity();
    const Mat3 s_tr = 2.0 * p.mu() * dev;
    const double q_tr = std::sqrt(1.5) * s_tr.norm();
    const double lam = oracle_dlambda(p, q_tr, old.alpha, dt);
    r.dlambda = lam;
    Mat3 s = s_tr;
    if (lam > 0.0) {
        const Mat3 m_hat = s_tr / s_tr.norm();
        s -= 2.0 * p.mu() * lam * m_hat;
        r.state.eps_p = old.eps_p + lam * m_hat;
        r.state.alpha = old.alpha + std::sqrt(2.0 / 3.0) * lam;
    }
    r.tau = p.kappa() * tr * Mat3::Identity() + s;
    return r;
}

Mat3 random_sym(std::mt19937& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Mat3 a;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) a(i, j) = a(j, i) = u(rng);
    return a;
}

Mat3 random_dev_sym(std::mt19937& rng, double scale) {
    Mat3 a = random_sym(rng, scale);
    return a - a.trace() / 3.0 * Mat3::Identity();
}

double rel_err(const Mat3& got, const Mat3& want) {
    const double scale = std::max(want.norm(), 1.0);  // 1 MPa floor
    return (got - want).norm() / scale;
}

int plain_index(int i, int j) { return 3 * i + j; }

}  // namespace

TEST_CASE("presets exist and validate") {
    const auto& presets = material_presets();
    CHECK(presets.size() == 5);
    for (const MaterialParams& p : presets) {
        CAPTURE(p.name);
        CHECK_NOTHROW(p.validate());
    }
    CHECK_THROWS_AS(material_preset("unobtainium"), InputError);
}

TEST_CASE("uniaxial and shear strain paths match the scalar oracle") {
    const double tol = 1e-8;
    for (const MaterialParams& p : material_presets()) {
        CAPTURE(p.name);
        const double dt = 1e-3;

        // uniaxial stretch in log-strain space up to 2%
        {
            MaterialState st_prod, st_oracle;
            for (int k = 1; k <= 50; ++k) {
                Mat3 eps = Mat3::Zero();
                eps(0, 0) = 0.02 * k / 50.0;
                const StressUpdate up = update_stress(p, eps, st_prod, dt);
                const OracleResult orc = oracle_update(p, eps, st_oracle, dt);
                CHECK(rel_err(up.tau, orc.tau) < tol);
                st_prod = up.state;
                st_oracle = orc.state;
            }
            CHECK(std::abs(st_prod.alpha - st_oracle.alpha) <=
                  tol * (1.0 + st_oracle.alpha));
        }

        // simple shear up to engineering 4%
        {
            MaterialState st_prod, st_oracle;
            for (int k = 1; k <= 50; ++k) {
                Mat3 eps = Mat3::Zero();
                eps(0, 1) = eps(1, 0) = 0.02 * k / 50.0;
                const StressUpdate up = update_stress(p, eps, st_prod, dt);
                const OracleResult orc = oracle_update(p, eps, st_oracle, dt);
                CHECK(rel_err(up.tau, orc.tau) < tol);
                st_prod = up.state;
                st_oracle = orc.state;
            }
        }
    }
}

TEST_CASE("random mixed strain states match the scalar oracle") {
    std::mt19937 rng(42);
    const double dt = 1e-3;
    for (const MaterialParams& p : material_presets()) {
        CAPTURE(p.name);
        for (int trial = 0; trial < 100; ++trial) {
            MaterialState old;
            old.eps_p = random_dev_sym(rng, 2e-3);
            old.alpha = std::abs(random_sym(rng, 0.02)(0, 0));
            const Mat3 eps = random_sym(rng, 6e-3);
            const StressUpdate up = update_stress(p, eps, old, dt);
            const OracleResult orc = oracle_update(p, eps, old, dt);
            CHECK(rel_err(up.tau, orc.tau) < 1e-8);
            CHECK(std::abs(up.dlambda - orc.dlambda) <= 1e-8 * (1e-6 + orc.dlambda));
        }
    }
}

TEST_CASE("algorithmic tangent matches central finite differences") {
    std::mt19937 rng(7);
    const double dt = 1e-3;
    for (const MaterialParams& p : material_presets()) {
        CAPTURE(p.name);
        int tested = 0;
        int attempts = 0;
        while (tested < 100 && attempts < 1000) {
            ++attempts;
            MaterialState old;
            old.eps_p = random_dev_sym(rng, 2e-3);
            old.alpha = std::abs(random_sym(rng, 0.02)(0, 0));
            const Mat3 eps = random_sym(rng, 6e-3);

            const StressUpdate at = update_stress(p, eps, old, dt);
            const double h = 1e-7;

            // skip states that straddle the elastic/plastic kink inside the
            // finite-difference stencil: the tangent is one-sided there
            bool branch_stable = true;
            Mat9 fd = Mat9::Zero();
            for (int k = 0; k < 3 && branch_stable; ++k)
                for (int l = k; l < 3 && branch_stable; ++l) {
                    Mat3 d = Mat3::Zero();
                    if (k == l)
                        d(k, k) = h;
                    else
                        d(k, l) = d(l, k) = 0.5 * h;
                    const StressUpdate plus = update_stress(p, eps + d, old, dt);
                    const StressUpdate minus = update_stress(p, eps - d, old, dt);
                    if ((plus.dlambda > 0.0) != (minus.dlambda > 0.0) ||
                        (plus.dlambda > 0.0) != (at.dlambda > 0.0)) {
                        branch_stable = false;
                        break;
                    }
                    const Mat3 col = (plus.tau - minus.tau) / (2.0 * h);
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j) {
                            fd(plain_index(i, j), plain_index(k, l)) = col(i, j);
                            fd(plain_index(i, j), plain_index(l, k)) = col(i, j);
                        }
                }
            if (!branch_stable) continue;
            ++tested;
            const double denom = at.dtau_deps.norm();
            REQUIRE(denom > 0.0);
            const double err = (fd - at.dtau_deps).norm() / denom;
            CAPTURE(attempts);
            CAPTURE(at.dlambda);
            CHECK(err < 1e-4);
        }
        CHECK(tested >= 100);
    }
}

TEST_CASE("viscosity sweep converges monotonically to the rate-independent step") {
    MaterialParams p = material_preset("Ni");
    const double dt = 1e-3;
    Mat3 eps = Mat3::Zero();
    eps(0, 0) = 5e-3;  // clearly over yield
    MaterialState old;

    p.eta_gpa_s = 0.0;
    const double lam_ri = update_stress(p, eps, old, dt).dlambda;
    REQUIRE(lam_ri > 0.0);

    double prev = -1.0;
    double gap = 1.0;
    for (double eta : {1e0, 1e-2, 1e-4}) {
        p.eta_gpa_s = eta;
        const double lam = update_stress(p, eps, old, dt).dlambda;
        CHECK(lam < lam_ri);
        CHECK(lam > prev);  // monotone from below as eta decreases
        prev = lam;
        gap = (lam_ri - lam) / lam_ri;
    }
    CHECK(gap < 1e-3);
}

TEST_CASE("stored plastic energy integrates the hardening stress") {
    for (const MaterialParams& p : material_presets()) {
        if (p.brittle) continue;
        CAPTURE(p.name);
        // d(psi_p)/d(alpha) == beta(alpha), checked by central differences
        for (double a : {0.0, 1e-3, 0.01, 0.1, 0.5}) {
            const double h = 1e-6;
            const double fd = (plastic_stored_energy(p, a + h) -
                               plastic_stored_energy(p, a - h < 0.0 ? 0.0 : a - h)) /
                              (a - h < 0.0 ? a + h : 2.0 * h);
            CHECK(fd == doctest::Approx(hardening_stress(p, a)).epsilon(1e-4));
            CHECK(hardening_stress(p, a) ==
                  doctest::Approx(oracle_beta(p, a)).epsilon(1e-12));
        }
    }
}

TEST_CASE("dissipation increment is non-negative and zero for elastic steps") {
    std::mt19937 rng(11);
    const MaterialParams p = material_preset("NiBSi");
    for (int trial = 0; trial < 50; ++trial) {
        MaterialState old;
        const Mat3 eps = random_sym(rng, 5e-3);
        const StressUpdate up = update_stress(p, eps, old, 1e-3);
        CHECK(up.delta_dvis >= 0.0);
        if (up.dlambda == 0.0) CHECK(up.delta_dvis == 0.0);
    }
}

TEST_CASE("log strain of a pure stretch is the log of the stretch") {
    Mat3 F = Mat3::Identity();
    F(0, 0) = 1.1;
    F(1, 1) = 0.9;
    const Mat3 eps = log_strain(F);
    CHECK(eps(0, 0) == doctest::Approx(std::log(1.1)).epsilon(1e-12));
    CHECK(eps(1, 1) == doctest::Approx(std::log(0.9)).epsilon(1e-12));
    CHECK(eps(2, 2) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(std::abs(eps(0, 1)) < 1e-15);
}

TEST_CASE("spatial tangent equals the material tangent at the reference state") {
    const MaterialParams p = material_preset("WC");
    MaterialState old;
    // F = I: b = I, the geometric transformation must be the identity map
    const MaterialResult r = evaluate_material(p, Mat3::Identity(), old, 1e-3);
    const StressUpdate u = update_stress(p, Mat3::Zero(), old, 1e-3);
    CHECK((r.a_spatial - u.dtau_deps).norm() < 1e-9 * u.dtau_deps.norm());
}

TEST_CASE("unit conversions carry the catalog into solver units") {
    const MaterialParams p = material_preset("Ni");
    CHECK(p.kappa() == doctest::Approx(225.6e3));   // GPa -> MPa
    CHECK(p.mu() == doctest::Approx(75.19e3));
    CHECK(p.y0() == doctest::Approx(260.0));        // MPa as listed
    CHECK(p.rho() == doctest::Approx(8908e-12));    // kg/m^3 -> t/mm^3
    CHECK(p.gc() == doctest::Approx(1.73));         // N/mm as listed
    const MaterialParams v = material_preset("NiBSi");
    CHECK(v.eta() == doctest::Approx(1.0e3));       // GPa*s -> MPa*s
}

#include <doctest.h>

#include <cmath>

#include "rydgate/reflection.hpp"

using namespace rydgate;

namespace {
PhysicsParams f2_params() {
    PhysicsParams p;  // defaults carry the F2 resonance
    return p;
}

// Independent oracle for the blockaded-sphere response: radial Simpson rule
// over the exact per-atom term with V = C3/r^3, at omega = 0.
cplx sphere_mean_response(const PhysicsParams& p) {
    const double rb = blockade_radius(p);
    const double om2 = p.omega_ctrl_sq();
    const auto integrand = [&](double r) -> cplx {
        if (r == 0.0) return cplx(0.0, 0.0);
        const double v = p.c3 / (r * r * r);
        const cplx Rr(0.5 * p.gamma_r, 0.0);
        const cplx E(0.5 * p.gamma_e, 0.0);
        const cplx P(0.5 * p.gamma_p, p.delta);
        const cplx num = Rr * P + v * v;
        const cplx a = num / (E * num + om2 * P);
        return 3.0 * r * r / (rb * rb * rb) * p.gamma_e * a;
    };
    const int m = 4000;  // Simpson intervals
    const double h = rb / m;
    cplx acc = integrand(0.0) + integrand(rb);
    for (int i = 1; i < m; ++i) acc += integrand(i * h) * ((i % 2) ? 4.0 : 2.0);
    return acc * (h / 3.0);
}
}  // namespace

TEST_CASE("frequency grid helpers and validation") {
    const FrequencyGrid g = FrequencyGrid::linspace(-1.0, 1.0, 5);
    CHECK(g.points.size() == 5);
    CHECK(g.points.front() == -1.0);
    CHECK(g.points.back() == 1.0);

    const FrequencyGrid band = FrequencyGrid::photon_band(0.01);
    CHECK(band.points.size() >= 257);
    CHECK(band.points.front() == doctest::Approx(-0.06));
    CHECK(band.points.back() == doctest::Approx(0.06));

    FrequencyGrid bad;
    bad.points = {0.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("bare cavity reflects on resonance with a pi phase") {
    const PhysicsParams params = f2_params();
    const cplx r0 = reflection_at(params, {}, {}, 0.0);
    CHECK(std::abs(r0 + 1.0) <= 1e-12);
}

TEST_CASE("dark-state transparency pins the ensemble to full reflection") {
    PhysicsParams params = f2_params();
    params.gamma_r = 0.0;
    CloudGeometry geom;
    geom.n_atoms = 1000;
    geom.seed = 2;
    const EnsembleRealization real = sample_ensemble(geom, params);
    FrequencyGrid zero;
    zero.points = {0.0};
    const ReflectionSpectrum spec = reflection_full(real, params, zero);
    CHECK(std::abs(spec.values[0] + 1.0) <= 1e-10);
}

TEST_CASE("infinitely strong interactions saturate the two-level bound") {
    // 30 atoms at unit coupling and C = 1/30 make NC = 1; R(0) -> 0.6
    const PhysicsParams params = f2_params();
    const std::vector<double> g2(30, 1.0);
    const std::vector<double> sv(30, 1e14);
    const cplx r0 = reflection_at(params, g2, sv, 0.0);
    CHECK(std::abs(r0 - 0.6) <= 1e-5);
}

TEST_CASE("lossless ensembles are unitary at every frequency") {
    PhysicsParams params = f2_params();
    params.gamma_e = params.gamma_r = params.gamma_p = 0.0;
    CloudGeometry geom;
    geom.n_atoms = 50;
    geom.qubit_positions = {{0.0, 0.0, 0.0}};
    geom.seed = 4;
    const EnsembleRealization real = sample_ensemble(geom, params).with_excited({0});
    const ReflectionSpectrum spec =
        reflection_full(real, params, FrequencyGrid::linspace(-20.0, 20.0, 1000));
    double worst = 0.0;
    for (const cplx& r : spec.values) worst = std::max(worst, std::abs(std::abs(r) - 1.0));
    CHECK(worst <= 1e-12);
}

TEST_CASE("positive decay rates keep the response passive") {
    const PhysicsParams params = f2_params();
    CloudGeometry geom;
    geom.n_atoms = 400;
    geom.qubit_positions = {{0.0, -15.0, 0.0}, {0.0, 15.0, 0.0}};
    geom.seed = 8;
    const EnsembleRealization real = sample_ensemble(geom, params).with_excited({0, 1});
    const ReflectionSpectrum spec =
        reflection_full(real, params, FrequencyGrid::linspace(-30.0, 30.0, 601));
    for (const cplx& r : spec.values) CHECK(std::abs(r) <= 1.0 + 1e-10);
}

TEST_CASE("zero-defect lossless response has conjugate symmetry") {
    PhysicsParams params = f2_params();
    params.gamma_e = params.gamma_r = params.gamma_p = 0.0;
    params.delta = 0.0;
    CloudGeometry geom;
    geom.n_atoms = 40;
    geom.qubit_positions = {{0.0, 0.0, 0.0}};
    geom.seed = 12;
    const EnsembleRealization real = sample_ensemble(geom, params).with_excited({0});
    // mirror-exact grid that avoids omega = 0, where the undamped interacting
    // response has a true pole
    FrequencyGrid grid;
    for (int i = 99; i >= 0; --i) grid.points.push_back(-(0.05 + 0.1 * i));
    for (int i = 0; i < 100; ++i) grid.points.push_back(0.05 + 0.1 * i);
    const ReflectionSpectrum spec = reflection_full(real, params, grid);
    const std::size_t n = grid.points.size();
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(spec.values[i] - std::conj(spec.values[n - 1 - i])) <= 1e-12);
}

TEST_CASE("parallel and serial reflection kernels agree bitwise") {
    const PhysicsParams params = f2_params();
    CloudGeometry geom;
    geom.n_atoms = 500;
    geom.qubit_positions = {{0.0, 0.0, 0.0}};
    geom.seed = 21;
    const EnsembleRealization real = sample_ensemble(geom, params).with_excited({0});
    const FrequencyGrid grid = FrequencyGrid::linspace(-5.0, 5.0, 512);
    const ReflectionSpectrum a = reflection_full(real, params, grid);
    const ReflectionSpectrum b = reflection_full_serial(real, params, grid);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("unblockaded response closed form") {
    PhysicsParams params = f2_params();

    SUBCASE("vanishes on resonance without Rydberg decay") {
        params.gamma_r = 0.0;
        CHECK(std::abs(f_E(0.0, params)) <= 1e-14);
    }
    SUBCASE("reduces to the bare two-level value without control field") {
        params.omega_ctrl = 0.0;
        CHECK(std::abs(f_E(0.0, params) - 2.0) <= 1e-14);
    }
    SUBCASE("finite Rydberg decay gives the real positive limit") {
        params.gamma_r = 0.02;
        const double expected =
            params.gamma_e / (0.5 * params.gamma_e + 2.0 * params.omega_ctrl_sq() / params.gamma_r);
        CHECK(std::abs(f_E(0.0, params) - expected) <= 1e-12);
    }
    SUBCASE("equals gamma_e times the exact per-atom term at V = 0") {
        for (double om : {-7.3, -1.0, -0.01, 0.4, 2.9, 18.0}) {
            // invert R = 1 - kappa/(kappa/2 - i*omega + a) for the atom term
            const cplx a = params.kappa / (1.0 - reflection_at(params, {1.0}, {0.0}, om)) -
                           cplx(0.5 * params.kappa, -om);
            CHECK(std::abs(f_E(om, params) - params.gamma_e * a) <= 1e-10);
        }
    }
}

TEST_CASE("blockaded response closed form") {
    SUBCASE("requires a nonzero defect") {
        PhysicsParams params = f2_params();
        params.delta = 0.0;
        CHECK_THROWS_AS(f_B(0.0, params), std::domain_error);
    }
    SUBCASE("is continuous across a dense frequency sweep") {
        const PhysicsParams params = f2_params();
        cplx prev = f_B(-30.0, params);
        for (int i = 1; i <= 1000; ++i) {
            const cplx cur = f_B(-30.0 + 0.06 * i, params);
            CHECK(std::abs(cur - prev) < 0.1);
            prev = cur;
        }
    }
    SUBCASE("matches the sphere-average oracle exactly at zero Rydberg decay") {
        for (bool use_f1 : {true, false}) {
            PhysicsParams params = f2_params();
            if (use_f1) {
                params.c3 = 1690.0;
                params.delta = -5.71;
            }
            params.gamma_r = 0.0;
            const cplx oracle = sphere_mean_response(params);
            const cplx closed = f_B(0.0, params);
            CHECK(std::abs(closed - oracle) / std::abs(oracle) <= 1e-5);
        }
    }
    SUBCASE("stays within two percent of the oracle at physical decay rates") {
        const PhysicsParams params = f2_params();  // gamma_r = 0.01
        const cplx oracle = sphere_mean_response(params);
        const cplx closed = f_B(0.0, params);
        CHECK(std::abs(closed - oracle) / std::abs(oracle) <= 0.02);
    }
}

TEST_CASE("blockade radius") {
    PhysicsParams params = f2_params();

    SUBCASE("matches the F2 reference value near 27 um") {
        CHECK(blockade_radius(params) == doctest::Approx(27.24).epsilon(0.01));
    }
    SUBCASE("sits exactly where the interaction term crosses the excited-state term") {
        const double rb = blockade_radius(params);
        const double v = params.c3 / (rb * rb * rb);
        const double gamma = std::max(std::abs(params.delta), params.gamma_p);
        CHECK(params.gamma_e * v * v ==
              doctest::Approx(gamma * params.omega_ctrl_sq()).epsilon(1e-9));
    }
    SUBCASE("scales as the inverse cube root of the control intensity") {
        const double r1 = blockade_radius(params);
        params.omega_ctrl = 8.0;
        CHECK(blockade_radius(params) == doctest::Approx(0.5 * r1).epsilon(1e-12));
    }
    SUBCASE("is continuous where gamma switches between defect and p decay") {
        params.delta = 0.01;
        params.gamma_p = 0.01;
        const double at = blockade_radius(params);
        params.delta = 0.0100001;
        const double above = blockade_radius(params);
        params.delta = 0.0099999;
        const double below = blockade_radius(params);
        CHECK(above == doctest::Approx(at).epsilon(1e-5));
        CHECK(below == doctest::Approx(at).epsilon(1e-5));
    }
    SUBCASE("rejects degenerate inputs") {
        params.omega_ctrl = 0.0;
        CHECK_THROWS_AS(blockade_radius(params), std::domain_error);
        params = f2_params();
        params.delta = 0.0;
        params.gamma_p = 0.0;
        CHECK_THROWS_AS(blockade_radius(params), std::domain_error);
    }
}

TEST_CASE("homogeneous approximation limits") {
    PhysicsParams params = f2_params();
    FrequencyGrid zero;
    zero.points = {0.0};

    SUBCASE("no atoms reduces to the bare cavity") {
        const ReflectionSpectrum s = reflection_approx(params, 0, 0, zero);
        CHECK(std::abs(s.values[0] + 1.0) <= 1e-12);
    }
    SUBCASE("unblockaded dark state without Rydberg decay") {
        params.gamma_r = 0.0;
        const ReflectionSpectrum s = reflection_approx(params, 500, 0, zero);
        CHECK(std::abs(s.values[0] + 1.0) <= 1e-12);
    }
    SUBCASE("blockaded term composes with the closed form") {
        params.gamma_r = 0.0;
        // C = 1/30, so 300 blockaded atoms put N_B*C = 10
        const ReflectionSpectrum s = reflection_approx(params, 600, 300, zero);
        const cplx expected = 1.0 - 1.0 / (0.5 + 10.0 * f_B(0.0, params));
        CHECK(std::abs(s.values[0] - expected) <= 1e-12);
    }
    SUBCASE("argument order is validated") {
        CHECK_THROWS_AS(reflection_approx(params, 5, 6, zero), std::invalid_argument);
        CHECK_THROWS_AS(reflection_approx(params, 5, -1, zero), std::invalid_argument);
    }
}

TEST_CASE("approximation tracks the exact ensemble in the blockaded regime") {
    PhysicsParams params = f2_params();
    params.omega_ctrl = 3.0;
    CloudGeometry geom;
    geom.n_atoms = 600;  // NC = 20 at C = 1/30
    geom.qubit_positions = {{0.0, 0.0, 0.0}};
    geom.seed = 31;
    EnsembleRealization real = sample_ensemble(geom, params);
    // homogeneous-coupling comparison: every atom at the peak coupling
    real.g.assign(real.n_atoms(), cplx(params.g0, 0.0));

    const FrequencyGrid band = FrequencyGrid::photon_band(0.01);

    SUBCASE("qubit excited, strongly blockaded core") {
        const EnsembleRealization exc = real.with_excited({0});
        const int nb = blockade_count(exc, geom, params);
        CHECK(nb * (1.0 / 30.0) > 10.0);  // regime guard: N_B*C >> 1
        const ReflectionSpectrum full = reflection_full(exc, params, band);
        const ReflectionSpectrum approx = reflection_approx(params, 600, nb, band);
        double worst = 0.0;
        for (std::size_t i = 0; i < band.points.size(); ++i)
            worst = std::max(worst, std::abs(std::abs(approx.values[i]) -
                                             std::abs(full.values[i])) /
                                        std::abs(full.values[i]));
        CHECK(worst <= 0.10);
    }
    SUBCASE("qubit idle, transparency window") {
        // NC = 20 well below |Omega|^2/(gamma_e*gamma_r) = 300
        const ReflectionSpectrum full = reflection_full(real, params, band);
        const ReflectionSpectrum approx = reflection_approx(params, 600, 0, band);
        double worst = 0.0;
        for (std::size_t i = 0; i < band.points.size(); ++i)
            worst = std::max(worst, std::abs(approx.values[i] - full.values[i]));
        CHECK(worst <= 1e-12);  // identical by algebra for uniform coupling
    }
}

TEST_CASE("strengthening the blockade moves the response away from transparency") {
    PhysicsParams params = f2_params();
    params.gamma_r = 0.0;
    FrequencyGrid zero;
    zero.points = {0.0};
    std::vector<double> dist;
    for (int nb : {0, 75, 150, 300, 600})
        dist.push_back(std::abs(reflection_approx(params, 600, nb, zero).values[0] - 1.0));
    // transparent ensemble reflects like the bare cavity, R = -1
    CHECK(dist[0] == doctest::Approx(2.0).epsilon(1e-12));
    for (std::size_t i = 1; i < dist.size(); ++i) CHECK(dist[i] < dist[i - 1]);
}

TEST_CASE("transparency width prediction") {
    PhysicsParams params = f2_params();
    CHECK(eit_linewidth(params, 1000) == doctest::Approx(0.0577).epsilon(2e-3));
    CHECK(eit_linewidth(params, 2000) ==
          doctest::Approx(eit_linewidth(params, 1000) / std::sqrt(2.0)).epsilon(1e-12));
    params.omega_ctrl = 2.0;
    CHECK(eit_linewidth(params, 1000) ==
          doctest::Approx(4.0 * 0.0577).epsilon(2e-3));
    CHECK_THROWS_AS(eit_linewidth(params, 0), std::domain_error);
}

TEST_CASE("lorentzian fit recovers synthetic profiles") {
    const double hw = 0.3, peak = 0.9, floor = 0.1;
    std::vector<double> x, y;
    for (int i = 1; i <= 200; ++i) {
        const double xi = 2.0 * i / 200.0;
        x.push_back(xi);
        y.push_back(floor + (peak - floor) / (1.0 + (xi / hw) * (xi / hw)));
    }
    const LorentzianFit fit = fit_lorentzian(x, y);
    CHECK(fit.half_width == doctest::Approx(hw).epsilon(1e-6));
    CHECK(fit.peak == doctest::Approx(peak).epsilon(1e-6));
    CHECK(fit.floor == doctest::Approx(floor).epsilon(1e-6));
    CHECK(fit.rms_residual <= 1e-9);
    CHECK_THROWS_AS(fit_lorentzian({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("fitted reflection width follows the collectively narrowed feature") {
    // The central |R|^2 peak of a uniform ensemble has half-width close to
    // kappa*|Omega|^2/(2*N*g0^2); the fit should land on it, not elsewhere.
    PhysicsParams params = f2_params();
    params.omega_ctrl = 0.5;
    const int n = 300;
    const LorentzianFit fit = fit_reflection_halfwidth(params, n);
    const double narrowed =
        params.kappa * params.omega_ctrl_sq() / (2.0 * n * params.g0 * params.g0);
    CHECK(fit.half_width == doctest::Approx(narrowed).epsilon(0.25));
    CHECK(fit.rms_residual <= 0.05);
}

TEST_CASE("singular parameter points raise a named error") {
    PhysicsParams params = f2_params();
    params.gamma_e = params.gamma_r = params.gamma_p = 0.0;
    // at omega = |Omega| the lossless single-atom term diverges
    CHECK_THROWS_AS(reflection_at(params, {1.0}, {0.0}, 1.0), SingularityError);
}

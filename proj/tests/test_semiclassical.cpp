#include <doctest.h>

#include <cmath>
#include <vector>

#include "dpt/constants.hpp"
#include "dpt/errors.hpp"
#include "dpt/semiclassical.hpp"
#include "dpt/steadystate.hpp"
#include "test_oracles.hpp"

using namespace dpt;

TEST_CASE("mean-field photon number vanishes exactly at the x-intercept") {
    ModelParams p;
    p.kerr = -0.5;
    p.drive = 1.5;
    p.kappa = 1.0;
    p.kappa_phi = 0.1;
    p.delta = std::sqrt(p.drive * p.drive -
                        (p.kappa + p.kappa_phi) * (p.kappa + p.kappa_phi));
    CHECK(meanfield_nss(p) == 0.0);
    p.delta *= 1.001;
    CHECK(meanfield_nss(p) > 0.0);
}

TEST_CASE("mean-field formula reduces to the U-only form at kappa_two = 0") {
    ModelParams p;
    p.kerr = 0.7;
    p.drive = 2.0;
    p.kappa = 1.0;
    p.delta = 3.0;
    const double expected =
        (3.0 - std::sqrt(4.0 - 1.0)) / 0.7;
    CHECK(meanfield_nss(p) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("below the drive threshold the vacuum branch is returned") {
    ModelParams p;
    p.kerr = 1.0;
    p.drive = 0.5;
    p.kappa = 1.0;
    p.delta = 2.0;
    CHECK(meanfield_nss(p) == 0.0);
}

TEST_CASE("half-damping bright branch tracks the quantum steady state far from criticality") {
    // deep in the bright phase the coherent-state fixed point (plus branch,
    // halved damping as in the equation of motion) is the physical one
    ModelParams p;
    p.kerr = -0.09;
    p.drive = 0.85;
    p.kappa = 1.0;
    p.kappa_phi = 0.057;
    p.kappa_two = 0.001;
    p.n_th = 0.055;
    p.delta = 1.0;
    p.scale = 1.41;
    ModelParams scaled = rescale(p);

    auto ops = build_fock_operators(60);
    auto lv = build_liouvillian(scaled, ops);
    SteadyStateOptions sso;
    sso.check_degeneracy = false;
    auto ss = steady_state(lv, sso);
    const double n_quantum = photon_number(ss.rho, ops);

    const double n_mf = meanfield_nss(scaled, /*plus_branch=*/true, /*half_damping=*/true);
    CHECK(std::abs(n_mf - n_quantum) / n_quantum < 0.10);
}

TEST_CASE("mean-field flow with G = 0 has a single stable fixed point at the origin") {
    ModelParams p;
    p.kerr = -1.0;
    p.kappa = 1.0;
    p.delta = 0.4;
    auto trace = meanfield_ode(p, Complex(0.7, -0.3), 30.0);
    REQUIRE(trace.fixed_points.size() == 1);
    CHECK(std::abs(trace.fixed_points[0].alpha) < 1e-9);
    CHECK(trace.fixed_points[0].stable);
    CHECK(std::abs(trace.alpha.back()) < 1e-6);
}

TEST_CASE("two-photon loss is what bounds the bright phase in the mean field") {
    // far beyond the first-order window: without kappa_2 a stable bright
    // fixed point survives at arbitrarily large detuning, with kappa_2 the
    // bright phase is gone or unstable
    ModelParams p;
    p.kerr = -1.0;
    p.drive = 2.0;
    p.kappa = 1.0;
    p.kappa_two = 0.1;
    // far beyond the two-photon-loss existence bound (kappa/2 + kappa_2 n = G)
    p.delta = 20.0;

    MeanfieldOptions no_k2;
    no_k2.include_kappa_two = false;
    auto bright_start = std::sqrt(18.0);  // near the would-be bright amplitude
    auto trace_no = meanfield_ode(p, Complex(0.0, bright_start), 60.0, no_k2);
    bool stable_bright_without = false;
    for (const auto& fp : trace_no.fixed_points) {
        if (std::norm(fp.alpha) > 1.0 && fp.stable) {
            stable_bright_without = true;
        }
    }
    CHECK(stable_bright_without);

    MeanfieldOptions with_k2;
    with_k2.include_kappa_two = true;
    auto trace_yes = meanfield_ode(p, Complex(0.0, bright_start), 60.0, with_k2);
    bool stable_bright_with = false;
    for (const auto& fp : trace_yes.fixed_points) {
        if (std::norm(fp.alpha) > 1.0 && fp.stable) {
            stable_bright_with = true;
        }
    }
    CHECK(!stable_bright_with);
}

TEST_CASE("mean-field integration reports blow-up") {
    ModelParams p;  // linear amplifier above threshold
    p.drive = 2.0;
    p.kappa = 1.0;
    MeanfieldOptions opts;
    opts.blowup_photons = 1e4;
    CHECK_THROWS_AS(meanfield_ode(p, Complex(0.1, 0.0), 100.0, opts), SolverError);
}

TEST_CASE("Duffing response in the linear limit is a Lorentzian") {
    for (double delta : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
        auto roots = duffing_response(delta, 0.0);
        REQUIRE(roots.size() == 1);
        CHECK(roots[0] == doctest::Approx(0.5 / (delta * delta + 0.25)).epsilon(1e-14));
    }
}

TEST_CASE("Duffing roots satisfy the cubic and count 1 or 3") {
    int tristable_points = 0;
    for (double delta = -1.0; delta <= 4.0; delta += 0.05) {
        for (double xi : {0.05, 0.2, 0.5, 1.0, 2.0}) {
            auto roots = duffing_response(delta, xi);
            CHECK((roots.size() == 1 || roots.size() == 3));
            for (double n : roots) {
                const double resid = (delta * delta + 0.25) * n -
                                     2.0 * delta * xi * n * n +
                                     xi * xi * n * n * n - 0.5;
                CHECK(std::abs(resid) < 1e-10);
                CHECK(n >= 0.0);
            }
            if (roots.size() == 3) {
                ++tristable_points;
            }
        }
    }
    CHECK(tristable_points > 0);  // the bistable window exists
}

TEST_CASE("middle Duffing root is dynamically unstable") {
    // one-photon driven mean-field flow in scale-invariant units:
    //   dz/dtau = [i(xi |z|^2 - delta) - 1/2] z + i/sqrt(2)
    // whose fixed points obey the Duffing cubic with n = |z|^2.
    const double delta = 2.0, xi = 1.0;
    auto roots = duffing_response(delta, xi);
    REQUIRE(roots.size() == 3);

    auto flow = [&](Complex z) {
        return (Complex(0.0, 1.0) * (xi * std::norm(z) - delta) - 0.5) * z +
               Complex(0.0, 1.0 / std::sqrt(2.0));
    };
    auto unstable = [&](double n_root) {
        // fixed point from |z|^2 = n and [i(xi n - delta) - 1/2] z = -i/sqrt(2),
        // then examine the 2x2 Jacobian trace/determinant numerically
        const Complex z = -Complex(0.0, 1.0 / std::sqrt(2.0)) /
                          (Complex(0.0, 1.0) * (xi * n_root - delta) - 0.5);
        REQUIRE(std::abs(std::norm(z) - n_root) < 1e-9);
        const double h = 1e-7;
        const Complex fx = (flow(z + h) - flow(z - h)) / (2 * h);
        const Complex fy = (flow(z + Complex(0, h)) - flow(z - Complex(0, h))) / (2 * h);
        const double tr = fx.real() + fy.imag();
        const double det = fx.real() * fy.imag() - fy.real() * fx.imag();
        return det < 0.0 || tr > 0.0;  // a positive real eigenvalue exists
    };
    CHECK(!unstable(roots[0]));
    CHECK(unstable(roots[1]));
    CHECK(!unstable(roots[2]));
}

TEST_CASE("S21 limits: off-resonant background and full dip") {
    ScatteringParams sp;
    sp.omega_r = 1000.0;
    sp.kappa_ext = 1.0;
    sp.kappa_int = 0.0;
    sp.env.amplitude = 0.7;
    sp.env.phase = 0.4;
    sp.env.delay = 0.0;

    const Complex j(0.0, -1.0);
    const Complex background = 0.7 * std::exp(j * 0.4);
    Complex far = s21(1000.0 + 1e7, sp);
    CHECK(std::abs(far - background) < 1e-5);

    Complex dip = s21(1000.0, sp);
    CHECK(std::abs(dip) < 1e-12);
}

TEST_CASE("synthetic S21 round trip recovers the coupling rates within 2%") {
    ScatteringParams truth;
    truth.omega_r = kTwoPi * 4.3497e9;
    truth.kappa_ext = kTwoPi * 60e3;
    truth.kappa_int = kTwoPi * 17e3;
    truth.env.amplitude = 0.95;
    truth.env.phase = 0.3;
    truth.env.delay = 5e-9;
    truth.env.mismatch = 0.08;

    std::vector<double> omegas;
    std::vector<Complex> values;
    testing::TestRng rng(17);
    const double kappa_tot = truth.kappa_ext + truth.kappa_int;
    for (int k = 0; k < 41; ++k) {
        const double w = truth.omega_r + kappa_tot * (-4.0 + 8.0 * k / 40.0);
        omegas.push_back(w);
        Complex v = s21(w, truth);
        v += 0.003 * Complex(rng.next(), rng.next());
        values.push_back(v);
    }

    ScatteringParams init = truth;
    init.kappa_ext *= 1.3;
    init.kappa_int *= 0.7;
    init.omega_r += 0.3 * kappa_tot;
    init.env.amplitude = 1.0;
    init.env.phase = 0.0;
    init.env.delay = 4.8e-9;
    init.env.mismatch = 0.0;

    auto fit = s21_fit(omegas, values, init);
    CHECK(fit.converged);
    CHECK(std::abs(fit.params.kappa_ext - truth.kappa_ext) / truth.kappa_ext < 0.02);
    CHECK(std::abs(fit.params.kappa_int - truth.kappa_int) / truth.kappa_int < 0.02);
}

TEST_CASE("bare quarter-wave mode sits exactly at pi/2") {
    CircuitParams c;
    c.gamma0 = 0.0;
    c.cap_ratio = 0.0;
    c.omega_quarter = kTwoPi * 4.5068e9;
    auto modes = circuit_modes(c);
    CHECK(modes.k0d == doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(modes.omega0 == doctest::Approx(c.omega_quarter).epsilon(1e-15));
}

TEST_CASE("device operating point reproduces the measured resonance") {
    CircuitParams c;
    c.gamma0 = 3.13e-2;
    c.omega_quarter = kTwoPi * 4.5068e9;
    c.flux = kPi / 6.0;
    auto modes = circuit_modes(c);
    CHECK(std::abs(modes.omega0 / kTwoPi - 4.3497e9) / 4.3497e9 < 1e-3);
    // first-order approximation is sub-percent at this participation ratio
    CHECK(std::abs(modes.k0d_first_order - modes.k0d) / modes.k0d < 0.01);
}

TEST_CASE("flux degeneracy raises an error") {
    CircuitParams c;
    c.gamma0 = 3.13e-2;
    c.omega_quarter = kTwoPi * 4.5e9;
    c.flux = kPi / 2.0;
    CHECK_THROWS_AS(circuit_modes(c), DegenerateInputError);
}

TEST_CASE("Kerr nonlinearity of the device circuit is about 7 kHz") {
    CircuitParams c;
    c.gamma0 = 3.13e-2;
    c.omega_quarter = kTwoPi * 4.5068e9;
    c.flux = kPi / 6.0;
    c.l_cav = cavity_inductance(50.0, c.omega_quarter);
    const double u = kerr_from_circuit(c);
    CHECK(u < 0.0);  // SQUID Kerr is negative
    CHECK(std::abs(std::abs(u) / kTwoPi - 7e3) / 7e3 < 0.20);

    // missing inductance is an error
    CircuitParams no_l = c;
    no_l.l_cav.reset();
    CHECK_THROWS_AS(kerr_from_circuit(no_l), InvalidArgumentError);
}

TEST_CASE("Kerr magnitude shrinks with the participation ratio") {
    CircuitParams c;
    c.omega_quarter = kTwoPi * 4.5e9;
    c.l_cav = cavity_inductance(50.0, c.omega_quarter);
    double prev = std::numeric_limits<double>::infinity();
    for (double g : {3e-2, 1e-2, 3e-3, 1e-3}) {
        c.gamma0 = g;
        const double u = std::abs(kerr_from_circuit(c));
        CHECK(u < prev);
        prev = u;
    }
}

TEST_CASE("SQUID capacitance shifts the Kerr value by a few percent") {
    CircuitParams c;
    c.gamma0 = 3.13e-2;
    c.omega_quarter = kTwoPi * 4.5068e9;
    c.flux = kPi / 6.0;
    c.l_cav = cavity_inductance(50.0, c.omega_quarter);
    const double u0 = std::abs(kerr_from_circuit(c));
    c.cap_ratio = 0.05;
    const double u1 = std::abs(kerr_from_circuit(c));
    const double shift = std::abs(u1 - u0) / u0;
    CHECK(shift > 0.0);
    CHECK(shift < 0.10);
}

TEST_CASE("flux tuning curve and its round-trip fit") {
    CircuitParams c;
    c.gamma0 = 3.13e-2;
    c.omega_quarter = kTwoPi * 4.5068e9;

    std::vector<double> fluxes;
    for (int k = 0; k <= 20; ++k) {
        fluxes.push_back(0.0 + 1.35 * k / 20.0);  // stays away from pi/2 + margin
    }
    auto curve = flux_tuning(c, fluxes);

    // maximum at F = 0; monotone decreasing toward the degeneracy side
    CHECK(curve.front().omega_r == doctest::Approx(circuit_modes(c).omega0));
    for (std::size_t k = 1; k < curve.size(); ++k) {
        REQUIRE(!curve[k].degenerate);
        CHECK(curve[k].omega_r < curve[k - 1].omega_r);
    }

    // consistency with a direct mode solve at pi/6
    CircuitParams at_point = c;
    at_point.flux = kPi / 6.0;
    auto modes = circuit_modes(at_point);
    bool matched = false;
    for (const auto& pt : curve) {
        if (std::abs(pt.flux - kPi / 6.0) < 0.04) {
            matched = std::abs(pt.omega_r - modes.omega0) / modes.omega0 < 1e-2;
        }
    }
    CHECK(matched);

    // round-trip: fit (gamma0, omega_quarter) back from the curve
    CircuitParams init = c;
    init.gamma0 = 2.0e-2;
    init.omega_quarter = kTwoPi * 4.6e9;
    auto fit = fit_flux_curve(curve, init);
    CHECK(fit.converged);
    CHECK(std::abs(fit.gamma0 - c.gamma0) / c.gamma0 < 0.01);
    CHECK(std::abs(fit.omega_quarter - c.omega_quarter) / c.omega_quarter < 0.01);
}

#include <doctest.h>

#include <cmath>

#include "dpt/errors.hpp"
#include "dpt/liouvillian.hpp"
#include "test_oracles.hpp"

using namespace dpt;

namespace {

ModelParams fig_s9_params() {
    // dimensionless: kappa = 1
    ModelParams p;
    p.delta = 0.0;
    p.kerr = 1.0;
    p.drive = 2.0;
    p.kappa = 1.0;
    p.kappa_phi = 0.0;
    p.kappa_two = 0.1;
    p.n_th = 0.0;
    return p;
}

}  // namespace

TEST_CASE("Hamiltonian is diagonal when U = G = 0") {
    auto ops = build_fock_operators(6);
    ModelParams p;
    p.delta = 2.5;
    CMat h = CMat(build_hamiltonian(p, ops));
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            if (i == j) {
                CHECK(h(i, i).real() == doctest::Approx(2.5 * i).epsilon(1e-14));
            } else {
                CHECK(std::abs(h(i, j)) == 0.0);
            }
        }
    }
}

TEST_CASE("Hamiltonian drive and Kerr matrix elements") {
    auto ops = build_fock_operators(5);
    ModelParams p;
    p.delta = 0.7;
    p.kerr = 0.3;
    p.drive = 1.1;
    CMat h = CMat(build_hamiltonian(p, ops));

    // <2|H|0> = (G/2) sqrt(2)
    CHECK(h(2, 0).real() == doctest::Approx(0.5 * 1.1 * std::sqrt(2.0)).epsilon(1e-14));
    // <2|H|2> = 2 delta + U
    CHECK(h(2, 2).real() == doctest::Approx(2 * 0.7 + 0.3).epsilon(1e-14));
    // Hermitian
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("vacuum is stationary for the undriven zero-temperature cavity") {
    auto ops = build_fock_operators(8);
    ModelParams p;
    p.kappa = 1.3;
    auto lv = build_liouvillian(p, ops);
    CMat rho = CMat::Zero(8, 8);
    rho(0, 0) = 1.0;
    CHECK((lv.matrix * vectorize(rho)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("superoperator action equals the dense master-equation right-hand side") {
    auto ops = build_fock_operators(6);
    ModelParams p;
    p.delta = 0.4;
    p.kerr = 0.9;
    p.drive = 1.2;
    p.kappa = 0.8;
    p.kappa_phi = 0.15;
    p.kappa_two = 0.05;
    p.n_th = 0.2;
    auto lv = build_liouvillian(p, ops);

    CMat rho = testing::random_hermitian(6, 99);
    CVec lhs = lv.matrix * vectorize(rho);
    CVec rhs = vectorize(testing::dense_master_rhs(p, rho));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("thermal cavity relaxes to n = n_th") {
    // U = G = kappa_phi = kappa_two = 0 with n_th > 0: the steady state is
    // thermal. Long-time dense integration is the oracle.
    auto ops = build_fock_operators(20);
    ModelParams p;
    p.kappa = 1.0;
    p.n_th = 0.3;
    CMat rho = CMat::Zero(20, 20);
    rho(0, 0) = 1.0;
    rho = testing::dense_master_integrate(p, rho, 25.0, 2500);
    const double n = (CMat(ops.number) * rho).trace().real();
    CHECK(n == doctest::Approx(0.3).epsilon(2e-4));
}

TEST_CASE("trace preservation residual is tiny") {
    auto ops = build_fock_operators(12);
    auto lv = build_liouvillian(fig_s9_params(), ops);
    CHECK(trace_preservation_residual(lv) < 1e-10);
}

TEST_CASE("Hermiticity is preserved by the generator") {
    auto ops = build_fock_operators(8);
    auto lv = build_liouvillian(fig_s9_params(), ops);
    CMat rho = testing::random_hermitian(8, 1234);
    CMat mapped = devectorize(CVec(lv.matrix * vectorize(rho)));
    CHECK((mapped - mapped.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("parity superoperator commutes with the generator") {
    auto ops = build_fock_operators(8);
    auto lv = build_liouvillian(fig_s9_params(), ops);
    SpMat parity_super = sandwich(ops.parity, ops.parity);
    SpMat comm = SpMat(parity_super * lv.matrix) - SpMat(lv.matrix * parity_super);
    double max_abs = 0.0;
    for (int k = 0; k < comm.outerSize(); ++k) {
        for (SpMat::InnerIterator it(comm, k); it; ++it) {
            max_abs = std::max(max_abs, std::abs(it.value()));
        }
    }
    CHECK(max_abs < 1e-12);
}

TEST_CASE("parity block sizes and sector assignment") {
    auto ops = build_fock_operators(4);
    auto lv = build_liouvillian(fig_s9_params(), ops);
    CHECK(lv.even_indices.size() == 8);
    CHECK(lv.odd_indices.size() == 8);

    auto blocks = parity_blocks(lv);
    CHECK(blocks.even.rows() == 8);
    CHECK(blocks.odd.rows() == 8);

    // vec(|0><0|) lives in the even sector
    CMat rho = CMat::Zero(4, 4);
    rho(0, 0) = 1.0;
    CVec v = vectorize(rho);
    CVec odd_part = restrict_to_block(v, lv.odd_indices);
    CHECK(odd_part.cwiseAbs().maxCoeff() == 0.0);
    CVec even_part = restrict_to_block(v, lv.even_indices);
    CHECK(even_part.cwiseAbs().sum() == 1.0);
}

TEST_CASE("cross-sector coupling raises a symmetry violation") {
    auto ops = build_fock_operators(4);
    auto lv = build_liouvillian(fig_s9_params(), ops);
    // corrupt one cross-sector entry: (0,0) is even, (0,1) index = 1 is odd
    lv.matrix.coeffRef(0, 1) = Complex(1e-3, 0.0);
    CHECK_THROWS_AS(parity_blocks(lv), SymmetryViolationError);
}

TEST_CASE("block restrict/expand round-trips") {
    auto ops = build_fock_operators(4);
    auto lv = build_liouvillian(fig_s9_params(), ops);
    CMat rho = testing::random_hermitian(4, 3);
    CVec v = vectorize(rho);
    CVec even = restrict_to_block(v, lv.even_indices);
    CVec odd = restrict_to_block(v, lv.odd_indices);
    CVec back = expand_from_block(even, lv.even_indices, 16) +
                expand_from_block(odd, lv.odd_indices, 16);
    CHECK((back - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rescaling multiplies delta and drive only") {
    ModelParams base = reference_params();
    base.delta = kTwoPi * 0.1e6;
    base.scale = 1.41;
    ModelParams scaled = rescale(base);
    CHECK(scaled.drive == doctest::Approx(base.drive * 1.41).epsilon(1e-15));
    CHECK(scaled.delta == doctest::Approx(kTwoPi * 0.141e6).epsilon(1e-12));
    CHECK(scaled.kappa == base.kappa);
    CHECK(scaled.kerr == base.kerr);
    CHECK(scaled.kappa_phi == base.kappa_phi);
    CHECK(scaled.kappa_two == base.kappa_two);
    CHECK(scaled.n_th == base.n_th);

    ModelParams unit = base;
    unit.scale = 1.0;
    ModelParams same = rescale(unit);
    CHECK(same.drive == base.drive);
}

TEST_CASE("converged_cutoff stops immediately for the empty cavity") {
    auto observable = [](int cutoff) {
        (void)cutoff;
        return 0.0;  // n_ss of the undriven zero-temperature cavity
    };
    auto res = converged_cutoff(observable, 0.01);
    CHECK(res.cutoff == cutoff_ladder()[0]);
    CHECK(res.value == 0.0);
}

TEST_CASE("converged_cutoff reports the last two values when capped") {
    auto observable = [](int cutoff) { return 1.0 / cutoff; };  // never converges at 1%
    // with max_cutoff = 30, only rungs 16 and 24 are evaluated
    try {
        converged_cutoff(observable, 1e-6, 30);
        FAIL("expected ConvergenceCapError");
    } catch (const ConvergenceCapError& e) {
        CHECK(e.last_value == doctest::Approx(1.0 / 24));
        CHECK(e.previous_value == doctest::Approx(1.0 / 16));
    }
}

TEST_CASE("converged_cutoff finds the plateau of a saturating observable") {
    auto observable = [](int cutoff) { return cutoff >= 36 ? 2.0 : 2.0 + 0.5 / cutoff * 16; };
    auto res = converged_cutoff(observable, 0.01);
    CHECK(res.cutoff == 36);
    CHECK(res.value == 2.0);
}

TEST_CASE("model params hash is stable and sensitive") {
    ModelParams a = reference_params();
    ModelParams b = reference_params();
    CHECK(a.hash() == b.hash());
    b.drive *= 1.0000001;
    CHECK(a.hash() != b.hash());
}

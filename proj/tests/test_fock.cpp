#include <doctest.h>

#include <cmath>

#include "dpt/errors.hpp"
#include "dpt/fock.hpp"
#include "test_oracles.hpp"

using namespace dpt;

TEST_CASE("ladder operator entries at cutoff 3") {
    auto ops = build_fock_operators(3);
    CMat a = CMat(ops.a);
    int nonzeros = 0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (std::abs(a(i, j)) > 0.0) ++nonzeros;
        }
    }
    CHECK(nonzeros == 2);
    CHECK(a(0, 1) == Complex(1.0, 0.0));
    CHECK(a(1, 2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("parity diagonal alternates sign") {
    auto ops = build_fock_operators(3);
    CMat p = CMat(ops.parity);
    CHECK(p(0, 0).real() == 1.0);
    CHECK(p(1, 1).real() == -1.0);
    CHECK(p(2, 2).real() == 1.0);

    // Pi^2 = 1
    CMat p2 = p * p;
    CHECK((p2 - CMat::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("number operator spectrum is 0..dim-1") {
    auto ops = build_fock_operators(10);
    CMat n = CMat(ops.a_dag * ops.a);
    for (int k = 0; k < 10; ++k) {
        CHECK(n(k, k).real() == doctest::Approx(double(k)).epsilon(1e-14));
    }
    CHECK((n - CMat(ops.number)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("cutoff below 2 is rejected") {
    CHECK_THROWS_AS(build_fock_operators(1), InvalidArgumentError);
    CHECK_THROWS_AS(build_fock_operators(0), InvalidArgumentError);
}

TEST_CASE("a_dag is the exact conjugate transpose of a") {
    for (int cutoff : {2, 5, 17, 64}) {
        auto ops = build_fock_operators(cutoff);
        CMat diff = CMat(ops.a_dag) - CMat(ops.a).adjoint();
        CHECK(diff.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("commutator [a, a_dag] deviates only at the top level") {
    for (int cutoff : {4, 9, 23}) {
        auto ops = build_fock_operators(cutoff);
        CMat comm = CMat(ops.a * ops.a_dag) - CMat(ops.a_dag * ops.a);
        for (int i = 0; i < cutoff; ++i) {
            for (int j = 0; j < cutoff; ++j) {
                if (i == cutoff - 1 && j == cutoff - 1) {
                    // truncation artifact: 1 - cutoff instead of 1
                    CHECK(comm(i, j).real() ==
                          doctest::Approx(1.0 - cutoff).epsilon(1e-14));
                } else if (i == j) {
                    CHECK(comm(i, j).real() == doctest::Approx(1.0).epsilon(1e-14));
                } else {
                    CHECK(std::abs(comm(i, j)) < 1e-14);
                }
            }
        }
    }
}

TEST_CASE("parity conjugation flips the sign of a") {
    auto ops = build_fock_operators(12);
    CMat lhs = CMat(ops.parity) * CMat(ops.a) * CMat(ops.parity);
    CHECK((lhs + CMat(ops.a)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quadrature at phi = 0 and dim 2") {
    auto ops = build_fock_operators(2);
    CMat x = CMat(quadrature(0.0, ops));
    CHECK(x(0, 1).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(x(1, 0).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("quadrature is Hermitian for arbitrary phi") {
    auto ops = build_fock_operators(8);
    for (double phi : {0.0, 0.3, 1.1, 2.9, 4.2, 6.1}) {
        CMat x = CMat(quadrature(phi, ops));
        CHECK((x - x.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("quadrature at pi/2 against direct symbolic construction") {
    // x_{pi/2} = (a e^{-i pi/2} + a^dag e^{i pi/2}) / sqrt(2), built here
    // entry by entry from the ladder matrix elements.
    const int cutoff = 4;
    auto ops = build_fock_operators(cutoff);
    CMat expected = CMat::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) {
        const Complex amp(std::sqrt(double(n) / 2.0), 0.0);
        expected(n - 1, n) = amp * std::exp(Complex(0.0, -kPi / 2.0));
        expected(n, n - 1) = amp * std::exp(Complex(0.0, kPi / 2.0));
    }
    CMat x = CMat(quadrature(kPi / 2.0, ops));
    CHECK((x - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("vectorize round-trip is exact") {
    CMat eye = CMat::Identity(2, 2);
    CHECK((devectorize(vectorize(eye)) - eye).cwiseAbs().maxCoeff() == 0.0);

    CMat rho = testing::random_density_matrix(5, 77);
    CHECK((devectorize(vectorize(rho)) - rho).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("vectorization of |0><0| has a single unit entry") {
    CMat rho = CMat::Zero(3, 3);
    rho(0, 0) = 1.0;
    CVec v = vectorize(rho);
    CHECK(v[0] == Complex(1.0, 0.0));
    CHECK(v.tail(8).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sandwich superoperator matches dense products") {
    // vec(A rho B) computed directly with dense matrix products as oracle.
    const int dim = 4;
    testing::TestRng rng(123);
    CMat a_dense(dim, dim), b_dense(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            a_dense(i, j) = rng.next_complex();
            b_dense(i, j) = rng.next_complex();
        }
    }
    CMat rho = testing::random_density_matrix(dim, 5);

    SpMat a_sp = a_dense.sparseView();
    SpMat b_sp = b_dense.sparseView();
    CVec via_super = sandwich(a_sp, b_sp) * vectorize(rho);
    CVec direct = vectorize(CMat(a_dense * rho * b_dense));
    CHECK((via_super - direct).cwiseAbs().maxCoeff() < 1e-12);

    CVec via_spre = spre(a_sp) * vectorize(rho);
    CHECK((via_spre - vectorize(CMat(a_dense * rho))).cwiseAbs().maxCoeff() < 1e-12);
    CVec via_spost = spost(b_sp) * vectorize(rho);
    CHECK((via_spost - vectorize(CMat(rho * b_dense))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("vectorize rejects non-square input") {
    CMat rect = CMat::Zero(2, 3);
    CHECK_THROWS_AS(vectorize(rect), InvalidArgumentError);
    CVec v = CVec::Zero(5);
    CHECK_THROWS_AS(devectorize(v), InvalidArgumentError);
}

TEST_CASE("coherent state has Poisson amplitudes and near-unit norm") {
    const Complex alpha(1.2, -0.4);
    CVec psi = coherent_state(40, alpha);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
    // <n> = |alpha|^2
    double n_mean = 0.0;
    for (int n = 0; n < 40; ++n) {
        n_mean += n * std::norm(psi[n]);
    }
    CHECK(n_mean == doctest::Approx(std::norm(alpha)).epsilon(1e-10));
}

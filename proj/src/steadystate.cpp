// Copyright 2026 The dptsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpt/steadystate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "dpt/errors.hpp"

namespace dpt {

DensityMatrixChecks check_density_matrix(const CMat& rho) {
    DensityMatrixChecks c;
    c.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    c.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho + rho.adjoint()),
                                           Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    return c;
}

SteadyStateResult steady_state(const Superoperator& lv, const SteadyStateOptions& opts) {
    const int dim = lv.dim_hilbert;
    const Eigen::Index size = lv.matrix.rows();

    // Replace row 0 with the trace functional and solve M x = e_0.
    std::vector<Eigen::Triplet<Complex>> entries;
    entries.reserve(static_cast<std::size_t>(lv.matrix.nonZeros()) + dim);
    for (int k = 0; k < lv.matrix.outerSize(); ++k) {
        for (SpMat::InnerIterator it(lv.matrix, k); it; ++it) {
            if (it.row() != 0) {
                entries.emplace_back(it.row(), it.col(), it.value());
            }
        }
    }
    for (int n = 0; n < dim; ++n) {
        entries.emplace_back(0, n + dim * n, Complex(1.0, 0.0));
    }
    SpMat system(size, size);
    system.setFromTriplets(entries.begin(), entries.end());
    system.makeCompressed();

    Eigen::SparseLU<SpMat> lu;
    lu.compute(system);
    if (lu.info() != Eigen::Success) {
        throw SolverError("steady-state factorization failed (singular trace-replaced system)");
    }
    CVec rhs = CVec::Zero(size);
    rhs[0] = 1.0;
    CVec x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) {
        throw SolverError("steady-state solve failed");
    }

    SteadyStateResult result;
    CMat rho = devectorize(x);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    result.rho = rho;

    CVec v = vectorize(result.rho);
    result.residual = (lv.matrix * v).norm() / v.norm();

    if (opts.check_degeneracy) {
        // The trace-replaced matrix lifts the zero mode but keeps any other
        // near-null direction of L; two inverse-iteration steps from a fixed
        // start estimate the magnitude of that second eigenvalue.
        CVec probe(size);
        std::uint64_t state = 0x9e3779b97f4a7c15ull;
        for (Eigen::Index i = 0; i < size; ++i) {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            const double re = double(state >> 11) / double(1ull << 53) - 0.5;
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            const double im = double(state >> 11) / double(1ull << 53) - 0.5;
            probe[i] = Complex(re, im);
        }
        probe.normalize();
        double lambda_est = 0.0;
        for (int iter = 0; iter < 2; ++iter) {
            CVec next = lu.solve(probe);
            if (lu.info() != Eigen::Success) {
                break;
            }
            lambda_est = 1.0 / next.norm();
            probe = next / next.norm();
        }
        double scale = 0.0;
        for (int k = 0; k < lv.matrix.outerSize(); ++k) {
            for (SpMat::InnerIterator it(lv.matrix, k); it; ++it) {
                scale = std::max(scale, std::abs(it.value()));
            }
        }
        result.second_eigenvalue_abs = lambda_est;
        result.degenerate_warning =
            scale > 0.0 && lambda_est < opts.degeneracy_tol * scale;
    }
    return result;
}

Complex expectation(const CMat& rho, const SpMat& op) {
    return (op * rho).eval().trace();
}

double photon_number(const CMat& rho, const FockOperators& ops) {
    const Complex n = expectation(rho, ops.number);
    if (std::abs(n.imag()) >= 1e-10 * std::max(1.0, std::abs(n.real()))) {
        throw SolverError("photon number has a non-negligible imaginary part: " +
                          std::to_string(n.imag()));
    }
    return n.real();
}

SqueezingResult squeezing_parameter(const CMat& rho, const FockOperators& ops,
                                    int phi_resolution) {
    if (phi_resolution < 2) {
        throw InvalidArgumentError("phi_resolution must be at least 2");
    }
    const Complex a_mean = expectation(rho, ops.a);
    const Complex a2_mean = expectation(rho, SpMat(ops.a * ops.a));
    const double n_mean = photon_number(rho, ops);

    // Var(phi) = n + 1/2 - |<a>|^2 + Re(e^{-2 i phi} M), M = <a^2> - <a>^2.
    const double base = n_mean + 0.5 - std::norm(a_mean);
    const Complex m = a2_mean - a_mean * a_mean;

    // Coarse scan seeds the harmonic minimum; with an exact 2phi-harmonic
    // both agree, the scan guards against a mis-derived closed form.
    double best_var = std::numeric_limits<double>::infinity();
    for (int k = 0; k < phi_resolution; ++k) {
        const double phi = kPi * k / phi_resolution;
        const double var = base + (m * std::exp(Complex(0.0, -2.0 * phi))).real();
        best_var = std::min(best_var, var);
    }

    SqueezingResult res;
    if (std::abs(m) < 1e-300) {
        res.variance = base;
        res.phi = 0.0;
        return res;
    }
    double phi_min = 0.5 * (std::arg(m) + kPi);
    phi_min = std::fmod(phi_min, kPi);
    if (phi_min < 0.0) {
        phi_min += kPi;
    }
    res.variance = base - std::abs(m);
    res.phi = phi_min;
    // scan may only be above the harmonic minimum
    if (best_var < res.variance - 1e-9 * std::max(1.0, std::abs(res.variance))) {
        throw SolverError("squeezing scan found a value below the harmonic minimum");
    }
    return res;
}

HusimiField husimi_q(const CMat& rho, const HusimiGrid& grid) {
    if (grid.nx < 2 || grid.ny < 2) {
        throw InvalidArgumentError("Husimi grid needs at least 2x2 points");
    }
    const int dim = static_cast<int>(rho.rows());
    FockOperators ops = build_fock_operators(std::max(dim, 2));

    HusimiField field;
    field.grid = grid;
    field.values.assign(static_cast<std::size_t>(grid.nx) * grid.ny, 0.0);

    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const Complex alpha = field.alpha_at(ix, iy);
            const CVec c = coherent_state(dim, alpha);
            const Complex q = c.dot(rho * c);  // <alpha| rho |alpha>
            field.values[static_cast<std::size_t>(iy) * grid.nx + ix] =
                q.real() / kPi;
        }
    }

    const double dx = (grid.re_max - grid.re_min) / (grid.nx - 1);
    const double dy = (grid.im_max - grid.im_min) / (grid.ny - 1);
    field.mass = std::accumulate(field.values.begin(), field.values.end(), 0.0) * dx * dy;

    const double n_mean = photon_number(rho, ops);
    const double r_needed = std::sqrt(3.0 * std::max(n_mean, 0.0)) + 2.0;
    const double r_grid = std::min(std::min(-grid.re_min, grid.re_max),
                                   std::min(-grid.im_min, grid.im_max));
    field.coverage_warning = r_grid < r_needed;
    return field;
}

namespace {

double binder_from_moments(double m2, double m4) {
    if (m4 < 1e-12) {
        throw DegenerateInputError(
            "Binder cumulant undefined: fourth phase moment below 1e-12");
    }
    return m2 * m2 / m4;
}

}  // namespace

double binder_cumulant(std::span<const double> phases) {
    if (phases.size() < 1000) {
        throw InsufficientDataError("Binder cumulant needs at least 1000 phase samples, got " +
                                    std::to_string(phases.size()));
    }
    double m2 = 0.0, m4 = 0.0;
    for (double phi : phases) {
        const double p2 = phi * phi;
        m2 += p2;
        m4 += p2 * p2;
    }
    m2 /= double(phases.size());
    m4 /= double(phases.size());
    return binder_from_moments(m2, m4);
}

double binder_cumulant_weighted(std::span<const double> phases,
                                std::span<const double> weights) {
    if (phases.size() != weights.size() || phases.empty()) {
        throw InvalidArgumentError("phases and weights must have equal nonzero length");
    }
    double w_sum = 0.0, m2 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        const double p2 = phases[i] * phases[i];
        w_sum += weights[i];
        m2 += weights[i] * p2;
        m4 += weights[i] * p2 * p2;
    }
    if (w_sum <= 0.0) {
        throw InvalidArgumentError("weights must have positive total mass");
    }
    return binder_from_moments(m2 / w_sum, m4 / w_sum);
}

PhaseDistribution phase_distribution(const CMat& rho, int bins, double r_max) {
    const int dim = static_cast<int>(rho.rows());
    FockOperators ops = build_fock_operators(std::max(dim, 2));
    if (r_max <= 0.0) {
        r_max = std::sqrt(3.0 * std::max(photon_number(rho, ops), 0.0)) + 2.0;
    }
    constexpr int kRadialPoints = 96;

    PhaseDistribution dist;
    dist.phases.resize(bins);
    dist.density.resize(bins);
    double total = 0.0;
    for (int b = 0; b < bins; ++b) {
        // bin centers over the principal branch (-pi, pi]
        const double phi = -kPi + kTwoPi * (b + 0.5) / bins;
        dist.phases[b] = phi;
        double acc = 0.0;
        for (int j = 1; j <= kRadialPoints; ++j) {
            const double r = r_max * j / kRadialPoints;
            const Complex alpha = std::polar(r, phi);
            const CVec c = coherent_state(dim, alpha);
            const double q = (c.dot(rho * c)).real() / kPi;
            acc += q * r;
        }
        dist.density[b] = acc * (r_max / kRadialPoints);
        total += dist.density[b];
    }
    if (total > 0.0) {
        const double bin_width = kTwoPi / bins;
        for (double& d : dist.density) {
            d /= total * bin_width;
        }
    }
    return dist;
}

}  // namespace dpt

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

#pragma once

#include <span>
#include <vector>

#include "dpt/fock.hpp"
#include "dpt/liouvillian.hpp"
#include "dpt/types.hpp"

namespace dpt {

struct DensityMatrixChecks {
    double hermiticity_error = 0.0;  // max |rho - rho^dag|
    double trace_error = 0.0;        // |Tr rho - 1|
    double min_eigenvalue = 0.0;     // most negative eigenvalue
    bool ok(double herm_tol = 1e-10, double trace_tol = 1e-10,
            double psd_tol = -1e-8) const {
        return hermiticity_error < herm_tol && trace_error < trace_tol &&
               min_eigenvalue > psd_tol;
    }
};

DensityMatrixChecks check_density_matrix(const CMat& rho);

struct SteadyStateOptions {
    // When true, runs a cheap inverse iteration to estimate the second
    // eigenvalue and flags a near-degenerate null space instead of failing
    // (expected deep in the symmetry-broken region).
    bool check_degeneracy = true;
    double degeneracy_tol = 1e-9;
};

struct SteadyStateResult {
    CMat rho;                         // Hermitized, unit trace
    double residual = 0.0;            // ||L vec(rho)|| / ||vec(rho)||
    bool degenerate_warning = false;  // second eigenvalue below tolerance
    double second_eigenvalue_abs = 0.0;  // |lambda| estimate behind the flag
};

// Solves L rho = 0 by replacing one row of the sparse system with the trace
// constraint and solving the resulting nonsingular system; deterministic and
// independent of eigen-iteration randomness. The result is Hermitized
// (rho + rho^dag)/2 and trace-normalized; small negative eigenvalues above
// -1e-8 are tolerated, not clipped.
SteadyStateResult steady_state(const Superoperator& lv,
                               const SteadyStateOptions& opts = {});

// Tr(rho a^dag a). Asserts the imaginary part is below 1e-10.
double photon_number(const CMat& rho, const FockOperators& ops);

Complex expectation(const CMat& rho, const SpMat& op);

struct SqueezingResult {
    double variance = 0.0;  // minimal Delta x_phi^2 (vacuum = 1/2)
    double phi = 0.0;       // quadrature angle of the minimum, in [0, pi)
};

// Minimal quadrature variance over phi. A coarse scan over [0, pi) at the
// given resolution seeds the closed-form minimum of the 2phi-harmonic
// (the variance is a constant plus a sinusoid in 2phi).
SqueezingResult squeezing_parameter(const CMat& rho, const FockOperators& ops,
                                    int phi_resolution = 180);

struct HusimiGrid {
    double re_min = -4.0, re_max = 4.0;
    double im_min = -4.0, im_max = 4.0;
    int nx = 81, ny = 81;
};

struct HusimiField {
    HusimiGrid grid;
    std::vector<double> values;     // row-major: values[iy * nx + ix]
    bool coverage_warning = false;  // grid smaller than sqrt(3 n) + 2
    double mass = 0.0;              // discrete integral over the grid

    Complex alpha_at(int ix, int iy) const {
        const double re = grid.re_min + (grid.re_max - grid.re_min) * ix / (grid.nx - 1);
        const double im = grid.im_min + (grid.im_max - grid.im_min) * iy / (grid.ny - 1);
        return {re, im};
    }
};

// Q(alpha) = <alpha| rho |alpha> / pi on a rectangular grid.
HusimiField husimi_q(const CMat& rho, const HusimiGrid& grid);

// Bimodality coefficient B = m2^2 / m4 with m_j the j-th moment of the
// phase distribution over the principal branch (-pi, pi]; no unwrapping.
// Throws DegenerateInputError when m4 < 1e-12 (all phases at zero).
double binder_cumulant(std::span<const double> phases);

// Same from a tabulated density p(phi_i) with weights; used for
// distributions derived from a steady state rather than samples.
double binder_cumulant_weighted(std::span<const double> phases,
                                std::span<const double> weights);

// Angular distribution p(Phi) of a state, computed by radially integrating
// the Husimi function; returns bin centers and normalized weights.
struct PhaseDistribution {
    std::vector<double> phases;
    std::vector<double> density;
};
PhaseDistribution phase_distribution(const CMat& rho, int bins = 128,
                                     double r_max = 0.0);

}  // namespace dpt

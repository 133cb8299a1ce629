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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpt/liouvillian.hpp"
#include "dpt/types.hpp"

namespace dpt {

struct DenseSpectrum {
    CVec eigenvalues;  // sorted by |Re| ascending
    CMat eigenvectors; // columns matched to eigenvalues
};

// Full dense diagonalization of a (block) generator. Refuses dimensions
// above `dim_cap` with guidance to use the shift-invert path instead.
DenseSpectrum dense_spectrum(const SpMat& block, int dim_cap = 4096);

struct ShiftInvertOptions {
    Complex shift{0.0, 0.0};  // defaults to -1e-6 * kappa at the call site
    int subspace = 40;
    int max_restarts = 8;
    double tol = 1e-9;
    int n_want = 4;
};

struct EigenPairs {
    std::vector<Complex> values;
    CMat vectors;
    std::vector<double> residuals;  // ||A v - lambda v|| / ||v||
};

// Restarted shift-invert Arnoldi around opts.shift. The sparse LU of
// (A - shift I) is factorized once and reused across restarts. When
// (deflate_vec, deflate_functional) are given, the iteration is confined to
// the complement of that eigen-direction (used to project out the steady
// state from the even block). Returns converged pairs sorted by distance
// to the shift; throws SolverError with the last residual when nothing
// converges.
EigenPairs shift_invert_eigs(const SpMat& a, const ShiftInvertOptions& opts,
                             const CVec* deflate_vec = nullptr,
                             const CVec* deflate_functional = nullptr);

enum class GapMethod { kAuto, kDense, kShiftInvert };

struct SpectralReport {
    Complex lambda_1st{0.0, 0.0};  // even block, smallest |Re| after the zero mode
    Complex lambda_ssb{0.0, 0.0};  // odd block, smallest |Re|
    double residual_1st = 0.0;
    double residual_ssb = 0.0;
    int cutoff = 0;
    std::string method;
    // |lambda_1st| within 10x solver tolerance of the zero mode; reported,
    // not treated as failure (expected deep in the symmetry-broken region).
    bool zero_mode_ambiguous = false;
};

struct GapOptions {
    GapMethod method = GapMethod::kAuto;
    int dense_cap = 4096;     // largest block dimension for the dense path
    ShiftInvertOptions arnoldi;
    bool shift_set = false;   // when false, shift = -1e-6 * |max Re diag|
    bool compute_1st = true;  // grid scans often need only one block
    bool compute_ssb = true;
};

// lambda_1st from the even block (zero mode excluded) and lambda_ssb from
// the odd block, each the eigenvalue whose real part is closest to zero.
// Conjugate-pair ties report the member with Im >= 0.
SpectralReport liouvillian_gaps(const Superoperator& lv, const GapOptions& opts = {});

struct EvolveOptions {
    double rtol = 1e-8;
    double atol = 1e-12;
    double max_step = 0.0;  // 0 = unbounded
};

// Integrates d vec(rho)/dt = L vec(rho) with an adaptive embedded
// Runge-Kutta (Dormand-Prince 5(4)) and returns vec(rho) at each requested
// time. Times must be strictly increasing and start at t >= 0 relative to
// rho0. Trace and Hermiticity are verified at every output time.
std::vector<CVec> evolve_master(const Superoperator& lv, const CMat& rho0,
                                std::span<const double> times,
                                const EvolveOptions& opts = {});

// Convenience: expectation value series of `op` along evolve_master output.
std::vector<double> evolve_observable(const Superoperator& lv, const CMat& rho0,
                                      const SpMat& op, std::span<const double> times,
                                      const EvolveOptions& opts = {});

struct SpectralDynamicsResult {
    std::vector<double> values;
    bool fell_back = false;          // eigenbasis ill-conditioned or defective
    double condition_estimate = 0.0;
};

// Observable dynamics via the spectral form rho(t) = sum_j c_j e^{lambda_j t} rho_j,
// where c depends only on rho0. Falls back to direct integration when the
// eigenvector matrix is ill-conditioned (condition estimate above threshold).
SpectralDynamicsResult spectral_dynamics(const Superoperator& lv, const CMat& rho0,
                                         const SpMat& op, std::span<const double> times,
                                         double cond_threshold = 1e12);

}  // namespace dpt

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

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dpt/fock.hpp"
#include "dpt/model.hpp"
#include "dpt/types.hpp"

namespace dpt {

// H = delta a^dag a + (U/2) a^dag a^dag a a + (G/2)(a^dag a^dag + a a).
SpMat build_hamiltonian(const ModelParams& params, const FockOperators& ops);

// The Lindblad generator acting on column-stacked density matrices:
//
//   d vec(rho)/dt = matrix * vec(rho)
//
// with eigenvalues of non-positive real part. Gaps are reported elsewhere
// as |Re lambda| >= 0.
//
// The weak Z2 (photon parity) symmetry splits the index space of |n><m|
// into an even sector (n+m even, contains the steady state) and an odd
// sector (n+m odd, hosts the symmetry-breaking eigenvalue); `sector` maps
// each vectorized index to its block.
struct Superoperator {
    int dim_hilbert = 0;
    SpMat matrix;
    std::vector<std::uint8_t> sector;  // 0 = even, 1 = odd
    std::vector<int> even_indices;
    std::vector<int> odd_indices;
};

// L = -i[H,.] + kappa (n_th + 1) D[a] + kappa n_th D[a^dag]
//     + kappa_phi D[a^dag a] + kappa_two D[a^2].
Superoperator build_liouvillian(const ModelParams& params, const FockOperators& ops);

// Residual of the trace-preservation identity vec(1)^dag L = 0, relative
// to the largest matrix entry.
double trace_preservation_residual(const Superoperator& lv);

struct ParityBlocks {
    SpMat even;
    SpMat odd;
    std::vector<int> even_indices;  // vectorized index of each block row
    std::vector<int> odd_indices;
};

// Extracts the two parity blocks. Any cross-sector entry above `tol`
// (relative to the largest entry) throws SymmetryViolationError, since the
// model commutes with parity by construction and coupling indicates a bug.
ParityBlocks parity_blocks(const Superoperator& lv, double tol = 1e-12);

// Restriction of a vectorized operator to one block's index list.
CVec restrict_to_block(const CVec& full, std::span<const int> indices);
CVec expand_from_block(const CVec& blockvec, std::span<const int> indices, int full_size);

// Geometric cutoff ladder used by the convergence search.
std::span<const int> cutoff_ladder();

struct CutoffResult {
    int cutoff = 0;
    double value = 0.0;
};

// Finds the smallest ladder cutoff at which `observable(cutoff)` changes by
// less than rel_tol when moving to the next rung, and returns that cutoff
// with its value. Throws ConvergenceCapError (carrying the last two values)
// if the ladder is exhausted, or if `max_cutoff` > 0 truncates it early.
CutoffResult converged_cutoff(const std::function<double(int)>& observable,
                              double rel_tol = 0.01, int max_cutoff = 0);

}  // namespace dpt

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

#include "dpt/types.hpp"

namespace dpt {

// Ladder, number and parity operators on the truncated Fock space
// {|0>, ..., |dim-1>}. The top level is kept as-is; truncation adequacy
// is handled by the cutoff-convergence machinery, not here.
struct FockOperators {
    int dim = 0;
    SpMat a;       // annihilation, a[n-1,n] = sqrt(n)
    SpMat a_dag;   // creation, exact conjugate transpose of a
    SpMat number;  // diagonal 0..dim-1
    SpMat parity;  // diagonal (-1)^n
};

// Builds the operator set for a given cutoff. Throws InvalidArgumentError
// for cutoff < 2.
FockOperators build_fock_operators(int cutoff);

// Quadrature x_phi = (a e^{-i phi} + a^dag e^{i phi}) / sqrt(2).
SpMat quadrature(double phi, const FockOperators& ops);

// Column-stacking vectorization: vec(rho)[row + dim*col] = rho(row, col).
// This convention is fixed repo-wide; all superoperator constructions
// assume it (vec(A rho B) = (B^T kron A) vec(rho)).
CVec vectorize(const CMat& rho);
CMat devectorize(const CVec& v);

// Superoperators for left/right multiplication under the convention above.
SpMat spre(const SpMat& op);                      // vec(A rho)
SpMat spost(const SpMat& op);                     // vec(rho B)
SpMat sandwich(const SpMat& a, const SpMat& b);   // vec(A rho B)

// Lindblad dissipator D[A] = A . A^dag - {A^dag A, .}/2 as a superoperator.
SpMat dissipator(const SpMat& op);

// n-th Fock basis state as a dense ket.
CVec fock_state(int dim, int n);

// Coherent state |alpha> truncated to dim levels (normalized within the
// truncated space only when the tail is negligible; no renormalization).
CVec coherent_state(int dim, Complex alpha);

}  // namespace dpt

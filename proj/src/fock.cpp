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

#include "dpt/fock.hpp"

#include <cmath>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "dpt/errors.hpp"

namespace dpt {

namespace {

using Triplet = Eigen::Triplet<Complex>;

SpMat from_triplets(int rows, int cols, std::vector<Triplet>& entries) {
    SpMat m(rows, cols);
    m.setFromTriplets(entries.begin(), entries.end());
    m.makeCompressed();
    return m;
}

}  // namespace

FockOperators build_fock_operators(int cutoff) {
    if (cutoff < 2) {
        throw InvalidArgumentError("Fock cutoff must be at least 2, got " +
                                   std::to_string(cutoff));
    }
    FockOperators ops;
    ops.dim = cutoff;

    std::vector<Triplet> a_entries;
    a_entries.reserve(cutoff - 1);
    for (int n = 1; n < cutoff; ++n) {
        a_entries.emplace_back(n - 1, n, Complex(std::sqrt(double(n)), 0.0));
    }
    ops.a = from_triplets(cutoff, cutoff, a_entries);
    ops.a_dag = SpMat(ops.a.adjoint());
    ops.a_dag.makeCompressed();

    std::vector<Triplet> n_entries, p_entries;
    n_entries.reserve(cutoff);
    p_entries.reserve(cutoff);
    for (int n = 0; n < cutoff; ++n) {
        n_entries.emplace_back(n, n, Complex(double(n), 0.0));
        p_entries.emplace_back(n, n, Complex(n % 2 == 0 ? 1.0 : -1.0, 0.0));
    }
    ops.number = from_triplets(cutoff, cutoff, n_entries);
    ops.parity = from_triplets(cutoff, cutoff, p_entries);
    return ops;
}

SpMat quadrature(double phi, const FockOperators& ops) {
    const Complex phase = std::exp(Complex(0.0, -phi));
    SpMat x = (ops.a * phase + ops.a_dag * std::conj(phase)) / std::sqrt(2.0);
    x.makeCompressed();
    return x;
}

CVec vectorize(const CMat& rho) {
    if (rho.rows() != rho.cols()) {
        throw InvalidArgumentError("vectorize expects a square matrix");
    }
    return Eigen::Map<const CVec>(rho.data(), rho.size());
}

CMat devectorize(const CVec& v) {
    const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
    if (dim * dim != v.size()) {
        throw InvalidArgumentError("devectorize expects a perfect-square length");
    }
    return Eigen::Map<const CMat>(v.data(), dim, dim);
}

SpMat spre(const SpMat& op) {
    SpMat eye(op.rows(), op.cols());
    eye.setIdentity();
    SpMat out = Eigen::kroneckerProduct(eye, op).eval();
    out.makeCompressed();
    return out;
}

SpMat spost(const SpMat& op) {
    SpMat eye(op.rows(), op.cols());
    eye.setIdentity();
    SpMat op_t = SpMat(op.transpose());
    SpMat out = Eigen::kroneckerProduct(op_t, eye).eval();
    out.makeCompressed();
    return out;
}

SpMat sandwich(const SpMat& a, const SpMat& b) {
    SpMat b_t = SpMat(b.transpose());
    SpMat out = Eigen::kroneckerProduct(b_t, a).eval();
    out.makeCompressed();
    return out;
}

SpMat dissipator(const SpMat& op) {
    SpMat op_dag = SpMat(op.adjoint());
    SpMat op_dag_op = SpMat(op_dag * op);
    SpMat out = sandwich(op, op_dag) - 0.5 * spre(op_dag_op) - 0.5 * spost(op_dag_op);
    out.makeCompressed();
    return out;
}

CVec fock_state(int dim, int n) {
    if (n < 0 || n >= dim) {
        throw InvalidArgumentError("Fock index out of range");
    }
    CVec psi = CVec::Zero(dim);
    psi[n] = 1.0;
    return psi;
}

CVec coherent_state(int dim, Complex alpha) {
    CVec psi(dim);
    psi[0] = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < dim; ++n) {
        psi[n] = psi[n - 1] * alpha / std::sqrt(double(n));
    }
    return psi;
}

}  // namespace dpt

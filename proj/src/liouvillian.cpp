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

#include "dpt/liouvillian.hpp"

#include <cmath>
#include <string>

#include "dpt/errors.hpp"

namespace dpt {

SpMat build_hamiltonian(const ModelParams& params, const FockOperators& ops) {
    if (!params.valid()) {
        throw InvalidArgumentError("model parameters violate their invariants");
    }
    const SpMat& a = ops.a;
    const SpMat& ad = ops.a_dag;
    SpMat n = ops.number;
    SpMat a2 = SpMat(a * a);
    SpMat ad2 = SpMat(ad * ad);
    // a^dag a^dag a a = n (n - 1), diagonal in the Fock basis.
    SpMat kerr_term = SpMat(n * n) - n;

    SpMat h = params.delta * n + 0.5 * params.kerr * kerr_term +
              0.5 * params.drive * (ad2 + a2);
    h.makeCompressed();
    return h;
}

Superoperator build_liouvillian(const ModelParams& params, const FockOperators& ops) {
    Superoperator lv;
    lv.dim_hilbert = ops.dim;

    SpMat h = build_hamiltonian(params, ops);
    SpMat generator = -kImag * (spre(h) - spost(h));

    if (params.kappa > 0.0) {
        generator += params.kappa * (params.n_th + 1.0) * dissipator(ops.a);
        if (params.n_th > 0.0) {
            generator += params.kappa * params.n_th * dissipator(ops.a_dag);
        }
    }
    if (params.kappa_phi > 0.0) {
        generator += params.kappa_phi * dissipator(ops.number);
    }
    if (params.kappa_two > 0.0) {
        SpMat a2 = SpMat(ops.a * ops.a);
        generator += params.kappa_two * dissipator(a2);
    }
    generator.makeCompressed();
    lv.matrix = std::move(generator);

    const int dim = ops.dim;
    lv.sector.resize(static_cast<std::size_t>(dim) * dim);
    for (int col = 0; col < dim; ++col) {
        for (int row = 0; row < dim; ++row) {
            const int idx = row + dim * col;
            const std::uint8_t odd = static_cast<std::uint8_t>((row + col) % 2);
            lv.sector[idx] = odd;
            (odd ? lv.odd_indices : lv.even_indices).push_back(idx);
        }
    }
    return lv;
}

double trace_preservation_residual(const Superoperator& lv) {
    const int dim = lv.dim_hilbert;
    CVec ident = CVec::Zero(static_cast<Eigen::Index>(dim) * dim);
    for (int n = 0; n < dim; ++n) {
        ident[n + dim * n] = 1.0;
    }
    CVec left = lv.matrix.adjoint() * ident;
    double scale = 0.0;
    for (int k = 0; k < lv.matrix.outerSize(); ++k) {
        for (SpMat::InnerIterator it(lv.matrix, k); it; ++it) {
            scale = std::max(scale, std::abs(it.value()));
        }
    }
    if (scale == 0.0) {
        return 0.0;
    }
    return left.cwiseAbs().maxCoeff() / scale;
}

ParityBlocks parity_blocks(const Superoperator& lv, double tol) {
    const auto size = lv.matrix.rows();
    // position of each vectorized index inside its block
    std::vector<int> pos(static_cast<std::size_t>(size), -1);
    for (std::size_t i = 0; i < lv.even_indices.size(); ++i) {
        pos[lv.even_indices[i]] = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < lv.odd_indices.size(); ++i) {
        pos[lv.odd_indices[i]] = static_cast<int>(i);
    }

    double scale = 0.0;
    for (int k = 0; k < lv.matrix.outerSize(); ++k) {
        for (SpMat::InnerIterator it(lv.matrix, k); it; ++it) {
            scale = std::max(scale, std::abs(it.value()));
        }
    }

    std::vector<Eigen::Triplet<Complex>> even_entries, odd_entries;
    for (int k = 0; k < lv.matrix.outerSize(); ++k) {
        for (SpMat::InnerIterator it(lv.matrix, k); it; ++it) {
            const std::uint8_t s_row = lv.sector[it.row()];
            const std::uint8_t s_col = lv.sector[it.col()];
            if (s_row != s_col) {
                if (std::abs(it.value()) > tol * scale) {
                    throw SymmetryViolationError(
                        "parity sectors are coupled: entry (" + std::to_string(it.row()) +
                        ", " + std::to_string(it.col()) + ") = " +
                        std::to_string(std::abs(it.value())));
                }
                continue;
            }
            auto& entries = s_row ? odd_entries : even_entries;
            entries.emplace_back(pos[it.row()], pos[it.col()], it.value());
        }
    }

    ParityBlocks blocks;
    blocks.even_indices = lv.even_indices;
    blocks.odd_indices = lv.odd_indices;
    blocks.even.resize(static_cast<Eigen::Index>(lv.even_indices.size()),
                       static_cast<Eigen::Index>(lv.even_indices.size()));
    blocks.odd.resize(static_cast<Eigen::Index>(lv.odd_indices.size()),
                      static_cast<Eigen::Index>(lv.odd_indices.size()));
    blocks.even.setFromTriplets(even_entries.begin(), even_entries.end());
    blocks.odd.setFromTriplets(odd_entries.begin(), odd_entries.end());
    blocks.even.makeCompressed();
    blocks.odd.makeCompressed();
    return blocks;
}

CVec restrict_to_block(const CVec& full, std::span<const int> indices) {
    CVec out(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = full[indices[i]];
    }
    return out;
}

CVec expand_from_block(const CVec& blockvec, std::span<const int> indices, int full_size) {
    CVec out = CVec::Zero(full_size);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        out[indices[i]] = blockvec[static_cast<Eigen::Index>(i)];
    }
    return out;
}

std::span<const int> cutoff_ladder() {
    static const int ladder[] = {16, 24, 36, 54, 81, 122, 183, 275};
    return {ladder, std::size(ladder)};
}

CutoffResult converged_cutoff(const std::function<double(int)>& observable,
                              double rel_tol, int max_cutoff) {
    if (rel_tol <= 0.0) {
        throw InvalidArgumentError("rel_tol must be positive");
    }
    // Below this magnitude two values are compared absolutely; avoids 0/0
    // for observables that vanish identically (e.g. the empty cavity).
    constexpr double kAbsFloor = 1e-12;

    auto ladder = cutoff_ladder();
    double prev = observable(ladder[0]);
    double before_prev = prev;
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        if (max_cutoff > 0 && ladder[i] > max_cutoff) {
            throw ConvergenceCapError(
                "cutoff ladder truncated at " + std::to_string(max_cutoff) +
                " before reaching " + std::to_string(rel_tol) + " relative change",
                prev, before_prev);
        }
        const double next = observable(ladder[i]);
        const double denom = std::max(std::abs(next), kAbsFloor);
        if (std::abs(next - prev) / denom < rel_tol ||
            (std::abs(next) < kAbsFloor && std::abs(prev) < kAbsFloor)) {
            return {ladder[i - 1], prev};
        }
        before_prev = prev;
        prev = next;
    }
    throw ConvergenceCapError("cutoff ladder exhausted without convergence",
                              prev, before_prev);
}

}  // namespace dpt

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

#include "dpt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SparseLU>

#include "dpt/errors.hpp"
#include "dpt/steadystate.hpp"

namespace dpt {

namespace {

double matrix_scale(const SpMat& a) {
    double scale = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SpMat::InnerIterator it(a, k); it; ++it) {
            scale = std::max(scale, std::abs(it.value()));
        }
    }
    return scale;
}

// Deterministic pseudo-random start vector (splitmix-style), so repeated
// solves of the same problem are bit-identical.
CVec deterministic_start(Eigen::Index size, std::uint64_t salt) {
    CVec v(size);
    std::uint64_t state = 0x853c49e6748fea9bull ^ salt;
    for (Eigen::Index i = 0; i < size; ++i) {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        const double re = double(z >> 11) / double(1ull << 53) - 0.5;
        state += 0x9e3779b97f4a7c15ull;
        z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        const double im = double(z >> 11) / double(1ull << 53) - 0.5;
        v[i] = Complex(re, im);
    }
    return v;
}

}  // namespace

DenseSpectrum dense_spectrum(const SpMat& block, int dim_cap) {
    if (block.rows() != block.cols()) {
        throw InvalidArgumentError("dense_spectrum expects a square matrix");
    }
    if (block.rows() > dim_cap) {
        throw InvalidArgumentError(
            "block dimension " + std::to_string(block.rows()) +
            " exceeds the dense cap " + std::to_string(dim_cap) +
            "; use the shift-invert path for large cutoffs");
    }
    CMat dense = CMat(block);
    Eigen::ComplexEigenSolver<CMat> solver(dense, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        throw SolverError("dense eigendecomposition failed");
    }

    const Eigen::Index n = dense.rows();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    const CVec& vals = solver.eigenvalues();
    std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
        const double ri = std::abs(vals[i].real());
        const double rj = std::abs(vals[j].real());
        if (ri != rj) return ri < rj;
        return vals[i].imag() > vals[j].imag();
    });

    DenseSpectrum out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues[k] = vals[order[k]];
        out.eigenvectors.col(k) = solver.eigenvectors().col(order[k]);
    }
    return out;
}

EigenPairs shift_invert_eigs(const SpMat& a, const ShiftInvertOptions& opts,
                             const CVec* deflate_vec,
                             const CVec* deflate_functional) {
    const Eigen::Index n = a.rows();
    if (n != a.cols()) {
        throw InvalidArgumentError("shift_invert_eigs expects a square matrix");
    }
    const int m = std::min<Eigen::Index>(opts.subspace, n);
    if (m < 2) {
        throw InvalidArgumentError("Arnoldi subspace must hold at least 2 vectors");
    }

    SpMat shifted = a;
    SpMat eye(n, n);
    eye.setIdentity();
    shifted -= opts.shift * eye;
    shifted.makeCompressed();

    Eigen::SparseLU<SpMat> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) {
        throw SolverError("sparse LU of the shifted generator failed; "
                          "shift may coincide with an eigenvalue");
    }

    Complex defl_scale = 0.0;
    if (deflate_vec && deflate_functional) {
        defl_scale = deflate_functional->dot(*deflate_vec);
        if (std::abs(defl_scale) < 1e-300) {
            throw InvalidArgumentError("deflation functional is orthogonal to the deflation vector");
        }
    }
    auto project = [&](CVec& v) {
        if (deflate_vec && deflate_functional) {
            v -= (*deflate_vec) * (deflate_functional->dot(v) / defl_scale);
        }
    };

    CVec start = deterministic_start(n, 0);
    project(start);
    start.normalize();

    double last_residual = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart <= opts.max_restarts; ++restart) {
        CMat basis(n, m + 1);
        CMat hess = CMat::Zero(m + 1, m);
        basis.col(0) = start;

        int built = m;
        for (int j = 0; j < m; ++j) {
            CVec w = lu.solve(basis.col(j));
            if (lu.info() != Eigen::Success) {
                throw SolverError("shift-invert solve failed inside Arnoldi");
            }
            project(w);
            // twice-iterated modified Gram-Schmidt
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= j; ++i) {
                    const Complex c = basis.col(i).dot(w);
                    w -= c * basis.col(i);
                    hess(i, j) += c;
                }
            }
            const double norm = w.norm();
            hess(j + 1, j) = norm;
            if (norm < 1e-14) {
                built = j + 1;  // invariant subspace found
                break;
            }
            basis.col(j + 1) = w / norm;
        }

        Eigen::ComplexEigenSolver<CMat> ritz(hess.topLeftCorner(built, built), true);
        if (ritz.info() != Eigen::Success) {
            throw SolverError("Ritz eigendecomposition failed");
        }

        std::vector<int> order(built);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int i, int j) {
            return std::abs(ritz.eigenvalues()[i]) > std::abs(ritz.eigenvalues()[j]);
        });

        EigenPairs out;
        const int n_check = std::min(built, std::max(opts.n_want * 3, 6));
        out.vectors.resize(n, 0);
        std::vector<CVec> vecs;
        for (int k = 0; k < n_check; ++k) {
            const Complex theta = ritz.eigenvalues()[order[k]];
            if (std::abs(theta) < 1e-300) {
                continue;
            }
            CVec x = basis.leftCols(built) * ritz.eigenvectors().col(order[k]);
            const double xn = x.norm();
            if (xn < 1e-300) {
                continue;
            }
            x /= xn;
            const Complex lambda = opts.shift + 1.0 / theta;
            const double resid = (a * x - lambda * x).norm();
            last_residual = std::min(last_residual, resid);
            if (resid < opts.tol) {
                out.values.push_back(lambda);
                out.residuals.push_back(resid);
                vecs.push_back(std::move(x));
                if (static_cast<int>(out.values.size()) >= opts.n_want) {
                    break;
                }
            }
        }

        if (static_cast<int>(out.values.size()) >= opts.n_want || built < m) {
            if (out.values.empty()) {
                throw SolverError("Arnoldi found an invariant subspace but no "
                                  "converged eigenpairs; last residual " +
                                  std::to_string(last_residual));
            }
            out.vectors.resize(n, static_cast<Eigen::Index>(vecs.size()));
            for (std::size_t c = 0; c < vecs.size(); ++c) {
                out.vectors.col(static_cast<Eigen::Index>(c)) = vecs[c];
            }
            return out;
        }

        // restart from the dominant unconverged Ritz direction
        start = basis.leftCols(built) * ritz.eigenvectors().col(order[0]);
        project(start);
        const double sn = start.norm();
        if (sn < 1e-300) {
            start = deterministic_start(n, restart + 1);
            project(start);
        }
        start.normalize();
    }
    throw SolverError("shift-invert Arnoldi did not converge; last residual " +
                      std::to_string(last_residual));
}

namespace {

struct GapCandidate {
    Complex value;
    double residual;
};

// smallest |Re|, conjugate ties resolved toward Im >= 0
bool better_gap(const Complex& a, const Complex& b) {
    const double ra = std::abs(a.real());
    const double rb = std::abs(b.real());
    if (std::abs(ra - rb) > 1e-14 * std::max(ra, rb)) {
        return ra < rb;
    }
    return a.imag() > b.imag();
}

}  // namespace

SpectralReport liouvillian_gaps(const Superoperator& lv, const GapOptions& opts) {
    ParityBlocks blocks = parity_blocks(lv);
    const double scale = matrix_scale(lv.matrix);
    const double zero_tol = 1e-10 * std::max(scale, 1.0);

    SpectralReport report;
    report.cutoff = lv.dim_hilbert;

    if (!opts.compute_1st && !opts.compute_ssb) {
        throw InvalidArgumentError("at least one gap must be requested");
    }

    // dense diagonalization wins only for small blocks; shift-invert takes
    // over well below the hard dense cap
    constexpr int kAutoDenseLimit = 150;
    const bool use_dense =
        opts.method == GapMethod::kDense ||
        (opts.method == GapMethod::kAuto &&
         blocks.even.rows() <= std::min<Eigen::Index>(kAutoDenseLimit, opts.dense_cap));
    if (opts.method == GapMethod::kDense && blocks.even.rows() > opts.dense_cap) {
        throw InvalidArgumentError("dense method requested above the dense cap");
    }

    if (use_dense) {
        report.method = "dense";
        if (opts.compute_1st) {
            DenseSpectrum even = dense_spectrum(blocks.even, opts.dense_cap);
            // drop the eigenvalue nearest zero (the steady state)
            Eigen::Index zero_idx = 0;
            double zero_dist = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < even.eigenvalues.size(); ++i) {
                const double d = std::abs(even.eigenvalues[i]);
                if (d < zero_dist) {
                    zero_dist = d;
                    zero_idx = i;
                }
            }
            bool have_1st = false;
            Complex best_1st;
            Eigen::Index best_1st_idx = -1;
            for (Eigen::Index i = 0; i < even.eigenvalues.size(); ++i) {
                if (i == zero_idx) continue;
                if (!have_1st || better_gap(even.eigenvalues[i], best_1st)) {
                    best_1st = even.eigenvalues[i];
                    best_1st_idx = i;
                    have_1st = true;
                }
            }
            if (!have_1st) {
                throw SolverError("even block has no eigenvalue besides the zero mode");
            }
            report.lambda_1st = best_1st;
            CVec v = even.eigenvectors.col(best_1st_idx);
            report.residual_1st = (blocks.even * v - best_1st * v).norm() / v.norm();
            report.zero_mode_ambiguous = std::abs(best_1st) < 10.0 * zero_tol;
        }
        if (opts.compute_ssb) {
            DenseSpectrum odd = dense_spectrum(blocks.odd, opts.dense_cap);
            Complex best_ssb = odd.eigenvalues[0];
            Eigen::Index best_ssb_idx = 0;
            for (Eigen::Index i = 1; i < odd.eigenvalues.size(); ++i) {
                if (better_gap(odd.eigenvalues[i], best_ssb)) {
                    best_ssb = odd.eigenvalues[i];
                    best_ssb_idx = i;
                }
            }
            report.lambda_ssb = best_ssb;
            CVec w = odd.eigenvectors.col(best_ssb_idx);
            report.residual_ssb = (blocks.odd * w - best_ssb * w).norm() / w.norm();
        }
        return report;
    }

    report.method = "shift-invert";
    ShiftInvertOptions arn = opts.arnoldi;
    if (!opts.shift_set) {
        arn.shift = Complex(-1e-6 * std::max(scale, 1.0), 0.0);
    }

    auto pick = [&](const EigenPairs& pairs, bool skip_zero) -> GapCandidate {
        bool have = false;
        GapCandidate best{};
        for (std::size_t i = 0; i < pairs.values.size(); ++i) {
            if (skip_zero && std::abs(pairs.values[i]) < zero_tol) {
                continue;  // residual zero mode leakage
            }
            if (!have || better_gap(pairs.values[i], best.value)) {
                best = {pairs.values[i], pairs.residuals[i]};
                have = true;
            }
        }
        if (!have) {
            throw SolverError("no usable eigenvalue among converged Arnoldi pairs");
        }
        return best;
    };

    if (opts.compute_1st) {
        // Deflate the steady state out of the even block; the trace
        // functional restricted to the block is its left eigenvector.
        SteadyStateOptions ss_opts;
        ss_opts.check_degeneracy = false;
        SteadyStateResult ss = steady_state(lv, ss_opts);
        CVec rho_vec = vectorize(ss.rho);
        CVec defl = restrict_to_block(rho_vec, blocks.even_indices);
        CVec trace_fn = CVec::Zero(defl.size());
        for (std::size_t i = 0; i < blocks.even_indices.size(); ++i) {
            const int idx = blocks.even_indices[i];
            const int row = idx % lv.dim_hilbert;
            const int col = idx / lv.dim_hilbert;
            if (row == col) {
                trace_fn[static_cast<Eigen::Index>(i)] = 1.0;
            }
        }
        EigenPairs even_pairs = shift_invert_eigs(blocks.even, arn, &defl, &trace_fn);
        GapCandidate g1 = pick(even_pairs, /*skip_zero=*/true);
        report.lambda_1st = g1.value;
        report.residual_1st = g1.residual;
        report.zero_mode_ambiguous = std::abs(g1.value) < 10.0 * zero_tol;
    }
    if (opts.compute_ssb) {
        EigenPairs odd_pairs = shift_invert_eigs(blocks.odd, arn);
        GapCandidate gs = pick(odd_pairs, /*skip_zero=*/false);
        report.lambda_ssb = gs.value;
        report.residual_ssb = gs.residual;
    }
    return report;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600, 0.0, 7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

}  // namespace

std::vector<CVec> evolve_master(const Superoperator& lv, const CMat& rho0,
                                std::span<const double> times,
                                const EvolveOptions& opts) {
    if (times.empty()) {
        return {};
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] <= times[i - 1]) {
            throw InvalidArgumentError("output times must be strictly increasing");
        }
    }
    if (times[0] < 0.0) {
        throw InvalidArgumentError("output times must be non-negative");
    }

    const SpMat& gen = lv.matrix;
    CVec y = vectorize(rho0);
    double t = 0.0;

    const double scale = matrix_scale(gen);
    double h = scale > 0.0 ? 0.1 / scale : (times.back() - t) / 100.0;
    if (opts.max_step > 0.0) {
        h = std::min(h, opts.max_step);
    }
    const double t_end = times.back();
    const double h_min = std::max(t_end * 1e-15, 1e-300);

    std::vector<CVec> output;
    output.reserve(times.size());
    std::size_t next_out = 0;
    CVec k[7];
    k[0] = gen * y;  // FSAL

    while (next_out < times.size()) {
        const double target = times[next_out];
        if (t >= target - h_min) {
            CMat rho = devectorize(y);
            const double trace_err = std::abs(rho.trace() - Complex(1.0, 0.0));
            const double herm_err = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
            if (trace_err > 1e-8 || herm_err > 1e-8) {
                throw SolverError("trace/Hermiticity drifted (trace " +
                                  std::to_string(trace_err) + ", herm " +
                                  std::to_string(herm_err) + ") at t = " +
                                  std::to_string(t));
            }
            output.push_back(y);
            ++next_out;
            continue;
        }
        double step = std::min(h, target - t);
        bool accepted = false;
        while (!accepted) {
            if (step < h_min) {
                throw SolverError("adaptive integrator step underflow at t = " +
                                  std::to_string(t));
            }
            for (int s = 1; s < 7; ++s) {
                CVec ys = y;
                for (int j = 0; j < s; ++j) {
                    if (kA[s][j] != 0.0) {
                        ys += (step * kA[s][j]) * k[j];
                    }
                }
                k[s] = gen * ys;
            }
            CVec y5 = y;
            CVec err = CVec::Zero(y.size());
            for (int s = 0; s < 7; ++s) {
                if (kB5[s] != 0.0) {
                    y5 += (step * kB5[s]) * k[s];
                }
                const double db = kB5[s] - kB4[s];
                if (db != 0.0) {
                    err += (step * db) * k[s];
                }
            }
            double err_norm = 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double sc = opts.atol +
                                  opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
                err_norm += std::norm(err[i]) / (sc * sc);
            }
            err_norm = std::sqrt(err_norm / double(y.size()));

            if (err_norm <= 1.0) {
                t += step;
                y = std::move(y5);
                k[0] = k[6];  // FSAL: last stage is the derivative at the new point
                accepted = true;
                double factor = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
                factor = std::clamp(factor, 0.2, 5.0);
                h = step * factor;
                if (opts.max_step > 0.0) {
                    h = std::min(h, opts.max_step);
                }
            } else {
                double factor = std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 0.9);
                step *= factor;
            }
        }
    }
    return output;
}

std::vector<double> evolve_observable(const Superoperator& lv, const CMat& rho0,
                                      const SpMat& op, std::span<const double> times,
                                      const EvolveOptions& opts) {
    std::vector<CVec> states = evolve_master(lv, rho0, times, opts);
    std::vector<double> out;
    out.reserve(states.size());
    for (const CVec& v : states) {
        out.push_back(expectation(devectorize(v), op).real());
    }
    return out;
}

SpectralDynamicsResult spectral_dynamics(const Superoperator& lv, const CMat& rho0,
                                         const SpMat& op, std::span<const double> times,
                                         double cond_threshold) {
    SpectralDynamicsResult result;
    const Eigen::Index size = lv.matrix.rows();
    if (size > 4096) {
        throw InvalidArgumentError("spectral_dynamics needs a dense eigendecomposition; "
                                   "dimension too large");
    }
    DenseSpectrum spec = dense_spectrum(lv.matrix, 4096);

    Eigen::PartialPivLU<CMat> lu(spec.eigenvectors);
    CMat inv = lu.inverse();
    const double cond = spec.eigenvectors.cwiseAbs().rowwise().sum().maxCoeff() *
                        inv.cwiseAbs().rowwise().sum().maxCoeff();
    result.condition_estimate = cond;
    if (!std::isfinite(cond) || cond > cond_threshold) {
        result.fell_back = true;
        result.values = evolve_observable(lv, rho0, op, times);
        return result;
    }

    CVec c = inv * vectorize(rho0);
    // Tr(O rho_j) per eigenmatrix
    CVec weights(size);
    for (Eigen::Index j = 0; j < size; ++j) {
        weights[j] = expectation(devectorize(spec.eigenvectors.col(j)), op);
    }
    result.values.reserve(times.size());
    for (double t : times) {
        Complex acc = 0.0;
        for (Eigen::Index j = 0; j < size; ++j) {
            acc += c[j] * std::exp(spec.eigenvalues[j] * t) * weights[j];
        }
        result.values.push_back(acc.real());
    }
    return result;
}

}  // namespace dpt

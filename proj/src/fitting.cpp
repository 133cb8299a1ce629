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

#include "dpt/fitting.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "dpt/errors.hpp"

namespace dpt {

LinearFit linear_least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidArgumentError("linear fit needs >= 2 matched points");
    }
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) {
        throw InvalidArgumentError("linear fit is degenerate: x values coincide");
    }
    LinearFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;

    double ss_res = 0.0;
    const double y_mean = sy / n;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
        ss_tot += (y[i] - y_mean) * (y[i] - y_mean);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    const double sigma2 = x.size() > 2 ? ss_res / (n - 2.0) : 0.0;
    fit.slope_stderr = std::sqrt(sigma2 * n / denom);
    fit.intercept_stderr = std::sqrt(sigma2 * sxx / denom);
    return fit;
}

GeneralLinearFit linear_solve(const RMat& design, const RVec& y) {
    if (design.rows() != y.size() || design.rows() < design.cols()) {
        throw InvalidArgumentError("linear_solve needs at least as many rows as columns");
    }
    RMat gram = design.transpose() * design;
    Eigen::LDLT<RMat> ldlt(gram);
    if (ldlt.info() != Eigen::Success) {
        throw SolverError("normal equations are singular");
    }
    GeneralLinearFit fit;
    fit.beta = ldlt.solve(design.transpose() * y);
    RVec resid = y - design * fit.beta;
    fit.chi2 = resid.squaredNorm();
    const double dof = double(design.rows() - design.cols());
    const double sigma2 = dof > 0 ? fit.chi2 / dof : 0.0;
    fit.covariance = sigma2 * ldlt.solve(RMat::Identity(design.cols(), design.cols()));
    return fit;
}

LMResult levenberg_marquardt(const std::function<RVec(const RVec&)>& residuals,
                             RVec initial, const LMOptions& opts) {
    LMResult result;
    RVec p = std::move(initial);
    RVec r = residuals(p);
    double chi2 = r.squaredNorm();
    double lambda = opts.lambda0;
    const int n_params = static_cast<int>(p.size());

    RMat jac(r.size(), n_params);
    bool jacobian_fresh = false;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        result.iterations = iter + 1;
        if (!jacobian_fresh) {
            for (int j = 0; j < n_params; ++j) {
                // parameters are expected O(1)-scaled; the +1 keeps the
                // step alive for parameters passing through zero
                const double h = opts.step_rel * (std::abs(p[j]) + 1.0);
                RVec pj = p;
                pj[j] += h;
                jac.col(j) = (residuals(pj) - r) / h;
            }
            jacobian_fresh = true;
        }
        RMat jtj = jac.transpose() * jac;
        RVec jtr = jac.transpose() * r;
        RMat damped = jtj;
        for (int j = 0; j < n_params; ++j) {
            damped(j, j) += lambda * std::max(jtj(j, j), 1e-12);
        }
        Eigen::LDLT<RMat> ldlt(damped);
        if (ldlt.info() != Eigen::Success) {
            lambda *= 10.0;
            continue;
        }
        RVec step = ldlt.solve(-jtr);
        RVec p_new = p + step;
        RVec r_new = residuals(p_new);
        const double chi2_new = r_new.squaredNorm();
        if (chi2_new < chi2) {
            const double improvement = chi2 - chi2_new;
            p = p_new;
            r = r_new;
            chi2 = chi2_new;
            lambda = std::max(lambda * 0.3, 1e-12);
            jacobian_fresh = false;
            if (improvement < opts.ftol * std::max(chi2, 1e-300) ||
                step.norm() < 1e-14 * std::max(1.0, p.norm())) {
                result.converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) {
                // stalled: no damped step improves the objective
                result.converged = false;
                break;
            }
        }
    }

    result.params = p;
    result.chi2 = chi2;
    // covariance from the undamped Gauss-Newton approximation
    for (int j = 0; j < n_params; ++j) {
        const double h = opts.step_rel * (std::abs(p[j]) + 1.0);
        RVec pj = p;
        pj[j] += h;
        jac.col(j) = (residuals(pj) - r) / h;
    }
    RMat jtj = jac.transpose() * jac;
    Eigen::FullPivLU<RMat> lu(jtj);
    const double dof = double(r.size() - n_params);
    const double sigma2 = dof > 0 ? chi2 / dof : 0.0;
    if (lu.isInvertible()) {
        result.covariance = sigma2 * lu.inverse();
    } else {
        result.covariance = RMat::Constant(n_params, n_params,
                                           std::numeric_limits<double>::quiet_NaN());
    }
    return result;
}

}  // namespace dpt
